//! Pointwise and integral checks of the global-existence and blow-up
//! hypotheses on sampled initial data.
//!
//! Sign conditions are checked at the grid nodes only; nothing is claimed
//! about the data between nodes.

use serde::{Deserialize, Serialize};

use super::grid::{compact_support_radius, derivative};
use super::Scenario;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Theorem {
    /// Global existence.
    #[serde(rename = "THM1")]
    GlobalExistence,
    /// Degeneracy in finite time.
    #[serde(rename = "THM2")]
    Degeneracy,
    /// Gradient blow-up in finite time.
    #[serde(rename = "THM3")]
    GradientBlowup,
}

impl Theorem {
    pub const ALL: [Theorem; 3] = [Theorem::GlobalExistence, Theorem::Degeneracy, Theorem::GradientBlowup];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Condition {
    /// `u0 > theta0` everywhere.
    #[serde(rename = "INICON1")]
    Positivity,
    /// `u1 +- c(u0) u0' <= 0`.
    #[serde(rename = "INICON2")]
    IncomingSigns,
    /// `-int u1 < int_{theta0}^0 c`.
    #[serde(rename = "INICON3")]
    MassBelowPrimitive,
    /// Data supported in `[-K, K]`.
    #[serde(rename = "INICON4")]
    CompactSupport,
    /// `-int u1 > -2 theta0 c(0)`.
    #[serde(rename = "INICON5")]
    MassAboveDegeneracy,
    /// `c' > 0`.
    #[serde(rename = "INICON6")]
    StrictlyIncreasingSpeed,
    /// Data supported in `[-K, K]`.
    #[serde(rename = "INICON7")]
    CompactSupportOutgoing,
    /// `u1 +- c(u0) u0' >= 0`.
    #[serde(rename = "INICON8")]
    OutgoingSigns,
    /// `c' >= 0`.
    #[serde(rename = "CON2")]
    NondecreasingSpeed,
    /// `c > 0` above `theta0`.
    #[serde(rename = "CON4")]
    PositiveSpeed,
    /// `(u0, u1)` not identically zero.
    #[serde(rename = "NONTRIVIAL")]
    Nontrivial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionRecord {
    pub condition: Condition,
    pub satisfied: bool,
    /// Signed worst-case slack; negative means violated.
    pub margin: f64,
    /// Grid position of the worst case, for pointwise conditions.
    pub location: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub theorem: Theorem,
    pub tolerance: f64,
    pub conditions: Vec<ConditionRecord>,
}

impl HypothesisReport {
    pub fn all_satisfied(&self) -> bool {
        self.conditions.iter().all(|c| c.satisfied)
    }

    pub fn get(&self, condition: Condition) -> Option<&ConditionRecord> {
        self.conditions.iter().find(|c| c.condition == condition)
    }

    pub fn satisfied(&self, condition: Condition) -> bool {
        self.get(condition).is_some_and(|c| c.satisfied)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ConditionRecord> {
        self.conditions.iter().filter(|c| !c.satisfied)
    }
}

struct Ctx<'a> {
    s: &'a Scenario,
    r1: Vec<f64>,
    r2: Vec<f64>,
    tol: f64,
    mass: f64,
}

impl Ctx<'_> {
    fn record(&self, condition: Condition, margin: f64, location: Option<f64>) -> ConditionRecord {
        ConditionRecord {
            condition,
            satisfied: margin >= -self.tol,
            margin,
            location,
            note: None,
        }
    }

    fn positivity(&self) -> ConditionRecord {
        let i = self.s.u0.argmin();
        let margin = self.s.u0.values()[i] - self.s.model.theta0();
        ConditionRecord {
            satisfied: margin > 0.0,
            ..self.record(Condition::Positivity, margin, Some(self.s.grid.x(i)))
        }
    }

    fn signs(&self, condition: Condition, nonpositive: bool) -> ConditionRecord {
        let mut worst = f64::INFINITY;
        let mut at = 0;
        for (i, (&a, &b)) in self.r1.iter().zip(&self.r2).enumerate() {
            let slack = if nonpositive { -a.max(b) } else { a.min(b) };
            if slack < worst {
                worst = slack;
                at = i;
            }
        }
        self.record(condition, worst, Some(self.s.grid.x(at)))
    }

    fn speed_probe(&self) -> Vec<f64> {
        let model = &self.s.model;
        let mut pts = model.probe_points();
        let (lo, hi) = (self.s.u0.min(), self.s.u0.max().max(0.0));
        for k in 0..=32 {
            pts.push(lo + (hi - lo) * k as f64 / 32.0);
        }
        pts.retain(|&t| t > model.theta0());
        pts
    }

    fn speed_condition(&self, condition: Condition) -> ConditionRecord {
        let model = &self.s.model;
        let mut worst = f64::INFINITY;
        let mut worst_theta = f64::NAN;
        for theta in self.speed_probe() {
            let v = match condition {
                Condition::PositiveSpeed => model.eval(theta),
                _ => model.derivative(theta),
            }
            .unwrap_or(f64::NEG_INFINITY);
            if v < worst {
                worst = v;
                worst_theta = theta;
            }
        }
        let mut rec = self.record(condition, worst, None);
        if matches!(condition, Condition::PositiveSpeed | Condition::StrictlyIncreasingSpeed) {
            rec.satisfied = worst > 0.0;
        }
        rec.note = Some(format!("worst at theta = {worst_theta}"));
        rec
    }

    fn mass_below_primitive(&self) -> ConditionRecord {
        let model = &self.s.model;
        if !model.degenerates() {
            return ConditionRecord {
                note: Some("vacuous: the speed never degenerates".into()),
                ..self.record(Condition::MassBelowPrimitive, f64::INFINITY, None)
            };
        }
        match model.primitive(model.theta0(), 0.0) {
            Ok(threshold) => {
                let margin = threshold - self.mass;
                ConditionRecord {
                    satisfied: margin > 0.0,
                    note: Some(format!("-int u1 = {}, threshold = {threshold}", self.mass)),
                    ..self.record(Condition::MassBelowPrimitive, margin, None)
                }
            }
            Err(e) => ConditionRecord {
                satisfied: false,
                note: Some(e.to_string()),
                ..self.record(Condition::MassBelowPrimitive, f64::NAN, None)
            },
        }
    }

    fn mass_above_degeneracy(&self) -> ConditionRecord {
        let model = &self.s.model;
        if !model.degenerates() {
            return ConditionRecord {
                satisfied: false,
                note: Some("requires a finite theta0".into()),
                ..self.record(Condition::MassAboveDegeneracy, f64::NEG_INFINITY, None)
            };
        }
        let threshold = -2.0 * model.theta0() * model.c_at_zero();
        let margin = self.mass - threshold;
        ConditionRecord {
            satisfied: margin > 0.0,
            note: Some(format!("-int u1 = {}, threshold = {threshold}", self.mass)),
            ..self.record(Condition::MassAboveDegeneracy, margin, None)
        }
    }

    fn support(&self, condition: Condition) -> ConditionRecord {
        let radius = compact_support_radius(&self.s.u0, 0.0).max(compact_support_radius(&self.s.u1, 0.0));
        let edge_free = radius < self.s.grid.extent() - self.s.grid.dx();
        let mut rec = self.record(condition, self.s.support_radius - radius, Some(radius));
        if !edge_free {
            rec.satisfied = false;
            rec.note = Some("data reach the edge of the grid".into());
        }
        rec
    }

    fn nontrivial(&self) -> ConditionRecord {
        let margin = self.s.u0.max_abs().max(self.s.u1.max_abs());
        ConditionRecord {
            satisfied: margin > 0.0,
            ..self.record(Condition::Nontrivial, margin, None)
        }
    }
}

/// Evaluates every hypothesis of `theorem` on the sampled data.
pub fn check_hypotheses(s: &Scenario, theorem: Theorem) -> HypothesisReport {
    let du = derivative(&s.u0);
    let mut r1 = Vec::with_capacity(s.grid.n());
    let mut r2 = Vec::with_capacity(s.grid.n());
    let mut flux_scale: f64 = 0.0;
    for ((&u, &ux), &ut) in s.u0.values().iter().zip(du.values()).zip(s.u1.values()) {
        let cux = s.model.sample(u).value() * ux;
        flux_scale = flux_scale.max(cux.abs());
        r1.push(ut + cux);
        r2.push(ut - cux);
    }
    let scale = 1f64.max(s.u1.max_abs()).max(flux_scale);
    let ctx = Ctx {
        s,
        r1,
        r2,
        tol: 1e-12 * scale,
        mass: -s.u1.integral(),
    };
    let conditions = match theorem {
        Theorem::GlobalExistence => vec![
            ctx.speed_condition(Condition::PositiveSpeed),
            ctx.speed_condition(Condition::NondecreasingSpeed),
            ctx.positivity(),
            ctx.signs(Condition::IncomingSigns, true),
            ctx.mass_below_primitive(),
        ],
        Theorem::Degeneracy => vec![
            ctx.speed_condition(Condition::PositiveSpeed),
            ctx.speed_condition(Condition::NondecreasingSpeed),
            ctx.positivity(),
            ctx.signs(Condition::IncomingSigns, true),
            ctx.support(Condition::CompactSupport),
            ctx.mass_above_degeneracy(),
        ],
        Theorem::GradientBlowup => vec![
            ctx.speed_condition(Condition::PositiveSpeed),
            ctx.positivity(),
            ctx.speed_condition(Condition::StrictlyIncreasingSpeed),
            ctx.support(Condition::CompactSupportOutgoing),
            ctx.signs(Condition::OutgoingSigns, false),
            ctx.nontrivial(),
        ],
    };
    HypothesisReport {
        theorem,
        tolerance: ctx.tol,
        conditions,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::initial_data::{Field, Grid, Profile};
    use crate::wavespeed::WaveSpeedModel;

    fn zabusky_scenario(u0: Profile, u1: Profile) -> Scenario {
        let g = Grid::centered(4.0, 800).unwrap();
        Scenario::from_profiles(WaveSpeedModel::zabusky(2.0).unwrap(), g, &u0, &u1).unwrap()
    }

    #[test]
    fn global_existence_mass_margin() {
        let s = zabusky_scenario(Profile::Zero, Profile::bump_with_mass(-0.375, 1.0));
        let r = check_hypotheses(&s, Theorem::GlobalExistence);
        assert!(r.all_satisfied(), "{r:?}");
        let m = r.get(Condition::MassBelowPrimitive).unwrap();
        assert!((m.margin - 0.125).abs() < 1e-9);
    }

    #[test]
    fn degeneracy_mass_margin() {
        let s = zabusky_scenario(Profile::Zero, Profile::bump_with_mass(-4.0, 1.0));
        let r = check_hypotheses(&s, Theorem::Degeneracy);
        assert!(r.all_satisfied(), "{r:?}");
        assert!((r.get(Condition::MassAboveDegeneracy).unwrap().margin - 2.0).abs() < 1e-9);
        // the same data violate the global-existence mass condition
        let r1 = check_hypotheses(&s, Theorem::GlobalExistence);
        assert!(!r1.satisfied(Condition::MassBelowPrimitive));
        assert!(r1.satisfied(Condition::IncomingSigns));
    }

    #[test]
    fn zero_data_are_trivial_for_blowup() {
        let s = zabusky_scenario(Profile::Zero, Profile::Zero);
        let r = check_hypotheses(&s, Theorem::GradientBlowup);
        assert!(!r.satisfied(Condition::Nontrivial));
        assert!(r.satisfied(Condition::OutgoingSigns));
    }

    #[test]
    fn outgoing_bump_satisfies_blowup_hypotheses() {
        let s = zabusky_scenario(Profile::Zero, Profile::Bump { amplitude: 1.0, radius: 1.0 });
        let r = check_hypotheses(&s, Theorem::GradientBlowup);
        assert!(r.all_satisfied(), "{r:?}");
        assert!(!check_hypotheses(&s, Theorem::GlobalExistence).satisfied(Condition::IncomingSigns));
    }

    #[test]
    fn sign_violation_is_located() {
        // u0 bump at rest: R1 = -R2, so one of them is positive somewhere
        let s = zabusky_scenario(Profile::Bump { amplitude: 0.5, radius: 1.0 }, Profile::Zero);
        let r = check_hypotheses(&s, Theorem::GlobalExistence);
        let rec = r.get(Condition::IncomingSigns).unwrap();
        assert!(!rec.satisfied);
        assert!(rec.location.unwrap().abs() < 1.0);
    }

    #[test]
    fn constant_speed_is_not_strictly_increasing() {
        let g = Grid::centered(4.0, 200).unwrap();
        let s = Scenario::new(
            WaveSpeedModel::constant(1.0).unwrap(),
            Field::zeros(g),
            Field::constant(g, 0.0),
            0.0,
        )
        .unwrap();
        let r = check_hypotheses(&s, Theorem::GradientBlowup);
        assert!(!r.satisfied(Condition::StrictlyIncreasingSpeed));
        let r1 = check_hypotheses(&s, Theorem::GlobalExistence);
        assert!(r1.satisfied(Condition::MassBelowPrimitive));
        assert!(r1.satisfied(Condition::NondecreasingSpeed));
        let r2 = check_hypotheses(&s, Theorem::Degeneracy);
        assert!(!r2.satisfied(Condition::MassAboveDegeneracy));
    }

    #[test]
    fn mass_margins_are_monotone_in_scaling() {
        let mut last1 = f64::INFINITY;
        let mut last2 = f64::NEG_INFINITY;
        for lambda in [1.0, 1.5, 2.0, 4.0, 10.0] {
            let s = zabusky_scenario(Profile::Zero, Profile::bump_with_mass(-0.3 * lambda, 1.0));
            let m1 = check_hypotheses(&s, Theorem::GlobalExistence)
                .get(Condition::MassBelowPrimitive)
                .unwrap()
                .margin;
            let m2 = check_hypotheses(&s, Theorem::Degeneracy)
                .get(Condition::MassAboveDegeneracy)
                .unwrap()
                .margin;
            assert!(m1 < last1 && m2 > last2);
            last1 = m1;
            last2 = m2;
        }
    }
}
