//! Per-record diagnostics, runtime checks of the a-priori estimates, stop
//! classification and Riccati blow-up time estimates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flux_solver::{gradients_flux, invariants_flux, momentum_total, FluxState};
use crate::initial_data::grid::{max_abs, trapezoid};
use crate::initial_data::{compact_support_radius, Condition, HypothesisReport, Scenario, Theorem};
use crate::riemann_solver::RiemannState;
use crate::wavespeed::WaveSpeedModel;

/// Values below this magnitude count as outside the support.
pub const SUPPORT_TOLERANCE: f64 = 1e-12;
/// Fraction of the records used by the default Riccati fit.
pub const DEFAULT_WINDOW_FRACTION: f64 = 0.3;
pub const MIN_FIT_RECORDS: usize = 8;

const SIGN_TOLERANCE: f64 = 1e-8;
const LP_TOLERANCE: f64 = 1e-6;
const LINF_TOLERANCE: f64 = 1e-3;
const THETA1_TOLERANCE: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub min_u: f64,
    /// Node where `min_u` is attained.
    pub x_min_u: f64,
    pub min_c: f64,
    pub max_abs_r1: f64,
    pub max_abs_r2: f64,
    pub min_r1: f64,
    pub max_r1: f64,
    pub min_r2: f64,
    pub max_r2: f64,
    /// `||u_t||_inf + ||u_x||_inf`.
    pub linf_ut_ux: f64,
    pub lp1: f64,
    pub lp2: f64,
    pub lp4: f64,
    pub momentum: f64,
    pub support_radius: f64,
}

impl DiagnosticsRecord {
    /// `||R1||_p^p + ||R2||_p^p` for `p` in {1, 2, 4}.
    pub fn lp(&self, p: u32) -> Option<f64> {
        match p {
            1 => Some(self.lp1),
            2 => Some(self.lp2),
            4 => Some(self.lp4),
            _ => None,
        }
    }

    pub fn max_abs_r(&self) -> f64 {
        self.max_abs_r1.max(self.max_abs_r2)
    }

    pub fn linf_sum(&self) -> f64 {
        self.max_abs_r1 + self.max_abs_r2
    }
}

fn nan_max_abs(v: &[f64]) -> f64 {
    if v.iter().any(|x| x.is_nan()) {
        f64::NAN
    } else {
        max_abs(v)
    }
}

fn range(v: &[f64]) -> (f64, f64) {
    v.iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)))
}

fn lp_pair(r1: &[f64], r2: &[f64], p: i32, dx: f64) -> f64 {
    let pow = |v: &[f64]| v.iter().map(|x| x.abs().powi(p)).collect::<Vec<_>>();
    trapezoid(&pow(r1), dx) + trapezoid(&pow(r2), dx)
}

fn assemble(
    t: f64,
    u: &[f64],
    r1: &[f64],
    r2: &[f64],
    ut: &[f64],
    ux: &[f64],
    momentum: f64,
    support_radius: f64,
    model: &WaveSpeedModel,
    x_of: impl Fn(usize) -> f64,
    dx: f64,
) -> DiagnosticsRecord {
    let (mut i_min, mut min_u) = (0, f64::INFINITY);
    for (i, &v) in u.iter().enumerate() {
        if v < min_u || v.is_nan() {
            i_min = i;
            min_u = v;
            if v.is_nan() {
                break;
            }
        }
    }
    let min_c = if min_u.is_nan() {
        0.0
    } else {
        u.iter().map(|&v| model.sample(v).value()).fold(f64::INFINITY, f64::min)
    };
    let (min_r1, max_r1) = range(r1);
    let (min_r2, max_r2) = range(r2);
    DiagnosticsRecord {
        t,
        min_u,
        x_min_u: x_of(i_min),
        min_c,
        max_abs_r1: nan_max_abs(r1),
        max_abs_r2: nan_max_abs(r2),
        min_r1,
        max_r1,
        min_r2,
        max_r2,
        linf_ut_ux: nan_max_abs(ut) + nan_max_abs(ux),
        lp1: lp_pair(r1, r2, 1, dx),
        lp2: lp_pair(r1, r2, 2, dx),
        lp4: lp_pair(r1, r2, 4, dx),
        momentum,
        support_radius,
    }
}

/// Diagnostics of a Riemann-solver state. Where `c(u)` vanishes `u_x` is
/// reported as infinite unless `R1 = R2` there.
pub fn record_riemann(state: &RiemannState, model: &WaveSpeedModel) -> DiagnosticsRecord {
    let g = *state.grid();
    let r1 = state.r1.values();
    let r2 = state.r2.values();
    let mut ut = Vec::with_capacity(g.n());
    let mut ux = Vec::with_capacity(g.n());
    for i in 0..g.n() {
        let c = model.sample(state.u.values()[i]).value();
        let diff = r1[i] - r2[i];
        ut.push(0.5 * (r1[i] + r2[i]));
        ux.push(if c > 0.0 {
            diff / (2.0 * c)
        } else if diff == 0.0 {
            0.0
        } else {
            f64::INFINITY
        });
    }
    let momentum = trapezoid(&ut, g.dx());
    assemble(
        state.t,
        state.u.values(),
        r1,
        r2,
        &ut,
        &ux,
        momentum,
        compact_support_radius(&state.u, SUPPORT_TOLERANCE),
        model,
        |i| g.x(i),
        g.dx(),
    )
}

/// Diagnostics of a leapfrog state; the invariants are rebuilt from the
/// difference quotients.
pub fn record_flux(state: &FluxState, model: &WaveSpeedModel) -> DiagnosticsRecord {
    let g = *state.grid();
    let (ut, ux) = gradients_flux(state);
    let (r1, r2) = invariants_flux(state, model);
    assemble(
        state.t,
        state.u_curr.values(),
        &r1,
        &r2,
        ut.values(),
        ux.values(),
        momentum_total(state).value,
        compact_support_radius(&state.u_curr, SUPPORT_TOLERANCE),
        model,
        |i| g.x(i),
        g.dx(),
    )
}

/// Lower bound `theta1` with `int_{theta1}^0 c = -int u1`, below which
/// `u` never drops when the global-existence hypotheses hold.
pub fn theta1_floor(s: &Scenario) -> Result<f64> {
    theta1_floor_for_mass(&s.model, -s.u1.integral())
}

pub fn theta1_floor_for_mass(model: &WaveSpeedModel, mass: f64) -> Result<f64> {
    if !(mass >= 0.0) {
        return Err(Error::NotApplicable(format!("-int u1 = {mass} is negative")));
    }
    if mass == 0.0 {
        return Ok(0.0);
    }
    let theta0 = model.theta0();
    let mut lo = if theta0.is_finite() {
        let cap = model.primitive(theta0, 0.0)?;
        if mass >= cap {
            return Err(Error::NotApplicable(format!(
                "-int u1 = {mass} is not below int_theta0^0 c = {cap}"
            )));
        }
        theta0
    } else {
        let mut lo = -1.0;
        while model.primitive(lo, 0.0)? <= mass {
            lo *= 2.0;
            if !lo.is_finite() {
                return Err(Error::NotApplicable("primitive stays below the mass".into()));
            }
        }
        lo
    };
    let mut hi = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if model.primitive(mid, 0.0)? > mass {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Monitor {
    SignPreservation,
    LpMonotone,
    LinfFactor2,
    Theta1Floor,
    FiniteSpeed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub monitor: Monitor,
    /// Exponent for `LP_MONOTONE`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<u32>,
    pub t: f64,
    /// Amount by which the bound is exceeded.
    pub magnitude: f64,
}

/// Run constants the monitors compare against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonitorContext {
    /// Initial `max(|R1|, |R2|)`, floored at 1.
    pub scale: f64,
    pub theta1: Option<f64>,
    pub support_radius: f64,
    pub c_max: f64,
    pub dx: f64,
}

impl MonitorContext {
    pub fn for_scenario(s: &Scenario, initial_sup: f64) -> Self {
        Self {
            scale: initial_sup.max(1.0),
            theta1: theta1_floor(s).ok(),
            support_radius: s.support_radius,
            c_max: s.c_max(),
            dx: s.grid.dx(),
        }
    }
}

/// Which monitors apply, decided from the hypothesis reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct MonitorPlan {
    pub signs_nonpositive: bool,
    pub signs_nonnegative: bool,
    pub lp_and_linf: bool,
    pub theta1: bool,
    pub finite_speed: bool,
}

impl MonitorPlan {
    pub fn from_reports(reports: &[HypothesisReport]) -> Self {
        let cond = |c: Condition| reports.iter().any(|r| r.satisfied(c));
        let holds = |t: Theorem| reports.iter().any(|r| r.theorem == t && r.all_satisfied());
        let nondecreasing = cond(Condition::NondecreasingSpeed) || cond(Condition::StrictlyIncreasingSpeed);
        let incoming = cond(Condition::IncomingSigns) && nondecreasing;
        Self {
            signs_nonpositive: incoming,
            signs_nonnegative: cond(Condition::OutgoingSigns) && nondecreasing,
            lp_and_linf: incoming,
            theta1: holds(Theorem::GlobalExistence),
            finite_speed: holds(Theorem::Degeneracy),
        }
    }
}

impl MonitorPlan {
    /// The leapfrog invariants are difference quotients that oscillate at
    /// grid scale, so the sign and norm checks on `R` do not apply to them.
    pub fn for_flux(self) -> Self {
        Self {
            signs_nonpositive: false,
            signs_nonnegative: false,
            lp_and_linf: false,
            ..self
        }
    }

    /// Upwind diffusion leaves tails above the support tolerance ahead of
    /// the characteristic cone, so support is only checked on flux runs.
    pub fn for_riemann(self) -> Self {
        Self {
            finite_speed: false,
            ..self
        }
    }
}

/// Checks every applicable monitor over the records of one run.
pub fn check_invariant_monitors(
    history: &[DiagnosticsRecord],
    reports: &[HypothesisReport],
    ctx: &MonitorContext,
) -> Vec<Violation> {
    check_with_plan(history, &MonitorPlan::from_reports(reports), ctx)
}

pub fn check_with_plan(history: &[DiagnosticsRecord], plan: &MonitorPlan, ctx: &MonitorContext) -> Vec<Violation> {
    let mut out = Vec::new();
    let Some(first) = history.first() else {
        return out;
    };
    let push = |out: &mut Vec<Violation>, monitor, p, t, magnitude: f64| {
        out.push(Violation { monitor, p, t, magnitude });
    };
    let sign_tol = SIGN_TOLERANCE * ctx.scale;
    let linf_bound = 2.0 * first.linf_sum() * (1.0 + LINF_TOLERANCE);
    for (k, rec) in history.iter().enumerate() {
        if plan.signs_nonpositive {
            let excess = rec.max_r1.max(rec.max_r2);
            if !(excess <= sign_tol) {
                push(&mut out, Monitor::SignPreservation, None, rec.t, excess);
            }
        }
        if plan.signs_nonnegative {
            let excess = -rec.min_r1.min(rec.min_r2);
            if !(excess <= sign_tol) {
                push(&mut out, Monitor::SignPreservation, None, rec.t, excess);
            }
        }
        if plan.lp_and_linf {
            if k > 0 {
                let prev = &history[k - 1];
                for p in [1u32, 2, 4] {
                    let allowed = LP_TOLERANCE * ctx.scale.powi(p as i32) * (rec.t - prev.t);
                    let growth = rec.lp(p).unwrap() - prev.lp(p).unwrap();
                    if !(growth <= allowed) {
                        push(&mut out, Monitor::LpMonotone, Some(p), rec.t, growth - allowed);
                    }
                }
            }
            if !(rec.linf_sum() <= linf_bound) {
                push(&mut out, Monitor::LinfFactor2, None, rec.t, rec.linf_sum() - linf_bound);
            }
        }
        if plan.theta1 {
            if let Some(theta1) = ctx.theta1 {
                let floor = theta1 - THETA1_TOLERANCE;
                if !(rec.min_u >= floor) {
                    push(&mut out, Monitor::Theta1Floor, None, rec.t, floor - rec.min_u);
                }
            }
        }
        if plan.finite_speed {
            let cone = ctx.support_radius + ctx.c_max * rec.t;
            let bound = cone + 2.0 * ctx.dx;
            if !(rec.support_radius <= bound) {
                push(&mut out, Monitor::FiniteSpeed, None, rec.t, rec.support_radius - bound);
            }
            if rec.min_u < -SUPPORT_TOLERANCE && !(rec.x_min_u.abs() <= cone) {
                push(&mut out, Monitor::FiniteSpeed, None, rec.t, rec.x_min_u.abs() - cone);
            }
        }
    }
    out
}

/// How a run ended.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RunEnd {
    Horizon { t_end: f64 },
    Stopped { degenerate: bool, blowup: bool },
    Failed { reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub eps_deg: f64,
    pub m_blow: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RunClassification {
    GlobalWindow { t_end: f64 },
    Degenerate { t_stop: f64, x_min_location: f64 },
    GradientBlowup { t_stop: f64, t_estimate: Option<f64> },
    Inconclusive { reason: String },
}

impl RunClassification {
    pub fn label(&self) -> &'static str {
        match self {
            RunClassification::GlobalWindow { .. } => "GLOBAL_WINDOW",
            RunClassification::Degenerate { .. } => "DEGENERATE",
            RunClassification::GradientBlowup { .. } => "GRADIENT_BLOWUP",
            RunClassification::Inconclusive { .. } => "INCONCLUSIVE",
        }
    }

    pub fn t_stop(&self) -> Option<f64> {
        match *self {
            RunClassification::Degenerate { t_stop, .. } | RunClassification::GradientBlowup { t_stop, .. } => {
                Some(t_stop)
            }
            _ => None,
        }
    }

    pub fn same_kind(&self, other: &Self) -> bool {
        self.label() == other.label()
    }
}

/// Classifies a finished run from its records, the way it ended and the
/// monitor violations.
pub fn detect_stop(
    history: &[DiagnosticsRecord],
    end: &RunEnd,
    thresholds: &Thresholds,
    violations: &[Violation],
) -> RunClassification {
    let Some(last) = history.last() else {
        return RunClassification::Inconclusive {
            reason: "no records".into(),
        };
    };
    match end {
        RunEnd::Failed { reason } => RunClassification::Inconclusive { reason: reason.clone() },
        RunEnd::Stopped {
            degenerate: true,
            blowup: true,
        } => RunClassification::Inconclusive {
            reason: "degeneracy and blow-up thresholds tripped in the same step".into(),
        },
        RunEnd::Stopped { degenerate: true, .. } => RunClassification::Degenerate {
            t_stop: last.t,
            x_min_location: last.x_min_u,
        },
        RunEnd::Stopped { blowup: true, .. } => {
            if last.min_c >= 2.0 * thresholds.eps_deg {
                RunClassification::GradientBlowup {
                    t_stop: last.t,
                    t_estimate: riccati_estimate(history, DEFAULT_WINDOW_FRACTION).ok().map(|f| f.t_estimate),
                }
            } else {
                RunClassification::Inconclusive {
                    reason: format!(
                        "blow-up threshold tripped with min c = {} below 2 eps_deg = {}",
                        last.min_c,
                        2.0 * thresholds.eps_deg
                    ),
                }
            }
        }
        RunEnd::Stopped { .. } => RunClassification::Inconclusive {
            reason: "stopped without a tripped threshold".into(),
        },
        RunEnd::Horizon { t_end } => {
            if violations.is_empty() {
                RunClassification::GlobalWindow { t_end: *t_end }
            } else {
                RunClassification::Inconclusive {
                    reason: format!("horizon reached with {} monitor violation(s)", violations.len()),
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiccatiFit {
    pub t_a: f64,
    pub t_b: f64,
    pub slope: f64,
    pub intercept: f64,
    pub t_estimate: f64,
    /// Coefficient of determination of the affine fit.
    pub quality: f64,
    pub points: usize,
}

/// Least-squares fit of `1/max(|R1|, |R2|)` against `t` over the last
/// `window_fraction` of the finite records (at least eight).
pub fn riccati_estimate(history: &[DiagnosticsRecord], window_fraction: f64) -> Result<RiccatiFit> {
    if !(window_fraction > 0.0 && window_fraction <= 1.0) {
        return Err(Error::Fit(format!("window fraction {window_fraction} outside (0, 1]")));
    }
    let finite: Vec<(f64, f64)> = history
        .iter()
        .map(|r| (r.t, r.max_abs_r()))
        .take_while(|(_, r)| r.is_finite())
        .collect();
    if finite.len() < MIN_FIT_RECORDS {
        return Err(Error::Fit(format!(
            "{} finite records, at least {MIN_FIT_RECORDS} needed",
            finite.len()
        )));
    }
    let take = ((window_fraction * finite.len() as f64).ceil() as usize).max(MIN_FIT_RECORDS);
    let window = &finite[finite.len() - take..];
    if window.windows(2).any(|w| !(w[1].1 > w[0].1) || !(w[1].0 > w[0].0)) {
        return Err(Error::Fit("max |R| is not strictly increasing over the fit window".into()));
    }
    fit_inverse(window)
}

pub(crate) fn fit_inverse(points: &[(f64, f64)]) -> Result<RiccatiFit> {
    let n = points.len() as f64;
    let mean_t = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| 1.0 / p.1).sum::<f64>() / n;
    let (mut stt, mut sty, mut syy) = (0.0, 0.0, 0.0);
    for &(t, r) in points {
        let (dt, dy) = (t - mean_t, 1.0 / r - mean_y);
        stt += dt * dt;
        sty += dt * dy;
        syy += dy * dy;
    }
    if !(stt > 0.0) {
        return Err(Error::Fit("fit window spans no time".into()));
    }
    let slope = sty / stt;
    let intercept = mean_y - slope * mean_t;
    if !(slope < 0.0) {
        return Err(Error::Fit(format!("1/R does not decrease (slope {slope})")));
    }
    let ss_res: f64 = points
        .iter()
        .map(|&(t, r)| (1.0 / r - (intercept + slope * t)).powi(2))
        .sum();
    let quality = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    Ok(RiccatiFit {
        t_a: points[0].0,
        t_b: points[points.len() - 1].0,
        slope,
        intercept,
        t_estimate: -intercept / slope,
        quality,
        points: points.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::initial_data::{check_hypotheses, Field, Grid, Profile};

    fn blank(t: f64) -> DiagnosticsRecord {
        DiagnosticsRecord {
            t,
            min_u: 0.0,
            x_min_u: 0.0,
            min_c: 1.0,
            max_abs_r1: 0.0,
            max_abs_r2: 0.0,
            min_r1: 0.0,
            max_r1: 0.0,
            min_r2: 0.0,
            max_r2: 0.0,
            linf_ut_ux: 0.0,
            lp1: 0.0,
            lp2: 0.0,
            lp4: 0.0,
            momentum: 0.0,
            support_radius: 0.0,
        }
    }

    fn riccati_history(f: impl Fn(f64) -> f64, ts: impl Iterator<Item = f64>) -> Vec<DiagnosticsRecord> {
        ts.map(|t| DiagnosticsRecord {
            max_abs_r1: f(t),
            max_abs_r2: 0.5 * f(t),
            ..blank(t)
        })
        .collect()
    }

    #[test]
    fn zero_state_record() {
        let g = Grid::centered(2.0, 64).unwrap();
        let st = RiemannState::new(0.0, Field::zeros(g), Field::zeros(g), Field::zeros(g)).unwrap();
        let r = record_riemann(&st, &WaveSpeedModel::zabusky(2.0).unwrap());
        assert_eq!(r.max_abs_r(), 0.0);
        assert_eq!(r.lp1 + r.lp2 + r.lp4 + r.momentum + r.linf_ut_ux, 0.0);
        assert_eq!(r.support_radius, 0.0);
        assert_eq!(r.min_u, 0.0);
        assert_eq!(r.min_c, 1.0);
    }

    #[test]
    fn uniform_state_min_c() {
        let g = Grid::centered(2.0, 64).unwrap();
        let st = RiemannState::new(0.0, Field::constant(g, -0.5), Field::zeros(g), Field::zeros(g)).unwrap();
        let r = record_riemann(&st, &WaveSpeedModel::zabusky(2.0).unwrap());
        assert_eq!(r.min_c, 0.5);
        assert_eq!(r.min_u, -0.5);
    }

    #[test]
    fn record_norms_of_a_constant_invariant() {
        // R1 = R2 = 2 on [-1, 1]: lp = 2 * 2^p * 2
        let g = Grid::new(-1.0, 2.0 / 63.0, 64).unwrap();
        let two = Field::constant(g, 2.0);
        let st = RiemannState::new(0.3, Field::zeros(g), two.clone(), two).unwrap();
        let r = record_riemann(&st, &WaveSpeedModel::constant(1.0).unwrap());
        assert!((r.lp1 - 8.0).abs() < 1e-12);
        assert!((r.lp2 - 16.0).abs() < 1e-12);
        assert!((r.lp4 - 64.0).abs() < 1e-12);
        assert!((r.momentum - 4.0).abs() < 1e-12);
        assert_eq!(r.linf_ut_ux, 2.0);
        assert_eq!((r.min_r1, r.max_r2), (2.0, 2.0));
    }

    #[test]
    fn theta1_examples() {
        let z = WaveSpeedModel::zabusky(2.0).unwrap();
        let t1 = theta1_floor_for_mass(&z, 0.375).unwrap();
        assert!((t1 + 0.5).abs() < 1e-10, "{t1}");
        assert!((z.primitive(t1, 0.0).unwrap() - 0.375).abs() <= 1e-10);
        assert_eq!(theta1_floor_for_mass(&z, 0.0).unwrap(), 0.0);
        assert!(matches!(theta1_floor_for_mass(&z, 0.5), Err(Error::NotApplicable(_))));
        assert!(matches!(theta1_floor_for_mass(&z, -0.1), Err(Error::NotApplicable(_))));
        // constant speed never degenerates: theta1 = -mass / c0
        let c = WaveSpeedModel::constant(2.0).unwrap();
        assert!((theta1_floor_for_mass(&c, 3.0).unwrap() + 1.5).abs() < 1e-10);
    }

    #[test]
    fn theta1_from_scenario() {
        let g = Grid::centered(3.0, 1200).unwrap();
        let s = Scenario::from_profiles(
            WaveSpeedModel::zabusky(2.0).unwrap(),
            g,
            &Profile::Zero,
            &Profile::bump_with_mass(-0.375, 1.0),
        )
        .unwrap();
        assert!((theta1_floor(&s).unwrap() + 0.5).abs() < 1e-9);
    }

    #[test]
    fn theta1_decreases_with_mass() {
        let z = WaveSpeedModel::zabusky(4.0).unwrap();
        let mut last = 0.0;
        for m in [0.01, 0.05, 0.1, 0.15, 0.19] {
            let t = theta1_floor_for_mass(&z, m).unwrap();
            assert!(t < last);
            last = t;
        }
    }

    #[test]
    fn riccati_fit_recovers_poles() {
        let h = riccati_history(|t| 1.0 / (1.0 - t), (0..=90).map(|k| k as f64 * 0.01));
        let fit = riccati_estimate(&h, 0.3).unwrap();
        assert!((fit.t_estimate - 1.0).abs() < 1e-6);
        assert!((fit.quality - 1.0).abs() < 1e-12);
        assert!(fit.t_estimate > fit.t_b);
        let h = riccati_history(|t| 1.0 / (2.0 - 3.0 * t), (0..=60).map(|k| k as f64 * 0.01));
        let fit = riccati_estimate(&h, 0.5).unwrap();
        assert!((fit.t_estimate - 2.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn riccati_fit_rejects_bad_histories() {
        let short = riccati_history(|t| 1.0 / (1.0 - t), (0..7).map(|k| k as f64 * 0.1));
        assert!(matches!(riccati_estimate(&short, 1.0), Err(Error::Fit(_))));
        let flat = riccati_history(|_| 1.0, (0..20).map(|k| k as f64 * 0.1));
        assert!(riccati_estimate(&flat, 0.5).is_err());
        let mut bumpy = riccati_history(|t| 1.0 / (1.0 - t), (0..20).map(|k| k as f64 * 0.04));
        bumpy[18].max_abs_r1 = 0.1;
        assert!(riccati_estimate(&bumpy, 0.5).is_err());
    }

    #[test]
    fn riccati_fit_skips_trailing_infinity() {
        let mut h = riccati_history(|t| 1.0 / (1.0 - t), (0..=90).map(|k| k as f64 * 0.01));
        h.push(DiagnosticsRecord {
            max_abs_r1: f64::INFINITY,
            ..blank(0.95)
        });
        assert!((riccati_estimate(&h, 0.3).unwrap().t_estimate - 1.0).abs() < 1e-6);
    }

    fn existence_setup() -> (Scenario, Vec<HypothesisReport>, MonitorContext) {
        let g = Grid::centered(3.0, 600).unwrap();
        let s = Scenario::from_profiles(
            WaveSpeedModel::zabusky(2.0).unwrap(),
            g,
            &Profile::Zero,
            &Profile::bump_with_mass(-0.375, 1.0),
        )
        .unwrap();
        let reports: Vec<_> = Theorem::ALL.iter().map(|&t| check_hypotheses(&s, t)).collect();
        let ctx = MonitorContext::for_scenario(&s, 0.3);
        (s, reports, ctx)
    }

    fn compliant(t: f64) -> DiagnosticsRecord {
        DiagnosticsRecord {
            min_u: -0.2,
            min_r1: -0.3,
            min_r2: -0.3,
            max_abs_r1: 0.3,
            max_abs_r2: 0.3,
            lp1: 1.0 - 0.01 * t,
            lp2: 0.5,
            lp4: 0.1,
            ..blank(t)
        }
    }

    #[test]
    fn compliant_history_has_no_violations() {
        let (_, reports, ctx) = existence_setup();
        let plan = MonitorPlan::from_reports(&reports);
        assert!(plan.signs_nonpositive && plan.lp_and_linf && plan.theta1);
        assert!(!plan.finite_speed && !plan.signs_nonnegative);
        let h: Vec<_> = (0..20).map(|k| compliant(k as f64)).collect();
        assert!(check_invariant_monitors(&h, &reports, &ctx).is_empty());
    }

    #[test]
    fn injected_sign_flip_is_reported_once() {
        let (_, reports, ctx) = existence_setup();
        let mut h: Vec<_> = (0..20).map(|k| compliant(k as f64)).collect();
        h[7].max_r1 = 0.3;
        let v = check_invariant_monitors(&h, &reports, &ctx);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].monitor, Monitor::SignPreservation);
        assert_eq!(v[0].t, 7.0);
    }

    #[test]
    fn theta1_floor_monitor() {
        let (_, reports, ctx) = existence_setup();
        assert!((ctx.theta1.unwrap() + 0.5).abs() < 1e-9);
        let mut h: Vec<_> = (0..5).map(|k| compliant(k as f64)).collect();
        h[2].min_u = -0.5005;
        assert!(check_invariant_monitors(&h, &reports, &ctx).is_empty());
        h[3].min_u = -0.502;
        let v = check_invariant_monitors(&h, &reports, &ctx);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].monitor, Monitor::Theta1Floor);
    }

    #[test]
    fn lp_growth_and_linf_doubling_are_reported() {
        let (_, reports, ctx) = existence_setup();
        let mut h: Vec<_> = (0..5).map(|k| compliant(k as f64)).collect();
        h[3].lp2 = 0.6;
        h[4].max_abs_r1 = 0.95;
        let v = check_invariant_monitors(&h, &reports, &ctx);
        assert!(v.iter().any(|x| x.monitor == Monitor::LpMonotone && x.p == Some(2) && x.t == 3.0));
        assert!(v.iter().any(|x| x.monitor == Monitor::LinfFactor2 && x.t == 4.0));
    }

    #[test]
    fn finite_speed_monitor() {
        let plan = MonitorPlan {
            finite_speed: true,
            ..Default::default()
        };
        let ctx = MonitorContext {
            scale: 1.0,
            theta1: None,
            support_radius: 1.0,
            c_max: 1.0,
            dx: 0.01,
        };
        let ok = DiagnosticsRecord {
            support_radius: 1.51,
            min_u: -0.3,
            x_min_u: 1.2,
            ..blank(0.5)
        };
        assert!(check_with_plan(&[ok], &plan, &ctx).is_empty());
        let wide = DiagnosticsRecord {
            support_radius: 1.53,
            ..ok
        };
        let far = DiagnosticsRecord { x_min_u: -1.6, ..ok };
        assert_eq!(check_with_plan(&[wide, far], &plan, &ctx).len(), 2);
    }

    #[test]
    fn classification_rules() {
        let th = Thresholds {
            eps_deg: 1e-3,
            m_blow: 100.0,
        };
        let mut h = vec![blank(0.0), blank(0.5)];
        let global = detect_stop(&h, &RunEnd::Horizon { t_end: 0.5 }, &th, &[]);
        assert_eq!(global, RunClassification::GlobalWindow { t_end: 0.5 });
        let v = Violation {
            monitor: Monitor::LinfFactor2,
            p: None,
            t: 0.5,
            magnitude: 1.0,
        };
        assert_eq!(detect_stop(&h, &RunEnd::Horizon { t_end: 0.5 }, &th, &[v]).label(), "INCONCLUSIVE");
        let both = RunEnd::Stopped {
            degenerate: true,
            blowup: true,
        };
        assert_eq!(detect_stop(&h, &both, &th, &[]).label(), "INCONCLUSIVE");
        h[1].x_min_u = 0.25;
        let deg = RunEnd::Stopped {
            degenerate: true,
            blowup: false,
        };
        assert_eq!(
            detect_stop(&h, &deg, &th, &[]),
            RunClassification::Degenerate {
                t_stop: 0.5,
                x_min_location: 0.25
            }
        );
        let blow = RunEnd::Stopped {
            degenerate: false,
            blowup: true,
        };
        assert_eq!(detect_stop(&h, &blow, &th, &[]).label(), "GRADIENT_BLOWUP");
        h[1].min_c = 1.5e-3;
        assert_eq!(detect_stop(&h, &blow, &th, &[]).label(), "INCONCLUSIVE");
        let failed = RunEnd::Failed {
            reason: "dt underflow".into(),
        };
        assert_eq!(
            detect_stop(&h, &failed, &th, &[]),
            RunClassification::Inconclusive {
                reason: "dt underflow".into()
            }
        );
    }

    #[test]
    fn classification_serializes_with_kind_tag() {
        let c = RunClassification::GradientBlowup {
            t_stop: 1.5,
            t_estimate: Some(1.6),
        };
        let json = serde_json::to_string(&c).unwrap();
        assert!(json.contains("\"kind\":\"GRADIENT_BLOWUP\""), "{json}");
        let back: RunClassification = serde_json::from_str(&json).unwrap();
        assert_eq!(back, c);
    }
}
