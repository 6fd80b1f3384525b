//! Grids, initial profiles, scenarios and the checks run on them before a
//! simulation starts.

pub mod grid;
pub mod hypotheses;
pub mod profile;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::wavespeed::WaveSpeedModel;
pub use grid::{compact_support_radius, derivative, Field, Grid};
pub use hypotheses::{check_hypotheses, Condition, ConditionRecord, HypothesisReport, Theorem};
pub use profile::{sample_profile, Profile, BUMP_UNIT_INTEGRAL};

/// Cauchy data on a grid together with the wave speed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub grid: Grid,
    pub u0: Field,
    pub u1: Field,
    pub model: WaveSpeedModel,
    /// Declared half-width `K` of the support of the data.
    pub support_radius: f64,
    pub labels: BTreeMap<String, String>,
}

impl Scenario {
    pub fn new(model: WaveSpeedModel, u0: Field, u1: Field, support_radius: f64) -> Result<Self> {
        if u0.grid() != u1.grid() {
            return Err(Error::Domain("u0 and u1 live on different grids".into()));
        }
        let i = u0.argmin();
        let min_u0 = u0.values()[i];
        if min_u0 <= model.theta0() {
            return Err(Error::Degeneracy {
                theta: min_u0,
                theta0: model.theta0(),
            });
        }
        if !(support_radius >= 0.0) {
            return Err(Error::Domain(format!("support radius must be non-negative, got {support_radius}")));
        }
        Ok(Self {
            grid: *u0.grid(),
            u0,
            u1,
            model,
            support_radius,
            labels: BTreeMap::new(),
        })
    }

    /// Samples both profiles on `grid`; `K` defaults to the larger closed-form
    /// support radius, or the measured one for expression profiles.
    pub fn from_profiles(model: WaveSpeedModel, grid: Grid, u0: &Profile, u1: &Profile) -> Result<Self> {
        let f0 = sample_profile(u0, &grid)?;
        let f1 = sample_profile(u1, &grid)?;
        let k0 = u0.support_radius().unwrap_or_else(|| compact_support_radius(&f0, 0.0));
        let k1 = u1.support_radius().unwrap_or_else(|| compact_support_radius(&f1, 0.0));
        Self::new(model, f0, f1, k0.max(k1))
    }

    pub fn with_label(mut self, key: &str, value: &str) -> Self {
        self.labels.insert(key.to_string(), value.to_string());
        self
    }

    /// `c(u0)` at every node; degenerate nodes read as zero.
    pub fn initial_speed(&self) -> Vec<f64> {
        self.u0.values().iter().map(|&u| self.model.sample(u).value()).collect()
    }

    /// `c(max u0)`, the largest speed present in the data.
    pub fn c_max(&self) -> f64 {
        self.model.sample(self.u0.max()).value()
    }
}

/// Riemann invariants of the initial data: `R1 = u1 + c(u0) D u0`,
/// `R2 = u1 - c(u0) D u0`.
pub fn riemann_initial(s: &Scenario) -> Result<(Field, Field)> {
    let du = derivative(&s.u0);
    let mut r1 = Vec::with_capacity(s.grid.n());
    let mut r2 = Vec::with_capacity(s.grid.n());
    for ((&u, &ux), &ut) in s.u0.values().iter().zip(du.values()).zip(s.u1.values()) {
        let c = s.model.eval(u)?;
        r1.push(ut + c * ux);
        r2.push(ut - c * ux);
    }
    Ok((Field::new(s.grid, r1)?, Field::new(s.grid, r2)?))
}

/// Upper bound on the degeneracy time from the linear growth of
/// `F(t) = -int u dx` and the support bound `F(t) <= -2 theta0 (c(0) t + K)`:
///
/// `T = (-2 theta0 K - F(0)) / (F'(0) + 2 theta0 c(0))`.
pub fn degeneracy_time_bound_from(theta0: f64, c0: f64, k: f64, f0: f64, f1: f64) -> Result<f64> {
    if !theta0.is_finite() {
        return Err(Error::NotApplicable("the wave speed never degenerates".into()));
    }
    let denominator = f1 + 2.0 * theta0 * c0;
    if !(denominator > 0.0) {
        return Err(Error::NotApplicable(format!(
            "-int u1 = {f1} does not exceed -2 theta0 c(0) = {}",
            -2.0 * theta0 * c0
        )));
    }
    Ok((-2.0 * theta0 * k - f0) / denominator)
}

pub fn degeneracy_time_bound(s: &Scenario) -> Result<f64> {
    degeneracy_time_bound_from(
        s.model.theta0(),
        s.model.c_at_zero(),
        s.support_radius,
        -s.u0.integral(),
        -s.u1.integral(),
    )
}
