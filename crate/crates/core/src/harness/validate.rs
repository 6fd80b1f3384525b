use serde::{Deserialize, Serialize};

use super::config::ScenarioConfig;
use super::run::{Prepared, SolverKind};
use crate::diagnostics::RunClassification;
use crate::error::Result;

/// Number of comparison times across the horizon.
const COMPARISON_POINTS: usize = 100;
/// Fraction of the earliest stop time up to which `u` is compared.
const COMPARISON_FRACTION: f64 = 0.9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Discrepancy {
    pub t: f64,
    pub l2: f64,
    pub linf: f64,
    /// `||u_riemann||_2` at `t`.
    pub norm: f64,
}

impl Discrepancy {
    pub fn relative_l2(&self) -> f64 {
        if self.norm > 0.0 {
            self.l2 / self.norm
        } else if self.l2 == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossValidation {
    pub riemann: RunClassification,
    pub flux: RunClassification,
    pub classifications_agree: bool,
    /// Comparisons stop at this time.
    pub t_compare: f64,
    pub discrepancies: Vec<Discrepancy>,
}

impl CrossValidation {
    pub fn max_relative_l2(&self) -> f64 {
        self.discrepancies.iter().map(|d| d.relative_l2()).fold(0.0, f64::max)
    }

    pub fn max_linf(&self) -> f64 {
        self.discrepancies.iter().map(|d| d.linf).fold(0.0, f64::max)
    }
}

/// Runs both solvers on the same configuration and compares `u` at common
/// times up to 0.9 of the earlier stop time.
pub fn cross_validate(config: &ScenarioConfig) -> Result<CrossValidation> {
    let p = Prepared::new(config)?;
    let t_end = config.run.t_end;
    let times: Vec<f64> = (0..=COMPARISON_POINTS)
        .map(|k| t_end * k as f64 / COMPARISON_POINTS as f64)
        .collect();
    let (r, snaps_r) = p.run_solver(SolverKind::Riemann, &times);
    let (f, snaps_f) = p.run_solver(SolverKind::Flux, &times);
    let t_compare = COMPARISON_FRACTION * r.t_final().min(f.t_final());
    let dx = p.scenario.grid.dx();
    let discrepancies = snaps_r
        .times
        .iter()
        .zip(&snaps_r.values)
        .zip(snaps_f.times.iter().zip(&snaps_f.values))
        .take_while(|((&t, _), _)| t <= t_compare)
        .map(|((&t, a), (_, b))| {
            let mut sq = 0.0;
            let mut norm = 0.0;
            let mut linf: f64 = 0.0;
            for (x, y) in a.iter().zip(b) {
                sq += (x - y).powi(2);
                norm += x * x;
                linf = linf.max((x - y).abs());
            }
            Discrepancy {
                t,
                l2: (sq * dx).sqrt(),
                linf,
                norm: (norm * dx).sqrt(),
            }
        })
        .collect();
    Ok(CrossValidation {
        classifications_agree: r.classification.same_kind(&f.classification),
        riemann: r.classification,
        flux: f.classification,
        t_compare,
        discrepancies,
    })
}
