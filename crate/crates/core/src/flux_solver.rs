//! Leapfrog scheme for the second-order form `u_tt = (c(u)^2 u_x)_x`.
//!
//! Face speeds use `c` at the mean of the adjacent values, so the update is
//! a discrete divergence and `sum (u_curr - u_prev) / dt_prev` telescopes:
//! the discrete momentum is conserved to round-off.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::initial_data::grid::max_abs;
use crate::initial_data::{Field, Grid, Scenario};
use crate::riemann_solver::SolverSettings;
use crate::wavespeed::WaveSpeedModel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FluxState {
    pub t: f64,
    pub u_prev: Field,
    pub u_curr: Field,
    pub dt_prev: f64,
    pub sealed: bool,
    last_momentum: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentumReading {
    pub value: f64,
    /// True for sealed states: the value is the last one computed before the
    /// stop event.
    pub stale: bool,
}

/// A stop threshold tripped; the post-step state is sealed.
#[derive(Debug, Clone, PartialEq)]
pub struct FluxStop {
    pub degenerate: bool,
    pub blowup: bool,
    pub state: FluxState,
}

impl FluxState {
    pub fn grid(&self) -> &Grid {
        self.u_curr.grid()
    }
}

/// `[c^2_{i+1/2}(u_{i+1} - u_i) - c^2_{i-1/2}(u_i - u_{i-1})] / dx^2` with
/// zero-gradient ghosts.
pub fn flux_operator(u: &[f64], dx: f64, model: &WaveSpeedModel) -> Result<Vec<f64>> {
    let n = u.len();
    let mut flux = Vec::with_capacity(n + 1);
    flux.push(0.0);
    for i in 1..n {
        let c = model.eval(0.5 * (u[i - 1] + u[i]))?;
        flux.push(c * c * (u[i] - u[i - 1]));
    }
    flux.push(0.0);
    let inv = 1.0 / (dx * dx);
    Ok((0..n).map(|i| (flux[i + 1] - flux[i]) * inv).collect())
}

/// Second-order Taylor start: `u_prev = u0 - dt0 u1 + dt0^2/2 L(u0)`.
pub fn init_flux(s: &Scenario, dt0: f64) -> Result<FluxState> {
    if !(dt0 > 0.0 && dt0.is_finite()) {
        return Err(Error::Domain(format!("initial time step must be positive, got {dt0}")));
    }
    let u0 = s.u0.values();
    let lu = flux_operator(u0, s.grid.dx(), &s.model)?;
    let prev: Vec<f64> = (0..u0.len())
        .map(|i| u0[i] - dt0 * s.u1.values()[i] + 0.5 * dt0 * dt0 * lu[i])
        .collect();
    let mut state = FluxState {
        t: 0.0,
        u_prev: Field::new(s.grid, prev)?,
        u_curr: s.u0.clone(),
        dt_prev: dt0,
        sealed: false,
        last_momentum: 0.0,
    };
    state.last_momentum = momentum_of(&state);
    Ok(state)
}

/// Largest stable step `cfl dx / max c(u_curr)`, capped at `dt_max`.
pub fn flux_cfl_timestep(state: &FluxState, model: &WaveSpeedModel, settings: &SolverSettings) -> Result<f64> {
    let c_max = state
        .u_curr
        .values()
        .iter()
        .map(|&u| model.sample(u).value())
        .fold(0.0, f64::max);
    if !(c_max > 0.0) {
        return Err(Error::Degeneracy {
            theta: state.u_curr.max(),
            theta0: model.theta0(),
        });
    }
    Ok((settings.cfl * state.grid().dx() / c_max).min(settings.dt_max))
}

/// One leapfrog step of length `dt`, with the nonuniform-step correction
/// when `dt != dt_prev`.
pub fn step_flux(
    state: &FluxState,
    dt: f64,
    model: &WaveSpeedModel,
    settings: &SolverSettings,
) -> std::result::Result<FluxState, FluxStop> {
    assert!(dt > 0.0, "time step must be positive");
    assert!(!state.sealed, "a sealed state cannot be stepped");
    let grid = *state.grid();
    let seal = |mut s: FluxState, degenerate: bool, blowup: bool| {
        s.sealed = true;
        s.last_momentum = state.last_momentum;
        FluxStop {
            degenerate,
            blowup,
            state: s,
        }
    };
    let u = state.u_curr.values();
    let up = state.u_prev.values();
    let lu = match flux_operator(u, grid.dx(), model) {
        Ok(v) => v,
        Err(_) => return Err(seal(state.clone(), true, false)),
    };
    let ratio = dt / state.dt_prev;
    let weight = 0.5 * dt * (dt + state.dt_prev);
    let next: Vec<f64> = (0..u.len())
        .map(|i| u[i] + ratio * (u[i] - up[i]) + weight * lu[i])
        .collect();
    let mut out = FluxState {
        t: state.t + dt,
        u_prev: state.u_curr.clone(),
        u_curr: Field::from_raw(grid, next),
        dt_prev: dt,
        sealed: false,
        last_momentum: 0.0,
    };
    let min_c = out
        .u_curr
        .values()
        .iter()
        .map(|&v| if v.is_nan() { 0.0 } else { model.sample(v).value() })
        .fold(f64::INFINITY, f64::min);
    let degenerate = !(min_c >= settings.eps_deg);
    let blowup = !(max_invariant(&out, model) <= settings.m_blow);
    if degenerate || blowup {
        return Err(seal(out, degenerate, blowup));
    }
    out.last_momentum = momentum_of(&out);
    Ok(out)
}

fn momentum_of(state: &FluxState) -> f64 {
    let ut: Vec<f64> = state
        .u_curr
        .values()
        .iter()
        .zip(state.u_prev.values())
        .map(|(a, b)| (a - b) / state.dt_prev)
        .collect();
    crate::initial_data::grid::trapezoid(&ut, state.grid().dx())
}

/// `int u_t dx` with `u_t` the backward difference.
pub fn momentum_total(state: &FluxState) -> MomentumReading {
    if state.sealed {
        MomentumReading {
            value: state.last_momentum,
            stale: true,
        }
    } else {
        MomentumReading {
            value: momentum_of(state),
            stale: false,
        }
    }
}

/// `u_t` by backward difference in time and `u_x` by second-order central
/// differences (second-order one-sided at the ends).
pub fn gradients_flux(state: &FluxState) -> (Field, Field) {
    let grid = *state.grid();
    let u = state.u_curr.values();
    let n = u.len();
    let h = grid.dx();
    let ut: Vec<f64> = u
        .iter()
        .zip(state.u_prev.values())
        .map(|(a, b)| (a - b) / state.dt_prev)
        .collect();
    let mut ux = vec![0.0; n];
    ux[0] = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * h);
    ux[n - 1] = (3.0 * u[n - 1] - 4.0 * u[n - 2] + u[n - 3]) / (2.0 * h);
    for i in 1..n - 1 {
        ux[i] = (u[i + 1] - u[i - 1]) / (2.0 * h);
    }
    (Field::from_raw(grid, ut), Field::from_raw(grid, ux))
}

/// Riemann invariants `u_t +- c(u) u_x` recovered from the leapfrog levels.
pub fn invariants_flux(state: &FluxState, model: &WaveSpeedModel) -> (Vec<f64>, Vec<f64>) {
    let (ut, ux) = gradients_flux(state);
    let mut r1 = Vec::with_capacity(ut.len());
    let mut r2 = Vec::with_capacity(ut.len());
    for ((&u, &a), &b) in state.u_curr.values().iter().zip(ut.values()).zip(ux.values()) {
        let c = model.sample(u).value();
        r1.push(a + c * b);
        r2.push(a - c * b);
    }
    (r1, r2)
}

fn max_invariant(state: &FluxState, model: &WaveSpeedModel) -> f64 {
    let (r1, r2) = invariants_flux(state, model);
    if r1.iter().chain(&r2).any(|v| !v.is_finite()) {
        return f64::INFINITY;
    }
    max_abs(&r1).max(max_abs(&r2))
}
