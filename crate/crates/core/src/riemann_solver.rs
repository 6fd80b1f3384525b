//! Explicit solver for the diagonal system in Riemann invariants
//!
//! ```text
//! R1_t - c(u) R1_x = c'(u)/(2c(u)) (R1^2 - R1 R2)
//! u_t             = (R1 + R2) / 2
//! R2_t + c(u) R2_x = c'(u)/(2c(u)) (R2^2 - R1 R2)
//! ```
//!
//! `R1` travels left and `R2` right. Two discretisations are offered:
//!
//! * [`Formulation::Characteristic`]: upwind transport in advective form plus
//!   the Riccati source, Strang-split with an exact sub-step.
//! * [`Formulation::Conservative`]: on smooth solutions the source equals the
//!   divergence correction `c_x R`, so `R1_t = (c R1)_x` and
//!   `R2_t = -(c R2)_x`. Upwinding this flux form keeps `int R1` and `int R2`
//!   exact to round-off.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::initial_data::grid::{interpolate, max_abs};
use crate::initial_data::{riemann_initial, Field, Grid, Scenario};
use crate::wavespeed::WaveSpeedModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum UpwindOrder {
    /// Donor cell.
    #[default]
    First,
    /// Minmod-limited MUSCL.
    Second,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Formulation {
    /// Strang splitting of transport and the exact Riccati source.
    Characteristic,
    /// Flux form `R1_t = (c R1)_x`, `R2_t = -(c R2)_x`.
    #[default]
    Conservative,
}

/// Stop thresholds and discretisation choices shared by both solvers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverSettings {
    /// Target Courant number, in (0, 1).
    pub cfl: f64,
    pub dt_max: f64,
    /// Degeneracy stop: `min c(u) < eps_deg`.
    pub eps_deg: f64,
    /// Blow-up stop: `max(|R1|, |R2|) > m_blow`.
    pub m_blow: f64,
    pub order: UpwindOrder,
    pub formulation: Formulation,
}

impl SolverSettings {
    /// `eps_deg = 1e-3 c(0)` and `m_blow = 1e3 max(1, initial_sup)`.
    pub fn defaults(model: &WaveSpeedModel, initial_sup: f64) -> Self {
        Self {
            cfl: 0.45,
            dt_max: f64::INFINITY,
            eps_deg: 1e-3 * model.c_at_zero(),
            m_blow: 1e3 * initial_sup.max(1.0),
            order: UpwindOrder::First,
            formulation: Formulation::Conservative,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.cfl > 0.0 && self.cfl < 1.0) {
            return Err(Error::validation("run.cfl", format!("must lie in (0, 1), got {}", self.cfl)));
        }
        if !(self.dt_max > 0.0) {
            return Err(Error::validation("run.dt_max", "must be positive"));
        }
        if !(self.eps_deg > 0.0) {
            return Err(Error::validation("run.eps_deg", "must be positive"));
        }
        if !(self.m_blow > 0.0) {
            return Err(Error::validation("run.m_blow", "must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiemannState {
    pub t: f64,
    pub u: Field,
    pub r1: Field,
    pub r2: Field,
    /// Set once a stop threshold has tripped; a sealed state is never stepped.
    pub sealed: bool,
}

impl RiemannState {
    pub fn initial(s: &Scenario) -> Result<Self> {
        let (r1, r2) = riemann_initial(s)?;
        Ok(Self {
            t: 0.0,
            u: s.u0.clone(),
            r1,
            r2,
            sealed: false,
        })
    }

    pub fn new(t: f64, u: Field, r1: Field, r2: Field) -> Result<Self> {
        if u.grid() != r1.grid() || u.grid() != r2.grid() {
            return Err(Error::Domain("state fields live on different grids".into()));
        }
        if !(t >= 0.0) {
            return Err(Error::Domain(format!("negative time {t}")));
        }
        Ok(Self {
            t,
            u,
            r1,
            r2,
            sealed: false,
        })
    }

    pub fn grid(&self) -> &Grid {
        self.u.grid()
    }

    /// `max(|R1|, |R2|)` over the grid.
    pub fn sup_norm(&self) -> f64 {
        self.r1.max_abs().max(self.r2.max_abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepStats {
    pub dt: f64,
    pub max_abs_r1: f64,
    pub max_abs_r2: f64,
    pub min_u: f64,
    pub min_c: f64,
    /// `dt max c / dx` actually used.
    pub cfl: f64,
}

/// A stop threshold tripped during a step. The post-step state is sealed.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverStop {
    pub degenerate: bool,
    pub blowup: bool,
    pub state: RiemannState,
    pub stats: StepStats,
}

/// `dt = cfl dx / max c(u)`, capped at `dt_max`.
pub fn cfl_timestep(state: &RiemannState, model: &WaveSpeedModel, settings: &SolverSettings) -> Result<f64> {
    let c_max = state
        .u
        .values()
        .iter()
        .map(|&u| model.sample(u).value())
        .fold(0.0, f64::max);
    if !(c_max > 0.0) {
        return Err(Error::Degeneracy {
            theta: state.u.max(),
            theta0: model.theta0(),
        });
    }
    Ok((settings.cfl * state.grid().dx() / c_max).min(settings.dt_max))
}

/// `c'(u) / (2 c(u))` pointwise.
pub fn source_coefficient(model: &WaveSpeedModel, u: &Field, eps_deg: f64) -> Result<Field> {
    let mut out = Vec::with_capacity(u.len());
    for &v in u.values() {
        let c = model.eval(v)?;
        if c < eps_deg {
            return Err(Error::Degeneracy {
                theta: v,
                theta0: model.theta0(),
            });
        }
        out.push(model.derivative(v)? / (2.0 * c));
    }
    Field::new(*u.grid(), out)
}

/// `(u_t, u_x) = ((R1 + R2)/2, (R1 - R2)/(2 c(u)))`.
pub fn reconstruct_gradients(
    state: &RiemannState,
    model: &WaveSpeedModel,
    eps_deg: f64,
) -> Result<(Field, Field)> {
    let n = state.u.len();
    let mut ut = Vec::with_capacity(n);
    let mut ux = Vec::with_capacity(n);
    for ((&u, &a), &b) in state.u.values().iter().zip(state.r1.values()).zip(state.r2.values()) {
        let c = model.eval(u)?;
        if c < eps_deg {
            return Err(Error::Degeneracy {
                theta: u,
                theta0: model.theta0(),
            });
        }
        ut.push(0.5 * (a + b));
        ux.push((a - b) / (2.0 * c));
    }
    Ok((Field::from_raw(*state.grid(), ut), Field::from_raw(*state.grid(), ux)))
}

/// Exact solution at time `h` of `y' = k y (y - b)` with `b` frozen.
/// Returns a signed infinity when the solution blows up within `h`.
pub(crate) fn riccati_substep(y0: f64, b: f64, k: f64, h: f64) -> f64 {
    if y0 == 0.0 || k == 0.0 {
        return y0;
    }
    // y' = lambda y + k y^2 with lambda = -k b
    let lambda = -k * b;
    // phi = (e^{lambda h} - 1) / lambda; the series keeps it accurate when
    // lambda h is tiny or underflows (subnormal b)
    let z = lambda * h;
    let phi = if z.abs() < 1e-4 {
        h * (1.0 + z * (0.5 + z / 6.0))
    } else {
        z.exp_m1() / lambda
    };
    let den = 1.0 - k * y0 * phi;
    if den <= 0.0 {
        return f64::INFINITY.copysign(y0);
    }
    y0 * z.exp() / den
}

fn minmod(a: f64, b: f64) -> f64 {
    if a * b <= 0.0 {
        0.0
    } else if a.abs() < b.abs() {
        a
    } else {
        b
    }
}

/// Upwind transport to the right over one step of length `dt`.
///
/// `face_speed[j]` is the speed at the face between cells `j-1` and `j`
/// (`j = 0..=n`); `cell_speed[i]` the speed at node `i`. Zero-gradient ghost
/// cells on both sides.
fn transport_right(
    r: &[f64],
    cell_speed: &[f64],
    face_speed: &[f64],
    dt_dx: f64,
    order: UpwindOrder,
    conservative: bool,
) -> Vec<f64> {
    let n = r.len();
    let at = |i: isize| r[i.clamp(0, n as isize - 1) as usize];
    // upwind value at face j, reconstructed from cell j-1
    let face_value = |j: usize| -> f64 {
        let i = j as isize - 1;
        let base = at(i);
        match order {
            UpwindOrder::First => base,
            UpwindOrder::Second => {
                let nu = face_speed[j] * dt_dx;
                let slope = minmod(at(i + 1) - base, base - at(i - 1));
                base + 0.5 * (1.0 - nu) * slope
            }
        }
    };
    let faces: Vec<f64> = (0..=n).map(face_value).collect();
    (0..n)
        .map(|i| {
            if conservative {
                r[i] - dt_dx * (face_speed[i + 1] * faces[i + 1] - face_speed[i] * faces[i])
            } else {
                r[i] - dt_dx * cell_speed[i] * (faces[i + 1] - faces[i])
            }
        })
        .collect()
}

fn transport_left(
    r: &[f64],
    cell_speed: &[f64],
    face_speed: &[f64],
    dt_dx: f64,
    order: UpwindOrder,
    conservative: bool,
) -> Vec<f64> {
    let rev = |v: &[f64]| v.iter().rev().copied().collect::<Vec<_>>();
    let mut out = transport_right(&rev(r), &rev(cell_speed), &rev(face_speed), dt_dx, order, conservative);
    out.reverse();
    out
}

fn riccati_pair(r1: &mut [f64], r2: &mut [f64], k: &[f64], h: f64) {
    for i in 0..r1.len() {
        let a = riccati_substep(r1[i], r2[i], k[i], 0.5 * h);
        let b = riccati_substep(r2[i], a, k[i], h);
        r1[i] = riccati_substep(a, b, k[i], 0.5 * h);
        r2[i] = b;
    }
}

fn speeds(model: &WaveSpeedModel, u: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = u.len();
    let cell = u.iter().map(|&v| model.eval(v)).collect::<Result<Vec<_>>>()?;
    let mut face = Vec::with_capacity(n + 1);
    face.push(cell[0]);
    for i in 1..n {
        face.push(model.eval(0.5 * (u[i - 1] + u[i]))?);
    }
    face.push(cell[n - 1]);
    Ok((cell, face))
}

/// Advances the state by `dt`.
///
/// A step that ends with `min c(u) < eps_deg` (or `u <= theta0`), or with
/// `max(|R1|, |R2|) > m_blow` (or a non-finite value), returns a
/// [`SolverStop`] carrying the sealed post-step state.
pub fn step(
    state: &RiemannState,
    dt: f64,
    model: &WaveSpeedModel,
    settings: &SolverSettings,
) -> std::result::Result<(RiemannState, StepStats), SolverStop> {
    assert!(dt > 0.0, "time step must be positive");
    assert!(!state.sealed, "a sealed state cannot be stepped");
    let grid = *state.grid();
    let u = state.u.values();
    let (cell, face) = match speeds(model, u) {
        Ok(s) => s,
        Err(_) => {
            let stats = stats_of(state, model, dt, 0.0);
            let mut sealed = state.clone();
            sealed.sealed = true;
            return Err(SolverStop {
                degenerate: true,
                blowup: false,
                state: sealed,
                stats,
            });
        }
    };
    let dt_dx = dt / grid.dx();
    let (r1_new, r2_new) = match settings.formulation {
        Formulation::Conservative => (
            transport_left(state.r1.values(), &cell, &face, dt_dx, settings.order, true),
            transport_right(state.r2.values(), &cell, &face, dt_dx, settings.order, true),
        ),
        Formulation::Characteristic => {
            let k: Vec<f64> = u
                .iter()
                .zip(&cell)
                .map(|(&v, &c)| model.derivative(v).unwrap_or(0.0) / (2.0 * c))
                .collect();
            let mut r1 = state.r1.values().to_vec();
            let mut r2 = state.r2.values().to_vec();
            riccati_pair(&mut r1, &mut r2, &k, 0.5 * dt);
            let mut r1 = transport_left(&r1, &cell, &face, dt_dx, settings.order, false);
            let mut r2 = transport_right(&r2, &cell, &face, dt_dx, settings.order, false);
            riccati_pair(&mut r1, &mut r2, &k, 0.5 * dt);
            (r1, r2)
        }
    };
    let u_new: Vec<f64> = (0..grid.n())
        .map(|i| {
            let before = state.r1.values()[i] + state.r2.values()[i];
            let after = r1_new[i] + r2_new[i];
            u[i] + 0.25 * dt * (before + after)
        })
        .collect();
    let c_max = cell.iter().copied().fold(0.0, f64::max);
    let next = RiemannState {
        t: state.t + dt,
        u: Field::from_raw(grid, u_new),
        r1: Field::from_raw(grid, r1_new),
        r2: Field::from_raw(grid, r2_new),
        sealed: false,
    };
    let stats = stats_of(&next, model, dt, dt_dx * c_max);
    let degenerate = !(stats.min_c >= settings.eps_deg);
    let blowup = !(stats.max_abs_r1.max(stats.max_abs_r2) <= settings.m_blow);
    if degenerate || blowup {
        let mut sealed = next;
        sealed.sealed = true;
        return Err(SolverStop {
            degenerate,
            blowup,
            state: sealed,
            stats,
        });
    }
    Ok((next, stats))
}

fn stats_of(state: &RiemannState, model: &WaveSpeedModel, dt: f64, cfl: f64) -> StepStats {
    let min_u = state.u.values().iter().copied().fold(f64::INFINITY, |a, b| if b.is_nan() { f64::NAN } else { a.min(b) });
    let min_c = if min_u.is_nan() {
        0.0
    } else {
        state.u.values().iter().map(|&v| model.sample(v).value()).fold(f64::INFINITY, f64::min)
    };
    StepStats {
        dt,
        max_abs_r1: nan_aware_max_abs(state.r1.values()),
        max_abs_r2: nan_aware_max_abs(state.r2.values()),
        min_u,
        min_c,
        cfl,
    }
}

fn nan_aware_max_abs(v: &[f64]) -> f64 {
    if v.iter().any(|x| x.is_nan()) {
        f64::NAN
    } else {
        max_abs(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CharacteristicSign {
    /// `dx/dt = +c(u)`, carries `R2`.
    Plus,
    /// `dx/dt = -c(u)`, carries `R1`.
    Minus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharacteristicSample {
    pub t: f64,
    pub x: f64,
    pub r1: f64,
    pub r2: f64,
    pub u: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharacteristicProbe {
    pub sign: CharacteristicSign,
    pub path: Vec<CharacteristicSample>,
}

/// Follows a characteristic through stored states with Heun's method,
/// interpolating `u` linearly in space.
pub fn trace_characteristic(
    history: &[RiemannState],
    model: &WaveSpeedModel,
    sign: CharacteristicSign,
    x_start: f64,
) -> Result<CharacteristicProbe> {
    let Some(first) = history.first() else {
        return Err(Error::Domain("empty history".into()));
    };
    let dir = match sign {
        CharacteristicSign::Plus => 1.0,
        CharacteristicSign::Minus => -1.0,
    };
    let sample = |s: &RiemannState, x: f64| -> Result<CharacteristicSample> {
        let g = s.grid();
        let at = |f: &Field| interpolate(f.values(), g, x).ok_or(Error::OutOfDomain { t: s.t, x });
        Ok(CharacteristicSample {
            t: s.t,
            x,
            r1: at(&s.r1)?,
            r2: at(&s.r2)?,
            u: at(&s.u)?,
        })
    };
    let speed = |s: &RiemannState, x: f64| -> Result<f64> {
        let u = interpolate(s.u.values(), s.grid(), x).ok_or(Error::OutOfDomain { t: s.t, x })?;
        Ok(dir * model.eval(u)?)
    };
    let mut path = vec![sample(first, x_start)?];
    let mut x = x_start;
    for pair in history.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        if a.grid() != b.grid() || b.t < a.t {
            return Err(Error::Domain("history must be time-ordered on one grid".into()));
        }
        let h = b.t - a.t;
        let k1 = speed(a, x)?;
        let k2 = speed(b, x + h * k1)?;
        x += 0.5 * h * (k1 + k2);
        path.push(sample(b, x)?);
    }
    Ok(CharacteristicProbe { sign, path })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::initial_data::{sample_profile, Profile};

    fn settings(model: &WaveSpeedModel, formulation: Formulation) -> SolverSettings {
        SolverSettings {
            formulation,
            ..SolverSettings::defaults(model, 1.0)
        }
    }

    fn uniform(g: Grid, u: f64, r1: f64, r2: f64) -> RiemannState {
        RiemannState::new(0.0, Field::constant(g, u), Field::constant(g, r1), Field::constant(g, r2)).unwrap()
    }

    #[test]
    fn cfl_examples() {
        let m = WaveSpeedModel::affine_shift(1.0, -1.0).unwrap();
        let g = Grid::new(0.0, 0.01, 32).unwrap();
        let mut s = settings(&m, Formulation::Characteristic);
        // c = 1 + u = 2
        let st = uniform(g, 1.0, 0.0, 0.0);
        assert!((cfl_timestep(&st, &m, &s).unwrap() - 0.00225).abs() < 1e-15);
        // min c near zero, max c = 1
        let mut u = vec![0.0; 32];
        u[5] = -1.0 + 1e-9;
        let st = RiemannState::new(0.0, Field::new(g, u).unwrap(), Field::zeros(g), Field::zeros(g)).unwrap();
        assert!((cfl_timestep(&st, &m, &s).unwrap() - 0.0045).abs() < 1e-15);
        let c1 = WaveSpeedModel::constant(1.0).unwrap();
        s.cfl = 0.5;
        let g = Grid::new(0.0, 0.1, 32).unwrap();
        assert!((cfl_timestep(&uniform(g, 3.0, 0.0, 0.0), &c1, &s).unwrap() - 0.05).abs() < 1e-15);
        s.dt_max = 0.01;
        assert_eq!(cfl_timestep(&uniform(g, 3.0, 0.0, 0.0), &c1, &s).unwrap(), 0.01);
    }

    #[test]
    fn source_coefficient_examples() {
        let g = Grid::new(0.0, 0.1, 16).unwrap();
        let c = WaveSpeedModel::constant(1.0).unwrap();
        assert!(source_coefficient(&c, &Field::constant(g, 0.3), 1e-3)
            .unwrap()
            .values()
            .iter()
            .all(|&v| v == 0.0));
        let z = WaveSpeedModel::zabusky(2.0).unwrap();
        let k = source_coefficient(&z, &Field::zeros(g), 1e-3).unwrap();
        assert!(k.values().iter().all(|&v| v == 0.5));
        let k = source_coefficient(&z, &Field::constant(g, -0.5), 1e-3).unwrap();
        assert!(k.values().iter().all(|&v| v == 1.0));
        assert!(source_coefficient(&z, &Field::constant(g, -0.9999), 1e-3).is_err());
    }

    #[test]
    fn riccati_substep_is_exact() {
        // b = 0: y' = k y^2, y = y0 / (1 - k y0 t)
        let y = riccati_substep(2.0, 0.0, 0.5, 0.3);
        assert!((y - 2.0 / (1.0 - 0.5 * 2.0 * 0.3)).abs() < 1e-14);
        assert_eq!(riccati_substep(2.0, 0.0, 0.5, 1.0), f64::INFINITY);
        // against a fine RK4 integration with b != 0
        let (k, b, y0, h) = (0.7, -1.3, 0.8, 0.4);
        let f = |y: f64| k * y * (y - b);
        let mut y = y0;
        let n = 10_000;
        let dt = h / n as f64;
        for _ in 0..n {
            let k1 = f(y);
            let k2 = f(y + 0.5 * dt * k1);
            let k3 = f(y + 0.5 * dt * k2);
            let k4 = f(y + dt * k3);
            y += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        assert!((riccati_substep(y0, b, k, h) - y).abs() < 1e-12);
        // zero is a fixed point, so signs never flip
        assert_eq!(riccati_substep(0.0, 5.0, 1.0, 1.0), 0.0);
        assert!(riccati_substep(-0.5, -3.0, 2.0, 10.0) < 0.0);
    }

    #[test]
    fn riccati_substep_with_subnormal_partner() {
        let plain = riccati_substep(2.0, 0.0, 0.5, 0.001);
        let tiny = riccati_substep(2.0, 5e-324, 0.5, 0.001);
        assert_eq!(plain, tiny);
        assert!(plain > 2.0);
        // small but representable lambda h goes through the series
        let y = riccati_substep(1.0, 1e-6, 1.0, 1e-3);
        let lambda: f64 = -1e-6;
        let want = (lambda * 1e-3).exp() / (1.0 - (lambda * 1e-3).exp_m1() / lambda);
        assert!((y - want).abs() < 1e-15);
    }

    #[test]
    fn zero_invariants_are_a_fixed_point() {
        let g = Grid::centered(2.0, 64).unwrap();
        let m = WaveSpeedModel::zabusky(2.0).unwrap();
        let u0 = sample_profile(&Profile::Bump { amplitude: 0.3, radius: 1.0 }, &g).unwrap();
        for formulation in [Formulation::Characteristic, Formulation::Conservative] {
            let st = RiemannState::new(0.0, u0.clone(), Field::zeros(g), Field::zeros(g)).unwrap();
            let (next, _) = step(&st, 0.01, &m, &settings(&m, formulation)).unwrap();
            assert_eq!(next.u, st.u);
            assert_eq!(next.r1, st.r1);
            assert_eq!(next.r2, st.r2);
            assert!((next.t - 0.01).abs() < 1e-16);
        }
    }

    #[test]
    fn reconstruct_examples() {
        let g = Grid::new(0.0, 0.1, 16).unwrap();
        let c = WaveSpeedModel::constant(1.0).unwrap();
        let (ut, ux) = reconstruct_gradients(&uniform(g, 0.0, 1.0, 1.0), &c, 1e-3).unwrap();
        assert!(ut.values().iter().all(|&v| v == 1.0) && ux.values().iter().all(|&v| v == 0.0));
        let (ut, ux) = reconstruct_gradients(&uniform(g, 0.0, 1.0, -1.0), &c, 1e-3).unwrap();
        assert!(ut.values().iter().all(|&v| v == 0.0) && ux.values().iter().all(|&v| v == 1.0));
        let z = WaveSpeedModel::zabusky(2.0).unwrap();
        assert!(reconstruct_gradients(&uniform(g, -0.9999, 1.0, -1.0), &z, 1e-3).is_err());
    }

    #[test]
    fn stop_events_seal_the_state() {
        let g = Grid::centered(1.0, 32).unwrap();
        let z = WaveSpeedModel::zabusky(2.0).unwrap();
        let s = settings(&z, Formulation::Characteristic);
        // u falls below 1e-3 above theta0 within one step
        let st = uniform(g, -0.9985, -1.0, -1.0);
        let stop = step(&st, 0.01, &z, &s).unwrap_err();
        assert!(stop.degenerate && !stop.blowup && stop.state.sealed);
        // R beyond m_blow
        let st = uniform(g, 0.0, 2000.0, 2000.0);
        let stop = step(&st, 1e-6, &z, &s).unwrap_err();
        assert!(stop.blowup && !stop.degenerate);
    }

    #[test]
    fn characteristics_of_constant_states() {
        let g = Grid::centered(5.0, 200).unwrap();
        let c = WaveSpeedModel::constant(1.0).unwrap();
        let history: Vec<RiemannState> = (0..=40)
            .map(|k| {
                let mut s = uniform(g, 0.0, 0.0, 0.0);
                s.t = k as f64 * 0.05;
                s
            })
            .collect();
        let plus = trace_characteristic(&history, &c, CharacteristicSign::Plus, 0.0).unwrap();
        for p in &plus.path {
            assert!((p.x - p.t).abs() < 1e-12);
        }
        let minus = trace_characteristic(&history, &c, CharacteristicSign::Minus, 0.0).unwrap();
        assert!((minus.path.last().unwrap().x + 2.0).abs() < 1e-12);

        let z = WaveSpeedModel::zabusky(2.0).unwrap();
        let history: Vec<RiemannState> = history
            .into_iter()
            .map(|mut s| {
                s.u = Field::constant(g, -0.5);
                s
            })
            .collect();
        let p = trace_characteristic(&history, &z, CharacteristicSign::Plus, 0.0).unwrap();
        assert!((p.path.last().unwrap().x - 1.0).abs() < 1e-12);
        // leaves the grid
        let err = trace_characteristic(&history, &c, CharacteristicSign::Plus, 4.0).unwrap_err();
        assert!(matches!(err, Error::OutOfDomain { .. }));
    }
}
