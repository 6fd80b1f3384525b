//! Wave-speed functions `c(theta)` with derivative and degeneracy point.
//!
//! A model is immutable after construction. `theta0 = -inf` is the sentinel
//! for a speed that never degenerates.

pub mod expr;
pub mod quadrature;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
pub use expr::{derive_speed_expr, parse_expr, parse_speed_expr, Expr};

const PRIMITIVE_REL_TOL: f64 = 1e-9;
const PRIMITIVE_MAX_PANELS: usize = 4000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpeedKind {
    /// `c(theta) = (1 + theta)^(a/2)`, the nonlinear string family.
    Zabusky { a: f64 },
    Constant { c0: f64 },
    /// `c(theta) = slope * (theta - theta0)`.
    AffineShift { slope: f64 },
    Expression {
        text: String,
        ast: Expr,
        derivative: Expr,
    },
}

/// Result of evaluating the speed where degeneracy is possible.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpeedSample {
    Positive(f64),
    /// At or below `theta0`; the speed is taken as zero.
    Degenerate,
}

impl SpeedSample {
    pub fn value(self) -> f64 {
        match self {
            SpeedSample::Positive(c) => c,
            SpeedSample::Degenerate => 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveSpeedModel {
    kind: SpeedKind,
    theta0: f64,
    monotone: bool,
    c_at_zero: f64,
}

impl WaveSpeedModel {
    pub fn zabusky(a: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::Domain(format!("Zabusky exponent must be positive, got {a}")));
        }
        Ok(Self {
            kind: SpeedKind::Zabusky { a },
            theta0: -1.0,
            monotone: true,
            c_at_zero: 1.0,
        })
    }

    pub fn constant(c0: f64) -> Result<Self> {
        if !(c0 > 0.0 && c0.is_finite()) {
            return Err(Error::Domain(format!("constant speed must be positive, got {c0}")));
        }
        Ok(Self {
            kind: SpeedKind::Constant { c0 },
            theta0: f64::NEG_INFINITY,
            monotone: true,
            c_at_zero: c0,
        })
    }

    pub fn affine_shift(slope: f64, theta0: f64) -> Result<Self> {
        if !(slope > 0.0 && slope.is_finite()) {
            return Err(Error::Domain(format!("affine slope must be positive, got {slope}")));
        }
        if !(theta0 < 0.0 && theta0.is_finite()) {
            return Err(Error::Domain(format!("affine theta0 must be finite and negative, got {theta0}")));
        }
        Ok(Self {
            kind: SpeedKind::AffineShift { slope },
            theta0,
            monotone: true,
            c_at_zero: -slope * theta0,
        })
    }

    /// User-defined speed. `theta0` may be `-inf`; `monotone` asserts
    /// `c' >= 0` above `theta0` and is probed, not trusted.
    pub fn expression(text: &str, theta0: f64, monotone: bool) -> Result<Self> {
        if !(theta0 < 0.0) || theta0.is_nan() {
            return Err(Error::Domain(format!("theta0 must be negative or -inf, got {theta0}")));
        }
        let ast = parse_speed_expr(text)?;
        let derivative = derive_speed_expr(&ast);
        let c_at_zero = ast.eval(0.0)?;
        if !(c_at_zero > 0.0 && c_at_zero.is_finite()) {
            return Err(Error::Domain(format!("c(0) must be positive and finite, got {c_at_zero}")));
        }
        let model = Self {
            kind: SpeedKind::Expression {
                text: text.to_string(),
                ast,
                derivative,
            },
            theta0,
            monotone,
            c_at_zero,
        };
        model.probe_invariants()?;
        Ok(model)
    }

    pub fn kind(&self) -> &SpeedKind {
        &self.kind
    }

    pub fn theta0(&self) -> f64 {
        self.theta0
    }

    pub fn is_monotone(&self) -> bool {
        self.monotone
    }

    pub fn c_at_zero(&self) -> f64 {
        self.c_at_zero
    }

    pub fn degenerates(&self) -> bool {
        self.theta0.is_finite()
    }

    /// `c(theta)` for `theta > theta0`.
    pub fn eval(&self, theta: f64) -> Result<f64> {
        if theta <= self.theta0 || theta.is_nan() {
            return Err(Error::Degeneracy {
                theta,
                theta0: self.theta0,
            });
        }
        match &self.kind {
            SpeedKind::Zabusky { a } => Ok((1.0 + theta).powf(0.5 * a)),
            SpeedKind::Constant { c0 } => Ok(*c0),
            SpeedKind::AffineShift { slope } => Ok(slope * (theta - self.theta0)),
            SpeedKind::Expression { ast, .. } => ast.eval(theta),
        }
    }

    /// `c'(theta)` for `theta > theta0`.
    pub fn derivative(&self, theta: f64) -> Result<f64> {
        if theta <= self.theta0 || theta.is_nan() {
            return Err(Error::Degeneracy {
                theta,
                theta0: self.theta0,
            });
        }
        match &self.kind {
            SpeedKind::Zabusky { a } => Ok(0.5 * a * (1.0 + theta).powf(0.5 * a - 1.0)),
            SpeedKind::Constant { .. } => Ok(0.0),
            SpeedKind::AffineShift { slope } => Ok(*slope),
            SpeedKind::Expression { derivative, .. } => derivative.eval(theta),
        }
    }

    /// Like [`eval`](Self::eval) but maps the degenerate region to zero.
    /// Used for diagnostics only; the solvers stop before reaching it.
    pub fn sample(&self, theta: f64) -> SpeedSample {
        match self.eval(theta) {
            Ok(c) if c > 0.0 => SpeedSample::Positive(c),
            _ => SpeedSample::Degenerate,
        }
    }

    /// `int_lo^hi c(theta) dtheta`. `lo` may equal `theta0`; with
    /// `theta0 = -inf` and `lo = -inf` the primitive is `+inf`.
    pub fn primitive(&self, lo: f64, hi: f64) -> Result<f64> {
        if lo.is_nan() || hi.is_nan() {
            return Err(Error::Domain("NaN integration bound".into()));
        }
        if hi < lo {
            return self.primitive(hi, lo).map(|v| -v);
        }
        if lo < self.theta0 {
            return Err(Error::Degeneracy {
                theta: lo,
                theta0: self.theta0,
            });
        }
        if lo == f64::NEG_INFINITY {
            return Ok(f64::INFINITY);
        }
        if hi == f64::INFINITY {
            return Ok(f64::INFINITY);
        }
        match &self.kind {
            SpeedKind::Constant { c0 } => Ok(c0 * (hi - lo)),
            _ => quadrature::integrate(|t| self.eval(t), lo, hi, PRIMITIVE_REL_TOL, PRIMITIVE_MAX_PANELS),
        }
    }

    /// Probes positivity and, when flagged, monotonicity on a log-spaced set
    /// above `theta0`.
    pub fn probe_invariants(&self) -> Result<()> {
        for theta in self.probe_points() {
            let c = self.eval(theta)?;
            if !(c > 0.0) {
                return Err(Error::Domain(format!("c({theta}) = {c} is not positive")));
            }
            if self.monotone {
                let dc = self.derivative(theta)?;
                if dc < 0.0 {
                    return Err(Error::Domain(format!("c'({theta}) = {dc} < 0 for a monotone model")));
                }
            }
        }
        Ok(())
    }

    /// Log-spaced probe set: `theta0 + 10^k` for k in -6..=1 plus a few
    /// points up to 10 when `theta0` is finite, symmetric decades otherwise.
    pub fn probe_points(&self) -> Vec<f64> {
        let mut pts = Vec::new();
        if self.theta0.is_finite() {
            for k in -12..=4 {
                pts.push(self.theta0 + 10f64.powf(k as f64 * 0.5));
            }
        } else {
            for k in -6..=2 {
                let m = 10f64.powi(k);
                pts.push(m);
                pts.push(-m);
            }
            pts.push(0.0);
        }
        pts
    }
}

/// Convenience wrapper mirroring [`WaveSpeedModel::eval`].
pub fn eval_speed(model: &WaveSpeedModel, theta: f64) -> Result<f64> {
    model.eval(theta)
}

/// Convenience wrapper mirroring [`WaveSpeedModel::primitive`].
pub fn speed_primitive(model: &WaveSpeedModel, lo: f64, hi: f64) -> Result<f64> {
    model.primitive(lo, hi)
}

pub fn builtin_zabusky(a: f64) -> Result<WaveSpeedModel> {
    WaveSpeedModel::zabusky(a)
}
