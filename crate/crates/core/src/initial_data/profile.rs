use serde::{Deserialize, Serialize};

use super::grid::{Field, Grid};
use crate::error::{Error, Result};
use crate::wavespeed::expr::{parse_expr, Expr};

/// `int_{-1}^{1} exp(-1/(1 - s^2)) ds`.
pub const BUMP_UNIT_INTEGRAL: f64 = 0.443_993_816_168_079_4;

/// Initial profile, evaluated pointwise at grid nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Profile {
    Zero,
    /// `A exp(-1/(1 - (x/K)^2))` on `|x| < K`, exactly zero elsewhere.
    Bump { amplitude: f64, radius: f64 },
    /// `A exp(-x^2 / (2 sigma^2))` on `|x| < cutoff`, zero elsewhere.
    TruncatedGaussian { amplitude: f64, sigma: f64, cutoff: f64 },
    /// `scale * d/dx` of another (non-derivative) profile.
    ScaledDerivative { scale: f64, of: Box<Profile> },
    /// Expression in `x`.
    Custom { expr: String },
}

impl Profile {
    /// Bump of radius `radius` whose integral over the line is `mass`.
    pub fn bump_with_mass(mass: f64, radius: f64) -> Self {
        Profile::Bump {
            amplitude: mass / (radius * BUMP_UNIT_INTEGRAL),
            radius,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Profile::Zero => Ok(()),
            Profile::Bump { amplitude, radius } => {
                if !(radius.is_finite() && *radius > 0.0) || !amplitude.is_finite() {
                    return Err(Error::Domain(format!(
                        "bump needs a positive radius and finite amplitude, got K={radius}, A={amplitude}"
                    )));
                }
                Ok(())
            }
            Profile::TruncatedGaussian {
                amplitude,
                sigma,
                cutoff,
            } => {
                if !(sigma.is_finite() && *sigma > 0.0) || !(*cutoff > 0.0) || !amplitude.is_finite() {
                    return Err(Error::Domain(format!(
                        "gaussian needs sigma > 0 and cutoff > 0, got sigma={sigma}, cutoff={cutoff}"
                    )));
                }
                Ok(())
            }
            Profile::ScaledDerivative { scale, of } => {
                if !scale.is_finite() {
                    return Err(Error::Domain("derivative scale must be finite".into()));
                }
                if matches!(**of, Profile::ScaledDerivative { .. }) {
                    return Err(Error::Domain("nested derivative profiles are not supported".into()));
                }
                of.validate()
            }
            Profile::Custom { expr } => parse_expr(expr, "x").map(|_| ()),
        }
    }

    /// Radius of the exact support when it is known in closed form.
    pub fn support_radius(&self) -> Option<f64> {
        match self {
            Profile::Zero => Some(0.0),
            Profile::Bump { radius, .. } => Some(*radius),
            Profile::TruncatedGaussian { cutoff, .. } => Some(*cutoff),
            Profile::ScaledDerivative { of, .. } => of.support_radius(),
            Profile::Custom { .. } => None,
        }
    }

    fn evaluator(&self) -> Result<Evaluator> {
        self.validate()?;
        Ok(match self {
            Profile::Custom { expr } => Evaluator::Expr(parse_expr(expr, "x")?),
            Profile::ScaledDerivative { scale, of } => match &**of {
                Profile::Custom { expr } => {
                    let d = parse_expr(expr, "x")?.derivative();
                    Evaluator::ScaledExpr(*scale, d)
                }
                inner => Evaluator::Derivative(*scale, inner.clone()),
            },
            other => Evaluator::Plain(other.clone()),
        })
    }
}

enum Evaluator {
    Plain(Profile),
    Derivative(f64, Profile),
    Expr(Expr),
    ScaledExpr(f64, Expr),
}

impl Evaluator {
    fn value(&self, x: f64) -> Result<f64> {
        match self {
            Evaluator::Plain(p) => Ok(closed_form(p, x).0),
            Evaluator::Derivative(s, p) => Ok(s * closed_form(p, x).1),
            Evaluator::Expr(e) => e.eval(x),
            Evaluator::ScaledExpr(s, e) => Ok(s * e.eval(x)?),
        }
    }
}

/// Value and first derivative of the closed-form profiles.
fn closed_form(p: &Profile, x: f64) -> (f64, f64) {
    match *p {
        Profile::Bump { amplitude, radius } => {
            let s = x / radius;
            if s.abs() >= 1.0 {
                return (0.0, 0.0);
            }
            let q = 1.0 - s * s;
            let f = amplitude * (-1.0 / q).exp();
            (f, f * (-2.0 * s / (q * q)) / radius)
        }
        Profile::TruncatedGaussian {
            amplitude,
            sigma,
            cutoff,
        } => {
            if x.abs() >= cutoff {
                return (0.0, 0.0);
            }
            let f = amplitude * (-0.5 * x * x / (sigma * sigma)).exp();
            (f, -x / (sigma * sigma) * f)
        }
        _ => (0.0, 0.0),
    }
}

/// Evaluates a profile at every node of `grid`.
pub fn sample_profile(p: &Profile, grid: &Grid) -> Result<Field> {
    let ev = p.evaluator()?;
    let values = grid.nodes().map(|x| ev.value(x)).collect::<Result<Vec<_>>>()?;
    Field::new(*grid, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::initial_data::grid::compact_support_radius;
    use crate::wavespeed::quadrature::integrate;

    #[test]
    fn bump_unit_integral_matches_quadrature() {
        let v = integrate(|s: f64| Ok((-1.0 / (1.0 - s * s)).exp()), -1.0, 1.0, 1e-14, 2000).unwrap();
        assert!((v - BUMP_UNIT_INTEGRAL).abs() < 1e-14);
    }

    #[test]
    fn zero_profile() {
        let g = Grid::centered(3.0, 64).unwrap();
        let f = sample_profile(&Profile::Zero, &g).unwrap();
        assert!(f.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn bump_values_and_support() {
        let g = Grid::new(-2.0, 0.5, 16).unwrap();
        let f = sample_profile(&Profile::Bump { amplitude: 1.0, radius: 1.0 }, &g).unwrap();
        // nodes at x = 0 and x = 1.5
        assert!((f.values()[4] - (-1f64).exp()).abs() < 1e-15);
        assert_eq!(f.values()[7], 0.0);
        assert_eq!(f.values()[6], 0.0); // x = 1 lies on the boundary of the support
        let g = Grid::centered(3.0, 600).unwrap();
        let f = sample_profile(&Profile::Bump { amplitude: 1.0, radius: 1.0 }, &g).unwrap();
        let k = compact_support_radius(&f, 0.0);
        assert!((k - 1.0).abs() <= g.dx());
    }

    #[test]
    fn truncated_gaussian_support() {
        let g = Grid::centered(5.0, 500).unwrap();
        let p = Profile::TruncatedGaussian {
            amplitude: 1.0,
            sigma: 1.0,
            cutoff: 3.0,
        };
        let f = sample_profile(&p, &g).unwrap();
        assert!((compact_support_radius(&f, 0.0) - 3.0).abs() <= g.dx());
    }

    #[test]
    fn bump_with_mass_integrates_to_mass() {
        let g = Grid::centered(2.0, 800).unwrap();
        let f = sample_profile(&Profile::bump_with_mass(-0.375, 1.0), &g).unwrap();
        assert!((f.integral() + 0.375).abs() < 1e-12);
    }

    #[test]
    fn analytic_derivatives_match_finite_differences() {
        let h = 1e-6;
        for p in [
            Profile::Bump { amplitude: 2.0, radius: 1.5 },
            Profile::TruncatedGaussian {
                amplitude: -1.0,
                sigma: 0.7,
                cutoff: 4.0,
            },
            Profile::Custom { expr: "exp(-x^2) * x".into() },
        ] {
            let d = Profile::ScaledDerivative {
                scale: 1.0,
                of: Box::new(p.clone()),
            };
            let (ev, dv) = (p.evaluator().unwrap(), d.evaluator().unwrap());
            for x in [-1.1, -0.3, 0.0, 0.45, 1.2] {
                let fd = (ev.value(x + h).unwrap() - ev.value(x - h).unwrap()) / (2.0 * h);
                assert!((dv.value(x).unwrap() - fd).abs() < 1e-7, "{p:?} at {x}");
            }
        }
    }

    #[test]
    fn invalid_parameters() {
        let g = Grid::centered(1.0, 32).unwrap();
        assert!(sample_profile(&Profile::Bump { amplitude: 1.0, radius: 0.0 }, &g).is_err());
        let bad = Profile::TruncatedGaussian {
            amplitude: 1.0,
            sigma: -1.0,
            cutoff: 1.0,
        };
        assert!(sample_profile(&bad, &g).is_err());
        let nested = Profile::ScaledDerivative {
            scale: 1.0,
            of: Box::new(Profile::ScaledDerivative {
                scale: 1.0,
                of: Box::new(Profile::Zero),
            }),
        };
        assert!(sample_profile(&nested, &g).is_err());
        assert!(sample_profile(&Profile::Custom { expr: "1/x".into() }, &Grid::new(0.0, 0.1, 16).unwrap()).is_err());
    }
}
