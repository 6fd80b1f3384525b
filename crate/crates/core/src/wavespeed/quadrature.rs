//! Adaptive 7/15-point Gauss-Kronrod quadrature with interval bisection.
//!
//! Only interior nodes are ever evaluated, so integrands that are undefined
//! exactly at an endpoint (the degeneracy point of a wave speed) are fine.

use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

// Gauss weights for the odd Kronrod nodes (1, 3, 5) and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15<F>(f: &F, lo: f64, hi: f64) -> Result<Panel>
where
    F: Fn(f64) -> Result<f64>,
{
    let centre = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(centre)?;
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for (j, (&x, &wk)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let f1 = f(centre - half * x)?;
        let f2 = f(centre + half * x)?;
        kronrod += wk * (f1 + f2);
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    Ok(Panel {
        lo,
        hi,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    })
}

/// Integrates `f` over a finite interval to relative tolerance `rel_tol`
/// (with an absolute floor of `rel_tol * 1e-6`), bisecting the panel with
/// the largest error estimate until the budget of `max_panels` is spent.
pub fn integrate<F>(f: F, lo: f64, hi: f64, rel_tol: f64, max_panels: usize) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(Error::Domain(format!("integration bounds must be finite, got [{lo}, {hi}]")));
    }
    if lo == hi {
        return Ok(0.0);
    }
    if hi < lo {
        return integrate(f, hi, lo, rel_tol, max_panels).map(|v| -v);
    }
    let mut heap = BinaryHeap::new();
    let first = gk15(&f, lo, hi)?;
    let mut total = first.value;
    let mut error = first.error;
    heap.push(first);
    while error > rel_tol * total.abs().max(1e-6) {
        if heap.len() >= max_panels {
            return Err(Error::Quadrature { lo, hi, estimate: error });
        }
        let worst = heap.pop().expect("heap never empties");
        let mid = 0.5 * (worst.lo + worst.hi);
        if mid <= worst.lo || mid >= worst.hi {
            return Err(Error::Quadrature { lo, hi, estimate: error });
        }
        let left = gk15(&f, worst.lo, mid)?;
        let right = gk15(&f, mid, worst.hi)?;
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    // re-sum to shed the drift of the running updates
    Ok(heap.iter().map(|p| p.value).sum())
}
