//! Adaptive Simpson quadrature.

use crate::error::{Error, Result};

const MAX_DEPTH: u32 = 50;
const MAX_EVALUATIONS: usize = 2_000_000;

/// Integrates `f` over `[lo, hi]` to absolute tolerance `tol`, using
/// Richardson-corrected adaptive Simpson steps.
pub fn integrate<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    if !(lo.is_finite() && hi.is_finite()) || hi < lo {
        return Err(Error::Quadrature { lo, hi });
    }
    if hi == lo {
        return Ok(0.0);
    }
    let mid = 0.5 * (lo + hi);
    let (fa, fm, fb) = (f(lo), f(mid), f(hi));
    let whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
    let mut budget = Budget { evaluations: 3, failed: false };
    let v = simpson(&f, lo, hi, fa, fm, fb, whole, tol, MAX_DEPTH, &mut budget);
    if budget.failed || !v.is_finite() {
        return Err(Error::Quadrature { lo, hi });
    }
    Ok(v)
}

struct Budget {
    evaluations: usize,
    failed: bool,
}

#[allow(clippy::too_many_arguments)]
fn simpson<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    budget: &mut Budget,
) -> f64 {
    if budget.failed {
        return 0.0;
    }
    budget.evaluations += 2;
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let diff = left + right - whole;
    if diff.abs() <= 15.0 * tol {
        return left + right + diff / 15.0;
    }
    if depth == 0 || budget.evaluations > MAX_EVALUATIONS {
        budget.failed = true;
        return left + right;
    }
    simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, budget)
        + simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, budget)
}
