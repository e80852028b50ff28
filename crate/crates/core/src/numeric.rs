//! One-dimensional search and quadrature primitives shared by the error
//! evaluators and the three-point solvers.

use crate::error::{Error, Result};

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Locates the sign change of a non-increasing function on `[lo, hi]`.
///
/// Returns the midpoint of the final bracket once its width drops to `tol`
/// or the bracket can no longer be split in floating point. If `g` never
/// changes sign the result sits at the corresponding end of the range.
pub fn bisect_decreasing<G>(g: G, lo: f64, hi: f64, tol: f64, max_iter: usize) -> Result<f64>
where
    G: Fn(f64) -> f64,
{
    try_bisect_decreasing(|x| Ok(g(x)), lo, hi, tol, max_iter)
}

/// [`bisect_decreasing`] for a fallible `g`; the first error aborts the search.
pub fn try_bisect_decreasing<G>(mut g: G, mut lo: f64, mut hi: f64, tol: f64, max_iter: usize) -> Result<f64>
where
    G: FnMut(f64) -> Result<f64>,
{
    let done = |lo: f64, hi: f64, mid: f64| hi - lo <= tol || mid <= lo || mid >= hi;
    for _ in 0..max_iter {
        let mid = 0.5 * (lo + hi);
        if done(lo, hi, mid) {
            return Ok(mid);
        }
        if g(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mid = 0.5 * (lo + hi);
    if done(lo, hi, mid) {
        Ok(mid)
    } else {
        Err(Error::NoConvergence { lo, hi })
    }
}

/// Golden-section search for the maximum of a unimodal function.
///
/// Returns `(argmax, max)`.
pub fn golden_max<G>(g: G, mut lo: f64, mut hi: f64, tol: f64, max_iter: usize) -> Result<(f64, f64)>
where
    G: Fn(f64) -> f64,
{
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut g1 = g(x1);
    let mut g2 = g(x2);
    let mut iter = 0;
    while hi - lo > tol && x1 < x2 {
        if iter == max_iter {
            return Err(Error::NoConvergence { lo, hi });
        }
        iter += 1;
        if g1 < g2 {
            lo = x1;
            x1 = x2;
            g1 = g2;
            x2 = lo + INV_PHI * (hi - lo);
            g2 = g(x2);
        } else {
            hi = x2;
            x2 = x1;
            g2 = g1;
            x1 = hi - INV_PHI * (hi - lo);
            g1 = g(x1);
        }
    }
    Ok(if g1 >= g2 { (x1, g1) } else { (x2, g2) })
}

/// Adaptive Simpson quadrature with absolute tolerance `eps` and a recursion
/// depth cap.
pub fn adaptive_simpson<G>(g: G, a: f64, b: f64, eps: f64, max_depth: u32) -> f64
where
    G: Fn(f64) -> f64,
{
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (g(a), g(m), g(b));
    let whole = (b - a) * (fa + 4.0 * fm + fb) / 6.0;
    simpson_step(&g, a, b, fa, fm, fb, whole, eps, max_depth)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<G>(g: &G, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, eps: f64, depth: u32) -> f64
where
    G: Fn(f64) -> f64,
{
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (g(lm), g(rm));
    let left = (m - a) * (fa + 4.0 * flm + fm) / 6.0;
    let right = (b - m) * (fm + 4.0 * frm + fb) / 6.0;
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * eps || lm <= a || rm >= b {
        return left + right + delta / 15.0;
    }
    simpson_step(g, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1)
        + simpson_step(g, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1)
}
