//! Chord errors over a single interval and over a whole breakpoint set.
//!
//! Two criteria are supported: the maximum absolute deviation between `f`
//! and its chord, and the area enclosed between them. The area is the
//! integral of `|f - L|` over the piece; under a convex or concave tag the
//! integrand keeps one sign, so it reduces to `±∫(f - L)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::{Interval, ScalarFunction};
use crate::numeric::{adaptive_simpson, bisect_decreasing, golden_max};
use crate::sam::BreakpointSet;

/// Abscissa tolerance for the interior maximizer search.
pub const ARGMAX_TOL: f64 = 1e-12;
const ARGMAX_MAX_ITER: usize = 200;
/// Absolute tolerance of the fallback quadrature.
pub const QUADRATURE_TOL: f64 = 1e-10;
pub const QUADRATURE_MAX_DEPTH: u32 = 50;
/// Intervals narrower than this are rejected.
pub const MIN_WIDTH: f64 = 1e-12;
/// Deviation below this (after orientation) means the curvature tag is wrong.
pub const CURVATURE_SLACK: f64 = 1e-9;
const CURVATURE_PROBES: usize = 16;
const UNKNOWN_SCAN: usize = 64;

/// The line through `(lo, f(lo))` and `(hi, f(hi))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Chord {
    pub interval: Interval,
    pub slope: f64,
    pub intercept: f64,
    y_lo: f64,
}

impl Chord {
    /// Value of the line at `x`, anchored at the left endpoint.
    #[inline]
    pub fn at(&self, x: f64) -> f64 {
        self.y_lo + self.slope * (x - self.interval.lo)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaxDeviation {
    pub argmax_x: f64,
    pub max_abs_error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntervalErrorReport {
    pub interval: Interval,
    pub argmax_x: f64,
    pub max_abs_error: f64,
    pub area_error: f64,
}

/// Per-interval reports plus the two aggregates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetErrorReport {
    pub intervals: Vec<IntervalErrorReport>,
    pub e_max: f64,
    pub total_area: f64,
}

fn validate(f: &ScalarFunction, iv: &Interval) -> Result<()> {
    if !(iv.width() >= MIN_WIDTH) {
        return Err(Error::InvalidInterval { lo: iv.lo, hi: iv.hi });
    }
    f.check_interval(iv)
}

pub fn chord_of(f: &ScalarFunction, iv: &Interval) -> Result<Chord> {
    f.check_interval(iv)?;
    Ok(make_chord(f, iv))
}

fn make_chord(f: &ScalarFunction, iv: &Interval) -> Chord {
    let y_lo = f.eval(iv.lo);
    let y_hi = f.eval(iv.hi);
    let slope = (y_hi - y_lo) / (iv.hi - iv.lo);
    Chord { interval: *iv, slope, intercept: y_lo - slope * iv.lo, y_lo }
}

/// Signed deviation `f(x) - L(x)` of `f` from `chord`.
#[inline]
pub fn signed_deviation(f: &ScalarFunction, chord: &Chord, x: f64) -> f64 {
    f.eval(x) - chord.at(x)
}

/// Location and size of the largest deviation of `f` from its chord on `iv`.
pub fn max_abs_error(f: &ScalarFunction, iv: &Interval) -> Result<MaxDeviation> {
    validate(f, iv)?;
    let chord = make_chord(f, iv);
    match f.curvature().orientation() {
        Some(sign) => oriented_max(f, &chord, sign),
        None => unknown_max(f, &chord),
    }
}

fn oriented_max(f: &ScalarFunction, chord: &Chord, sign: f64) -> Result<MaxDeviation> {
    let iv = chord.interval;
    let dev = |x: f64| sign * signed_deviation(f, chord, x);

    for k in 1..=CURVATURE_PROBES {
        let x = iv.lo + iv.width() * k as f64 / (CURVATURE_PROBES + 1) as f64;
        let d = dev(x);
        if d < -CURVATURE_SLACK {
            return Err(Error::NonConcaveDetected { function: f.name().to_string(), x, deviation: d });
        }
    }

    let argmax_x = if f.has_derivative() {
        // s * (f'(x) - slope) is non-increasing when s * f is concave.
        bisect_decreasing(
            |x| sign * (f.analytic_derivative(x).unwrap_or(f64::NAN) - chord.slope),
            iv.lo,
            iv.hi,
            ARGMAX_TOL,
            ARGMAX_MAX_ITER,
        )?
    } else {
        golden_max(dev, iv.lo, iv.hi, ARGMAX_TOL, ARGMAX_MAX_ITER)?.0
    };
    Ok(MaxDeviation { argmax_x, max_abs_error: dev(argmax_x).max(0.0) })
}

fn unknown_max(f: &ScalarFunction, chord: &Chord) -> Result<MaxDeviation> {
    let iv = chord.interval;
    let abs_dev = |x: f64| signed_deviation(f, chord, x).abs();
    let step = iv.width() / UNKNOWN_SCAN as f64;
    let best = (1..UNKNOWN_SCAN)
        .map(|k| iv.lo + step * k as f64)
        .map(|x| (x, abs_dev(x)))
        .fold((iv.lo, 0.0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
    let lo = (best.0 - step).max(iv.lo);
    let hi = (best.0 + step).min(iv.hi);
    let (x, v) = golden_max(abs_dev, lo, hi, ARGMAX_TOL, ARGMAX_MAX_ITER)?;
    Ok(if v >= best.1 {
        MaxDeviation { argmax_x: x, max_abs_error: v }
    } else {
        MaxDeviation { argmax_x: best.0, max_abs_error: best.1 }
    })
}

/// Area between `f` and its chord on `iv`.
///
/// Uses the antiderivative when one is available and the curvature is
/// tagged, adaptive Simpson otherwise.
pub fn area_error(f: &ScalarFunction, iv: &Interval) -> Result<f64> {
    validate(f, iv)?;
    if let (Some(sign), true) = (f.curvature().orientation(), f.has_antiderivative()) {
        let big_f = |x: f64| f.antiderivative(x).unwrap_or(f64::NAN);
        let (y_lo, y_hi) = (f.eval(iv.lo), f.eval(iv.hi));
        let under_f = big_f(iv.hi) - big_f(iv.lo);
        let under_chord = 0.5 * (y_lo + y_hi) * iv.width();
        return Ok((sign * (under_f - under_chord)).max(0.0));
    }
    area_error_by_quadrature(f, iv)
}

/// `∫|f - L|` over `iv` by adaptive Simpson, ignoring any antiderivative.
pub fn area_error_by_quadrature(f: &ScalarFunction, iv: &Interval) -> Result<f64> {
    validate(f, iv)?;
    let chord = make_chord(f, iv);
    Ok(adaptive_simpson(
        |x| signed_deviation(f, &chord, x).abs(),
        iv.lo,
        iv.hi,
        QUADRATURE_TOL,
        QUADRATURE_MAX_DEPTH,
    ))
}

/// Both criteria for one interval.
pub fn interval_report(f: &ScalarFunction, iv: &Interval) -> Result<IntervalErrorReport> {
    let max = max_abs_error(f, iv)?;
    Ok(IntervalErrorReport {
        interval: *iv,
        argmax_x: max.argmax_x,
        max_abs_error: max.max_abs_error,
        area_error: area_error(f, iv)?,
    })
}

/// One report per consecutive pair of breakpoints, with `E_max` and the
/// total area.
pub fn evaluate_set(f: &ScalarFunction, bps: &BreakpointSet) -> Result<SetErrorReport> {
    let intervals = bps
        .intervals()
        .map(|iv| interval_report(f, &iv))
        .collect::<Result<Vec<_>>>()?;
    let e_max = intervals.iter().map(|r| r.max_abs_error).fold(0.0, f64::max);
    let total_area = intervals.iter().map(|r| r.area_error).sum();
    Ok(SetErrorReport { intervals, e_max, total_area })
}
