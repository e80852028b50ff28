//! Single-interior-point subproblems.
//!
//! Given fixed neighbours `a < b`, [`phi`] places `c` so that the chords on
//! `[a, c]` and `[c, b]` have equal maximum error (the minmax split), and
//! [`theta`] places `c` at the point of largest gap between `f` and the chord
//! over `[a, b]` (the minimal-area split, where `f'(c)` equals the chord
//! slope). Catalog `ln` has closed forms for both: `sqrt(ab)` and
//! `(b - a) / (ln b - ln a)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::{FastPath, Interval, ScalarFunction};
use crate::interval_error::{chord_of, max_abs_error, signed_deviation};
use crate::numeric::{bisect_decreasing, golden_max, try_bisect_decreasing};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Abscissa tolerance of the inner searches.
    pub bisection_tol: f64,
    pub max_inner_iter: usize,
    /// Treat a function with unknown curvature as if it were concave. The
    /// optimality guarantees do not hold for such functions.
    pub assume_concave: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { bisection_tol: 1e-12, max_inner_iter: 200, assume_concave: false }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.bisection_tol > 0.0) {
            return Err(Error::InvalidConfig(format!("bisection_tol must be > 0, got {}", self.bisection_tol)));
        }
        if self.max_inner_iter == 0 {
            return Err(Error::InvalidConfig("max_inner_iter must be >= 1".into()));
        }
        Ok(())
    }
}

fn prepare(f: &ScalarFunction, a: f64, b: f64, cfg: &SolverConfig) -> Result<Interval> {
    cfg.validate()?;
    let iv = Interval::new(a, b)?;
    f.check_interval(&iv)?;
    if f.curvature().orientation().is_none() && !cfg.assume_concave {
        return Err(Error::CurvatureUnknown(f.name().to_string()));
    }
    Ok(iv)
}

/// Interior point equalizing the maximum chord errors of `[a, c]` and `[c, b]`.
pub fn phi(f: &ScalarFunction, a: f64, b: f64, cfg: &SolverConfig) -> Result<f64> {
    let iv = prepare(f, a, b, cfg)?;
    if f.fast_path() == Some(FastPath::Log) {
        return Ok((a * b).sqrt());
    }
    phi_numeric(f, &iv, cfg)
}

/// [`phi`] without any closed-form shortcut.
pub fn phi_numeric(f: &ScalarFunction, iv: &Interval, cfg: &SolverConfig) -> Result<f64> {
    let eps = 1e-9 * iv.width();
    let (a, b) = (iv.lo, iv.hi);
    // E([a, c]) grows and E([c, b]) shrinks with c, so the difference has a
    // single sign change.
    try_bisect_decreasing(
        |c| {
            let left = max_abs_error(f, &Interval::new(a, c)?)?.max_abs_error;
            let right = max_abs_error(f, &Interval::new(c, b)?)?.max_abs_error;
            Ok(right - left)
        },
        a + eps,
        b - eps,
        cfg.bisection_tol,
        cfg.max_inner_iter,
    )
}

/// The unique maximizer of the gap between `f` and the chord over `[a, b]`.
pub fn theta(f: &ScalarFunction, a: f64, b: f64, cfg: &SolverConfig) -> Result<f64> {
    let iv = prepare(f, a, b, cfg)?;
    if f.fast_path() == Some(FastPath::Log) {
        return Ok((b - a) / (b.ln() - a.ln()));
    }
    theta_numeric(f, &iv, cfg)
}

/// [`theta`] without any closed-form shortcut.
pub fn theta_numeric(f: &ScalarFunction, iv: &Interval, cfg: &SolverConfig) -> Result<f64> {
    let chord = chord_of(f, iv)?;
    let sign = match f.curvature().orientation() {
        Some(s) => s,
        None => {
            let mid = 0.5 * (iv.lo + iv.hi);
            if signed_deviation(f, &chord, mid) < 0.0 {
                -1.0
            } else {
                1.0
            }
        }
    };
    let not_strict = || Error::NotStrictlyConcave { function: f.name().to_string(), lo: iv.lo, hi: iv.hi };
    let tol = cfg.bisection_tol;

    let c = if f.has_derivative() {
        let d = |x: f64| sign * (f.analytic_derivative(x).unwrap_or(f64::NAN) - chord.slope);
        let c = bisect_decreasing(d, iv.lo, iv.hi, tol, cfg.max_inner_iter)?;

        // Extent of the set where f' matches the chord slope up to rounding.
        // Each end is located to within tol / 2.
        let band = 4.0 * f64::EPSILON * chord.slope.abs() + f64::MIN_POSITIVE;
        let first = bisect_decreasing(|x| d(x) - band, iv.lo, iv.hi, tol, cfg.max_inner_iter)?;
        let last = bisect_decreasing(|x| d(x) + band, iv.lo, iv.hi, tol, cfg.max_inner_iter)?;
        if last - first > 2.0 * tol {
            return Err(not_strict());
        }
        c
    } else {
        let (c, gap) = golden_max(|x| sign * signed_deviation(f, &chord, x), iv.lo, iv.hi, tol, cfg.max_inner_iter)?;
        let scale = chord.at(iv.lo).abs() + chord.at(iv.hi).abs();
        if !(gap > 64.0 * f64::EPSILON * scale) {
            return Err(not_strict());
        }
        c
    };

    if c - iv.lo <= tol || iv.hi - c <= tol {
        return Err(not_strict());
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::{catalog_get, mirror, Curvature, Domain};
    use crate::interval_error::area_error;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cfg() -> SolverConfig {
        SolverConfig::default()
    }

    fn max_err(f: &ScalarFunction, lo: f64, hi: f64) -> f64 {
        max_abs_error(f, &Interval::new(lo, hi).unwrap()).unwrap().max_abs_error
    }

    fn split_area(f: &ScalarFunction, a: f64, c: f64, b: f64) -> f64 {
        area_error(f, &Interval::new(a, c).unwrap()).unwrap() + area_error(f, &Interval::new(c, b).unwrap()).unwrap()
    }

    fn ranges() -> Vec<(ScalarFunction, f64, f64)> {
        vec![
            (catalog_get("ln").unwrap(), 0.05, 20.0),
            (catalog_get("sqrt").unwrap(), 0.0, 10.0),
            (catalog_get("neg_square").unwrap(), -3.0, 3.0),
            (catalog_get("x_ln_x_neg").unwrap(), 0.05, 5.0),
            (catalog_get("exp_convex").unwrap(), -1.0, 3.0),
            (catalog_get("power(0.3)").unwrap(), 0.0, 8.0),
        ]
    }

    #[test]
    fn phi_examples() {
        let ln = catalog_get("ln").unwrap();
        assert_eq!(phi(&ln, 0.1, 10.0, &cfg()).unwrap(), 1.0);
        let sq = catalog_get("neg_square").unwrap();
        assert!(phi(&sq, -1.0, 1.0, &cfg()).unwrap().abs() < 1e-11);
        let numeric = phi_numeric(&ln, &Interval::new(1.0, 4.0).unwrap(), &cfg()).unwrap();
        assert!((numeric - 2.0).abs() < 1e-10);
    }

    #[test]
    fn theta_examples() {
        let ln = catalog_get("ln").unwrap();
        let c = theta(&ln, 0.1, 10.0, &cfg()).unwrap();
        assert!((c - 9.9 / 100f64.ln()).abs() < 1e-15);
        assert!((c - 2.14976).abs() < 1e-5);
        let sq = catalog_get("neg_square").unwrap();
        assert!(theta(&sq, -1.0, 1.0, &cfg()).unwrap().abs() < 1e-12);
        assert!((theta(&sq, 0.0, 1.0, &cfg()).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn unknown_curvature_needs_override() {
        let f = ScalarFunction::new("ln_user", Domain::positive(), f64::ln);
        assert!(matches!(phi(&f, 1.0, 4.0, &cfg()), Err(Error::CurvatureUnknown(_))));
        assert!(matches!(theta(&f, 1.0, 4.0, &cfg()), Err(Error::CurvatureUnknown(_))));
        let over = SolverConfig { assume_concave: true, ..cfg() };
        assert!((phi(&f, 1.0, 4.0, &over).unwrap() - 2.0).abs() < 1e-9);
        assert!((theta(&f, 1.0, 4.0, &over).unwrap() - 3.0 / 4f64.ln()).abs() < 1e-7);
    }

    #[test]
    fn domain_and_config_errors() {
        let ln = catalog_get("ln").unwrap();
        assert!(matches!(phi(&ln, -1.0, 1.0, &cfg()), Err(Error::DomainViolation { .. })));
        assert!(matches!(theta(&ln, 2.0, 1.0, &cfg()), Err(Error::InvalidInterval { .. })));
        let bad = SolverConfig { bisection_tol: 0.0, ..cfg() };
        assert!(matches!(phi(&ln, 1.0, 2.0, &bad), Err(Error::InvalidConfig(_))));
        let starved = SolverConfig { max_inner_iter: 3, ..cfg() };
        let sq = catalog_get("neg_square").unwrap();
        assert!(matches!(phi(&sq, -1.0, 1.0, &starved), Err(Error::NoConvergence { .. })));
    }

    #[test]
    fn theta_rejects_affine() {
        let f = ScalarFunction::affine(2.5, -1.0);
        assert!(matches!(theta(&f, -3.0, 4.0, &cfg()), Err(Error::NotStrictlyConcave { .. })));
        let flat = ScalarFunction::new("flat_plain", Domain::real_line(), |x| 0.5 * x)
            .with_curvature(Curvature::Concave);
        assert!(matches!(theta(&flat, 0.0, 1.0, &cfg()), Err(Error::NotStrictlyConcave { .. })));
    }

    #[test]
    fn theta_rejects_plateau() {
        // Concave, with a linear stretch on [1, 2] parallel to the chord over [0, 3].
        let f = ScalarFunction::new("kinked", Domain::real_line(), |x: f64| {
            if x < 1.0 {
                -(x - 1.0) * (x - 1.0)
            } else if x <= 2.0 {
                0.0
            } else {
                -(x - 2.0) * (x - 2.0)
            }
        })
        .with_curvature(Curvature::Concave)
        .with_derivative(|x: f64| {
            if x < 1.0 {
                -2.0 * (x - 1.0)
            } else if x <= 2.0 {
                0.0
            } else {
                -2.0 * (x - 2.0)
            }
        });
        assert!(matches!(theta(&f, 0.0, 3.0, &cfg()), Err(Error::NotStrictlyConcave { .. })));
    }

    #[test]
    fn phi_equalizes_and_sandwiches() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for (f, lo, hi) in ranges() {
            for _ in 0..30 {
                let a = rng.gen_range(lo..hi);
                let b = rng.gen_range(a..hi);
                if b - a < 1e-2 {
                    continue;
                }
                let c = phi(&f, a, b, &cfg()).unwrap();
                assert!(a < c && c < b);
                let (e1, e2) = (max_err(&f, a, c), max_err(&f, c, b));
                assert!((e1 - e2).abs() <= 1e-9, "{} [{a}, {b}]: {e1} vs {e2}", f.name());
                let other = rng.gen_range(a..b);
                if (other - c).abs() < 1e-6 * (b - a) || other <= a {
                    continue;
                }
                let (o1, o2) = (max_err(&f, a, other), max_err(&f, other, b));
                assert!(o1.min(o2) < e1 && e1 < o1.max(o2), "{}: sandwich", f.name());
            }
        }
    }

    #[test]
    fn theta_beats_random_interior_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for (f, lo, hi) in ranges() {
            let (a, b) = (lo + 0.1 * (hi - lo), hi - 0.2 * (hi - lo));
            let c = theta(&f, a, b, &cfg()).unwrap();
            let best = split_area(&f, a, c, b);
            for _ in 0..100 {
                let other = rng.gen_range(a..b);
                if other <= a {
                    continue;
                }
                assert!(best <= split_area(&f, a, other, b) + 1e-14, "{}", f.name());
            }
        }
    }

    #[test]
    fn theta_is_monotone_in_both_ends() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        for (f, lo, hi) in ranges() {
            for _ in 0..50 {
                let a = rng.gen_range(lo..hi - 0.5);
                let c1 = rng.gen_range(a + 0.1..hi);
                let c2 = rng.gen_range(c1..hi);
                if c2 - c1 < 1e-9 || c1 - a < 1e-3 {
                    continue;
                }
                assert!(theta(&f, a, c1, &cfg()).unwrap() <= theta(&f, a, c2, &cfg()).unwrap());
                let a2 = rng.gen_range(a..c1);
                if c1 - a2 < 1e-3 || a2 - a < 1e-9 {
                    continue;
                }
                assert!(theta(&f, a, c1, &cfg()).unwrap() <= theta(&f, a2, c1, &cfg()).unwrap());
            }
        }
    }

    #[test]
    fn ln_closed_forms_match_numeric_paths() {
        let ln = catalog_get("ln").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        for _ in 0..100 {
            let a = rng.gen_range(1e-3..100.0);
            let b = rng.gen_range(a..100.0);
            if b - a < 1e-3 {
                continue;
            }
            let iv = Interval::new(a, b).unwrap();
            let p = phi_numeric(&ln, &iv, &cfg()).unwrap();
            assert!((p - (a * b).sqrt()).abs() <= 1e-10 * b.max(1.0), "phi [{a}, {b}]");
            let t = theta_numeric(&ln, &iv, &cfg()).unwrap();
            assert!((t - (b - a) / (b.ln() - a.ln())).abs() <= 1e-10 * b.max(1.0), "theta [{a}, {b}]");
        }
    }

    #[test]
    fn theta_satisfies_tangency() {
        for (f, lo, hi) in ranges() {
            let (a, b) = (lo + 0.05 * (hi - lo), hi);
            let c = theta(&f, a, b, &cfg()).unwrap();
            let slope = (f.eval(b) - f.eval(a)) / (b - a);
            assert!((f.derivative(c) - slope).abs() < 1e-8 * slope.abs().max(1.0), "{}", f.name());
        }
    }

    #[test]
    fn mirrored_solvers_agree() {
        let exp = catalog_get("exp_convex").unwrap();
        let neg = mirror(&exp).unwrap();
        assert_eq!(phi(&exp, 0.0, 3.0, &cfg()).unwrap(), phi(&neg, 0.0, 3.0, &cfg()).unwrap());
        assert_eq!(theta(&exp, 0.0, 3.0, &cfg()).unwrap(), theta(&neg, 0.0, 3.0, &cfg()).unwrap());
        // exp: f'(c) = slope gives c = ln((e^3 - 1) / 3).
        let expect = ((3f64.exp() - 1.0) / 3.0).ln();
        assert!((theta(&exp, 0.0, 3.0, &cfg()).unwrap() - expect).abs() < 1e-11);
    }

    #[test]
    fn derivative_free_theta() {
        let f = ScalarFunction::new("ln_plain", Domain::positive(), f64::ln).with_curvature(Curvature::StrictlyConcave);
        let c = theta(&f, 0.1, 10.0, &cfg()).unwrap();
        assert!((c - 9.9 / 100f64.ln()).abs() < 1e-7);
    }
}
