//! Scalar functions, their domains and the built-in catalog.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Curvature tag carried by a [`ScalarFunction`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Curvature {
    Concave,
    StrictlyConcave,
    Convex,
    StrictlyConvex,
    Unknown,
}

impl Curvature {
    pub fn is_concave(self) -> bool {
        matches!(self, Curvature::Concave | Curvature::StrictlyConcave)
    }

    pub fn is_convex(self) -> bool {
        matches!(self, Curvature::Convex | Curvature::StrictlyConvex)
    }

    pub fn is_strict(self) -> bool {
        matches!(self, Curvature::StrictlyConcave | Curvature::StrictlyConvex)
    }

    /// Convex and concave swap, strictness is kept. `Unknown` has no flip.
    pub fn flipped(self) -> Option<Curvature> {
        match self {
            Curvature::Concave => Some(Curvature::Convex),
            Curvature::StrictlyConcave => Some(Curvature::StrictlyConvex),
            Curvature::Convex => Some(Curvature::Concave),
            Curvature::StrictlyConvex => Some(Curvature::StrictlyConcave),
            Curvature::Unknown => None,
        }
    }

    /// Sign `s` such that `s * (f - chord)` is non-negative on every interval.
    pub fn orientation(self) -> Option<f64> {
        if self.is_concave() {
            Some(1.0)
        } else if self.is_convex() {
            Some(-1.0)
        } else {
            None
        }
    }
}

/// A closed interval `[lo, hi]` with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_finite() && hi.is_finite() && lo < hi {
            Ok(Interval { lo, hi })
        } else {
            Err(Error::InvalidInterval { lo, hi })
        }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// The set on which a function may be evaluated. Either end may be open and
/// either end may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Domain {
    pub const fn real_line() -> Self {
        Domain { lo: f64::NEG_INFINITY, hi: f64::INFINITY, lo_closed: false, hi_closed: false }
    }

    /// `(0, inf)`
    pub const fn positive() -> Self {
        Domain { lo: 0.0, hi: f64::INFINITY, lo_closed: false, hi_closed: false }
    }

    /// `[0, inf)`
    pub const fn non_negative() -> Self {
        Domain { lo: 0.0, hi: f64::INFINITY, lo_closed: true, hi_closed: false }
    }

    pub fn contains(&self, x: f64) -> bool {
        let above = if self.lo_closed { x >= self.lo } else { x > self.lo };
        let below = if self.hi_closed { x <= self.hi } else { x < self.hi };
        x.is_finite() && above && below
    }

    pub fn contains_interval(&self, iv: &Interval) -> bool {
        self.contains(iv.lo) && self.contains(iv.hi)
    }
}

/// Closed forms the solvers may use instead of a numeric search. Assigned only
/// by the catalog, never inferred from values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum FastPath {
    Log,
}

/// An evaluable scalar function with optional derivative and antiderivative.
///
/// Immutable once built; clones share the underlying closures.
#[derive(Clone)]
pub struct ScalarFunction {
    name: String,
    eval: RealFn,
    derivative: Option<RealFn>,
    antiderivative: Option<RealFn>,
    curvature: Curvature,
    domain: Domain,
    fast_path: Option<FastPath>,
}

impl fmt::Debug for ScalarFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarFunction")
            .field("name", &self.name)
            .field("curvature", &self.curvature)
            .field("domain", &self.domain)
            .field("derivative", &self.derivative.is_some())
            .field("antiderivative", &self.antiderivative.is_some())
            .finish()
    }
}

impl ScalarFunction {
    /// A user function with unknown curvature and no derivative information.
    pub fn new<F>(name: impl Into<String>, domain: Domain, eval: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        ScalarFunction {
            name: name.into(),
            eval: Arc::new(eval),
            derivative: None,
            antiderivative: None,
            curvature: Curvature::Unknown,
            domain,
            fast_path: None,
        }
    }

    pub fn with_curvature(mut self, curvature: Curvature) -> Self {
        self.curvature = curvature;
        self
    }

    pub fn with_derivative<F>(mut self, derivative: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        self.derivative = Some(Arc::new(derivative));
        self
    }

    pub fn with_antiderivative<F>(mut self, antiderivative: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        self.antiderivative = Some(Arc::new(antiderivative));
        self
    }

    /// `x -> slope * x + intercept`, tagged as (non-strictly) concave.
    pub fn affine(slope: f64, intercept: f64) -> Self {
        ScalarFunction::new("affine", Domain::real_line(), move |x| slope * x + intercept)
            .with_curvature(Curvature::Concave)
            .with_derivative(move |_| slope)
            .with_antiderivative(move |x| 0.5 * slope * x * x + intercept * x)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn curvature(&self) -> Curvature {
        self.curvature
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub(crate) fn fast_path(&self) -> Option<FastPath> {
        self.fast_path
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        (self.eval)(x)
    }

    pub fn has_derivative(&self) -> bool {
        self.derivative.is_some()
    }

    pub fn has_antiderivative(&self) -> bool {
        self.antiderivative.is_some()
    }

    /// f'(x): the supplied derivative, or a central difference with step
    /// `max(1e-6, 1e-8 |x|)` when none was supplied.
    pub fn derivative(&self, x: f64) -> f64 {
        match &self.derivative {
            Some(d) => d(x),
            None => {
                let h = (1e-8 * x.abs()).max(1e-6);
                (self.eval(x + h) - self.eval(x - h)) / (2.0 * h)
            }
        }
    }

    pub(crate) fn analytic_derivative(&self, x: f64) -> Option<f64> {
        self.derivative.as_ref().map(|d| d(x))
    }

    pub fn antiderivative(&self, x: f64) -> Option<f64> {
        self.antiderivative.as_ref().map(|a| a(x))
    }

    pub fn check_interval(&self, iv: &Interval) -> Result<()> {
        if self.domain.contains_interval(iv) {
            Ok(())
        } else {
            Err(Error::DomainViolation { function: self.name.clone(), lo: iv.lo, hi: iv.hi })
        }
    }
}

/// Names accepted by [`catalog_get`]. `power(p)` takes any `p` in `(0, 1)`.
pub const CATALOG_NAMES: &[&str] = &["ln", "sqrt", "neg_square", "x_ln_x_neg", "exp_convex", "power(p)"];

/// Looks up a built-in function by name.
pub fn catalog_get(name: &str) -> Result<ScalarFunction> {
    let f = match name {
        "ln" => {
            let mut f = ScalarFunction::new("ln", Domain::positive(), f64::ln)
                .with_curvature(Curvature::StrictlyConcave)
                .with_derivative(|x| 1.0 / x)
                .with_antiderivative(|x| x * x.ln() - x);
            f.fast_path = Some(FastPath::Log);
            f
        }
        "sqrt" => ScalarFunction::new("sqrt", Domain::non_negative(), f64::sqrt)
            .with_curvature(Curvature::StrictlyConcave)
            .with_derivative(|x| 0.5 / x.sqrt())
            .with_antiderivative(|x| 2.0 / 3.0 * x * x.sqrt()),
        "neg_square" => ScalarFunction::new("neg_square", Domain::real_line(), |x| -x * x)
            .with_curvature(Curvature::StrictlyConcave)
            .with_derivative(|x| -2.0 * x)
            .with_antiderivative(|x| -x * x * x / 3.0),
        "x_ln_x_neg" => ScalarFunction::new("x_ln_x_neg", Domain::positive(), |x| -x * x.ln())
            .with_curvature(Curvature::StrictlyConcave)
            .with_derivative(|x| -x.ln() - 1.0)
            .with_antiderivative(|x| -(0.5 * x * x * x.ln() - 0.25 * x * x)),
        "exp_convex" => ScalarFunction::new("exp_convex", Domain::real_line(), f64::exp)
            .with_curvature(Curvature::StrictlyConvex)
            .with_derivative(f64::exp)
            .with_antiderivative(f64::exp),
        other => return power_from_name(other),
    };
    Ok(f)
}

fn power_from_name(name: &str) -> Result<ScalarFunction> {
    let unknown = || Error::UnknownFunction(name.to_string());
    let p: f64 = name
        .strip_prefix("power(")
        .and_then(|rest| rest.strip_suffix(')'))
        .ok_or_else(unknown)?
        .trim()
        .parse()
        .map_err(|_| unknown())?;
    if !(p > 0.0 && p < 1.0) {
        return Err(unknown());
    }
    Ok(ScalarFunction::new(name, Domain::non_negative(), move |x| x.powf(p))
        .with_curvature(Curvature::StrictlyConcave)
        .with_derivative(move |x| p * x.powf(p - 1.0))
        .with_antiderivative(move |x| x.powf(p + 1.0) / (p + 1.0)))
}

/// Returns `-f`, with curvature, derivative and antiderivative negated.
///
/// Convex and concave functions share optimal breakpoints with their mirror,
/// so the solvers only ever have to deal with one orientation.
pub fn mirror(f: &ScalarFunction) -> Result<ScalarFunction> {
    let curvature = f.curvature.flipped().ok_or_else(|| Error::CurvatureUnknown(f.name.clone()))?;
    let name = match f.name.strip_prefix('-') {
        Some(inner) => inner.to_string(),
        None => format!("-{}", f.name),
    };
    let eval = f.eval.clone();
    let negate = |g: &RealFn| -> RealFn {
        let g = g.clone();
        Arc::new(move |x| -g(x))
    };
    Ok(ScalarFunction {
        name,
        eval: Arc::new(move |x| -eval(x)),
        derivative: f.derivative.as_ref().map(negate),
        antiderivative: f.antiderivative.as_ref().map(negate),
        curvature,
        domain: f.domain,
        fast_path: f.fast_path,
    })
}
