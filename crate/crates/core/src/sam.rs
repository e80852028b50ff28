//! Sequential adjusting sweeps.
//!
//! Each sweep visits the interior breakpoints in ascending order and moves
//! `x_i` to the three-point optimum of its current neighbours, using the
//! already-updated left neighbour (Gauss-Seidel order). Sweeps repeat until
//! no point moves by more than the tolerance.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::{mirror, Interval, ScalarFunction};
use crate::interval_error::{evaluate_set, IntervalErrorReport};
use crate::solvers::{phi, theta, SolverConfig};

/// Strictly increasing abscissae `x_1 < ... < x_N` with `N >= 2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct BreakpointSet(Vec<f64>);

impl BreakpointSet {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidCount(points.len()));
        }
        if let Some(bad) = points.iter().find(|x| !x.is_finite()) {
            return Err(Error::InvalidExplicit(format!("non-finite breakpoint {bad}")));
        }
        if let Some(w) = points.windows(2).find(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidExplicit(format!("not strictly increasing at {} >= {}", w[0], w[1])));
        }
        Ok(BreakpointSet(points))
    }

    pub fn points(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn first(&self) -> f64 {
        self.0[0]
    }

    pub fn last(&self) -> f64 {
        self.0[self.0.len() - 1]
    }

    pub fn range(&self) -> Interval {
        Interval { lo: self.first(), hi: self.last() }
    }

    /// Consecutive pairs as intervals.
    pub fn intervals(&self) -> impl Iterator<Item = Interval> + '_ {
        self.0.windows(2).map(|w| Interval { lo: w[0], hi: w[1] })
    }
}

impl TryFrom<Vec<f64>> for BreakpointSet {
    type Error = Error;

    fn try_from(points: Vec<f64>) -> Result<Self> {
        BreakpointSet::new(points)
    }
}

impl From<BreakpointSet> for Vec<f64> {
    fn from(bps: BreakpointSet) -> Self {
        bps.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Criterion {
    /// Minimal maximum absolute error.
    #[serde(rename = "minmax")]
    MinMaxAbs,
    /// Minimal area between function and approximation.
    #[serde(rename = "area")]
    MinArea,
}

impl Criterion {
    pub fn as_str(self) -> &'static str {
        match self {
            Criterion::MinMaxAbs => "minmax",
            Criterion::MinArea => "area",
        }
    }

    /// The three-point optimum used when sweeping under this criterion.
    pub fn split(self, f: &ScalarFunction, a: f64, b: f64, cfg: &SolverConfig) -> Result<f64> {
        match self {
            Criterion::MinMaxAbs => phi(f, a, b, cfg),
            Criterion::MinArea => theta(f, a, b, cfg),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Init {
    Uniform,
    Random(u64),
    Explicit(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamConfig {
    pub criterion: Criterion,
    /// Convergence threshold on the largest per-point movement in a sweep.
    pub tolerance: f64,
    pub max_sweeps: usize,
    pub init: Init,
    pub solver: SolverConfig,
}

pub const DEFAULT_TOLERANCE: f64 = 1e-8;
/// Sweep count grows roughly with `N^2`; `N = 100` on `ln` needs about 13k.
pub const DEFAULT_MAX_SWEEPS: usize = 100_000;

impl Default for SamConfig {
    fn default() -> Self {
        SamConfig {
            criterion: Criterion::MinMaxAbs,
            tolerance: DEFAULT_TOLERANCE,
            max_sweeps: DEFAULT_MAX_SWEEPS,
            init: Init::Uniform,
            solver: SolverConfig::default(),
        }
    }
}

impl SamConfig {
    pub fn new(criterion: Criterion) -> Self {
        SamConfig { criterion, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidConfig(format!("tolerance must be > 0, got {}", self.tolerance)));
        }
        if self.max_sweeps == 0 {
            return Err(Error::InvalidConfig("max_sweeps must be >= 1".into()));
        }
        self.solver.validate()
    }
}

/// State after one sweep. Sweep 0 is the initial set, with zero movement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub sweep: usize,
    pub breakpoints: Vec<f64>,
    pub e_max: f64,
    pub area_error: f64,
    pub max_movement: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SamTrace {
    pub records: Vec<SweepRecord>,
}

impl SamTrace {
    pub fn last(&self) -> Option<&SweepRecord> {
        self.records.last()
    }

    /// The record for sweep `k`, or the last one if fewer sweeps ran.
    pub fn at_sweep(&self, k: usize) -> Option<&SweepRecord> {
        self.records.get(k).or_else(|| self.records.last())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SamResult {
    pub breakpoints: BreakpointSet,
    pub trace: SamTrace,
    pub converged: bool,
    pub sweeps: usize,
    pub intervals: Vec<IntervalErrorReport>,
    pub e_max: f64,
    pub total_area: f64,
    pub criterion: Criterion,
    pub tolerance: f64,
}

impl SamResult {
    /// The value of the criterion that was optimized.
    pub fn objective(&self) -> f64 {
        match self.criterion {
            Criterion::MinMaxAbs => self.e_max,
            Criterion::MinArea => self.total_area,
        }
    }

    pub fn ensure_converged(&self) -> Result<&Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::MaxSweepsExceeded {
                sweeps: self.sweeps,
                movement: self.trace.last().map_or(f64::NAN, |r| r.max_movement),
            })
        }
    }
}

pub fn init_breakpoints(range: &Interval, n: usize, mode: &Init) -> Result<BreakpointSet> {
    if n < 2 {
        return Err(Error::InvalidCount(n));
    }
    let range = Interval::new(range.lo, range.hi)?;
    let points = match mode {
        Init::Uniform => {
            let step = range.width() / (n - 1) as f64;
            let mut pts: Vec<f64> = (0..n).map(|i| range.lo + step * i as f64).collect();
            pts[n - 1] = range.hi;
            pts
        }
        Init::Random(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let mut interior: Vec<f64> = Vec::with_capacity(n - 2);
            while interior.len() < n - 2 {
                let x = rng.gen_range(range.lo..range.hi);
                if x > range.lo && !interior.contains(&x) {
                    interior.push(x);
                }
            }
            interior.sort_by(f64::total_cmp);
            let mut pts = Vec::with_capacity(n);
            pts.push(range.lo);
            pts.extend(interior);
            pts.push(range.hi);
            pts
        }
        Init::Explicit(points) => {
            if points.len() != n {
                return Err(Error::InvalidExplicit(format!("expected {n} points, got {}", points.len())));
            }
            if points.first() != Some(&range.lo) || points.last() != Some(&range.hi) {
                return Err(Error::InvalidExplicit(format!(
                    "endpoints must be {} and {}",
                    range.lo, range.hi
                )));
            }
            points.clone()
        }
    };
    BreakpointSet::new(points)
}

/// One in-place ascending pass over the interior points.
///
/// Returns the new set and the largest movement of any point. Failures name
/// the zero-based index of the point being updated.
pub fn sweep(f: &ScalarFunction, bps: &BreakpointSet, cfg: &SamConfig) -> Result<(BreakpointSet, f64)> {
    let mut pts = bps.0.clone();
    let tol = cfg.solver.bisection_tol;
    let mut movement: f64 = 0.0;
    for i in 1..pts.len().saturating_sub(1) {
        let (a, b) = (pts[i - 1], pts[i + 1]);
        let c = cfg
            .criterion
            .split(f, a, b, &cfg.solver)
            .map_err(|e| Error::SweepFailed { index: i, source: Box::new(e) })?;
        if !(a + tol < c && c < b - tol) {
            return Err(Error::NumericalCollapse { index: i, x: c });
        }
        movement = movement.max((c - pts[i]).abs());
        pts[i] = c;
    }
    Ok((BreakpointSet(pts), movement))
}

/// Sweeps until the largest movement is within `cfg.tolerance`.
///
/// Convex functions are optimized through their mirror; the breakpoints are
/// the same. Hitting `max_sweeps` is not an error: the best set so far comes
/// back with `converged == false`.
pub fn optimize(f: &ScalarFunction, range: &Interval, n: usize, cfg: &SamConfig) -> Result<SamResult> {
    cfg.validate()?;
    let range = Interval::new(range.lo, range.hi)?;
    f.check_interval(&range)?;
    let curvature = f.curvature();
    let mirrored;
    let work = if curvature.is_convex() {
        mirrored = mirror(f)?;
        &mirrored
    } else if curvature.is_concave() || cfg.solver.assume_concave {
        f
    } else {
        return Err(Error::CurvatureUnknown(f.name().to_string()));
    };

    let mut bps = init_breakpoints(&range, n, &cfg.init)?;
    let mut report = evaluate_set(work, &bps)?;
    let mut trace = SamTrace::default();
    trace.records.push(SweepRecord {
        sweep: 0,
        breakpoints: bps.0.clone(),
        e_max: report.e_max,
        area_error: report.total_area,
        max_movement: 0.0,
    });

    let mut converged = n <= 2;
    let mut sweeps = 0;
    while !converged && sweeps < cfg.max_sweeps {
        let (next, movement) = sweep(work, &bps, cfg)?;
        sweeps += 1;
        bps = next;
        report = evaluate_set(work, &bps)?;
        log::debug!(
            "sweep {sweeps}: e_max {:e} area {:e} movement {:e}",
            report.e_max,
            report.total_area,
            movement
        );
        trace.records.push(SweepRecord {
            sweep: sweeps,
            breakpoints: bps.0.clone(),
            e_max: report.e_max,
            area_error: report.total_area,
            max_movement: movement,
        });
        converged = movement <= cfg.tolerance;
    }

    if converged {
        log::info!("{} ({}): converged after {sweeps} sweeps, n = {n}", f.name(), cfg.criterion.as_str());
    } else {
        log::warn!("{} ({}): no convergence after {sweeps} sweeps", f.name(), cfg.criterion.as_str());
    }

    Ok(SamResult {
        breakpoints: bps,
        trace,
        converged,
        sweeps,
        intervals: report.intervals,
        e_max: report.e_max,
        total_area: report.total_area,
        criterion: cfg.criterion,
        tolerance: cfg.tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::{catalog_get, Domain};

    fn ln() -> ScalarFunction {
        catalog_get("ln").unwrap()
    }

    fn range() -> Interval {
        Interval::new(0.1, 10.0).unwrap()
    }

    #[test]
    fn uniform_init() {
        let b = init_breakpoints(&range(), 5, &Init::Uniform).unwrap();
        let expect = [0.1, 2.575, 5.05, 7.525, 10.0];
        for (x, e) in b.points().iter().zip(expect) {
            assert!((x - e).abs() < 1e-14);
        }
        let b = init_breakpoints(&Interval::new(0.0, 1.0).unwrap(), 2, &Init::Uniform).unwrap();
        assert_eq!(b.points(), &[0.0, 1.0]);
    }

    #[test]
    fn random_init_is_deterministic() {
        let a = init_breakpoints(&range(), 5, &Init::Random(7)).unwrap();
        let b = init_breakpoints(&range(), 5, &Init::Random(7)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.first(), 0.1);
        assert_eq!(a.last(), 10.0);
        assert_ne!(a, init_breakpoints(&range(), 5, &Init::Random(8)).unwrap());
    }

    #[test]
    fn init_errors() {
        assert!(matches!(init_breakpoints(&range(), 1, &Init::Uniform), Err(Error::InvalidCount(1))));
        let bad = Init::Explicit(vec![0.1, 3.0, 2.0, 10.0]);
        assert!(matches!(init_breakpoints(&range(), 4, &bad), Err(Error::InvalidExplicit(_))));
        let ends = Init::Explicit(vec![0.2, 3.0, 10.0]);
        assert!(matches!(init_breakpoints(&range(), 3, &ends), Err(Error::InvalidExplicit(_))));
        let ok = Init::Explicit(vec![0.1, 3.0, 10.0]);
        assert_eq!(init_breakpoints(&range(), 3, &ok).unwrap().points(), &[0.1, 3.0, 10.0]);
    }

    #[test]
    fn breakpoint_set_validation() {
        assert!(BreakpointSet::new(vec![1.0]).is_err());
        assert!(BreakpointSet::new(vec![1.0, 1.0]).is_err());
        assert!(BreakpointSet::new(vec![1.0, f64::NAN]).is_err());
        let parsed: std::result::Result<BreakpointSet, _> = serde_json::from_str("[2.0, 1.0]");
        assert!(parsed.is_err());
    }

    #[test]
    fn first_sweep_uses_updated_left_neighbour() {
        let bps = BreakpointSet::new(vec![0.1, 2.575, 5.05, 7.525, 10.0]).unwrap();
        let (next, _) = sweep(&ln(), &bps, &SamConfig::default()).unwrap();
        let x2 = (0.1f64 * 5.05).sqrt();
        assert!((next.points()[1] - x2).abs() < 1e-15);
        assert!((next.points()[1] - 0.71063).abs() < 1e-5);
        let x3 = (x2 * 7.525).sqrt();
        assert!((next.points()[2] - x3).abs() < 1e-15);
        let x4 = (x3 * 10.0).sqrt();
        assert!((next.points()[3] - x4).abs() < 1e-15);
    }

    #[test]
    fn two_points_do_not_move() {
        let bps = BreakpointSet::new(vec![0.1, 10.0]).unwrap();
        let (next, movement) = sweep(&ln(), &bps, &SamConfig::default()).unwrap();
        assert_eq!(next, bps);
        assert_eq!(movement, 0.0);
        let res = optimize(&ln(), &range(), 2, &SamConfig::default()).unwrap();
        assert!(res.converged);
        assert_eq!(res.sweeps, 0);
        assert_eq!(res.intervals.len(), 1);
    }

    #[test]
    fn three_points_reach_fixed_point_in_one_sweep() {
        for criterion in [Criterion::MinMaxAbs, Criterion::MinArea] {
            let cfg = SamConfig::new(criterion);
            let bps = BreakpointSet::new(vec![0.1, 5.05, 10.0]).unwrap();
            let (once, _) = sweep(&ln(), &bps, &cfg).unwrap();
            let direct = criterion.split(&ln(), 0.1, 10.0, &cfg.solver).unwrap();
            assert_eq!(once.points()[1], direct);
            let (twice, movement) = sweep(&ln(), &once, &cfg).unwrap();
            assert_eq!(twice, once);
            assert_eq!(movement, 0.0);
        }
    }

    #[test]
    fn optimize_ln_minmax() {
        let res = optimize(&ln(), &range(), 5, &SamConfig::default()).unwrap();
        assert!(res.converged);
        assert!((res.e_max - 0.16272).abs() < 5e-4);
        let geometric = [0.1, 0.31623, 1.0, 3.16228, 10.0];
        for (x, g) in res.breakpoints.points().iter().zip(geometric) {
            assert!((x - g).abs() < 1e-5);
        }
        let after3 = res.trace.records[3].e_max;
        assert!((0.16..=0.26).contains(&after3));
        assert!(res.trace.last().unwrap().max_movement <= res.tolerance);
    }

    #[test]
    fn optimize_ln_area_stationarity() {
        let res = optimize(&ln(), &range(), 5, &SamConfig::new(Criterion::MinArea)).unwrap();
        assert!(res.converged);
        let p = res.breakpoints.points();
        for i in 1..4 {
            let expect = (p[i + 1] - p[i - 1]) / (p[i + 1].ln() - p[i - 1].ln());
            assert!((p[i] - expect).abs() < 1e-7);
        }
    }

    #[test]
    fn unconverged_run_is_soft_failure() {
        let cfg = SamConfig { max_sweeps: 2, ..Default::default() };
        let res = optimize(&ln(), &range(), 5, &cfg).unwrap();
        assert!(!res.converged);
        assert_eq!(res.sweeps, 2);
        assert_eq!(res.trace.records.len(), 3);
        assert!(matches!(res.ensure_converged(), Err(Error::MaxSweepsExceeded { sweeps: 2, .. })));
    }

    #[test]
    fn unknown_curvature_rejected_without_override() {
        let f = ScalarFunction::new("user_ln", Domain::positive(), f64::ln);
        assert!(matches!(
            optimize(&f, &range(), 4, &SamConfig::default()),
            Err(Error::CurvatureUnknown(_))
        ));
        let mut cfg = SamConfig::default();
        cfg.solver.assume_concave = true;
        let res = optimize(&f, &range(), 4, &cfg).unwrap();
        let reference = optimize(&ln(), &range(), 4, &SamConfig::default()).unwrap();
        for (a, b) in res.breakpoints.points().iter().zip(reference.breakpoints.points()) {
            assert!((a - b).abs() < 1e-6);
        }
    }

    #[test]
    fn bad_config_and_range() {
        let cfg = SamConfig { tolerance: 0.0, ..Default::default() };
        assert!(matches!(optimize(&ln(), &range(), 5, &cfg), Err(Error::InvalidConfig(_))));
        let bad = Interval { lo: -1.0, hi: 1.0 };
        assert!(matches!(optimize(&ln(), &bad, 5, &SamConfig::default()), Err(Error::DomainViolation { .. })));
    }

    #[test]
    fn sweep_surfaces_failing_index() {
        let f = ScalarFunction::affine(1.0, 0.0);
        let bps = BreakpointSet::new(vec![0.0, 1.0, 2.0]).unwrap();
        let err = sweep(&f, &bps, &SamConfig::new(Criterion::MinArea)).unwrap_err();
        assert!(matches!(err, Error::SweepFailed { index: 1, .. }));
    }
}
