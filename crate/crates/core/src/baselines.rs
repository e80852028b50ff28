//! Reference strategies to compare against the sweep optimizer: uniform
//! spacing, greedy worst-interval splitting and an exhaustive grid search.
//!
//! The grid search is deliberately naive. It only evaluates interval errors
//! and never calls the three-point solvers, so it can certify their output.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::{Interval, ScalarFunction};
use crate::interval_error::{area_error, evaluate_set, max_abs_error, SetErrorReport};
use crate::sam::{init_breakpoints, BreakpointSet, Criterion, Init};
use crate::solvers::SolverConfig;

pub const MAX_GREEDY_INSERTIONS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineResult {
    pub breakpoints: BreakpointSet,
    pub report: SetErrorReport,
}

/// Criterion cost of a single chord.
pub fn interval_cost(f: &ScalarFunction, iv: &Interval, criterion: Criterion) -> Result<f64> {
    match criterion {
        Criterion::MinMaxAbs => Ok(max_abs_error(f, iv)?.max_abs_error),
        Criterion::MinArea => area_error(f, iv),
    }
}

/// Combines per-interval costs: max for minmax, sum for area.
fn combine(criterion: Criterion, costs: impl Iterator<Item = f64>) -> f64 {
    match criterion {
        Criterion::MinMaxAbs => costs.fold(0.0, f64::max),
        Criterion::MinArea => costs.sum(),
    }
}

/// Criterion value of a whole breakpoint set.
pub fn set_cost(f: &ScalarFunction, bps: &BreakpointSet, criterion: Criterion) -> Result<f64> {
    let costs = bps
        .intervals()
        .map(|iv| interval_cost(f, &iv, criterion))
        .collect::<Result<Vec<_>>>()?;
    Ok(combine(criterion, costs.into_iter()))
}

/// Equally spaced breakpoints and their errors.
pub fn uniform_baseline(f: &ScalarFunction, range: &Interval, n: usize) -> Result<BaselineResult> {
    f.check_interval(range)?;
    let breakpoints = init_breakpoints(range, n, &Init::Uniform)?;
    let report = evaluate_set(f, &breakpoints)?;
    Ok(BaselineResult { breakpoints, report })
}

/// Starting from the endpoints, repeatedly splits the interval with the
/// largest criterion error at its three-point optimum until the global
/// criterion error is at most `threshold`.
pub fn greedy_insert(
    f: &ScalarFunction,
    range: &Interval,
    threshold: f64,
    criterion: Criterion,
    solver: &SolverConfig,
) -> Result<BreakpointSet> {
    if !(threshold > 0.0) {
        return Err(Error::InvalidConfig(format!("threshold must be > 0, got {threshold}")));
    }
    let range = Interval::new(range.lo, range.hi)?;
    f.check_interval(&range)?;

    let mut points = vec![range.lo, range.hi];
    let mut costs = vec![interval_cost(f, &range, criterion)?];
    let mut insertions = 0;
    while combine(criterion, costs.iter().copied()) > threshold {
        if insertions == MAX_GREEDY_INSERTIONS {
            return Err(Error::InsertionLimit(MAX_GREEDY_INSERTIONS));
        }
        let worst = costs
            .iter()
            .enumerate()
            .fold(0, |best, (i, &c)| if c > costs[best] { i } else { best });
        let (a, b) = (points[worst], points[worst + 1]);
        let c = criterion.split(f, a, b, solver)?;
        let left = interval_cost(f, &Interval::new(a, c)?, criterion)?;
        let right = interval_cost(f, &Interval::new(c, b)?, criterion)?;
        points.insert(worst + 1, c);
        costs.splice(worst..=worst, [left, right]);
        insertions += 1;
    }
    log::debug!("greedy: {} points after {insertions} insertions", points.len());
    BreakpointSet::new(points)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub breakpoints: BreakpointSet,
    /// Criterion value of `breakpoints`.
    pub objective: f64,
    /// Spacing of the candidate grid.
    pub grid_step: f64,
    /// Largest change in the objective from moving any single interior point
    /// of the best tuple by one grid step.
    pub resolution_bound: f64,
}

/// Exhaustive search over interior points on a uniform grid of
/// `grid_points` candidates strictly inside `range`.
///
/// Supports `n = 3` (up to 20000 candidates) and `n = 4` (up to 2000). Ties
/// go to the lexicographically smallest tuple.
pub fn grid_oracle(
    f: &ScalarFunction,
    range: &Interval,
    n: usize,
    criterion: Criterion,
    grid_points: usize,
) -> Result<OracleResult> {
    let budget = match n {
        3 => 20_000,
        4 => 2_000,
        _ => return Err(Error::BudgetExceeded(format!("grid oracle supports n = 3 or 4, got {n}"))),
    };
    if grid_points == 0 || grid_points > budget {
        return Err(Error::BudgetExceeded(format!("{grid_points} grid points for n = {n} (limit {budget})")));
    }
    let range = Interval::new(range.lo, range.hi)?;
    f.check_interval(&range)?;

    let step = range.width() / (grid_points + 1) as f64;
    let grid: Vec<f64> = (1..=grid_points).map(|k| range.lo + step * k as f64).collect();
    let cost = |a: f64, b: f64| interval_cost(f, &Interval::new(a, b)?, criterion);

    let left: Vec<f64> = grid.iter().map(|&x| cost(range.lo, x)).collect::<Result<_>>()?;
    let right: Vec<f64> = grid.iter().map(|&x| cost(x, range.hi)).collect::<Result<_>>()?;

    let mut best_tuple = vec![0usize; n - 2];
    let mut best = f64::INFINITY;
    if n == 3 {
        for i in 0..grid.len() {
            let v = combine(criterion, [left[i], right[i]].into_iter());
            if v < best {
                best = v;
                best_tuple = vec![i];
            }
        }
    } else {
        for i in 0..grid.len() {
            for j in i + 1..grid.len() {
                let v = combine(criterion, [left[i], cost(grid[i], grid[j])?, right[j]].into_iter());
                if v < best {
                    best = v;
                    best_tuple = vec![i, j];
                }
            }
        }
    }

    let points_for = |tuple: &[usize]| -> Vec<f64> {
        let mut pts = vec![range.lo];
        pts.extend(tuple.iter().map(|&k| grid[k]));
        pts.push(range.hi);
        pts
    };
    let breakpoints = BreakpointSet::new(points_for(&best_tuple))?;

    let mut resolution_bound: f64 = 0.0;
    for slot in 0..best_tuple.len() {
        for delta in [-1isize, 1] {
            let mut moved = best_tuple.clone();
            let k = moved[slot] as isize + delta;
            if k < 0 || k as usize >= grid.len() {
                continue;
            }
            moved[slot] = k as usize;
            if let Ok(bps) = BreakpointSet::new(points_for(&moved)) {
                resolution_bound = resolution_bound.max((set_cost(f, &bps, criterion)? - best).abs());
            }
        }
    }

    Ok(OracleResult { breakpoints, objective: best, grid_step: step, resolution_bound })
}
