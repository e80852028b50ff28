//! Optimal breakpoint placement for piecewise linear approximation of convex
//! and concave scalar functions.
//!
//! Breakpoints are placed by sequential adjusting sweeps: every interior
//! point is repeatedly moved to the best position given its two neighbours,
//! either to equalize the maximum chord error on both sides
//! ([`Criterion::MinMaxAbs`]) or to minimize the area between the function
//! and its chords ([`Criterion::MinArea`]). The fixed point of the sweep is
//! the unique optimum for the chosen criterion.
//!
//! ```
//! use breakline::{catalog_get, optimize, Interval, SamConfig};
//!
//! let ln = catalog_get("ln").unwrap();
//! let range = Interval::new(0.1, 10.0).unwrap();
//! let res = optimize(&ln, &range, 5, &SamConfig::default()).unwrap();
//! assert!(res.converged);
//! assert!((res.e_max - 0.16272).abs() < 1e-4);
//! ```

// `!(x > 0.0)` is used deliberately so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod error;
pub mod export;
pub mod function;
pub mod interval_error;
pub mod numeric;
pub mod sam;
pub mod solvers;

pub use baselines::{greedy_insert, grid_oracle, set_cost, uniform_baseline, BaselineResult, OracleResult};
pub use error::{Error, Result};
pub use export::{bench, error_profile, export_pwl, BenchRow, Piece, ProfilePoint, PwlFunction, ResultDocument};
pub use function::{catalog_get, mirror, Curvature, Domain, Interval, ScalarFunction, CATALOG_NAMES};
pub use interval_error::{
    area_error, chord_of, evaluate_set, max_abs_error, Chord, IntervalErrorReport, MaxDeviation, SetErrorReport,
};
pub use sam::{
    init_breakpoints, optimize, sweep, BreakpointSet, Criterion, Init, SamConfig, SamResult, SamTrace, SweepRecord,
};
pub use solvers::{phi, theta, SolverConfig};
