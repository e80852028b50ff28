//! Piecewise-linear exports, result documents, error profiles and timing
//! tables.
//!
//! CSV numbers use the shortest representation that parses back to the same
//! `f64`; JSON goes through `serde_json`, which does the same.

use std::io::{self, Write};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::{Interval, ScalarFunction};
use crate::interval_error::{chord_of, signed_deviation};
use crate::sam::{optimize, BreakpointSet, Criterion, SamConfig, SamResult, SamTrace};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    pub lo: f64,
    pub hi: f64,
    pub slope: f64,
    pub intercept: f64,
}

impl Piece {
    #[inline]
    pub fn at(&self, x: f64) -> f64 {
        self.slope * x + self.intercept
    }
}

/// The fitted approximation: one chord per pair of consecutive breakpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PwlFunction {
    pub function_name: String,
    pub criterion: Criterion,
    pub breakpoints: BreakpointSet,
    pub pieces: Vec<Piece>,
    pub achieved_e_max: f64,
    pub achieved_area: f64,
}

impl PwlFunction {
    /// Evaluates the approximation; `None` outside the breakpoint range.
    pub fn eval(&self, x: f64) -> Option<f64> {
        let pts = self.breakpoints.points();
        if !(x >= pts[0] && x <= pts[pts.len() - 1]) {
            return None;
        }
        let idx = pts.partition_point(|&p| p <= x).clamp(1, self.pieces.len()) - 1;
        Some(self.pieces[idx].at(x))
    }

    /// Largest value jump between adjacent pieces at their shared breakpoint.
    pub fn max_junction_mismatch(&self) -> f64 {
        self.pieces
            .windows(2)
            .map(|w| (w[0].at(w[0].hi) - w[1].at(w[1].lo)).abs())
            .fold(0.0, f64::max)
    }
}

fn pieces_for(f: &ScalarFunction, bps: &BreakpointSet) -> Result<Vec<Piece>> {
    bps.intervals()
        .map(|iv| {
            let c = chord_of(f, &iv)?;
            Ok(Piece { lo: iv.lo, hi: iv.hi, slope: c.slope, intercept: c.intercept })
        })
        .collect()
}

pub fn export_pwl(result: &SamResult, f: &ScalarFunction, allow_unconverged: bool) -> Result<PwlFunction> {
    if !result.converged && !allow_unconverged {
        return Err(Error::Unconverged);
    }
    Ok(PwlFunction {
        function_name: f.name().to_string(),
        criterion: result.criterion,
        breakpoints: result.breakpoints.clone(),
        pieces: pieces_for(f, &result.breakpoints)?,
        achieved_e_max: result.e_max,
        achieved_area: result.total_area,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub x: f64,
    pub error: f64,
}

/// Signed deviation `f(x) - L(x)` sampled at `samples_per_piece` evenly
/// spaced points on every piece, shared breakpoints listed once.
pub fn error_profile(f: &ScalarFunction, bps: &BreakpointSet, samples_per_piece: usize) -> Result<Vec<ProfilePoint>> {
    if samples_per_piece < 2 {
        return Err(Error::InvalidConfig(format!("need at least 2 samples per piece, got {samples_per_piece}")));
    }
    let mut out = Vec::with_capacity((samples_per_piece - 1) * (bps.len() - 1) + 1);
    for (k, iv) in bps.intervals().enumerate() {
        let chord = chord_of(f, &iv)?;
        let start = if k == 0 { 0 } else { 1 };
        for j in start..samples_per_piece {
            let x = if j == samples_per_piece - 1 {
                iv.hi
            } else {
                iv.lo + iv.width() * j as f64 / (samples_per_piece - 1) as f64
            };
            out.push(ProfilePoint { x, error: signed_deviation(f, &chord, x) });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub sweep: usize,
    pub e_max: f64,
    pub area_error: f64,
    pub max_movement: f64,
}

/// The JSON document written by `optimize`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultDocument {
    pub function: String,
    pub criterion: Criterion,
    pub range: Range,
    pub n: usize,
    pub tolerance: f64,
    pub converged: bool,
    pub sweeps: usize,
    pub breakpoints: Vec<f64>,
    pub pieces: Vec<Piece>,
    pub e_max: f64,
    pub area_error: f64,
    pub trace: Vec<TraceRow>,
}

fn trace_rows(trace: &SamTrace) -> Vec<TraceRow> {
    trace
        .records
        .iter()
        .map(|r| TraceRow { sweep: r.sweep, e_max: r.e_max, area_error: r.area_error, max_movement: r.max_movement })
        .collect()
}

impl ResultDocument {
    pub fn new(f: &ScalarFunction, result: &SamResult) -> Result<Self> {
        let range = result.breakpoints.range();
        Ok(ResultDocument {
            function: f.name().to_string(),
            criterion: result.criterion,
            range: Range { lo: range.lo, hi: range.hi },
            n: result.breakpoints.len(),
            tolerance: result.tolerance,
            converged: result.converged,
            sweeps: result.sweeps,
            breakpoints: result.breakpoints.points().to_vec(),
            pieces: pieces_for(f, &result.breakpoints)?,
            e_max: result.e_max,
            area_error: result.total_area,
            trace: trace_rows(&result.trace),
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("result document serializes");
        s.push('\n');
        s
    }
}

/// Shortest decimal that parses back to exactly `x`.
pub fn fmt_num(x: f64) -> String {
    format!("{x:?}")
}

pub fn write_profile_csv<W: Write>(mut w: W, profile: &[ProfilePoint]) -> io::Result<()> {
    writeln!(w, "x,error")?;
    for p in profile {
        writeln!(w, "{},{}", fmt_num(p.x), fmt_num(p.error))?;
    }
    Ok(())
}

pub fn write_trace_csv<W: Write>(mut w: W, trace: &SamTrace) -> io::Result<()> {
    writeln!(w, "sweep,e_max,area_error,max_movement")?;
    for r in &trace.records {
        writeln!(w, "{},{},{},{}", r.sweep, fmt_num(r.e_max), fmt_num(r.area_error), fmt_num(r.max_movement))?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub n: usize,
    pub wall_time_seconds: f64,
    pub sweeps: usize,
    pub final_error: f64,
    pub converged: bool,
}

/// Times one `optimize` call per entry of `n_values`, sequentially.
pub fn bench(n_values: &[usize], f: &ScalarFunction, range: &Interval, cfg: &SamConfig) -> Result<Vec<BenchRow>> {
    n_values
        .iter()
        .map(|&n| {
            let start = Instant::now();
            let res = optimize(f, range, n, cfg)?;
            let wall_time_seconds = start.elapsed().as_secs_f64();
            log::info!("bench n = {n}: {wall_time_seconds:.3e} s, {} sweeps", res.sweeps);
            Ok(BenchRow { n, wall_time_seconds, sweeps: res.sweeps, final_error: res.objective(), converged: res.converged })
        })
        .collect()
}

pub fn write_bench_csv<W: Write>(mut w: W, rows: &[BenchRow]) -> io::Result<()> {
    writeln!(w, "n,wall_time_seconds,sweeps,final_error,converged")?;
    for r in rows {
        writeln!(w, "{},{},{},{},{}", r.n, fmt_num(r.wall_time_seconds), r.sweeps, fmt_num(r.final_error), r.converged)?;
    }
    Ok(())
}
