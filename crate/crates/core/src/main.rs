use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use breakline::export::{fmt_num, write_bench_csv, write_profile_csv, write_trace_csv};
use breakline::{
    bench, catalog_get, error_profile, optimize, uniform_baseline, Criterion, Init, Interval, ResultDocument,
    SamConfig, ScalarFunction, SolverConfig, CATALOG_NAMES,
};

#[derive(Parser)]
#[command(name = "breakline", version, about = "Optimal breakpoints for piecewise linear approximation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimize breakpoints and print the result document (json) or sweep trace (csv)
    Optimize(Common),
    /// Signed error profile f(x) - L(x) of an optimized (or partially optimized) set
    Profile {
        #[command(flatten)]
        common: Common,
        /// Samples per piece
        #[arg(long, default_value_t = 100)]
        samples: usize,
        /// Profile the set after this many sweeps (0 = initial set) instead of the final one
        #[arg(long)]
        at_sweep: Option<usize>,
    },
    /// Uniform spacing vs. both sweep criteria
    Compare(Common),
    /// Wall-clock timing of optimize for several breakpoint counts
    Bench {
        #[command(flatten)]
        common: Common,
        /// Comma-separated breakpoint counts
        #[arg(long, value_delimiter = ',', default_values_t = [5, 10, 20, 50, 100])]
        n_values: Vec<usize>,
    },
}

#[derive(Args)]
struct Common {
    /// Catalog function name
    #[arg(long, default_value = "ln")]
    function: String,
    #[arg(long, default_value_t = 0.1, allow_negative_numbers = true)]
    lo: f64,
    #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
    hi: f64,
    /// Number of breakpoints, endpoints included
    #[arg(long, default_value_t = 5)]
    n: usize,
    #[arg(long, value_enum, default_value_t = CriterionArg::Minmax)]
    criterion: CriterionArg,
    #[arg(long, default_value_t = breakline::sam::DEFAULT_TOLERANCE)]
    tolerance: f64,
    #[arg(long, value_enum, default_value_t = InitArg::Uniform)]
    init: InitArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = breakline::sam::DEFAULT_MAX_SWEEPS)]
    max_sweeps: usize,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Output path (default: stdout)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum CriterionArg {
    Minmax,
    Area,
}

#[derive(Clone, Copy, ValueEnum)]
enum InitArg {
    Uniform,
    Random,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

impl Common {
    fn function(&self) -> breakline::Result<ScalarFunction> {
        catalog_get(&self.function)
    }

    fn range(&self) -> breakline::Result<Interval> {
        Interval::new(self.lo, self.hi)
    }

    fn criterion(&self) -> Criterion {
        match self.criterion {
            CriterionArg::Minmax => Criterion::MinMaxAbs,
            CriterionArg::Area => Criterion::MinArea,
        }
    }

    fn config(&self, criterion: Criterion) -> SamConfig {
        SamConfig {
            criterion,
            tolerance: self.tolerance,
            max_sweeps: self.max_sweeps,
            init: match self.init {
                InitArg::Uniform => Init::Uniform,
                InitArg::Random => Init::Random(self.seed),
            },
            solver: SolverConfig::default(),
        }
    }

    fn writer(&self) -> io::Result<Box<dyn Write>> {
        Ok(match &self.out {
            Some(path) => Box::new(BufWriter::new(File::create(path)?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }
}

enum Failure {
    Input(String),
    Unconverged,
}

impl From<breakline::Error> for Failure {
    fn from(e: breakline::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

#[derive(Serialize)]
struct MethodRow {
    method: &'static str,
    converged: bool,
    e_max: f64,
    area_error: f64,
    breakpoints: Vec<f64>,
}

#[derive(Serialize)]
struct Comparison<'a> {
    function: &'a str,
    range: breakline::export::Range,
    n: usize,
    methods: Vec<MethodRow>,
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Optimize(common) => {
            let f = common.function()?;
            let res = optimize(&f, &common.range()?, common.n, &common.config(common.criterion()))?;
            let mut w = common.writer()?;
            match common.format.unwrap_or(Format::Json) {
                Format::Json => w.write_all(ResultDocument::new(&f, &res)?.to_json().as_bytes())?,
                Format::Csv => write_trace_csv(&mut w, &res.trace)?,
            }
            w.flush()?;
            if !res.converged {
                return Err(Failure::Unconverged);
            }
        }
        Command::Profile { common, samples, at_sweep } => {
            let f = common.function()?;
            let res = optimize(&f, &common.range()?, common.n, &common.config(common.criterion()))?;
            let bps = match at_sweep {
                Some(k) => {
                    let rec = res.trace.at_sweep(k).expect("trace holds the initial set");
                    breakline::BreakpointSet::new(rec.breakpoints.clone())?
                }
                None => res.breakpoints.clone(),
            };
            let profile = error_profile(&f, &bps, samples)?;
            let mut w = common.writer()?;
            match common.format.unwrap_or(Format::Csv) {
                Format::Csv => write_profile_csv(&mut w, &profile)?,
                Format::Json => {
                    serde_json::to_writer_pretty(&mut w, &profile).map_err(|e| Failure::Input(e.to_string()))?;
                    writeln!(w)?;
                }
            }
            w.flush()?;
            if !res.converged {
                return Err(Failure::Unconverged);
            }
        }
        Command::Compare(common) => {
            let f = common.function()?;
            let range = common.range()?;
            let uniform = uniform_baseline(&f, &range, common.n)?;
            let mut methods = vec![MethodRow {
                method: "uniform",
                converged: true,
                e_max: uniform.report.e_max,
                area_error: uniform.report.total_area,
                breakpoints: uniform.breakpoints.points().to_vec(),
            }];
            let mut all_converged = true;
            for (method, criterion) in [("sam_minmax", Criterion::MinMaxAbs), ("sam_area", Criterion::MinArea)] {
                let res = optimize(&f, &range, common.n, &common.config(criterion))?;
                all_converged &= res.converged;
                methods.push(MethodRow {
                    method,
                    converged: res.converged,
                    e_max: res.e_max,
                    area_error: res.total_area,
                    breakpoints: res.breakpoints.points().to_vec(),
                });
            }
            let mut w = common.writer()?;
            match common.format.unwrap_or(Format::Json) {
                Format::Json => {
                    let doc = Comparison {
                        function: f.name(),
                        range: breakline::export::Range { lo: range.lo, hi: range.hi },
                        n: common.n,
                        methods,
                    };
                    serde_json::to_writer_pretty(&mut w, &doc).map_err(|e| Failure::Input(e.to_string()))?;
                    writeln!(w)?;
                }
                Format::Csv => {
                    writeln!(w, "method,converged,e_max,area_error,breakpoints")?;
                    for m in &methods {
                        let pts: Vec<String> = m.breakpoints.iter().copied().map(fmt_num).collect();
                        writeln!(
                            w,
                            "{},{},{},{},{}",
                            m.method,
                            m.converged,
                            fmt_num(m.e_max),
                            fmt_num(m.area_error),
                            pts.join(";")
                        )?;
                    }
                }
            }
            w.flush()?;
            if !all_converged {
                return Err(Failure::Unconverged);
            }
        }
        Command::Bench { common, n_values } => {
            let f = common.function()?;
            let rows = bench(&n_values, &f, &common.range()?, &common.config(common.criterion()))?;
            let mut w = common.writer()?;
            match common.format.unwrap_or(Format::Csv) {
                Format::Csv => write_bench_csv(&mut w, &rows)?,
                Format::Json => {
                    serde_json::to_writer_pretty(&mut w, &rows).map_err(|e| Failure::Input(e.to_string()))?;
                    writeln!(w)?;
                }
            }
            w.flush()?;
            if rows.iter().any(|r| !r.converged) {
                return Err(Failure::Unconverged);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("BREAKLINE_LOG", "off"))
        .target(env_logger::Target::Stderr)
        .init();

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Unconverged) => {
            eprintln!("breakline: maximum sweep count reached before convergence");
            ExitCode::from(2)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("breakline: {msg}");
            if msg.starts_with("unknown function") {
                eprintln!("available: {}", CATALOG_NAMES.join(", "));
            }
            ExitCode::from(1)
        }
    }
}
