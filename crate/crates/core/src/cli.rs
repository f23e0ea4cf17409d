//! The `tensor-nns` command line.
//!
//! Exit codes: 0 success, 1 verification failure, 2 numerically indeterminate, 64 usage
//! error. Reports go to `--output` (resolved against `TENSOR_NNS_OUTPUT_DIR` when relative
//! and the variable is set) or to standard output.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::catalog::{verify_catalog_entry, CatalogEntry, CatalogTolerances, MAX_CATALOG_ORDER};
use crate::channel::{random_span_set, realize_and_verify};
use crate::error::Error;
use crate::feasibility::{
    necessity_grid, necessity_scan, nns_exists, scan, sweep_grid, threshold_bisect,
    FeasibilityOptions, FeasibilityOutcome, ThresholdOptions,
};
use crate::matrix::ComplexDenseMatrix;
use crate::tensor_system::{
    a_alpha, build_b, build_c, build_c_block, build_q, MatrixForm, PhaseAngle,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INDETERMINATE: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

/// Relative `--output` paths are resolved against this directory when it is set.
pub const OUTPUT_DIR_ENV: &str = "TENSOR_NNS_OUTPUT_DIR";

#[derive(Debug, Clone, Parser)]
#[command(name = "tensor-nns", version, about = "Symmetry-reduced tensor-power systems and their nonnegative solutions")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,

    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Emit one of the system matrices as JSON.
    Build {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        alpha: AlphaArg,
        #[arg(long, value_enum)]
        emit: Emit,
        /// Form of A (only used with `--emit A`).
        #[arg(long, value_enum, default_value = "reduced")]
        form: Form,
    },
    /// Check the catalog solutions on equally spaced samples of their intervals.
    VerifyCatalog {
        /// Order to check; all orders 1..=10 when omitted.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 1e-9)]
        residual_tol: f64,
        #[arg(long, default_value_t = 1e-12)]
        nonneg_tol: f64,
    },
    /// Decide feasibility at one angle: witness or certificate.
    Feasibility {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        alpha: AlphaArg,
        #[command(flatten)]
        tol: FeasibilityTolArgs,
    },
    /// Decide feasibility on a grid over (π/2, π]; CSV output.
    Sweep {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 50)]
        points: usize,
        #[command(flatten)]
        tol: FeasibilityTolArgs,
    },
    /// Locate the feasibility threshold by bisection.
    Threshold {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[command(flatten)]
        feas: FeasibilityTolArgs,
    },
    /// Expect certificates on a grid strictly below the conjectured threshold.
    Necessity {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 50)]
        points: usize,
        #[command(flatten)]
        tol: FeasibilityTolArgs,
    },
    /// Build Choi-Kraus pairs realizing the span of a set of matrices.
    Realize {
        /// JSON array of matrices `{"rows", "cols", "data": [re, im, ...]}`.
        #[arg(long, conflicts_with = "random", required_unless_present = "random")]
        input: Option<PathBuf>,
        /// Use seeded random complex Gaussian sets instead of `--input`.
        #[arg(long)]
        random: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of random sets.
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
}

#[derive(Debug, Clone, Args)]
#[group(required = false, multiple = false)]
pub struct AlphaArg {
    /// Angle in radians.
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    /// Angle as a fraction of π, `a/b` meaning π·a/b.
    #[arg(long, value_parser = parse_pi_frac)]
    pub pi_frac: Option<(i64, i64)>,
}

impl AlphaArg {
    fn resolve(&self) -> Result<Option<PhaseAngle>, Error> {
        match (self.alpha, self.pi_frac) {
            (Some(a), _) => PhaseAngle::new(a).map(Some),
            (None, Some((num, den))) => PhaseAngle::from_pi_fraction(num, den).map(Some),
            (None, None) => Ok(None),
        }
    }

    fn required(&self) -> Result<PhaseAngle, Error> {
        self.resolve()?
            .ok_or_else(|| Error::InvalidArgument("one of --alpha or --pi-frac is required".into()))
    }
}

fn parse_pi_frac(s: &str) -> Result<(i64, i64), String> {
    let (a, b) = s
        .split_once('/')
        .ok_or_else(|| format!("expected a/b, got {s:?}"))?;
    let num = a.trim().parse::<i64>().map_err(|e| e.to_string())?;
    let den = b.trim().parse::<i64>().map_err(|e| e.to_string())?;
    if den == 0 {
        return Err("zero denominator".into());
    }
    Ok((num, den))
}

#[derive(Debug, Clone, Args)]
pub struct FeasibilityTolArgs {
    /// Phase-1 objective at or below which the LP counts as feasible.
    #[arg(long, default_value_t = 1e-10)]
    pub objective_tol: f64,
    /// Bound on ‖C y‖_∞ for witnesses.
    #[arg(long, default_value_t = 1e-8)]
    pub witness_tol: f64,
    /// Smallest accepted certificate margin.
    #[arg(long, default_value_t = 1e-8)]
    pub margin_tol: f64,
}

impl FeasibilityTolArgs {
    fn options(&self) -> Result<FeasibilityOptions, Error> {
        for (name, v) in [
            ("objective-tol", self.objective_tol),
            ("witness-tol", self.witness_tol),
            ("margin-tol", self.margin_tol),
        ] {
            positive(name, v)?;
        }
        Ok(FeasibilityOptions {
            objective: self.objective_tol,
            witness_residual: self.witness_tol,
            margin: self.margin_tol,
            ..FeasibilityOptions::default()
        })
    }
}

fn positive(name: &str, v: f64) -> Result<(), Error> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("--{name} must be positive, got {v}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Emit {
    #[value(name = "A")]
    A,
    #[value(name = "Q")]
    Q,
    #[value(name = "B")]
    B,
    #[value(name = "C")]
    C,
    #[value(name = "Cblock")]
    CBlock,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Form {
    Original,
    Reduced,
}

#[derive(Serialize)]
struct BuildReport<'a> {
    version: &'a str,
    matrix_kind: &'a str,
    order: usize,
    alpha: Option<f64>,
    matrix: ComplexDenseMatrix,
}

#[derive(Serialize)]
struct FeasibilityReport<'a> {
    version: &'a str,
    order: usize,
    alpha: f64,
    #[serde(flatten)]
    outcome: &'a FeasibilityOutcome,
    tolerances: FeasibilityOptions,
}

#[derive(Serialize)]
struct SweepRecord<'a> {
    alpha: f64,
    n: usize,
    outcome: &'a str,
    metric: f64,
}

/// Result of executing a command, before any I/O.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub code: i32,
    /// The report, if one was produced.
    pub body: Option<String>,
    /// Text for standard error.
    pub diagnostic: Option<String>,
}

impl RunResult {
    fn report(code: i32, body: String) -> Self {
        Self {
            code,
            body: Some(body),
            diagnostic: None,
        }
    }

    fn error(err: &Error) -> Self {
        Self {
            code: exit_code(err),
            body: None,
            diagnostic: Some(format!("error: {err}")),
        }
    }
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::NumericalIndeterminate { .. } => EXIT_INDETERMINATE,
        Error::Solver(_) | Error::NonMonotonePredicate(_) => EXIT_FAILED,
        _ => EXIT_USAGE,
    }
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

/// Runs a command without touching standard streams or the output file.
pub fn execute(config: &RunConfig) -> RunResult {
    match dispatch(&config.command) {
        Ok(r) => r,
        Err(e) => RunResult::error(&e),
    }
}

fn dispatch(command: &Command) -> Result<RunResult, Error> {
    match command {
        Command::Build {
            n,
            alpha,
            emit,
            form,
        } => {
            let alpha = alpha.resolve()?;
            let need = || alpha.ok_or_else(|| Error::InvalidArgument(
                "one of --alpha or --pi-frac is required".into(),
            ));
            let (kind, matrix) = match emit {
                Emit::A => {
                    let form = match form {
                        Form::Original => MatrixForm::Original,
                        Form::Reduced => MatrixForm::Reduced,
                    };
                    let a = a_alpha(need()?, form);
                    let m = crate::tensor_system::kron_power(&a, *n)?;
                    ("A", m)
                }
                Emit::Q => ("Q", build_q(*n)?),
                Emit::B => ("B", build_b(need()?, *n)?),
                Emit::C => ("C", build_c(need()?, *n)?),
                Emit::CBlock => ("Cblock", build_c_block(need()?, *n)?),
            };
            Ok(RunResult::report(
                EXIT_OK,
                json(&BuildReport {
                    version: crate::VERSION,
                    matrix_kind: kind,
                    order: *n,
                    alpha: alpha.map(PhaseAngle::radians),
                    matrix,
                }),
            ))
        }
        Command::VerifyCatalog {
            n,
            samples,
            residual_tol,
            nonneg_tol,
        } => {
            positive("residual-tol", *residual_tol)?;
            positive("nonneg-tol", *nonneg_tol)?;
            if *samples == 0 {
                return Err(Error::InvalidArgument("--samples must be at least 1".into()));
            }
            let tol = CatalogTolerances {
                residual: *residual_tol,
                nonneg: *nonneg_tol,
            };
            let orders: Vec<usize> = match n {
                Some(n) => vec![*n],
                None => (1..=MAX_CATALOG_ORDER).collect(),
            };
            let mut jobs = Vec::new();
            for &order in &orders {
                for alpha in CatalogEntry::new(order)?.samples(*samples) {
                    jobs.push((order, alpha));
                }
            }
            let reports = jobs
                .par_iter()
                .map(|&(order, alpha)| verify_catalog_entry(order, alpha, &tol))
                .collect::<Result<Vec<_>, _>>()?;
            let code = if reports.iter().all(|r| r.passed) {
                EXIT_OK
            } else {
                EXIT_FAILED
            };
            Ok(RunResult::report(code, json(&reports)))
        }
        Command::Feasibility { n, alpha, tol } => {
            let alpha = alpha.required()?;
            let opts = tol.options()?;
            let outcome = nns_exists(alpha, *n, &opts)?;
            Ok(RunResult::report(
                EXIT_OK,
                json(&FeasibilityReport {
                    version: crate::VERSION,
                    order: *n,
                    alpha: alpha.radians(),
                    outcome: &outcome,
                    tolerances: opts,
                }),
            ))
        }
        Command::Sweep { n, points, tol } => {
            let opts = tol.options()?;
            let rows = scan(*n, &sweep_grid(*points), &opts)?;
            let mut out = format!(
                "# tensor-nns {} objective_tol={:e} witness_tol={:e} margin_tol={:e}{}\n",
                crate::VERSION,
                opts.objective,
                opts.witness_residual,
                opts.margin,
                if *n > MAX_CATALOG_ORDER {
                    " exploratory: no catalog solution at this order"
                } else {
                    ""
                }
            );
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in &rows {
                w.serialize(SweepRecord {
                    alpha: r.alpha,
                    n: *n,
                    outcome: &r.outcome,
                    metric: r.metric,
                })
                .expect("in-memory csv");
            }
            out.push_str(&String::from_utf8(w.into_inner().expect("flush")).expect("utf8"));
            let code = if rows.iter().any(|r| r.outcome == "indeterminate") {
                EXIT_INDETERMINATE
            } else {
                EXIT_OK
            };
            Ok(RunResult::report(code, out))
        }
        Command::Threshold { n, tol, feas } => {
            let opts = feas.options()?;
            let topts = ThresholdOptions {
                tol_alpha: *tol,
                ..ThresholdOptions::default()
            };
            let est = threshold_bisect(*n, &topts, &opts)?;
            Ok(RunResult::report(EXIT_OK, json(&est)))
        }
        Command::Necessity { n, points, tol } => {
            let opts = tol.options()?;
            let rep = necessity_scan(*n, &necessity_grid(*n, *points), &opts)?;
            let code = if rep.anomalies == 0 { EXIT_OK } else { EXIT_FAILED };
            Ok(RunResult::report(code, json(&rep)))
        }
        Command::Realize {
            input,
            random,
            seed,
            count,
        } => {
            if *random {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let sets: Vec<_> = (0..*count)
                    .map(|_| random_span_set(&mut rng, 4, 5))
                    .collect();
                let reports = sets
                    .iter()
                    .map(|t| realize_and_verify(t))
                    .collect::<Result<Vec<_>, _>>()?;
                let code = if reports.iter().all(|r| r.passed) {
                    EXIT_OK
                } else {
                    EXIT_FAILED
                };
                Ok(RunResult::report(code, json(&reports)))
            } else {
                let path = input.as_ref().expect("clap requires --input");
                let text = std::fs::read_to_string(path).map_err(|e| {
                    Error::InvalidArgument(format!("cannot read {}: {e}", path.display()))
                })?;
                let t: Vec<ComplexDenseMatrix> = serde_json::from_str(&text).map_err(|e| {
                    Error::InvalidArgument(format!("cannot parse {}: {e}", path.display()))
                })?;
                let rep = realize_and_verify(&t)?;
                let code = if rep.passed { EXIT_OK } else { EXIT_FAILED };
                Ok(RunResult::report(code, json(&rep)))
            }
        }
    }
}

/// Where a report for `--output path` is written.
pub fn output_path(path: &std::path::Path) -> PathBuf {
    match std::env::var_os(OUTPUT_DIR_ENV) {
        Some(dir) if path.is_relative() => PathBuf::from(dir).join(path),
        _ => path.to_path_buf(),
    }
}

/// Executes the command and performs its I/O; returns the exit code.
pub fn run(config: &RunConfig) -> i32 {
    let result = execute(config);
    if let Some(d) = &result.diagnostic {
        eprintln!("{d}");
    }
    if let Some(body) = &result.body {
        match &config.output {
            Some(p) => {
                let path = output_path(p);
                if let Err(e) = std::fs::write(&path, body) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return EXIT_USAGE;
                }
            }
            None => print!("{body}"),
        }
    }
    result.code
}

/// Parses `args` (including the program name) and runs the command.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match RunConfig::try_parse_from(args) {
        Ok(config) => run(&config),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            code
        }
    }
}
