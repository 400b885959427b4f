//! `kendall`: evaluate first-passage subordinator quantities, run the
//! verification suites and the Monte Carlo experiments.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod eval;
mod grid;
mod simulate;
mod table;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kendall::exponents::{Family, FamilyParams};
use kendall::verify::{run_suite, CmFunction, Suite, SuiteOptions};

use eval::Quantity;
use grid::{Grid, Range};
use table::Format;

const EXIT_FAILED: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

#[derive(Parser)]
#[command(
    name = "kendall",
    version,
    about = "First-passage subordinators of spectrally negative Lévy processes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a quantity on a grid and write it as a table.
    Eval(EvalArgs),
    /// Run a verification suite, printing one JSON report per line.
    Verify(VerifyArgs),
    /// Compare Monte Carlo atoms with the exact Poisson-family laws.
    Simulate(SimulateArgs),
}

#[derive(Args)]
struct FamilyArgs {
    /// Family name: poisson, gamma, stable-low, stable-high, bessel, geom-stable, inverse-gaussian.
    #[arg(long)]
    family: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    c: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
}

impl FamilyArgs {
    fn params(&self) -> Result<Option<FamilyParams>, String> {
        let Some(name) = &self.family else {
            if self.theta.is_some() {
                return Err("--theta needs --family".into());
            }
            return Ok(None);
        };
        let family = Family::from_name(name).ok_or_else(|| format!("unknown family '{name}'"))?;
        let c = self.c.ok_or("--c is required with --family")?;
        FamilyParams::new(family, c, self.theta, self.alpha)
            .map(Some)
            .map_err(|e| e.to_string())
    }
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    family: FamilyArgs,
    #[arg(long, value_enum)]
    quantity: Quantity,
    /// Time: a number or a grid start:stop:count[:log].
    #[arg(long, allow_hyphen_values = true)]
    t: Option<Grid>,
    /// Spatial grid start:stop:count[:log] for continuous families.
    #[arg(long, allow_hyphen_values = true)]
    y_grid: Option<Grid>,
    /// Inclusive integer range start:stop for the Poisson family.
    #[arg(long)]
    n: Option<Range>,
    /// Grid of exponent arguments z (or q for phi).
    #[arg(long, allow_hyphen_values = true)]
    z_grid: Option<Grid>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Output file; stdout when absent.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum CmName {
    F1,
    F2,
    F3,
    F4,
    F5,
}

#[derive(Args)]
struct VerifyArgs {
    /// laplace, kendall, cm, crosscheck, identities, ig-closure or all.
    suite: String,
    #[command(flatten)]
    family: FamilyArgs,
    /// Restrict the cm suite to one function; takes --c and/or --alpha.
    #[arg(long, value_enum)]
    f: Option<CmName>,
}

impl VerifyArgs {
    fn options(&self) -> Result<(Suite, SuiteOptions), String> {
        let suite = Suite::from_name(&self.suite).ok_or_else(|| format!("unknown suite '{}'", self.suite))?;
        let Some(f) = self.f else {
            return Ok((
                suite,
                SuiteOptions {
                    params: self.family.params()?,
                    cm: None,
                },
            ));
        };
        if !matches!(suite, Suite::Cm | Suite::All) {
            return Err("--f applies to the cm suite only".into());
        }
        if self.family.family.is_some() || self.family.theta.is_some() {
            return Err("--f takes only --c and --alpha".into());
        }
        let need = |v: Option<f64>, flag: &str| v.ok_or_else(|| format!("--f needs {flag}"));
        let (c, alpha) = (self.family.c, self.family.alpha);
        let cm = match f {
            CmName::F1 => CmFunction::F1 { c: need(c, "--c")? },
            CmName::F2 => CmFunction::F2 {
                alpha: need(alpha, "--alpha")?,
            },
            CmName::F3 => CmFunction::F3 {
                alpha: need(alpha, "--alpha")?,
            },
            CmName::F4 => CmFunction::F4 { c: need(c, "--c")? },
            CmName::F5 => CmFunction::F5 {
                c: need(c, "--c")?,
                alpha: need(alpha, "--alpha")?,
            },
        };
        cm.validate().map_err(|e| e.to_string())?;
        Ok((
            suite,
            SuiteOptions {
                params: None,
                cm: Some(cm),
            },
        ))
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    FirstPassage,
    YSample,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(value_enum)]
    kind: Kind,
    #[arg(long)]
    c: f64,
    /// Level for first-passage.
    #[arg(long)]
    x: Option<f64>,
    /// Time for y-sample.
    #[arg(long)]
    t: Option<f64>,
    /// Number of samples.
    #[arg(long)]
    n: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Worker streams; part of the reproducibility key.
    #[arg(long, env = "KENDALL_WORKERS", default_value_t = 1)]
    workers: usize,
    /// Paths still below the level at this time are censored; default x + 100.
    #[arg(long)]
    horizon: Option<f64>,
    /// Atoms compared with the exact law.
    #[arg(long, default_value = "0:10")]
    atoms: Range,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

fn invalid(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("kendall: invalid input: {msg}");
    ExitCode::from(EXIT_INVALID)
}

fn io_failure(e: io::Error) -> ExitCode {
    eprintln!("kendall: output failed: {e}");
    ExitCode::from(EXIT_FAILED)
}

fn cmd_eval(a: EvalArgs) -> ExitCode {
    let params = match a.family.params() {
        Ok(Some(p)) => p,
        Ok(None) => return invalid("--family is required"),
        Err(e) => return invalid(e),
    };
    let req = eval::Request {
        params,
        quantity: a.quantity,
        t: a.t,
        y: a.y_grid,
        n: a.n,
        z: a.z_grid,
    };
    let (table, failed) = match eval::evaluate(&req) {
        Ok(r) => r,
        Err(e) => return invalid(e),
    };
    let mut out: Box<dyn Write> = match &a.output {
        Some(path) => match File::create(path) {
            Ok(f) => Box::new(BufWriter::new(f)),
            Err(e) => return invalid(format!("cannot create {}: {e}", path.display())),
        },
        None => Box::new(io::stdout().lock()),
    };
    if let Err(e) = table.write(a.format, &mut out).and_then(|_| out.flush()) {
        return io_failure(e);
    }
    if failed {
        eprintln!("kendall: numerical failure on some rows; see the error column");
        return ExitCode::from(EXIT_NUMERICAL);
    }
    ExitCode::SUCCESS
}

fn cmd_verify(a: VerifyArgs) -> ExitCode {
    let (suite, opts) = match a.options() {
        Ok(v) => v,
        Err(e) => return invalid(e),
    };
    let reports = run_suite(suite, &opts);
    let mut out = io::stdout().lock();
    for r in &reports {
        let line = serde_json::to_string(r).expect("reports serialise");
        if let Err(e) = writeln!(out, "{line}") {
            return io_failure(e);
        }
    }
    for r in reports.iter().filter(|r| !r.pass) {
        eprintln!("kendall: FAIL {}: {}", r.name, r.detail);
    }
    let failed = reports.iter().filter(|r| !r.pass).count();
    eprintln!("kendall: {} of {} checks pass", reports.len() - failed, reports.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAILED)
    }
}

fn cmd_simulate(a: SimulateArgs) -> ExitCode {
    let exp = match (a.kind, a.x, a.t) {
        (Kind::FirstPassage, Some(x), None) => simulate::Experiment::FirstPassage {
            x,
            horizon: a.horizon.unwrap_or(x + 100.0),
        },
        (Kind::YSample, None, Some(t)) if a.horizon.is_none() => simulate::Experiment::YSample { t },
        (Kind::FirstPassage, _, _) => return invalid("first-passage takes --x (and optionally --horizon), not --t"),
        (Kind::YSample, _, _) => return invalid("y-sample takes --t, not --x or --horizon"),
    };
    let run = match simulate::run(a.c, &exp, a.n, a.seed, a.workers, a.atoms) {
        Ok(r) => r,
        Err(e) => return invalid(e),
    };
    let mut out = io::stdout().lock();
    if let Err(e) = run.table.write(a.format, &mut out) {
        return io_failure(e);
    }
    eprintln!(
        "kendall: {} samples, {} censored",
        run.dist.n_samples, run.dist.n_censored
    );
    if run.all_within {
        ExitCode::SUCCESS
    } else {
        eprintln!(
            "kendall: some atom deviates by more than {} standard errors",
            simulate::Z_LIMIT
        );
        ExitCode::from(EXIT_FAILED)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.command {
        Command::Eval(a) => cmd_eval(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Simulate(a) => cmd_simulate(a),
    }
}
