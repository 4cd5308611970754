//! `orliczkit`: conjugates, conditional Orlicz norms and duality checks on
//! finite probability spaces, from JSON inputs to JSON reports.
//!
//! Exit codes: 0 pass, 1 verification failure, 2 input error, 3 infinite
//! value.

mod gen;
mod input;
mod report;
mod suites;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use orliczkit::json::ExtReal;
use orliczkit::norms::{
    cond_luxemburg_report, cond_orlicz_report, luxemburg_report, orlicz_report, NormReport, DEFAULT_TOL,
};
use orliczkit::{OrliczFunction, RandomOrliczFunction};
use serde::Serialize;

use input::PhiInput;
use report::{Envelope, Tolerances};
use suites::{Config, ConfigFile, Suite};

const SEED_ENV: &str = "ORLICZKIT_SEED";
const GRID_RESOLUTION: usize = 100_000;
const GRID_T_MAX: f64 = 100.0;

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Compute(String),
}

#[derive(Parser)]
#[command(name = "orliczkit", version, about = "Orlicz function conjugates, conditional Orlicz norms and duality checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Conjugate of an Orlicz function, checked against a grid maximization.
    Conjugate(ConjugateArgs),
    /// Luxemburg or Orlicz norm of a random variable.
    Norm(NormArgs),
    /// Run a randomized verification suite.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct ConjugateArgs {
    /// Orlicz function JSON: one family, or a blockwise family.
    #[arg(long)]
    phi: PathBuf,
    /// Number of comparison points s in [0, s-max].
    #[arg(long, default_value_t = 9)]
    samples: usize,
    #[arg(long, default_value_t = 4.0)]
    s_max: f64,
    /// Allowed excess of the grid value over the closed form.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum NormKind {
    Lux,
    Orlicz,
    CondLux,
    CondOrlicz,
}

#[derive(Args)]
struct NormArgs {
    #[arg(long, value_enum)]
    kind: NormKind,
    #[arg(long)]
    space: PathBuf,
    /// Orlicz function JSON: one family, or a blockwise family.
    #[arg(long)]
    phi: PathBuf,
    #[arg(long)]
    zeta: PathBuf,
    /// Partition for conditional kinds when --phi holds a single family.
    #[arg(long)]
    partition: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    suite: Suite,
    /// JSON with optional instances, sizes, tolerances and seed.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the config seed; ORLICZKIT_SEED is the fallback.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
    /// With --phi and --functional, run the isometry suite on that instance;
    /// with --element, run the denseness suite on it.
    #[arg(long)]
    space: Option<PathBuf>,
    #[arg(long)]
    phi: Option<PathBuf>,
    #[arg(long)]
    partition: Option<PathBuf>,
    #[arg(long)]
    functional: Option<PathBuf>,
    #[arg(long)]
    element: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Outcome {
    Pass,
    Fail,
    Infinite,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Conjugate(a) => conjugate(a),
        Command::Norm(a) => norm(a),
        Command::Verify(a) => verify(a),
    };
    match result {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(1),
        Ok(Outcome::Infinite) => {
            eprintln!("orliczkit: value is +infinity");
            ExitCode::from(3)
        }
        Err(CliError::Input(msg)) => {
            eprintln!("orliczkit: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Compute(msg)) => {
            eprintln!("orliczkit: computation failed: {msg}");
            ExitCode::from(1)
        }
    }
}

#[derive(Serialize)]
struct ComparisonRow {
    s: f64,
    closed_form: ExtReal,
    grid: f64,
    gap: ExtReal,
}

#[derive(Serialize)]
struct BlockConjugate {
    #[serde(skip_serializing_if = "Option::is_none")]
    block: Option<usize>,
    phi: OrliczFunction,
    conjugate: OrliczFunction,
    consistent: bool,
    comparison: Vec<ComparisonRow>,
}

#[derive(Serialize)]
struct ConjugateBody {
    grid_t_max: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    partition: Option<orliczkit::json::PartitionJson>,
    results: Vec<BlockConjugate>,
    pass: bool,
}

fn conjugate(a: ConjugateArgs) -> Result<Outcome, CliError> {
    if a.samples < 2 {
        return Err(CliError::Input("--samples: need at least 2 comparison points".into()));
    }
    if !(a.s_max.is_finite() && a.s_max > 0.0) {
        return Err(CliError::Input("--s-max: must be a finite number > 0".into()));
    }
    let (partition, fns): (Option<_>, Vec<(Option<usize>, OrliczFunction)>) = match input::phi(&a.phi)? {
        PhiInput::Single(phi) => (None, vec![(None, phi)]),
        PhiInput::Blockwise(j) => {
            let blocks = j.per_block.iter().cloned().enumerate().map(|(b, f)| (Some(b), f)).collect();
            (Some(j.partition), blocks)
        }
    };
    let results: Vec<BlockConjugate> = fns
        .into_iter()
        .map(|(block, phi)| {
            let psi = phi.conjugate();
            let comparison: Vec<ComparisonRow> = (0..a.samples)
                .map(|i| {
                    let s = a.s_max * i as f64 / (a.samples - 1) as f64;
                    let exact = psi.eval(s).expect("nonnegative s");
                    let grid = phi.conjugate_oracle(s, GRID_RESOLUTION, GRID_T_MAX);
                    ComparisonRow {
                        s,
                        closed_form: ExtReal(exact),
                        grid,
                        gap: ExtReal(exact - grid),
                    }
                })
                .collect();
            // The grid maximizes over fewer points, so it may only undershoot.
            let consistent = comparison
                .iter()
                .all(|r| r.grid <= r.closed_form.0 + a.tol * (1.0 + r.closed_form.0.abs()));
            BlockConjugate {
                block,
                phi,
                conjugate: psi,
                consistent,
                comparison,
            }
        })
        .collect();

    for r in &results {
        let label = r.block.map_or(String::new(), |b| format!("block {b}: "));
        eprintln!("{label}{} -> {}", gen::family_name(&r.phi), gen::family_name(&r.conjugate));
        eprintln!("{:>10} {:>22} {:>22}", "s", "closed form", "grid");
        for row in &r.comparison {
            eprintln!("{:>10.4} {:>22.12e} {:>22.12e}", row.s, row.closed_form.0, row.grid);
        }
    }
    let pass = results.iter().all(|r| r.consistent);
    let tolerances = Tolerances {
        tol: a.tol,
        samples: Some(a.samples),
        grid: Some(GRID_RESOLUTION),
    };
    let body = ConjugateBody {
        grid_t_max: GRID_T_MAX,
        partition,
        results,
        pass,
    };
    Envelope::new(
        "conjugate",
        "convex conjugate psi(s) = sup_t (s t - phi(t)), compared with a grid maximization",
        None,
        tolerances,
        body,
    )
    .emit(a.out.as_deref())?;
    Ok(if pass { Outcome::Pass } else { Outcome::Fail })
}

#[derive(Serialize)]
struct NormBody {
    kind: &'static str,
    report: NormReport,
}

fn norm(a: NormArgs) -> Result<Outcome, CliError> {
    if !(a.tol.is_finite() && a.tol > 0.0) {
        return Err(CliError::Input("--tol: must be a finite number > 0".into()));
    }
    let space = input::space(&a.space)?;
    let zeta = input::scalar(&a.zeta, &space)?;
    let phi = input::phi(&a.phi)?;
    let compute = |r: orliczkit::Result<NormReport>| r.map_err(|e| CliError::Compute(e.to_string()));

    let (kind, property, report) = match a.kind {
        NormKind::Lux | NormKind::Orlicz => {
            let PhiInput::Single(phi) = phi else {
                return Err(CliError::Input(
                    "--phi: unconditional norms take a single family; use cond-lux or cond-orlicz".into(),
                ));
            };
            if a.partition.is_some() {
                return Err(CliError::Input("--partition: only used by cond-lux and cond-orlicz".into()));
            }
            if a.kind == NormKind::Lux {
                ("lux", LUX_PROPERTY, compute(luxemburg_report(&zeta, &phi, a.tol))?)
            } else {
                ("orlicz", ORLICZ_PROPERTY, compute(orlicz_report(&zeta, &phi, a.tol))?)
            }
        }
        NormKind::CondLux | NormKind::CondOrlicz => {
            let phi = blockwise_phi(phi, a.partition.as_deref(), &space)?;
            if a.kind == NormKind::CondLux {
                ("cond-lux", COND_LUX_PROPERTY, compute(cond_luxemburg_report(&zeta, &phi, a.tol))?)
            } else {
                ("cond-orlicz", COND_ORLICZ_PROPERTY, compute(cond_orlicz_report(&zeta, &phi, a.tol))?)
            }
        }
    };
    let infinite = report.is_infinite();
    let tolerances = Tolerances {
        tol: a.tol,
        samples: None,
        grid: None,
    };
    Envelope::new("norm", property, None, tolerances, NormBody { kind, report }).emit(a.out.as_deref())?;
    Ok(if infinite { Outcome::Infinite } else { Outcome::Pass })
}

const LUX_PROPERTY: &str = "Luxemburg norm inf{lambda > 0 : E[phi(|z|/lambda)] <= 1}";
const ORLICZ_PROPERTY: &str = "Orlicz norm inf_k (1 + E[phi(k|z|)]) / k";
const COND_LUX_PROPERTY: &str = "conditional Luxemburg norm, solved atom by atom of the partition";
const COND_ORLICZ_PROPERTY: &str = "conditional Orlicz norm, solved atom by atom of the partition";

fn blockwise_phi(
    phi: PhiInput,
    partition: Option<&Path>,
    space: &std::sync::Arc<orliczkit::FiniteProbSpace>,
) -> Result<RandomOrliczFunction, CliError> {
    match (phi, partition) {
        (PhiInput::Blockwise(j), None) => input::blockwise(j, space),
        (PhiInput::Blockwise(_), Some(_)) => Err(CliError::Input(
            "--partition: --phi already carries a partition; pass only one".into(),
        )),
        (PhiInput::Single(f), Some(path)) => {
            let part = input::partition(path, space)?;
            Ok(RandomOrliczFunction::uniform(part, f))
        }
        (PhiInput::Single(_), None) => Err(CliError::Input(
            "--partition: conditional norms need a partition (or a blockwise --phi)".into(),
        )),
    }
}

fn resolve_seed(flag: Option<u64>, config: Option<u64>) -> Result<u64, CliError> {
    if let Some(s) = flag.or(config) {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Input(format!("{SEED_ENV}: `{v}` is not an unsigned 64-bit integer"))),
        Err(_) => Ok(0),
    }
}

fn verify(a: VerifyArgs) -> Result<Outcome, CliError> {
    let file: ConfigFile = match &a.config {
        Some(path) => input::read_json("--config", path)?,
        None => ConfigFile::default(),
    };
    let seed = resolve_seed(a.seed, file.seed)?;
    let cfg = Config::resolve(a.suite, file, seed, a.tol, a.samples)?;
    let tolerances = Tolerances {
        tol: cfg.tol,
        samples: Some(cfg.samples),
        grid: None,
    };
    let property = suites::property(a.suite);
    let out = a.out.as_deref();
    let given = a.space.is_some() || a.phi.is_some() || a.partition.is_some() || a.functional.is_some() || a.element.is_some();
    let pass = match a.suite {
        Suite::Isometry if given => {
            let space = input::space(require(&a.space, "--space", "isometry")?)?;
            let phi = blockwise_phi(input::phi(require(&a.phi, "--phi", "isometry")?)?, a.partition.as_deref(), &space)?;
            let f = input::functional(require(&a.functional, "--functional", "isometry")?, &space)?;
            if a.element.is_some() {
                return Err(CliError::Input("--element: not used by the isometry suite".into()));
            }
            emit_suite(suites::isometry_given(cfg, &f, &phi)?, property, seed, tolerances, out)?
        }
        Suite::Denseness if given => {
            let space = input::space(require(&a.space, "--space", "denseness")?)?;
            let x = input::element(require(&a.element, "--element", "denseness")?, &space)?;
            if a.phi.is_some() || a.partition.is_some() || a.functional.is_some() {
                return Err(CliError::Input("--phi/--partition/--functional: not used by the denseness suite".into()));
            }
            emit_suite(suites::denseness_given(cfg, &x)?, property, seed, tolerances, out)?
        }
        _ if given => {
            return Err(CliError::Input(
                "--space: instance inputs are only accepted by the isometry and denseness suites".into(),
            ))
        }
        Suite::Isometry => emit_suite(suites::isometry(cfg)?, property, seed, tolerances, out)?,
        Suite::Surjectivity => emit_suite(suites::surjectivity(cfg)?, property, seed, tolerances, out)?,
        Suite::PowerFamily => emit_suite(suites::power_family(cfg)?, property, seed, tolerances, out)?,
        Suite::Delta2 => emit_suite(suites::delta2(cfg)?, property, seed, tolerances, out)?,
        Suite::Denseness => emit_suite(suites::denseness(cfg)?, property, seed, tolerances, out)?,
    };
    Ok(if pass { Outcome::Pass } else { Outcome::Fail })
}

fn require<'a>(p: &'a Option<PathBuf>, flag: &str, suite: &str) -> Result<&'a Path, CliError> {
    p.as_deref()
        .ok_or_else(|| CliError::Input(format!("{flag}: required when the {suite} suite runs on a given instance")))
}

fn emit_suite<T: Serialize>(
    rep: suites::SuiteReport<T>,
    property: &'static str,
    seed: u64,
    tolerances: Tolerances,
    out: Option<&Path>,
) -> Result<bool, CliError> {
    eprintln!(
        "{} {}: {}/{} instances passed",
        if rep.pass { "PASS" } else { "FAIL" },
        rep.suite,
        rep.instances.len() - rep.failures,
        rep.instances.len()
    );
    let pass = rep.pass;
    Envelope::new("verify", property, Some(seed), tolerances, rep).emit(out)?;
    Ok(pass)
}
