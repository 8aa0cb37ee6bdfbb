use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use hlawka_cli::{
    classify_file, emit, load_config, run_identities, run_search, run_verify, witness_report,
    SuiteConfig, WitnessName, NON_PSD_PROBE,
};
use hlawka_core::inequalities::InequalityId;
use hlawka_core::sampling::{ScaleLaw, Strategy};
use hlawka_core::search::SearchConfig;
use hlawka_core::DEFAULT_TOL;

/// Randomized verification of Hornich-Hlawka type inequalities.
///
/// Exit status is 0 when a report's verdict is pass, 1 when it is fail and
/// 2 on usage or input errors.
#[derive(Parser)]
#[command(name = "hlawka", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample triples and check every requested inequality.
    Verify(VerifyArgs),
    /// Check the polynomial identities on random draws.
    Identities(IdentitiesArgs),
    /// Minimize xi (or another slack) over the PSD cone, or hunt equality points.
    Search(SearchArgs),
    /// Classify a vector triple read from a JSON file.
    Classify(ClassifyArgs),
    /// Print a built-in sharpness witness.
    Witness(WitnessArgs),
}

#[derive(Args)]
struct VerifyArgs {
    /// JSON file with suite settings; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    trials: Option<usize>,
    /// Dimension used when no --strategy is given.
    #[arg(long = "dim")]
    dimension: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    tol: Option<f64>,
    /// ambient-vectors(d), factor-3x3, boundary-rank2 or boundary-rank1. Repeatable.
    #[arg(long = "strategy")]
    strategies: Vec<Strategy>,
    /// Inequality id. Repeatable; default all.
    #[arg(long = "inequality")]
    inequalities: Vec<InequalityId>,
    /// normal or heavy-tail.
    #[arg(long)]
    scale_law: Option<ScaleLaw>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, hide = true)]
    inject_non_psd: bool,
}

#[derive(Args)]
struct IdentitiesArgs {
    /// Draws per identity.
    #[arg(long, alias = "count", default_value_t = 10_000)]
    trials: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, hide = true)]
    tamper_sign: bool,
}

#[derive(Args)]
struct SearchArgs {
    /// JSON file with search settings; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    max_iters: Option<usize>,
    /// Inequality id to minimize; default xi_quartic.
    #[arg(long)]
    objective: Option<InequalityId>,
    /// Hunt equality points of the objective instead of minimizing it.
    #[arg(long)]
    equality: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ClassifyArgs {
    /// JSON file holding {"x": [...], "y": [...], "z": [...]}.
    input: PathBuf,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct WitnessArgs {
    /// ones or planar120.
    name: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn verify(args: VerifyArgs) -> Result<bool> {
    let mut cfg: SuiteConfig = load_config(args.config.as_deref())?;
    if let Some(v) = args.trials {
        cfg.trials = v;
    }
    if let Some(v) = args.dimension {
        cfg.dimension = v;
    }
    if let Some(v) = args.seed {
        cfg.seed = v;
    }
    if let Some(v) = args.tol {
        cfg.tol = v;
    }
    if let Some(v) = args.scale_law {
        cfg.scale_law = v;
    }
    if !args.strategies.is_empty() {
        cfg.strategies = args.strategies;
    }
    if !args.inequalities.is_empty() {
        cfg.inequalities = args.inequalities;
    }
    let inject = args.inject_non_psd.then_some(NON_PSD_PROBE);
    let report = run_verify(&cfg, inject)?;
    emit(&report, args.out.as_deref())?;
    Ok(report.verdict.is_pass())
}

fn search(args: SearchArgs) -> Result<bool> {
    let mut cfg: SearchConfig = load_config(args.config.as_deref())?;
    if let Some(v) = args.restarts {
        cfg.restarts = v;
    }
    if let Some(v) = args.seed {
        cfg.seed = v;
    }
    if let Some(v) = args.max_iters {
        cfg.max_iters = v;
    }
    if let Some(v) = args.objective {
        cfg.objective = v;
    }
    let output = run_search(&cfg, args.equality)?;
    emit(&output, args.out.as_deref())?;
    Ok(true)
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Verify(args) => verify(args),
        Command::Identities(args) => {
            let report = run_identities(args.trials, args.seed, args.tamper_sign)?;
            emit(&report, args.out.as_deref())?;
            Ok(report.verdict.is_pass())
        }
        Command::Search(args) => search(args),
        Command::Classify(args) => {
            let report = classify_file(&args.input, args.tol)?;
            emit(&report, args.out.as_deref())?;
            Ok(true)
        }
        Command::Witness(args) => {
            let name: WitnessName = args.name.parse()?;
            emit(&witness_report(name)?, args.out.as_deref())?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
