use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use regdim_cli::config::{Plan, RunConfig};
use regdim_cli::output::config_hash;
use regdim_cli::{estimate, formula, sweep, CliError, Table};

#[derive(Parser)]
#[command(name = "regdim", version, about = "Closed forms and estimates of the upper regularity dimension")]
struct Args {
    #[command(subcommand)]
    command: Command,
    /// Output CSV path (stdout when absent)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for randomized sampling; overrides the config
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Relative ball-mass tolerance; overrides the config
    #[arg(long, global = true)]
    tol: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Print closed-form values for the configured model
    Formula {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run the configured estimators
    Estimate {
        #[arg(long)]
        config: PathBuf,
        /// Fill the runtime_ms column (makes output run-dependent)
        #[arg(long)]
        timing: bool,
    },
    /// The four carpet dimension curves over a range of ε
    SweepEpsilon {
        #[arg(long, default_value_t = 0.01)]
        eps_min: f64,
        #[arg(long, default_value_t = 0.5)]
        eps_max: f64,
        #[arg(long, default_value_t = 50)]
        steps: usize,
    },
}

fn load(path: &Path, args: &Args) -> Result<(Plan, Option<PathBuf>, String), CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config { key: "--config".into(), message: format!("{}: {e}", path.display()) })?;
    let cfg = RunConfig::parse(&text)?;
    let plan = Plan::from_config(&cfg, args.seed, args.tol)?;
    let hash = config_hash(&[text.as_bytes(), plan.seed.to_string().as_bytes(), format!("{:e}", plan.tol).as_bytes()]);
    Ok((plan, cfg.out.clone(), hash))
}

fn emit(table: &Table, out: Option<&Path>) -> Result<(), CliError> {
    let csv = table.to_csv()?;
    match out {
        Some(p) => fs::write(p, csv)?,
        None => print!("{csv}"),
    }
    Ok(())
}

fn run(args: &Args) -> Result<(), CliError> {
    if let Some(n) = args.threads {
        if n == 0 {
            return Err(CliError::Config { key: "--threads".into(), message: "need at least one thread".into() });
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::Compute(e.to_string()))?;
    }
    match &args.command {
        Command::Formula { config } => {
            let (plan, out, hash) = load(config, args)?;
            emit(&formula::formula_table(&plan, hash), args.out.as_deref().or(out.as_deref()))
        }
        Command::Estimate { config, timing } => {
            let (plan, out, hash) = load(config, args)?;
            let rows = estimate::run_estimators(&plan);
            emit(&estimate::estimate_table(&rows, hash, *timing), args.out.as_deref().or(out.as_deref()))
        }
        Command::SweepEpsilon { eps_min, eps_max, steps } => {
            let rows = sweep::sweep_epsilon(*eps_min, *eps_max, *steps)?;
            let hash = config_hash(&[
                b"sweep-epsilon",
                eps_min.to_string().as_bytes(),
                eps_max.to_string().as_bytes(),
                steps.to_string().as_bytes(),
            ]);
            emit(&sweep::sweep_table(&rows, hash), args.out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("regdim: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
