//! `nsmo` — multi-start descent experiments for nonsmooth multiobjective
//! optimization on the unit sphere.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nsmo_cli::batch::{self, run_batch};
use nsmo_cli::config::{load_file, ExperimentConfig, Overrides};
use nsmo_cli::csvio;
use nsmo_core::{run, RunStatus, Sphere};

#[derive(Parser)]
#[command(
    name = "nsmo",
    version,
    about = "Descent experiments for nonsmooth multiobjective optimization on the unit sphere"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a single start and emit its iteration trace as CSV (stdout or --out)
    Run(RunArgs),
    /// Run a multi-start batch: per-run trace CSVs plus a batch summary
    Batch(BatchArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// TOML config file; command-line flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    /// Problem family: example1 | geomedian | rayleigh | lasso
    #[arg(long)]
    family: Option<String>,
    /// Ambient dimension
    #[arg(long)]
    p: Option<usize>,
    /// Number of objectives
    #[arg(long)]
    m: Option<usize>,
    /// Design-matrix rows (lasso family)
    #[arg(long)]
    n: Option<usize>,
    /// Radius ε of the subgradient ball
    #[arg(long)]
    eps: Option<f64>,
    /// Criticality tolerance δ
    #[arg(long)]
    delta: Option<f64>,
    /// Armijo constant c in (0,1)
    #[arg(long)]
    c: Option<f64>,
    /// Step shrink base α > 1
    #[arg(long)]
    alpha: Option<f64>,
    /// Initial trial step t₀
    #[arg(long)]
    t0: Option<f64>,
    /// Outer iteration cap
    #[arg(long = "max-iters")]
    max_iters: Option<usize>,
    /// Seed for the problem instance data
    #[arg(long = "instance-seed")]
    instance_seed: Option<u64>,
    /// Base seed for starting points (start i uses seed + i)
    #[arg(long)]
    seed: Option<u64>,
    /// Regularization weight λ_i for the lasso family (repeat per objective)
    #[arg(long = "lambda")]
    lambda: Vec<f64>,
    /// Output file (run) or directory (batch)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct BatchArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Number of random starts
    #[arg(long)]
    starts: Option<usize>,
    /// Worker threads (0 = all cores)
    #[arg(long)]
    jobs: Option<usize>,
}

fn overrides(common: &CommonArgs, starts: Option<usize>, jobs: Option<usize>) -> Overrides {
    Overrides {
        family: common.family.clone(),
        p: common.p,
        m: common.m,
        n: common.n,
        instance_seed: common.instance_seed,
        eps: common.eps,
        delta: common.delta,
        c: common.c,
        alpha: common.alpha,
        t0: common.t0,
        max_iters: common.max_iters,
        lambdas: if common.lambda.is_empty() {
            None
        } else {
            Some(common.lambda.clone())
        },
        starts,
        seed: common.seed,
        jobs,
        out: common.out.clone(),
    }
}

fn resolve(common: &CommonArgs, flags: Overrides) -> Result<ExperimentConfig, ExitCode> {
    let file = match &common.config {
        Some(path) => match load_file(path) {
            Ok(f) => Some(f),
            Err(e) => {
                eprintln!("error: {e}");
                return Err(ExitCode::from(2));
            }
        },
        None => None,
    };
    ExperimentConfig::resolve(file.as_ref(), &flags).map_err(|e| {
        eprintln!("error: {e}");
        ExitCode::from(2)
    })
}

fn run_single(args: &RunArgs) -> ExitCode {
    let config = match resolve(&args.common, overrides(&args.common, Some(1), None)) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let instance = match config.build_instance() {
        Ok(i) => i,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let sphere = Sphere::new(instance.dim_ambient).expect("validated dimension");
    let x0 = batch::starting_point(&sphere, config.start_seed, 0);
    let record = match run(&sphere, x0, &instance.objectives, &config.solver) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };

    let csv = csvio::trace_to_string(&record);
    if let Some(path) = &config.out {
        if let Err(e) = fs::write(path, &csv) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::FAILURE;
        }
    } else {
        print!("{csv}");
    }
    eprintln!(
        "status={} iterations={} final_norm={:e}",
        record.status,
        record.steps(),
        record.final_direction_norm().unwrap_or(f64::NAN),
    );
    if record.status == RunStatus::NumericalFailure {
        if let Some(f) = &record.failure {
            eprintln!("failure: {f}");
        }
        return ExitCode::from(3);
    }
    ExitCode::SUCCESS
}

fn run_batch_cmd(args: &BatchArgs) -> ExitCode {
    let config = match resolve(
        &args.common,
        overrides(&args.common, args.starts, args.jobs),
    ) {
        Ok(c) => c,
        Err(code) => return code,
    };
    if config.out.is_none() {
        eprintln!("error: invalid `out`: batch runs need an output directory");
        return ExitCode::from(2);
    }
    match run_batch(&config) {
        Ok((summary, _records)) => {
            println!(
                "starts={} critical={} cap_hit={} failed={} mean_iterations={}",
                config.starts,
                summary.critical,
                summary.cap_hit,
                summary.failed,
                summary.mean_iterations,
            );
            println!(
                "outputs in {}",
                config.out.expect("checked above").display()
            );
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        Command::Run(args) => run_single(args),
        Command::Batch(args) => run_batch_cmd(args),
    }
}
