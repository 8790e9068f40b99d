//! Multi-start batch runner. Runs are independent: start `i` draws its initial
//! point from seed `start_seed + i` while the problem instance stays fixed, so
//! outputs are byte-identical across repeated invocations and across any
//! degree of parallelism.

use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use nsmo_core::manifold::Manifold;
use nsmo_core::problems::ProblemInstance;
use nsmo_core::{run, Error as CoreError, Point, RunRecord, RunStatus, Sphere};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::{ConfigError, ExperimentConfig};
use crate::csvio::{self, SummaryRow};

#[derive(Debug)]
pub enum BatchError {
    Config(ConfigError),
    Io(io::Error),
    Solver(CoreError),
}

impl fmt::Display for BatchError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BatchError::Config(e) => write!(f, "{e}"),
            BatchError::Io(e) => write!(f, "io error: {e}"),
            BatchError::Solver(e) => write!(f, "solver error: {e}"),
        }
    }
}

impl std::error::Error for BatchError {}

impl From<ConfigError> for BatchError {
    fn from(e: ConfigError) -> Self {
        BatchError::Config(e)
    }
}

impl From<io::Error> for BatchError {
    fn from(e: io::Error) -> Self {
        BatchError::Io(e)
    }
}

/// Aggregate results of a batch.
#[derive(Debug, Clone)]
pub struct BatchSummary {
    pub rows: Vec<SummaryRow>,
    /// Arithmetic mean of iteration counts over `CriticalReached` runs only;
    /// NaN when no run reached criticality.
    pub mean_iterations: f64,
    pub critical: usize,
    pub cap_hit: usize,
    pub failed: usize,
}

impl BatchSummary {
    fn from_rows(rows: Vec<SummaryRow>) -> Self {
        let critical = rows
            .iter()
            .filter(|r| r.status == RunStatus::CriticalReached)
            .count();
        let cap_hit = rows
            .iter()
            .filter(|r| r.status == RunStatus::IterationCapHit)
            .count();
        let failed = rows
            .iter()
            .filter(|r| r.status == RunStatus::NumericalFailure)
            .count();
        let mean_iterations = if critical == 0 {
            f64::NAN
        } else {
            rows.iter()
                .filter(|r| r.status == RunStatus::CriticalReached)
                .map(|r| r.iterations as f64)
                .sum::<f64>()
                / critical as f64
        };
        BatchSummary {
            rows,
            mean_iterations,
            critical,
            cap_hit,
            failed,
        }
    }
}

/// Initial point of start `i`: a fresh generator seeded with `start_seed + i`.
pub fn starting_point(sphere: &Sphere, start_seed: u64, index: usize) -> Point {
    let mut rng = ChaCha8Rng::seed_from_u64(start_seed.wrapping_add(index as u64));
    sphere.random_point(&mut rng)
}

/// Runs the whole batch, writing `trace_<k>.csv`, `summary.csv` and
/// `config.toml` when an output directory is configured. An unwritable output
/// path fails before any run starts. Individual run failures are recorded in
/// the summary; the batch itself only fails on configuration or IO problems.
pub fn run_batch(config: &ExperimentConfig) -> Result<(BatchSummary, Vec<RunRecord>), BatchError> {
    let instance = config.build_instance()?;

    // claim the summary file up front so a bad path fails before any run
    let out = match &config.out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            let summary = fs::File::create(dir.join("summary.csv"))?;
            Some((dir.clone(), summary))
        }
        None => None,
    };

    let records = execute_runs(config, &instance)?;

    if let Some((dir, summary)) = out {
        write_outputs(&dir, summary, config, &records)?;
    }

    let rows = summary_rows(config, &records);
    Ok((BatchSummary::from_rows(rows), records))
}

fn execute_runs(
    config: &ExperimentConfig,
    instance: &ProblemInstance,
) -> Result<Vec<RunRecord>, BatchError> {
    let sphere = Sphere::new(instance.dim_ambient).map_err(BatchError::Solver)?;
    let starts = config.starts;
    let workers = if config.jobs == 0 {
        std::thread::available_parallelism().map_or(1, |n| n.get())
    } else {
        config.jobs
    }
    .min(starts.max(1));

    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<Result<RunRecord, CoreError>>>> = Mutex::new(vec![None; starts]);

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= starts {
                    break;
                }
                let x0 = starting_point(&sphere, config.start_seed, i);
                let outcome = run(&sphere, x0, &instance.objectives, &config.solver);
                slots.lock().expect("no poisoned workers").as_mut_slice()[i] = Some(outcome);
            });
        }
    });

    let mut records = Vec::with_capacity(starts);
    for slot in slots.into_inner().expect("all workers joined") {
        records.push(
            slot.expect("every index was claimed")
                .map_err(BatchError::Solver)?,
        );
    }
    Ok(records)
}

fn summary_rows(config: &ExperimentConfig, records: &[RunRecord]) -> Vec<SummaryRow> {
    records
        .iter()
        .enumerate()
        .map(|(i, rec)| SummaryRow {
            start: i,
            seed: config.start_seed.wrapping_add(i as u64),
            status: rec.status,
            iterations: rec.steps(),
            final_objectives: rec
                .final_objectives()
                .map(<[f64]>::to_vec)
                .unwrap_or_default(),
        })
        .collect()
}

fn write_outputs(
    dir: &Path,
    mut summary_file: fs::File,
    config: &ExperimentConfig,
    records: &[RunRecord],
) -> Result<(), BatchError> {
    fs::write(dir.join("config.toml"), config.to_toml())?;

    for (i, rec) in records.iter().enumerate() {
        let mut f = fs::File::create(trace_path(dir, i))?;
        csvio::write_trace(&mut f, rec)?;
        f.flush()?;
    }

    let rows = summary_rows(config, records);
    csvio::write_summary(&mut summary_file, config.problem.m, &rows)?;
    summary_file.flush()?;
    Ok(())
}

pub fn trace_path(dir: &Path, index: usize) -> PathBuf {
    dir.join(format!("trace_{index}.csv"))
}
