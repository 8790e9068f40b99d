//! Experiment configuration: TOML file + command-line overrides, resolved into
//! a validated [`ExperimentConfig`]. Flags win over file values, file values
//! win over defaults. The reference solver parameters are ε = 1e-4, δ = 1e-3,
//! c = 0.25, α = 2, t₀ = 1.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use nsmo_core::problems::{self, Family, ProblemInstance};
use nsmo_core::{Error as CoreError, SolverParams};
use serde::{Deserialize, Serialize};

/// Validation failure naming the offending field.
#[derive(Debug, Clone)]
pub struct ConfigError {
    pub field: &'static str,
    pub message: String,
}

impl ConfigError {
    fn new(field: &'static str, message: impl Into<String>) -> Self {
        ConfigError {
            field,
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid `{}`: {}", self.field, self.message)
    }
}

impl std::error::Error for ConfigError {}

impl From<CoreError> for ConfigError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InvalidParameter { name, message } => ConfigError {
                field: name,
                message,
            },
            other => ConfigError::new("config", other.to_string()),
        }
    }
}

/// Raw config file; every key optional. Unknown keys are rejected.
#[derive(Debug, Default, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub problem: ProblemSection,
    #[serde(default)]
    pub batch: BatchSection,
}

#[derive(Debug, Default, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub eps: Option<f64>,
    pub delta: Option<f64>,
    pub c: Option<f64>,
    pub alpha: Option<f64>,
    pub t0: Option<f64>,
    pub max_iters: Option<usize>,
    pub pdd_cap: Option<usize>,
    pub pns_cap: Option<usize>,
}

#[derive(Debug, Default, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSection {
    pub family: Option<String>,
    pub p: Option<usize>,
    pub m: Option<usize>,
    pub n: Option<usize>,
    pub instance_seed: Option<u64>,
    /// One weight simplex per objective (geodesic-median family).
    pub weights: Option<Vec<Vec<f64>>>,
    /// One regularization weight per objective (lasso family).
    pub lambdas: Option<Vec<f64>>,
}

#[derive(Debug, Default, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatchSection {
    pub starts: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub jobs: Option<usize>,
}

/// Command-line overrides; `None` means "not given".
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub family: Option<String>,
    pub p: Option<usize>,
    pub m: Option<usize>,
    pub n: Option<usize>,
    pub instance_seed: Option<u64>,
    pub eps: Option<f64>,
    pub delta: Option<f64>,
    pub c: Option<f64>,
    pub alpha: Option<f64>,
    pub t0: Option<f64>,
    pub max_iters: Option<usize>,
    pub lambdas: Option<Vec<f64>>,
    pub starts: Option<usize>,
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub out: Option<PathBuf>,
}

/// Resolved problem descriptor; enough to rebuild the instance bit-for-bit.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemConfig {
    pub family: Family,
    pub p: usize,
    pub m: usize,
    /// Design-matrix rows (lasso family only).
    pub n: usize,
    pub instance_seed: u64,
    pub weights: Option<Vec<Vec<f64>>>,
    pub lambdas: Option<Vec<f64>>,
}

/// Fully validated experiment description.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub problem: ProblemConfig,
    pub solver: SolverParams,
    pub starts: usize,
    pub start_seed: u64,
    pub out: Option<PathBuf>,
    /// Worker threads for batches; 0 means all available cores.
    pub jobs: usize,
}

pub fn parse_family(name: &str) -> Result<Family, ConfigError> {
    match name {
        "example1" | "maxlinear" => Ok(Family::MaxLinear),
        "geomedian" | "example2" => Ok(Family::GeoMedian),
        "rayleigh" | "example3" => Ok(Family::Rayleigh),
        "lasso" | "example4" => Ok(Family::SphereLasso),
        other => Err(ConfigError::new(
            "family",
            format!("unknown family `{other}` (expected example1|geomedian|rayleigh|lasso)"),
        )),
    }
}

pub fn load_file(path: &Path) -> Result<FileConfig, ConfigError> {
    let text = fs::read_to_string(path)
        .map_err(|e| ConfigError::new("config", format!("cannot read {}: {e}", path.display())))?;
    toml::from_str(&text)
        .map_err(|e| ConfigError::new("config", format!("cannot parse {}: {e}", path.display())))
}

impl ExperimentConfig {
    /// Merges defaults, file values and flag overrides, then validates.
    pub fn resolve(file: Option<&FileConfig>, flags: &Overrides) -> Result<Self, ConfigError> {
        let empty = FileConfig::default();
        let file = file.unwrap_or(&empty);

        let family_name = flags
            .family
            .clone()
            .or_else(|| file.problem.family.clone())
            .ok_or_else(|| ConfigError::new("family", "no problem family given"))?;
        let family = parse_family(&family_name)?;

        let (default_p, default_n) = match family {
            Family::MaxLinear => (3, 0),
            Family::GeoMedian | Family::Rayleigh => (100, 0),
            Family::SphereLasso => (60, 100),
        };
        let p = flags.p.or(file.problem.p).unwrap_or(default_p);
        let m = flags.m.or(file.problem.m).unwrap_or(2);
        let n = flags.n.or(file.problem.n).unwrap_or(default_n);

        if family == Family::MaxLinear && (p != 3 || m != 2) {
            return Err(ConfigError::new(
                if p != 3 { "p" } else { "m" },
                "the example1 family is fixed at p = 3, m = 2",
            ));
        }
        if p < 2 {
            return Err(ConfigError::new(
                "p",
                format!("ambient dimension must be >= 2, got {p}"),
            ));
        }
        if m < 2 {
            return Err(ConfigError::new(
                "m",
                format!("need at least 2 objectives, got {m}"),
            ));
        }
        if family == Family::SphereLasso && n == 0 {
            return Err(ConfigError::new("n", "lasso needs at least one design row"));
        }

        let weights = file.problem.weights.clone();
        if let Some(w) = &weights {
            if family != Family::GeoMedian {
                return Err(ConfigError::new(
                    "weights",
                    "weights apply to the geomedian family",
                ));
            }
            if w.len() != m {
                return Err(ConfigError::new(
                    "weights",
                    format!("{} weight vectors for m = {m} objectives", w.len()),
                ));
            }
        }
        let lambdas = flags
            .lambdas
            .clone()
            .or_else(|| file.problem.lambdas.clone());
        if let Some(l) = &lambdas {
            if family != Family::SphereLasso {
                return Err(ConfigError::new(
                    "lambdas",
                    "lambdas apply to the lasso family",
                ));
            }
            if l.len() != m {
                return Err(ConfigError::new(
                    "lambdas",
                    format!("{} lambdas for m = {m} objectives", l.len()),
                ));
            }
        }

        let defaults = SolverParams::default();
        let solver = SolverParams {
            epsilon: flags.eps.or(file.solver.eps).unwrap_or(defaults.epsilon),
            delta: flags.delta.or(file.solver.delta).unwrap_or(defaults.delta),
            c: flags.c.or(file.solver.c).unwrap_or(defaults.c),
            alpha: flags.alpha.or(file.solver.alpha).unwrap_or(defaults.alpha),
            t0: flags.t0.or(file.solver.t0).unwrap_or(defaults.t0),
            max_outer_iters: flags
                .max_iters
                .or(file.solver.max_iters)
                .unwrap_or(defaults.max_outer_iters),
            max_pdd_iters: file.solver.pdd_cap.unwrap_or(defaults.max_pdd_iters),
            max_pns_bisections: file.solver.pns_cap.unwrap_or(defaults.max_pns_bisections),
        };
        // the sphere is the only manifold the CLI drives: ι = π
        solver.validate(std::f64::consts::PI)?;

        let starts = flags.starts.or(file.batch.starts).unwrap_or(1);
        if starts == 0 {
            return Err(ConfigError::new("starts", "need at least one start"));
        }

        Ok(ExperimentConfig {
            problem: ProblemConfig {
                family,
                p,
                m,
                n,
                instance_seed: flags
                    .instance_seed
                    .or(file.problem.instance_seed)
                    .unwrap_or(1),
                weights,
                lambdas,
            },
            solver,
            starts,
            start_seed: flags.seed.or(file.batch.seed).unwrap_or(42),
            out: flags.out.clone().or_else(|| file.batch.out.clone()),
            jobs: flags.jobs.or(file.batch.jobs).unwrap_or(0),
        })
    }

    /// Builds the problem instance this configuration describes.
    pub fn build_instance(&self) -> Result<ProblemInstance, ConfigError> {
        let pc = &self.problem;
        let inst = match pc.family {
            Family::MaxLinear => problems::make_example1(),
            Family::GeoMedian => {
                let weights = match &pc.weights {
                    Some(w) => w.clone(),
                    None => problems::geomedian_default_weights(pc.m)?,
                };
                problems::make_geomedian(pc.p, weights, pc.instance_seed)?
            }
            Family::Rayleigh => problems::make_rayleigh(pc.p, pc.m, pc.instance_seed)?,
            Family::SphereLasso => {
                let lambdas = match &pc.lambdas {
                    Some(l) => l.clone(),
                    None => problems::lasso_default_lambdas(pc.m)?,
                };
                problems::make_sphere_lasso(pc.n, pc.p, lambdas, pc.instance_seed)?
            }
        };
        Ok(inst)
    }

    /// Serializes the resolved configuration back to the config-file format,
    /// so a batch directory carries everything needed for an identical re-run.
    pub fn to_toml(&self) -> String {
        let file = FileConfig {
            solver: SolverSection {
                eps: Some(self.solver.epsilon),
                delta: Some(self.solver.delta),
                c: Some(self.solver.c),
                alpha: Some(self.solver.alpha),
                t0: Some(self.solver.t0),
                max_iters: Some(self.solver.max_outer_iters),
                pdd_cap: Some(self.solver.max_pdd_iters),
                pns_cap: Some(self.solver.max_pns_bisections),
            },
            problem: ProblemSection {
                family: Some(self.problem.family.as_str().to_string()),
                p: Some(self.problem.p),
                m: Some(self.problem.m),
                n: if self.problem.family == Family::SphereLasso {
                    Some(self.problem.n)
                } else {
                    None
                },
                instance_seed: Some(self.problem.instance_seed),
                weights: self.problem.weights.clone(),
                lambdas: self.problem.lambdas.clone(),
            },
            batch: BatchSection {
                starts: Some(self.starts),
                seed: Some(self.start_seed),
                out: self.out.clone(),
                jobs: Some(self.jobs),
            },
        };
        toml::to_string_pretty(&file).expect("resolved config serializes")
    }
}
