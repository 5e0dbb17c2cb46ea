//! Run configuration: a single JSON file describing a full pipeline run,
//! with one-to-one CLI flag overrides.

use std::path::{Path, PathBuf};

use roacert_core::dataset::Dataset;
use roacert_core::geometry::Polytope;
use roacert_core::lyapunov::{LearnConfig, SeedSource};
use roacert_core::program::BoundaryMode;
use roacert_core::verify::OracleDynamics;
use serde::{Deserialize, Serialize};

use crate::{csvio, CliError};

/// Geometric specification of a region or prior set.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionSpec {
    /// Axis-aligned box as per-axis [lo, hi] bounds.
    Box(Vec<[f64; 2]>),
    /// Convex polygon as a CCW vertex list (2-D).
    Polygon(Vec<Vec<f64>>),
    /// A single point (zero-volume prior).
    Point(Vec<f64>),
}

impl RegionSpec {
    pub fn to_polytope(&self) -> Polytope {
        match self {
            RegionSpec::Box(b) => {
                let bounds: Vec<(f64, f64)> = b.iter().map(|&[lo, hi]| (lo, hi)).collect();
                Polytope::from_box(&bounds)
            }
            RegionSpec::Polygon(vs) => Polytope::from_polygon(vs.clone()),
            RegionSpec::Point(x) => Polytope::from_point(x.clone()),
        }
    }
}

/// Synthetic dataset source: a named oracle sampled i.i.d. uniformly.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OracleSpec {
    pub name: String,
    pub samples: usize,
    pub seed: u64,
    /// Where to draw the samples; defaults to the run's region.
    #[serde(default)]
    pub sample_region: Option<RegionSpec>,
}

fn default_epsilon() -> f64 {
    1e-3
}
fn default_alpha() -> f64 {
    1.0
}
fn default_n_seeds() -> usize {
    24
}
fn default_rng_seed() -> u64 {
    1
}
fn default_budget() -> usize {
    5
}
fn default_grid_resolution() -> usize {
    200
}
fn default_n_trajectories() -> usize {
    100
}
fn default_trajectory_seed() -> u64 {
    7
}
fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}
fn default_mode() -> BoundaryMode {
    BoundaryMode::WithBoundary
}
fn default_seed_source() -> String {
    "dataset".into()
}

/// Everything a command needs, reproducible from this file alone.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    /// Learning region (required for all commands except `verify`).
    pub region: Option<RegionSpec>,
    /// Nested region sequence for the sequential command (innermost first).
    #[serde(default)]
    pub regions: Vec<RegionSpec>,
    /// Known invariant prior set, tessellated around as a hole.
    #[serde(default)]
    pub prior: Option<RegionSpec>,
    /// Exactly one of `dataset_path` and `oracle` must be set.
    #[serde(default)]
    pub dataset_path: Option<PathBuf>,
    #[serde(default)]
    pub oracle: Option<OracleSpec>,
    /// Lipschitz bound; defaults to 1.2 × the oracle's probe-grid floor when
    /// the dataset is synthetic, and is required for CSV datasets.
    #[serde(default)]
    pub m: Option<f64>,
    #[serde(default)]
    pub noise_eta: f64,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_mode")]
    pub mode: BoundaryMode,
    #[serde(default = "default_n_seeds")]
    pub n_seeds: usize,
    #[serde(default = "default_rng_seed")]
    pub rng_seed: u64,
    /// "dataset" (sample positions) or "uniform" (random points).
    #[serde(default = "default_seed_source")]
    pub seed_source: String,
    #[serde(default = "default_budget")]
    pub refinement_budget: usize,
    #[serde(default = "default_grid_resolution")]
    pub grid_resolution: usize,
    #[serde(default = "default_n_trajectories")]
    pub n_trajectories: usize,
    #[serde(default = "default_trajectory_seed")]
    pub trajectory_seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

/// Flag-level overrides applied on top of a config file, one-to-one with the
/// JSON fields.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub dataset_path: Option<PathBuf>,
    pub m: Option<f64>,
    pub epsilon: Option<f64>,
    pub alpha: Option<f64>,
    pub mode: Option<BoundaryMode>,
    pub n_seeds: Option<usize>,
    pub rng_seed: Option<u64>,
    pub refinement_budget: Option<usize>,
    pub grid_resolution: Option<usize>,
    pub n_trajectories: Option<usize>,
    pub output_dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: &Path, overrides: &Overrides) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)?;
        let mut cfg: RunConfig = serde_json::from_str(&text)?;
        if let Some(v) = &overrides.dataset_path {
            cfg.dataset_path = Some(v.clone());
            cfg.oracle = None;
        }
        if let Some(v) = overrides.m {
            cfg.m = Some(v);
        }
        if let Some(v) = overrides.epsilon {
            cfg.epsilon = v;
        }
        if let Some(v) = overrides.alpha {
            cfg.alpha = v;
        }
        if let Some(v) = overrides.mode {
            cfg.mode = v;
        }
        if let Some(v) = overrides.n_seeds {
            cfg.n_seeds = v;
        }
        if let Some(v) = overrides.rng_seed {
            cfg.rng_seed = v;
        }
        if let Some(v) = overrides.refinement_budget {
            cfg.refinement_budget = v;
        }
        if let Some(v) = overrides.grid_resolution {
            cfg.grid_resolution = v;
        }
        if let Some(v) = overrides.n_trajectories {
            cfg.n_trajectories = v;
        }
        if let Some(v) = &overrides.output_dir {
            cfg.output_dir = v.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.epsilon <= 0.0 {
            return Err(CliError::Config(format!("epsilon must be > 0, got {}", self.epsilon)));
        }
        match (&self.dataset_path, &self.oracle) {
            (Some(_), Some(_)) => {
                return Err(CliError::Config(
                    "set exactly one of dataset_path and oracle, not both".into(),
                ))
            }
            (None, None) => {
                return Err(CliError::Config(
                    "set exactly one of dataset_path and oracle".into(),
                ))
            }
            _ => {}
        }
        if self.dataset_path.is_some() && self.m.is_none() {
            return Err(CliError::Config("CSV datasets require an explicit m".into()));
        }
        if !matches!(self.seed_source.as_str(), "dataset" | "uniform") {
            return Err(CliError::Config(format!(
                "seed_source must be 'dataset' or 'uniform', got '{}'",
                self.seed_source
            )));
        }
        // prior must sit inside the (innermost) region
        let inner = self.regions.first().or(self.region.as_ref());
        if let (Some(prior), Some(region)) = (&self.prior, inner) {
            let r = region.to_polytope();
            if let Some(vs) = &prior.to_polytope().vertices {
                for v in vs {
                    if !r.contains(v, 1e-12) {
                        return Err(CliError::Config(
                            "prior set is not contained in the region".into(),
                        ));
                    }
                }
            }
        }
        // a region sequence must be nested innermost-first
        for w in self.regions.windows(2) {
            let outer = w[1].to_polytope();
            if let Some(vs) = &w[0].to_polytope().vertices {
                if vs.iter().any(|v| !outer.contains(v, 1e-12)) {
                    return Err(CliError::Config(
                        "region sequence is not nested innermost-first".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn region_polytope(&self) -> Result<Polytope, CliError> {
        self.region
            .as_ref()
            .map(|r| r.to_polytope())
            .ok_or_else(|| CliError::Config("config needs a region".into()))
    }

    pub fn prior_polytope(&self) -> Option<Polytope> {
        self.prior.as_ref().map(|p| p.to_polytope())
    }

    /// Loads the CSV dataset or synthesizes one from the named oracle.
    /// Returns the dataset and the oracle when one was used.
    pub fn build_dataset(&self) -> Result<(Dataset, Option<OracleDynamics>), CliError> {
        if let Some(path) = &self.dataset_path {
            let m = self.m.ok_or_else(|| CliError::InvalidM(f64::NAN))?;
            if !(m > 0.0) {
                return Err(CliError::InvalidM(m));
            }
            let ds = csvio::load_dataset_csv(path, m, self.noise_eta)?;
            return Ok((ds, None));
        }
        let spec = self.oracle.as_ref().expect("validated");
        let oracle = OracleDynamics::by_name(&spec.name)
            .map_err(|e| CliError::Config(e.to_string()))?;
        let sample_region = spec
            .sample_region
            .as_ref()
            .map(|r| r.to_polytope())
            .map_or_else(|| self.region_polytope(), Ok)?;
        let mut ds =
            roacert_core::verify::generate_dataset(&oracle, &sample_region, spec.samples, spec.seed)
                .map_err(|e| CliError::Config(e.to_string()))?;
        if let Some(m) = self.m {
            if !(m > 0.0) {
                return Err(CliError::InvalidM(m));
            }
            ds = Dataset::new(ds.samples, m, self.noise_eta)
                .map_err(|e| CliError::Core(e.to_string()))?;
        }
        Ok((ds, Some(oracle)))
    }

    pub fn learn_config(&self) -> LearnConfig {
        let mut cfg = LearnConfig::default();
        cfg.program.epsilon = self.epsilon;
        cfg.program.alpha = self.alpha;
        cfg.program.mode = self.mode;
        cfg.program.noise_eta = self.noise_eta;
        cfg.n_seeds = self.n_seeds;
        cfg.rng_seed = self.rng_seed;
        cfg.seed_source = if self.seed_source == "uniform" {
            SeedSource::Uniform
        } else {
            SeedSource::Dataset
        };
        cfg.refinement_budget = self.refinement_budget;
        cfg
    }
}
