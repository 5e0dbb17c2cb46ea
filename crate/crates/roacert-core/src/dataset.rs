//! Sample sets: states paired with measured velocities, a Lipschitz
//! overestimate `M`, the induced per-sample radii, the vertex covering test,
//! and per-cell relevance sets.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::geometry::Tessellation;
use crate::math;

/// Strictness margin for the covering test, relative to each radius.
pub const TAU_COV_REL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum DatasetError {
    /// M must be strictly positive.
    InvalidM(f64),
    /// noise bound must be nonnegative.
    InvalidNoise(f64),
    /// Empty sample list, mismatched dimensions, or non-finite entries.
    MalformedSamples,
    /// Two samples share a state but report different velocities.
    InconsistentData { i: usize, j: usize },
}

impl core::fmt::Display for DatasetError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            DatasetError::InvalidM(m) => write!(f, "Lipschitz overestimate must be > 0, got {m}"),
            DatasetError::InvalidNoise(e) => write!(f, "noise bound must be >= 0, got {e}"),
            DatasetError::MalformedSamples => write!(f, "empty, mismatched, or non-finite samples"),
            DatasetError::InconsistentData { i, j } => {
                write!(f, "samples {i} and {j} share a state but differ in velocity")
            }
        }
    }
}

impl core::error::Error for DatasetError {}

/// One observation: a state and the velocity measured there.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub x: Vec<f64>,
    pub f: Vec<f64>,
}

/// Immutable sample set with Lipschitz overestimate and derived radii.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Dataset {
    pub samples: Vec<Sample>,
    pub m: f64,
    pub noise_eta: f64,
    /// r_i = ‖f_i‖ / M, recomputed on construction.
    pub radii: Vec<f64>,
}

/// Outcome of the vertex covering test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Covering {
    Pass,
    Fail { uncovered: Vec<usize> },
}

impl Covering {
    pub fn passed(&self) -> bool {
        matches!(self, Covering::Pass)
    }
}

/// Per-cell lists of sample indices whose ball contains a cell vertex.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RelevanceSets {
    pub per_cell: Vec<Vec<usize>>,
    /// 1 − Σ|I_k| / (N_C · N_D)
    pub reduction_ratio: f64,
}

impl Dataset {
    pub fn new(samples: Vec<Sample>, m: f64, noise_eta: f64) -> Result<Self, DatasetError> {
        if !(m > 0.0) {
            return Err(DatasetError::InvalidM(m));
        }
        if !(noise_eta >= 0.0) {
            return Err(DatasetError::InvalidNoise(noise_eta));
        }
        if samples.is_empty() {
            return Err(DatasetError::MalformedSamples);
        }
        let n = samples[0].x.len();
        for s in &samples {
            if s.x.len() != n
                || s.f.len() != n
                || s.x.iter().chain(&s.f).any(|v| !v.is_finite())
            {
                return Err(DatasetError::MalformedSamples);
            }
        }
        let radii = samples.iter().map(|s| math::norm(&s.f) / m).collect();
        Ok(Dataset { samples, m, noise_eta, radii })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.samples[0].x.len()
    }

    /// Radius usable for the strict covering/relevance tests. With noise the
    /// ball shrinks to (‖f_i‖ − η)/M − η, clipped at 0.
    pub fn effective_radius(&self, i: usize) -> f64 {
        if self.noise_eta == 0.0 {
            self.radii[i]
        } else {
            let r = (math::norm(&self.samples[i].f) - self.noise_eta) / self.m - self.noise_eta;
            r.max(0.0)
        }
    }
}

/// Every tessellation vertex must lie strictly inside some sample ball
/// B(x_i, r_i); strictness is enforced as ‖v − x_i‖ ≤ r_i · (1 − 10⁻¹²).
pub fn covering_check(ds: &Dataset, tess: &Tessellation) -> Covering {
    let mut uncovered = Vec::new();
    for (vid, v) in tess.vertices.iter().enumerate() {
        let hit = (0..ds.len()).any(|i| {
            let r = ds.effective_radius(i);
            // strict interior of the ball: a zero-radius ball covers nothing
            r > 0.0 && math::dist(v, &ds.samples[i].x) <= r - TAU_COV_REL * r
        });
        if !hit {
            uncovered.push(vid);
        }
    }
    if uncovered.is_empty() {
        Covering::Pass
    } else {
        Covering::Fail { uncovered }
    }
}

/// I_k = { i : some vertex of cell k lies strictly inside B(x_i, r_i) }.
pub fn relevance_sets(ds: &Dataset, tess: &Tessellation) -> RelevanceSets {
    let per_cell: Vec<Vec<usize>> = tess
        .cells
        .iter()
        .map(|cell| {
            (0..ds.len())
                .filter(|&i| {
                    let r = ds.effective_radius(i);
                    r > 0.0
                        && cell.vertex_ids.iter().any(|&vid| {
                            math::dist(&tess.vertices[vid], &ds.samples[i].x)
                                <= r - TAU_COV_REL * r
                        })
                })
                .collect()
        })
        .collect();
    let total: usize = per_cell.iter().map(Vec::len).sum();
    let denom = (tess.cells.len() * ds.len()) as f64;
    let reduction_ratio = if denom > 0.0 { 1.0 - total as f64 / denom } else { 0.0 };
    RelevanceSets { per_cell, reduction_ratio }
}

/// max over pairs of ‖f_i − f_j‖ / ‖x_i − x_j‖: a lower bound on any valid
/// Lipschitz overestimate.
pub fn lipschitz_floor(ds: &Dataset) -> Result<f64, DatasetError> {
    let mut floor = 0.0f64;
    for i in 0..ds.len() {
        for j in (i + 1)..ds.len() {
            let dx = math::dist(&ds.samples[i].x, &ds.samples[j].x);
            let df = math::dist(&ds.samples[i].f, &ds.samples[j].f);
            if dx == 0.0 {
                if df > 0.0 {
                    return Err(DatasetError::InconsistentData { i, j });
                }
                continue;
            }
            floor = floor.max(df / dx);
        }
    }
    Ok(floor)
}
