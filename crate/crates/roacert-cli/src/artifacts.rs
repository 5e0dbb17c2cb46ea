//! On-disk JSON artifact schemas. All artifacts are byte-deterministic for a
//! fixed config: no timestamps, runtimes, or map iteration orders.

use std::path::Path;

use roacert_core::geometry::{Polytope, Tessellation};
use roacert_core::lyapunov::{Assumptions, Certificate, PwaLyapunov, RoaEstimate};
use roacert_core::program::{Cone, ConicProgram};
use roacert_core::solver::{Residuals, Solution, SolverStatus};
use roacert_core::verify::VerificationReport;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Serializes any artifact as pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// One cone block of a problem file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConeSpec {
    /// "zero" | "nonneg" | "second_order"
    pub kind: String,
    pub size: usize,
}

/// Standard-form conic problem `min cᵀx s.t. Ax + s = b, s ∈ K`, exchangeable
/// with external solvers.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProblemFile {
    #[serde(rename = "A_triplets")]
    pub a_triplets: Vec<(usize, usize, f64)>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub cones: Vec<ConeSpec>,
}

impl ProblemFile {
    pub fn from_program(prog: &ConicProgram) -> Self {
        let cones = prog
            .cones
            .iter()
            .map(|c| match *c {
                Cone::Zero(n) => ConeSpec { kind: "zero".into(), size: n },
                Cone::NonNeg(n) => ConeSpec { kind: "nonneg".into(), size: n },
                Cone::SecondOrder(n) => ConeSpec { kind: "second_order".into(), size: n },
            })
            .collect();
        ProblemFile { a_triplets: prog.a_triplets.clone(), b: prog.rhs(), c: prog.c.clone(), cones }
    }

    pub fn cones(&self) -> Result<Vec<Cone>, CliError> {
        self.cones
            .iter()
            .map(|c| match c.kind.as_str() {
                "zero" => Ok(Cone::Zero(c.size)),
                "nonneg" => Ok(Cone::NonNeg(c.size)),
                "second_order" => Ok(Cone::SecondOrder(c.size)),
                other => Err(CliError::Config(format!("unknown cone kind '{other}'"))),
            })
            .collect()
    }
}

/// Solver output exchanged with external solvers.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolutionFile {
    pub z: Vec<f64>,
    pub y: Vec<f64>,
    pub s: Vec<f64>,
    pub status: SolverStatus,
    pub residuals: Residuals,
}

impl SolutionFile {
    pub fn from_solution(sol: &Solution) -> Self {
        SolutionFile {
            z: sol.z.clone(),
            y: sol.y.clone(),
            s: sol.s.clone(),
            status: sol.status,
            residuals: sol.residuals.clone(),
        }
    }

    pub fn into_solution(self) -> Solution {
        let objective = f64::NAN; // recomputed by callers that need it
        Solution {
            z: self.z,
            y: self.y,
            s: self.s,
            status: self.status,
            residuals: self.residuals,
            iterations: 0,
            objective,
            solve_time: None,
        }
    }
}

/// One affine piece of the learnt function.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PieceFile {
    pub vertex_ids: Vec<usize>,
    pub g: Vec<f64>,
    pub b: f64,
}

/// Learnt piecewise-affine function with enough geometry to re-evaluate it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LyapunovFile {
    pub dim: usize,
    pub vertices: Vec<Vec<f64>>,
    pub region: Polytope,
    pub hole: Option<Polytope>,
    pub cells: Vec<PieceFile>,
    pub alpha: f64,
    pub eta: f64,
    pub certified: bool,
    pub epsilon: f64,
    pub assumptions: Assumptions,
}

impl LyapunovFile {
    pub fn from_lyapunov(lyap: &PwaLyapunov, assumptions: &Assumptions) -> Self {
        let cells = lyap
            .tess
            .cells
            .iter()
            .map(|c| PieceFile {
                vertex_ids: c.vertex_ids.clone(),
                g: lyap.gradients[c.id].clone(),
                b: lyap.offsets[c.id],
            })
            .collect();
        LyapunovFile {
            dim: lyap.tess.dim,
            vertices: lyap.tess.vertices.clone(),
            region: lyap.tess.region.clone(),
            hole: lyap.tess.hole.clone(),
            cells,
            alpha: lyap.alpha,
            eta: lyap.eta,
            certified: lyap.certified,
            epsilon: lyap.epsilon,
            assumptions: assumptions.clone(),
        }
    }

    pub fn into_lyapunov(self) -> PwaLyapunov {
        let cells: Vec<Vec<usize>> = self.cells.iter().map(|c| c.vertex_ids.clone()).collect();
        let tess =
            Tessellation::from_parts(self.dim, self.vertices, cells, self.region, self.hole);
        PwaLyapunov {
            tess,
            gradients: self.cells.iter().map(|c| c.g.clone()).collect(),
            offsets: self.cells.iter().map(|c| c.b).collect(),
            alpha: self.alpha,
            eta: self.eta,
            certified: self.certified,
            epsilon: self.epsilon,
        }
    }
}

/// Top-level run report tying a verdict to everything it depended on.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    /// "certified" | "not_certified" | "covering_failed" | "stage_failed"
    pub status: String,
    pub certificate: Option<Certificate>,
    /// Share of (cell, sample) pairs discarded by the relevance filter.
    pub reduction_ratio: Option<f64>,
    pub uncovered_vertices: Vec<usize>,
    pub failed_stage: Option<usize>,
    pub verification: Option<VerificationReport>,
    pub notes: Vec<String>,
}

impl RunReport {
    pub fn new(command: &str, status: &str) -> Self {
        RunReport {
            command: command.into(),
            status: status.into(),
            certificate: None,
            reduction_ratio: None,
            uncovered_vertices: Vec::new(),
            failed_stage: None,
            verification: None,
            notes: Vec::new(),
        }
    }
}

/// `roa.json`: the certified sublevel set (level + clipped cell polygons).
pub type RoaFile = RoaEstimate;
