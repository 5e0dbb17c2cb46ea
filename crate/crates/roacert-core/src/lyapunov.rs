//! Piecewise-affine Lyapunov functions: extraction from solver output, the
//! optimal-value certificate test, sublevel-set region-of-attraction
//! estimation, and the refinement / sequential / no-boundary learning loops.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::dataset::{covering_check, relevance_sets, Covering, Dataset};
use crate::geometry::{GeometryError, Polytope, Tessellation, VertexClass};
use crate::math;
use crate::program::{
    assemble, BoundaryMode, ConicProgram, ProgramConfig, ProgramError,
};
use crate::rng::Rng;
use crate::solver::{solve, Solution, SolverSettings, SolverStatus};

/// Relative continuity tolerance: 10⁻⁷·(1+|α|).
pub const TAU_CONT_REL: f64 = 1e-7;
/// Certificate tolerance relative to the target −ε·Σ|C_k|: 10⁻⁶.
pub const TAU_CERT_REL: f64 = 1e-6;
/// Sublevel clearance relative factor: δ = 10⁻⁶·(1+|level|).
pub const DELTA_LEVEL_REL: f64 = 1e-6;
/// Residual bound under which an iteration-capped solve still supports a
/// NotCertified verdict.
const NEAR_OPT_RESIDUAL: f64 = 1e-6;
/// Relative slack-sum margin (vs the certificate target) required for that
/// verdict.
const NEAR_OPT_MARGIN: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq)]
pub enum LyapunovError {
    /// Solver did not report an optimal solution.
    NotOptimal(SolverStatus),
    /// Extracted pieces violate the continuity invariant.
    ContinuityViolated { vertex: usize, gap: f64 },
    /// Covering test still failed after the refinement budget.
    CoveringFailed { uncovered: Vec<usize> },
    /// A stage of the sequential loop failed.
    StageFailed(usize),
    /// No admissible sublevel set: the boundary minimum does not clear the
    /// prior's boundary values.
    EmptyRoa,
    Geometry(GeometryError),
    Program(ProgramError),
}

impl From<GeometryError> for LyapunovError {
    fn from(e: GeometryError) -> Self {
        LyapunovError::Geometry(e)
    }
}

impl From<ProgramError> for LyapunovError {
    fn from(e: ProgramError) -> Self {
        LyapunovError::Program(e)
    }
}

impl core::fmt::Display for LyapunovError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            LyapunovError::NotOptimal(s) => write!(f, "solver status {s:?} is not optimal"),
            LyapunovError::ContinuityViolated { vertex, gap } => {
                write!(f, "continuity violated at vertex {vertex} by {gap:e}")
            }
            LyapunovError::CoveringFailed { uncovered } => {
                write!(f, "covering failed: {} uncovered vertices", uncovered.len())
            }
            LyapunovError::StageFailed(i) => write!(f, "sequential stage {i} failed"),
            LyapunovError::EmptyRoa => write!(f, "no admissible sublevel set"),
            LyapunovError::Geometry(e) => write!(f, "{e}"),
            LyapunovError::Program(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for LyapunovError {}

/// Continuous piecewise-affine function on the tessellated region, extended
/// outside by level + slope·distance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PwaLyapunov {
    pub tess: Tessellation,
    pub gradients: Vec<Vec<f64>>,
    pub offsets: Vec<f64>,
    pub alpha: f64,
    /// Exterior slope: max_k ‖g_k‖.
    pub eta: f64,
    pub certified: bool,
    pub epsilon: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertStatus {
    Certified,
    NotCertified,
    CoveringFailed,
}

/// Inputs the certificate depends on, logged for reproducibility.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Assumptions {
    pub m: f64,
    pub noise_eta: f64,
    pub alpha: f64,
    pub epsilon: f64,
    pub rng_seed: u64,
    pub n_seeds: usize,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Certificate {
    pub status: CertStatus,
    pub optimal_slack_sum: f64,
    /// −ε·Σ_k |C_k|
    pub target: f64,
    pub worst_vertex_slack: f64,
    pub mode: BoundaryMode,
    pub assumptions: Assumptions,
}

/// Sublevel set {L ≤ level} as per-cell clipped convex polytopes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RoaEstimate {
    pub level: f64,
    /// (cell id, clipped polygon vertices) — empty polygons omitted.
    pub pieces: Vec<(usize, Vec<Vec<f64>>)>,
}

fn default_assumptions(ds: &Dataset, cfg: &ProgramConfig) -> Assumptions {
    Assumptions {
        m: ds.m,
        noise_eta: ds.noise_eta,
        alpha: cfg.alpha,
        epsilon: cfg.epsilon,
        rng_seed: 0,
        n_seeds: 0,
        notes: Vec::new(),
    }
}

/// Reads the PWA pieces out of an optimal solution and runs the optimal-value
/// certificate test: certified iff Σ s ≤ −ε·Σ|C_k| + τ.
pub fn extract(
    prog: &ConicProgram,
    sol: &Solution,
    tess: &Tessellation,
    assumptions: Assumptions,
) -> Result<(PwaLyapunov, Certificate), LyapunovError> {
    // A near-optimal iteration-capped solve may still support the (negative)
    // NotCertified verdict, decided below; everything else is unusable.
    let near_optimal = sol.status == SolverStatus::MaxIters
        && sol.residuals.primal <= NEAR_OPT_RESIDUAL
        && sol.residuals.dual <= NEAR_OPT_RESIDUAL
        && sol.residuals.gap <= NEAR_OPT_RESIDUAL;
    if sol.status != SolverStatus::Optimal && !near_optimal {
        return Err(LyapunovError::NotOptimal(sol.status));
    }
    let dim = tess.dim;
    let lay = &prog.layout;
    let gradients: Vec<Vec<f64>> = (0..tess.cells.len())
        .map(|k| sol.z[lay.g[k]..lay.g[k] + dim].to_vec())
        .collect();
    let offsets: Vec<f64> = (0..tess.cells.len()).map(|k| sol.z[lay.b[k]]).collect();
    // continuity invariant across every shared vertex
    let tau = TAU_CONT_REL * (1.0 + math::abs(prog.alpha));
    let stars = tess.vertex_stars();
    for (vid, star) in stars.iter().enumerate() {
        let v = &tess.vertices[vid];
        for w in star.windows(2) {
            let a = math::dot(&gradients[w[0]], v) + offsets[w[0]];
            let b = math::dot(&gradients[w[1]], v) + offsets[w[1]];
            if math::abs(a - b) > tau {
                return Err(LyapunovError::ContinuityViolated {
                    vertex: vid,
                    gap: math::abs(a - b),
                });
            }
        }
    }
    let eta = gradients.iter().map(|g| math::norm(g)).fold(0.0f64, f64::max);
    // the certificate compares Σ s against −ε times the number of
    // (cell, vertex) pairs: optimality forces every slack to its bound
    let n_slacks: usize = lay.s.iter().map(Vec::len).sum();
    let target = -prog.epsilon * n_slacks as f64;
    let mut slack_sum = 0.0;
    let mut worst = f64::NEG_INFINITY;
    for k in 0..tess.cells.len() {
        for &idx in &lay.s[k] {
            slack_sum += sol.z[idx];
            worst = worst.max(sol.z[idx]);
        }
    }
    let tau_cert = TAU_CERT_REL * prog.epsilon * n_slacks as f64;
    let certified = slack_sum <= target + tau_cert;
    if sol.status != SolverStatus::Optimal {
        // certification demands a fully converged solve; a near-optimal one
        // can only establish NotCertified, and only when the gap to the
        // target dwarfs the remaining solver error
        let margin = tau_cert + NEAR_OPT_MARGIN * (1.0 + math::abs(target));
        if certified || slack_sum - target <= margin {
            return Err(LyapunovError::NotOptimal(sol.status));
        }
    }
    let lyap = PwaLyapunov {
        tess: tess.clone(),
        gradients,
        offsets,
        alpha: prog.alpha,
        eta,
        certified,
        epsilon: prog.epsilon,
    };
    let cert = Certificate {
        status: if certified { CertStatus::Certified } else { CertStatus::NotCertified },
        optimal_slack_sum: slack_sum,
        target,
        worst_vertex_slack: worst,
        mode: prog.mode,
        assumptions,
    };
    Ok((lyap, cert))
}

impl PwaLyapunov {
    /// Value of cell k's affine piece at x (without membership checks).
    pub fn cell_value(&self, k: usize, x: &[f64]) -> f64 {
        math::dot(&self.gradients[k], x) + self.offsets[k]
    }

    /// Minimum value over the prior's boundary vertices, or `None` without a
    /// hole.
    fn hole_boundary_min(&self) -> Option<f64> {
        let stars = self.tess.vertex_stars();
        let mut best: Option<f64> = None;
        for (vid, class) in self.tess.classes.iter().enumerate() {
            if *class != VertexClass::HoleBoundary {
                continue;
            }
            if let Some(&k) = stars[vid].first() {
                let v = self.cell_value(k, &self.tess.vertices[vid]);
                best = Some(best.map_or(v, |b: f64| b.min(v)));
            }
        }
        best
    }
}

/// Value of the extended function at any point: affine inside the region,
/// level + slope·distance outside; on the (unmodelled) hole interior the
/// minimum boundary value is used.
pub fn evaluate(lyap: &PwaLyapunov, x: &[f64]) -> f64 {
    match lyap.tess.locate(x) {
        Ok(ids) => lyap.cell_value(ids[0], x),
        Err(_) => {
            let tau = lyap.tess.tau_geo();
            if lyap.tess.region.contains(x, tau) {
                // inside the carved-out prior
                lyap.hole_boundary_min().unwrap_or(lyap.alpha)
            } else {
                lyap.alpha + lyap.eta * lyap.tess.region.distance(x)
            }
        }
    }
}

/// Generators of the Clarke gradient at `x`: the gradients of every cell
/// containing x, plus the scaled outward generators on the region boundary.
pub fn clarke_gradient(lyap: &PwaLyapunov, x: &[f64]) -> Vec<Vec<f64>> {
    let Ok(ids) = lyap.tess.locate(x) else {
        return Vec::new();
    };
    let mut gens: Vec<Vec<f64>> = ids.iter().map(|&k| lyap.gradients[k].clone()).collect();
    let tau = lyap.tess.tau_geo();
    if lyap.tess.region.on_boundary(x, tau) {
        for &k in &ids {
            let g = &lyap.gradients[k];
            let n = math::norm(g);
            if n > 0.0 {
                gens.push(g.iter().map(|v| lyap.eta * v / n).collect());
            }
        }
    }
    gens
}

/// Clips a convex polygon (CCW) against the halfplane normal·x ≤ offset.
fn clip_polygon(poly: &[Vec<f64>], normal: &[f64], offset: f64) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    let n = poly.len();
    for i in 0..n {
        let a = &poly[i];
        let b = &poly[(i + 1) % n];
        let da = math::dot(normal, a) - offset;
        let db = math::dot(normal, b) - offset;
        if da <= 0.0 {
            out.push(a.clone());
        }
        if (da < 0.0 && db > 0.0) || (da > 0.0 && db < 0.0) {
            let t = da / (da - db);
            out.push(
                a.iter()
                    .zip(b)
                    .map(|(&av, &bv)| av + t * (bv - av))
                    .collect(),
            );
        }
    }
    out
}

/// Largest admissible sublevel set strictly inside the region: the level is
/// the boundary-vertex minimum of L minus a small clearance.
pub fn extract_roa(lyap: &PwaLyapunov) -> Result<RoaEstimate, LyapunovError> {
    let stars = lyap.tess.vertex_stars();
    let mut boundary_min = f64::INFINITY;
    for (vid, class) in lyap.tess.classes.iter().enumerate() {
        if *class != VertexClass::RegionBoundary {
            continue;
        }
        if let Some(&k) = stars[vid].first() {
            boundary_min = boundary_min.min(lyap.cell_value(k, &lyap.tess.vertices[vid]));
        }
    }
    if !boundary_min.is_finite() {
        return Err(LyapunovError::EmptyRoa);
    }
    let level = boundary_min - DELTA_LEVEL_REL * (1.0 + math::abs(boundary_min));
    if let Some(hole_min) = lyap.hole_boundary_min() {
        if level <= hole_min {
            return Err(LyapunovError::EmptyRoa);
        }
    }
    let mut pieces = Vec::new();
    for cell in &lyap.tess.cells {
        let poly: Vec<Vec<f64>> = cell
            .vertex_ids
            .iter()
            .map(|&vid| lyap.tess.vertices[vid].clone())
            .collect();
        let clipped = if lyap.tess.dim == 2 {
            // cells come in either orientation; normalize to CCW for clipping
            let area = (poly[1][0] - poly[0][0]) * (poly[2][1] - poly[0][1])
                - (poly[1][1] - poly[0][1]) * (poly[2][0] - poly[0][0]);
            let ccw: Vec<Vec<f64>> = if area >= 0.0 {
                poly
            } else {
                poly.into_iter().rev().collect()
            };
            clip_polygon(&ccw, &lyap.gradients[cell.id], level - lyap.offsets[cell.id])
        } else {
            // 1-D: clip the interval directly
            let g = lyap.gradients[cell.id][0];
            let b = lyap.offsets[cell.id];
            let (mut lo, mut hi) = (poly[0][0].min(poly[1][0]), poly[0][0].max(poly[1][0]));
            if g > 0.0 {
                hi = hi.min((level - b) / g);
            } else if g < 0.0 {
                lo = lo.max((level - b) / g);
            } else if b > level {
                hi = lo - 1.0; // empty
            }
            if lo <= hi {
                alloc::vec![alloc::vec![lo], alloc::vec![hi]]
            } else {
                Vec::new()
            }
        };
        if clipped.len() > lyap.tess.dim {
            pieces.push((cell.id, clipped));
        }
    }
    Ok(RoaEstimate { level, pieces })
}

/// Membership in the certified region of attraction: the prior plus the
/// clipped sublevel set.
pub fn roa_contains(lyap: &PwaLyapunov, roa: &RoaEstimate, x: &[f64]) -> bool {
    let tau = lyap.tess.tau_geo();
    if let Some(hole) = &lyap.tess.hole {
        if hole.contains(x, tau) {
            return true;
        }
    }
    match lyap.tess.locate(x) {
        Ok(ids) => ids.iter().any(|&k| lyap.cell_value(k, x) <= roa.level),
        Err(_) => false,
    }
}

/// Where tessellation seed points come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeedSource {
    /// i.i.d. uniform points in the region.
    Uniform,
    /// The dataset's sample positions (every seed is trivially covered).
    Dataset,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LearnConfig {
    pub program: ProgramConfig,
    pub n_seeds: usize,
    pub rng_seed: u64,
    pub seed_source: SeedSource,
    pub refinement_budget: usize,
    pub solver: SolverSettings,
}

impl Default for LearnConfig {
    fn default() -> Self {
        LearnConfig {
            program: ProgramConfig::default(),
            n_seeds: 24,
            rng_seed: 1,
            seed_source: SeedSource::Dataset,
            refinement_budget: 5,
            solver: SolverSettings::default(),
        }
    }
}

/// Tessellation seed points for a region, per the configured seed source.
pub fn make_seeds(region: &Polytope, ds: &Dataset, cfg: &LearnConfig) -> Vec<Vec<f64>> {
    match cfg.seed_source {
        SeedSource::Dataset => {
            let tau = 1e-9 * region.diameter().max(1.0);
            // skip zero-radius samples: as vertices they could never pass
            // the strict covering test at their own position
            let mut seeds: Vec<Vec<f64>> = (0..ds.len())
                .filter(|&i| ds.effective_radius(i) > 0.0)
                .map(|i| ds.samples[i].x.clone())
                .filter(|x| region.contains(x, tau))
                .collect();
            if cfg.n_seeds > 0 {
                seeds.truncate(cfg.n_seeds);
            }
            seeds
        }
        SeedSource::Uniform => {
            let mut rng = Rng::new(cfg.rng_seed);
            let vs = region.vertices.as_ref().expect("region needs vertices");
            let dim = region.dim();
            let lo: Vec<f64> = (0..dim)
                .map(|d| vs.iter().map(|v| v[d]).fold(f64::INFINITY, f64::min))
                .collect();
            let hi: Vec<f64> = (0..dim)
                .map(|d| vs.iter().map(|v| v[d]).fold(f64::NEG_INFINITY, f64::max))
                .collect();
            let mut seeds = Vec::with_capacity(cfg.n_seeds);
            let mut guard = 0;
            while seeds.len() < cfg.n_seeds && guard < cfg.n_seeds * 1000 {
                guard += 1;
                let p: Vec<f64> =
                    (0..dim).map(|d| rng.uniform_in(lo[d], hi[d])).collect();
                if region.contains(&p, 0.0) {
                    seeds.push(p);
                }
            }
            seeds
        }
    }
}

/// Tessellate-check-refine loop: refines every cell incident to an uncovered
/// vertex until the covering test passes or the budget is exhausted, then
/// solves the learning program once.
pub fn algorithm1_learn(
    region: &Polytope,
    prior: Option<&Polytope>,
    ds: &Dataset,
    cfg: &LearnConfig,
) -> Result<(PwaLyapunov, Certificate), LyapunovError> {
    let tess = prepare_tessellation(region, prior, ds, cfg)?;
    learn_on(&tess, ds, cfg)
}

/// Seeds, triangulates, and refines a region until the dataset covers every
/// vertex (or the refinement budget runs out).
pub fn prepare_tessellation(
    region: &Polytope,
    prior: Option<&Polytope>,
    ds: &Dataset,
    cfg: &LearnConfig,
) -> Result<Tessellation, LyapunovError> {
    let seeds = make_seeds(region, ds, cfg);
    let mut tess =
        crate::geometry::delaunay_tessellate(region, prior, &seeds, cfg.rng_seed)?;
    let mut round = 0;
    let tess = loop {
        match covering_check(ds, &tess) {
            Covering::Pass => break tess,
            Covering::Fail { uncovered } => {
                if round >= cfg.refinement_budget {
                    return Err(LyapunovError::CoveringFailed { uncovered });
                }
                round += 1;
                let stars = tess.vertex_stars();
                let mut cells: Vec<usize> = uncovered
                    .iter()
                    .flat_map(|&vid| stars[vid].iter().copied())
                    .collect();
                cells.sort_unstable();
                cells.dedup();
                // refining never renumbers existing cells, so ids stay valid
                for k in cells {
                    tess = tess.refine_cell(k)?;
                }
            }
        }
    };
    Ok(tess)
}

fn learn_on(
    tess: &Tessellation,
    ds: &Dataset,
    cfg: &LearnConfig,
) -> Result<(PwaLyapunov, Certificate), LyapunovError> {
    let rel = relevance_sets(ds, tess);
    let prog = assemble(tess, ds, &rel, &cfg.program)?;
    let sol = solve(&prog, &cfg.solver);
    let mut assumptions = default_assumptions(ds, &cfg.program);
    assumptions.rng_seed = cfg.rng_seed;
    assumptions.n_seeds = cfg.n_seeds;
    extract(&prog, &sol, tess, assumptions)
}

/// Grows the certified region through a nested region sequence, pinning each
/// stage's values on the previous boundary so the stitched function stays
/// continuous. Stage i uses level (i+1)·α so pinned values stay below the
/// stage's level margin.
pub fn algorithm2_sequential(
    regions: &[Polytope],
    prior: &Polytope,
    ds: &Dataset,
    cfg: &LearnConfig,
) -> Result<(PwaLyapunov, Certificate), LyapunovError> {
    let (lyap, cert, _) = algorithm2_sequential_stages(regions, prior, ds, cfg)?;
    Ok((lyap, cert))
}

/// Like [`algorithm2_sequential`] but also returns each stage's own function
/// and certificate before stitching.
#[allow(clippy::type_complexity)]
pub fn algorithm2_sequential_stages(
    regions: &[Polytope],
    prior: &Polytope,
    ds: &Dataset,
    cfg: &LearnConfig,
) -> Result<(PwaLyapunov, Certificate, Vec<(PwaLyapunov, Certificate)>), LyapunovError> {
    assert!(!regions.is_empty());
    let mut stages = Vec::with_capacity(regions.len());
    let base_alpha = cfg.program.alpha;
    let mut prev: Option<PwaLyapunov> = None;
    let mut last_cert: Option<Certificate> = None;
    for (i, region) in regions.iter().enumerate() {
        let hole: &Polytope = if i == 0 { prior } else { &regions[i - 1] };
        let mut stage_cfg = cfg.clone();
        stage_cfg.program.alpha = base_alpha * (i + 1) as f64;
        stage_cfg.program.pinned_boundary.clear();

        let seeds = make_seeds(region, ds, &stage_cfg);
        let mut tess = crate::geometry::delaunay_tessellate(
            region,
            Some(hole),
            &seeds,
            stage_cfg.rng_seed,
        )?;
        let mut round = 0;
        loop {
            match covering_check(ds, &tess) {
                Covering::Pass => break,
                Covering::Fail { uncovered } => {
                    if round >= stage_cfg.refinement_budget {
                        return Err(LyapunovError::StageFailed(i));
                    }
                    round += 1;
                    let stars = tess.vertex_stars();
                    let mut cells: Vec<usize> = uncovered
                        .iter()
                        .flat_map(|&vid| stars[vid].iter().copied())
                        .collect();
                    cells.sort_unstable();
                    cells.dedup();
                    for k in cells {
                        tess = tess.refine_cell(k)?;
                    }
                }
            }
        }
        // pin previous values on the hole boundary
        if let Some(prev_l) = &prev {
            for (vid, class) in tess.classes.iter().enumerate() {
                if *class == VertexClass::HoleBoundary {
                    let value = evaluate(prev_l, &tess.vertices[vid]);
                    stage_cfg.program.pinned_boundary.push((vid, value));
                }
            }
        }
        let (lyap, cert) = match learn_on(&tess, ds, &stage_cfg) {
            Ok(ok) => ok,
            Err(LyapunovError::CoveringFailed { .. }) => {
                return Err(LyapunovError::StageFailed(i))
            }
            Err(e) => return Err(e),
        };
        if cert.status != CertStatus::Certified {
            return Err(LyapunovError::StageFailed(i));
        }
        stages.push((lyap.clone(), cert.clone()));
        prev = Some(match prev {
            None => lyap,
            Some(acc) => merge_stages(acc, lyap, regions.last().unwrap(), prior),
        });
        last_cert = Some(cert);
    }
    let lyap = prev.unwrap();
    Ok((lyap, last_cert.unwrap(), stages))
}

/// Concatenates two stage functions into one PWA function whose region is the
/// outermost region and whose hole is the original prior.
fn merge_stages(
    inner: PwaLyapunov,
    outer: PwaLyapunov,
    final_region: &Polytope,
    prior: &Polytope,
) -> PwaLyapunov {
    let dim = inner.tess.dim;
    let tau = 1e-9 * final_region.diameter().max(1.0);
    let mut vertices = inner.tess.vertices.clone();
    let mut cells: Vec<Vec<usize>> = inner
        .tess
        .cells
        .iter()
        .map(|c| c.vertex_ids.clone())
        .collect();
    let mut gradients = inner.gradients.clone();
    let mut offsets = inner.offsets.clone();
    let mut remap = Vec::with_capacity(outer.tess.vertices.len());
    for v in &outer.tess.vertices {
        let hit = vertices.iter().position(|w| math::dist(v, w) <= tau);
        remap.push(match hit {
            Some(i) => i,
            None => {
                vertices.push(v.clone());
                vertices.len() - 1
            }
        });
    }
    for cell in &outer.tess.cells {
        cells.push(cell.vertex_ids.iter().map(|&vid| remap[vid]).collect());
        gradients.push(outer.gradients[cell.id].clone());
        offsets.push(outer.offsets[cell.id]);
    }
    let tess = Tessellation::from_parts(
        dim,
        vertices,
        cells,
        final_region.clone(),
        Some(prior.clone()),
    );
    let eta = gradients.iter().map(|g| math::norm(g)).fold(0.0f64, f64::max);
    PwaLyapunov {
        tess,
        gradients,
        offsets,
        alpha: outer.alpha,
        eta,
        certified: inner.certified && outer.certified,
        epsilon: outer.epsilon,
    }
}

/// Learns without the boundary level condition and extracts the largest
/// certified sublevel set.
pub fn algorithm3_learn_roa(
    region: &Polytope,
    prior: Option<&Polytope>,
    ds: &Dataset,
    cfg: &LearnConfig,
) -> Result<(PwaLyapunov, RoaEstimate, Certificate), LyapunovError> {
    let mut cfg = cfg.clone();
    cfg.program.mode = BoundaryMode::NoBoundary;
    let (lyap, cert) = algorithm1_learn(region, prior, ds, &cfg)?;
    let roa = extract_roa(&lyap)?;
    Ok((lyap, roa, cert))
}
