//! Assembly of the learning problem into a standard-form conic program
//!
//! ```text
//! min cᵀx   s.t.  A x + s = b,   s ∈ K = Zero × NonNeg × SecondOrder…
//! ```
//!
//! Variables per cell k: gradient g_k, offset b_k, per-relevant-sample
//! decompositions g̃_{i,k}, per-vertex slacks s_{j,k} and cone epigraphs
//! t_{i,j,k}. The right-hand side is stored decomposed as
//! b = b0 + α·bα + ε·bε so rescaling (α, ε) never re-assembles the matrix.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, RelevanceSets};
use crate::geometry::{Tessellation, VertexClass};
use crate::math;

#[derive(Debug, Clone, PartialEq)]
pub enum ProgramError {
    /// A cell has no relevant sample; the covering condition is violated.
    EmptyRelevance(usize),
    /// Dataset and tessellation dimensions differ.
    DimensionMismatch { dataset: usize, tessellation: usize },
    /// epsilon must be strictly positive.
    InvalidEpsilon(f64),
}

impl core::fmt::Display for ProgramError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ProgramError::EmptyRelevance(k) => {
                write!(f, "cell {k} has no relevant sample")
            }
            ProgramError::DimensionMismatch { dataset, tessellation } => {
                write!(f, "dataset dim {dataset} != tessellation dim {tessellation}")
            }
            ProgramError::InvalidEpsilon(e) => write!(f, "epsilon must be > 0, got {e}"),
        }
    }
}

impl core::error::Error for ProgramError {}

/// Whether the level condition on the region boundary is enforced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryMode {
    WithBoundary,
    NoBoundary,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProgramConfig {
    pub epsilon: f64,
    pub alpha: f64,
    pub mode: BoundaryMode,
    pub noise_eta: f64,
    /// Extra level equalities g_kᵀv + b_k = value on given vertex ids
    /// (used to glue sequential stages together).
    pub pinned_boundary: Vec<(usize, f64)>,
}

impl Default for ProgramConfig {
    fn default() -> Self {
        ProgramConfig {
            epsilon: 1e-3,
            alpha: 1.0,
            mode: BoundaryMode::WithBoundary,
            noise_eta: 0.0,
            pinned_boundary: Vec::new(),
        }
    }
}

/// Cone block in the product cone K.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Cone {
    Zero(usize),
    NonNeg(usize),
    SecondOrder(usize),
}

impl Cone {
    pub fn size(&self) -> usize {
        match *self {
            Cone::Zero(m) | Cone::NonNeg(m) | Cone::SecondOrder(m) => m,
        }
    }
}

/// Index maps from structured variables into the flat vector x.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VariableLayout {
    pub dim: usize,
    /// Offset of g_k (dim consecutive entries) per cell.
    pub g: Vec<usize>,
    /// Index of b_k per cell.
    pub b: Vec<usize>,
    /// g̃ offsets: gt[k][p] is the offset of g̃ for the p-th relevant sample
    /// of cell k (dim consecutive entries).
    pub gt: Vec<Vec<usize>>,
    /// s[k][j] for local vertex j of cell k.
    pub s: Vec<Vec<usize>>,
    /// t[k][p][j] for relevant sample position p, local vertex j.
    pub t: Vec<Vec<Vec<usize>>>,
    pub total: usize,
}

impl VariableLayout {
    fn build(dim: usize, tess: &Tessellation, rel: &RelevanceSets) -> Self {
        let mut next = 0usize;
        let nc = tess.cells.len();
        let mut g = Vec::with_capacity(nc);
        let mut b = Vec::with_capacity(nc);
        let mut gt = Vec::with_capacity(nc);
        let mut s = Vec::with_capacity(nc);
        let mut t = Vec::with_capacity(nc);
        for k in 0..nc {
            g.push(next);
            next += dim;
            b.push(next);
            next += 1;
            let mut cell_gt = Vec::new();
            for _ in &rel.per_cell[k] {
                cell_gt.push(next);
                next += dim;
            }
            gt.push(cell_gt);
            let nverts = tess.cells[k].vertex_ids.len();
            let mut cell_s = Vec::with_capacity(nverts);
            for _ in 0..nverts {
                cell_s.push(next);
                next += 1;
            }
            s.push(cell_s);
            let mut cell_t = Vec::new();
            for _ in &rel.per_cell[k] {
                let mut per_vertex = Vec::with_capacity(nverts);
                for _ in 0..nverts {
                    per_vertex.push(next);
                    next += 1;
                }
                cell_t.push(per_vertex);
            }
            t.push(cell_t);
        }
        VariableLayout { dim, g, b, gt, s, t, total: next }
    }
}

/// Standard-form conic program together with its structured metadata.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConicProgram {
    pub c: Vec<f64>,
    /// Sparse A in (row, col, value) triplets, row-major order.
    pub a_triplets: Vec<(usize, usize, f64)>,
    pub b0: Vec<f64>,
    pub b_alpha: Vec<f64>,
    pub b_eps: Vec<f64>,
    pub cones: Vec<Cone>,
    pub layout: VariableLayout,
    pub alpha: f64,
    pub epsilon: f64,
    pub mode: BoundaryMode,
    pub noise_eta: f64,
}

impl ConicProgram {
    /// Wraps raw standard-form data (e.g. read back from a problem file) so
    /// it can be fed to the solver. The layout is empty: piece extraction is
    /// not possible on such a program, only solving.
    pub fn from_raw(
        c: Vec<f64>,
        a_triplets: Vec<(usize, usize, f64)>,
        b: Vec<f64>,
        cones: Vec<Cone>,
    ) -> Self {
        let n = b.len();
        ConicProgram {
            c,
            a_triplets,
            b0: b,
            b_alpha: alloc::vec![0.0; n],
            b_eps: alloc::vec![0.0; n],
            cones,
            layout: VariableLayout {
                dim: 0,
                g: Vec::new(),
                b: Vec::new(),
                gt: Vec::new(),
                s: Vec::new(),
                t: Vec::new(),
                total: 0,
            },
            alpha: 0.0,
            epsilon: 0.0,
            mode: BoundaryMode::NoBoundary,
            noise_eta: 0.0,
        }
    }

    pub fn nrows(&self) -> usize {
        self.cones.iter().map(Cone::size).sum()
    }

    pub fn nvars(&self) -> usize {
        self.c.len()
    }

    /// Materialized right-hand side b = b0 + α·bα + ε·bε.
    pub fn rhs(&self) -> Vec<f64> {
        self.b0
            .iter()
            .zip(&self.b_alpha)
            .zip(&self.b_eps)
            .map(|((&b0, &ba), &be)| b0 + self.alpha * ba + self.epsilon * be)
            .collect()
    }

    /// Appends one extra equality row Σ coeffs·x = rhs as its own Zero block.
    pub fn add_zero_row(&mut self, coeffs: &[(usize, f64)], rhs: f64) {
        let row = self.nrows();
        for &(col, v) in coeffs {
            self.a_triplets.push((row, col, v));
        }
        self.b0.push(rhs);
        self.b_alpha.push(0.0);
        self.b_eps.push(0.0);
        self.cones.push(Cone::Zero(1));
    }

    /// Appends one extra inequality row Σ coeffs·x ≤ rhs as a NonNeg block.
    pub fn add_nonneg_row(&mut self, coeffs: &[(usize, f64)], rhs: f64) {
        let row = self.nrows();
        for &(col, v) in coeffs {
            self.a_triplets.push((row, col, v));
        }
        self.b0.push(rhs);
        self.b_alpha.push(0.0);
        self.b_eps.push(0.0);
        self.cones.push(Cone::NonNeg(1));
    }
}

/// Returns the program with (α, ε) ↦ (λα, λε); the feasible set is the image
/// of the original under (g, b, g̃, t, s) ↦ λ·(g, b, g̃, t, s).
pub fn scale_invariance_transform(prog: &ConicProgram, lambda: f64) -> ConicProgram {
    let mut out = prog.clone();
    out.alpha *= lambda;
    out.epsilon *= lambda;
    out
}

/// Cone-scaling factor applied to the g̃ sub-vector of one robustness cone.
fn soc_scale(m: f64, dist: f64, eta: f64) -> f64 {
    if eta > 0.0 {
        m * (dist + eta) + eta
    } else {
        m * dist
    }
}

/// Assembles the learning program for a tessellation, dataset and relevance
/// structure.
pub fn assemble(
    tess: &Tessellation,
    ds: &Dataset,
    rel: &RelevanceSets,
    cfg: &ProgramConfig,
) -> Result<ConicProgram, ProgramError> {
    if !(cfg.epsilon > 0.0) {
        return Err(ProgramError::InvalidEpsilon(cfg.epsilon));
    }
    let dim = tess.dim;
    if ds.dim() != dim {
        return Err(ProgramError::DimensionMismatch { dataset: ds.dim(), tessellation: dim });
    }
    for (k, set) in rel.per_cell.iter().enumerate() {
        if set.is_empty() {
            return Err(ProgramError::EmptyRelevance(k));
        }
    }
    let layout = VariableLayout::build(dim, tess, rel);

    let mut a: Vec<(usize, usize, f64)> = Vec::new();
    let mut b0: Vec<f64> = Vec::new();
    let mut ba: Vec<f64> = Vec::new();
    let mut be: Vec<f64> = Vec::new();
    let mut row = 0usize;
    let push_rhs = |b0v: f64, bav: f64, bev: f64, b0: &mut Vec<f64>, ba: &mut Vec<f64>, be: &mut Vec<f64>| {
        b0.push(b0v);
        ba.push(bav);
        be.push(bev);
    };

    // ---- Zero block ----
    // continuity: for each shared vertex, star of equalities around the
    // lowest incident cell id: (g_k0 − g_ℓ)ᵀv + b_k0 − b_ℓ = 0
    let stars = tess.vertex_stars();
    for (vid, star) in stars.iter().enumerate() {
        if star.len() < 2 {
            continue;
        }
        let k0 = star[0];
        let v = &tess.vertices[vid];
        for &l in &star[1..] {
            for d in 0..dim {
                a.push((row, layout.g[k0] + d, v[d]));
                a.push((row, layout.g[l] + d, -v[d]));
            }
            a.push((row, layout.b[k0], 1.0));
            a.push((row, layout.b[l], -1.0));
            push_rhs(0.0, 0.0, 0.0, &mut b0, &mut ba, &mut be);
            row += 1;
        }
    }
    // boundary level rows: g_kᵀv + b_k = α for vertices on the region
    // boundary (omitted entirely in NoBoundary mode)
    if cfg.mode == BoundaryMode::WithBoundary {
        for (k, cell) in tess.cells.iter().enumerate() {
            for &vid in &cell.vertex_ids {
                if tess.classes[vid] != VertexClass::RegionBoundary {
                    continue;
                }
                let v = &tess.vertices[vid];
                for d in 0..dim {
                    a.push((row, layout.g[k] + d, v[d]));
                }
                a.push((row, layout.b[k], 1.0));
                push_rhs(0.0, 1.0, 0.0, &mut b0, &mut ba, &mut be);
                row += 1;
            }
        }
    }
    // pinned values: g_kᵀv + b_k = value, emitted once per pinned vertex on
    // its lowest incident cell (continuity propagates to the rest)
    for &(vid, value) in &cfg.pinned_boundary {
        let Some(&k) = stars[vid].first() else { continue };
        let v = &tess.vertices[vid];
        for d in 0..dim {
            a.push((row, layout.g[k] + d, v[d]));
        }
        a.push((row, layout.b[k], 1.0));
        push_rhs(value, 0.0, 0.0, &mut b0, &mut ba, &mut be);
        row += 1;
    }
    // gradient decomposition: Σ_p g̃_{p,k} − g_k = 0 per dimension
    for k in 0..tess.cells.len() {
        for d in 0..dim {
            for p in 0..rel.per_cell[k].len() {
                a.push((row, layout.gt[k][p] + d, 1.0));
            }
            a.push((row, layout.g[k] + d, -1.0));
            push_rhs(0.0, 0.0, 0.0, &mut b0, &mut ba, &mut be);
            row += 1;
        }
    }
    let zero_rows = row;

    // ---- NonNeg block ----
    // slack bounds: −s_{j,k} ≤ ε
    for k in 0..tess.cells.len() {
        for j in 0..tess.cells[k].vertex_ids.len() {
            a.push((row, layout.s[k][j], -1.0));
            push_rhs(0.0, 0.0, 1.0, &mut b0, &mut ba, &mut be);
            row += 1;
        }
    }
    // interior level rows: g_kᵀv + b_k ≤ α − ε for vertices off the region
    // boundary
    for (k, cell) in tess.cells.iter().enumerate() {
        for &vid in &cell.vertex_ids {
            if tess.classes[vid] == VertexClass::RegionBoundary {
                continue;
            }
            let v = &tess.vertices[vid];
            for d in 0..dim {
                a.push((row, layout.g[k] + d, v[d]));
            }
            a.push((row, layout.b[k], 1.0));
            push_rhs(0.0, 1.0, -1.0, &mut b0, &mut ba, &mut be);
            row += 1;
        }
    }
    // robust decrease: Σ_p (g̃ᵀf_p + t_{p,j,k}) − s_{j,k} ≤ 0
    for (k, cell) in tess.cells.iter().enumerate() {
        for j in 0..cell.vertex_ids.len() {
            for (p, &i) in rel.per_cell[k].iter().enumerate() {
                for d in 0..dim {
                    a.push((row, layout.gt[k][p] + d, ds.samples[i].f[d]));
                }
                a.push((row, layout.t[k][p][j], 1.0));
            }
            a.push((row, layout.s[k][j], -1.0));
            push_rhs(0.0, 0.0, 0.0, &mut b0, &mut ba, &mut be);
            row += 1;
        }
    }
    let nonneg_rows = row - zero_rows;

    // ---- SecondOrder blocks ----
    // ‖scale · g̃_{p,k}‖ ≤ t_{p,j,k} as a plain Lorentz cone of size dim+1;
    // with b = 0 the slack is s = −Ax, so coefficients enter negated.
    let mut cones: Vec<Cone> = Vec::new();
    if zero_rows > 0 {
        cones.push(Cone::Zero(zero_rows));
    }
    if nonneg_rows > 0 {
        cones.push(Cone::NonNeg(nonneg_rows));
    }
    for (k, cell) in tess.cells.iter().enumerate() {
        for j in 0..cell.vertex_ids.len() {
            let v = &tess.vertices[cell.vertex_ids[j]];
            for (p, &i) in rel.per_cell[k].iter().enumerate() {
                let dist = math::dist(v, &ds.samples[i].x);
                let scale = soc_scale(ds.m, dist, cfg.noise_eta);
                a.push((row, layout.t[k][p][j], -1.0));
                push_rhs(0.0, 0.0, 0.0, &mut b0, &mut ba, &mut be);
                row += 1;
                for d in 0..dim {
                    if scale != 0.0 {
                        a.push((row, layout.gt[k][p] + d, -scale));
                    }
                    push_rhs(0.0, 0.0, 0.0, &mut b0, &mut ba, &mut be);
                    row += 1;
                }
                cones.push(Cone::SecondOrder(dim + 1));
            }
        }
    }

    // objective: Σ_{k,j} s_{j,k}
    let mut c = alloc::vec![0.0; layout.total];
    for k in 0..tess.cells.len() {
        for &idx in &layout.s[k] {
            c[idx] = 1.0;
        }
    }

    Ok(ConicProgram {
        c,
        a_triplets: a,
        b0,
        b_alpha: ba,
        b_eps: be,
        cones,
        layout,
        alpha: cfg.alpha,
        epsilon: cfg.epsilon,
        mode: cfg.mode,
        noise_eta: cfg.noise_eta,
    })
}

/// Worst violations of the structured constraints at a point, computed
/// directly from the tessellation/dataset definitions (never from A).
#[derive(Debug, Clone, Default)]
pub struct ConstraintReport {
    pub continuity: f64,
    pub boundary_level: f64,
    pub interior_level: f64,
    pub slack_bound: f64,
    pub decomposition: f64,
    /// max over (k, j) of Σ_i (g̃ᵀf_i + ‖g̃‖·scale(v, x_i)) − s_{j,k}
    pub robust_decrease: f64,
    pub pinned: f64,
}

impl ConstraintReport {
    pub fn max_violation(&self) -> f64 {
        [
            self.continuity,
            self.boundary_level,
            self.interior_level,
            self.slack_bound,
            self.decomposition,
            self.robust_decrease,
            self.pinned,
        ]
        .into_iter()
        .fold(0.0f64, f64::max)
    }
}

/// Independent evaluator of the structured constraints at a candidate point.
pub fn evaluate_constraints(
    tess: &Tessellation,
    ds: &Dataset,
    rel: &RelevanceSets,
    cfg: &ProgramConfig,
    layout: &VariableLayout,
    x: &[f64],
) -> ConstraintReport {
    let dim = tess.dim;
    let mut rep = ConstraintReport::default();
    let level = |k: usize, v: &[f64]| -> f64 {
        let g = &x[layout.g[k]..layout.g[k] + dim];
        math::dot(g, v) + x[layout.b[k]]
    };
    // continuity across every shared vertex and every incident cell pair
    let mut by_vertex: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (k, cell) in tess.cells.iter().enumerate() {
        for &vid in &cell.vertex_ids {
            by_vertex.entry(vid).or_default().push(k);
        }
    }
    for (&vid, cells) in &by_vertex {
        let v = &tess.vertices[vid];
        for a in 0..cells.len() {
            for b in (a + 1)..cells.len() {
                let diff = math::abs(level(cells[a], v) - level(cells[b], v));
                rep.continuity = rep.continuity.max(diff);
            }
        }
    }
    for (k, cell) in tess.cells.iter().enumerate() {
        // level conditions
        for &vid in &cell.vertex_ids {
            let v = &tess.vertices[vid];
            let lv = level(k, v);
            if tess.classes[vid] == VertexClass::RegionBoundary {
                if cfg.mode == BoundaryMode::WithBoundary {
                    rep.boundary_level = rep.boundary_level.max(math::abs(lv - cfg.alpha));
                }
            } else {
                rep.interior_level = rep.interior_level.max(lv - (cfg.alpha - cfg.epsilon));
            }
        }
        // decomposition Σ g̃ = g
        let g = &x[layout.g[k]..layout.g[k] + dim];
        let mut sum = alloc::vec![0.0; dim];
        for p in 0..rel.per_cell[k].len() {
            let gt = &x[layout.gt[k][p]..layout.gt[k][p] + dim];
            math::axpy(&mut sum, 1.0, gt);
        }
        rep.decomposition = rep.decomposition.max(math::inf_norm(&math::sub(&sum, g)));
        // slack bounds and robust decrease evaluated with true norms
        for (j, &vid) in cell.vertex_ids.iter().enumerate() {
            let s = x[layout.s[k][j]];
            rep.slack_bound = rep.slack_bound.max(-cfg.epsilon - s);
            let v = &tess.vertices[vid];
            let mut lhs = 0.0;
            for (p, &i) in rel.per_cell[k].iter().enumerate() {
                let gt = &x[layout.gt[k][p]..layout.gt[k][p] + dim];
                let scale =
                    soc_scale(ds.m, math::dist(v, &ds.samples[i].x), cfg.noise_eta);
                lhs += math::dot(gt, &ds.samples[i].f) + math::norm(gt) * scale;
            }
            rep.robust_decrease = rep.robust_decrease.max(lhs - s);
        }
    }
    for &(vid, value) in &cfg.pinned_boundary {
        if let Some(cells) = by_vertex.get(&vid) {
            for &k in cells {
                let diff = math::abs(level(k, &tess.vertices[vid]) - value);
                rep.pinned = rep.pinned.max(diff);
            }
        }
    }
    rep
}
