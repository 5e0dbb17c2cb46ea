//! First-order operator-splitting solver for conic programs
//!
//! ```text
//! min cᵀx   s.t.  A x + s = b,   s ∈ K
//! ```
//!
//! with K a product of Zero, NonNeg and SecondOrder (Lorentz) cones. Each
//! iteration solves one quasi-definite linear system (factorized once, via
//! sparse LDLᵀ) and projects onto K, with over-relaxation and optional Ruiz
//! equilibration.

pub mod sparse;

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::math;
use crate::program::{Cone, ConicProgram};
use sparse::{Csc, PermutedLdl};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scaling {
    None,
    RuizEquilibration,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolverSettings {
    pub max_iters: usize,
    pub eps_primal: f64,
    pub eps_dual: f64,
    pub eps_gap: f64,
    pub over_relaxation: f64,
    pub scaling: Scaling,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            max_iters: 200_000,
            eps_primal: 1e-8,
            eps_dual: 1e-8,
            eps_gap: 1e-8,
            over_relaxation: 1.6,
            scaling: Scaling::RuizEquilibration,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverStatus {
    Optimal,
    MaxIters,
    InfeasibleCertificate,
    UnboundedCertificate,
    NumericalBreakdown,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Residuals {
    pub primal: f64,
    pub dual: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Solution {
    pub z: Vec<f64>,
    pub y: Vec<f64>,
    pub s: Vec<f64>,
    pub status: SolverStatus,
    pub residuals: Residuals,
    pub iterations: usize,
    pub objective: f64,
    /// Wall-clock seconds, filled by callers that can measure time; excluded
    /// from serialization so artifacts stay byte-reproducible.
    #[serde(skip)]
    pub solve_time: Option<f64>,
}

/// Euclidean projection of one cone block.
pub fn project_cone(v: &mut [f64], cone: Cone) {
    match cone {
        Cone::Zero(_) => v.iter_mut().for_each(|x| *x = 0.0),
        Cone::NonNeg(_) => v.iter_mut().for_each(|x| *x = x.max(0.0)),
        Cone::SecondOrder(_) => {
            let t = v[0];
            let nu = math::norm(&v[1..]);
            if nu <= t {
                // inside: unchanged
            } else if nu <= -t {
                v.iter_mut().for_each(|x| *x = 0.0);
            } else {
                let a = (t + nu) / 2.0;
                v[0] = a;
                let scale = a / nu;
                v[1..].iter_mut().for_each(|x| *x *= scale);
            }
        }
    }
}

/// Projects a stacked slack vector onto the product cone in place.
pub fn project_product(v: &mut [f64], cones: &[Cone]) {
    let mut at = 0;
    for &cone in cones {
        let m = cone.size();
        project_cone(&mut v[at..at + m], cone);
        at += m;
    }
}

struct Workspace {
    a: Csc,           // scaled A
    b: Vec<f64>,      // scaled b
    c: Vec<f64>,      // scaled c
    e: Vec<f64>,      // row scaling: Â = diag(e) A diag(d)
    d: Vec<f64>,      // column scaling
    rho: Vec<f64>,    // per-row penalty
    sigma: f64,
    kkt: PermutedLdl,
}

const SIGMA: f64 = 1e-6;
const RHO_BASE: f64 = 0.1;
const RHO_ZERO_FACTOR: f64 = 1e3;
const RHO_MIN: f64 = 1e-6;
const RHO_MAX: f64 = 1e6;
const CHECK_EVERY: usize = 25;

fn row_cone_is_zero(cones: &[Cone]) -> Vec<bool> {
    let mut out = Vec::new();
    for &cone in cones {
        let z = matches!(cone, Cone::Zero(_));
        out.extend(core::iter::repeat(z).take(cone.size()));
    }
    out
}

fn ruiz_equilibrate(
    nrows: usize,
    ncols: usize,
    triplets: &mut Vec<(usize, usize, f64)>,
    cones: &[Cone],
) -> (Vec<f64>, Vec<f64>) {
    let mut e = alloc::vec![1.0f64; nrows];
    let mut d = alloc::vec![1.0f64; ncols];
    // block id per row: SecondOrder rows must share one scaling factor
    let mut block_of = alloc::vec![usize::MAX; nrows];
    let mut nblocks = 0usize;
    {
        let mut at = 0;
        for &cone in cones {
            let m = cone.size();
            if matches!(cone, Cone::SecondOrder(_)) {
                for r in at..at + m {
                    block_of[r] = nblocks;
                }
                nblocks += 1;
            }
            at += m;
        }
    }
    for _ in 0..10 {
        let mut rmax = alloc::vec![0.0f64; nrows];
        let mut cmax = alloc::vec![0.0f64; ncols];
        for &(r, c, v) in triplets.iter() {
            let av = math::abs(v);
            rmax[r] = rmax[r].max(av);
            cmax[c] = cmax[c].max(av);
        }
        // uniformize within SOC blocks
        let mut bmax = alloc::vec![0.0f64; nblocks];
        for r in 0..nrows {
            if block_of[r] != usize::MAX {
                bmax[block_of[r]] = bmax[block_of[r]].max(rmax[r]);
            }
        }
        for r in 0..nrows {
            if block_of[r] != usize::MAX {
                rmax[r] = bmax[block_of[r]];
            }
        }
        let de: Vec<f64> = rmax
            .iter()
            .map(|&m| if m > 0.0 { 1.0 / math::sqrt(m) } else { 1.0 })
            .collect();
        let dd: Vec<f64> = cmax
            .iter()
            .map(|&m| if m > 0.0 { 1.0 / math::sqrt(m) } else { 1.0 })
            .collect();
        for (r, c, v) in triplets.iter_mut() {
            *v *= de[*r] * dd[*c];
        }
        for r in 0..nrows {
            e[r] *= de[r];
        }
        for c in 0..ncols {
            d[c] *= dd[c];
        }
    }
    (e, d)
}

fn build_kkt(a: &Csc, sigma: f64, rho: &[f64]) -> Option<PermutedLdl> {
    let n = a.ncols;
    let m = a.nrows;
    let mut entries: Vec<(usize, usize, f64)> = Vec::with_capacity(2 * a.values.len() + n + m);
    for j in 0..n {
        entries.push((j, j, sigma));
    }
    for i in 0..m {
        entries.push((n + i, n + i, -1.0 / rho[i]));
    }
    for c in 0..a.ncols {
        for p in a.colptr[c]..a.colptr[c + 1] {
            let r = a.rowind[p];
            let v = a.values[p];
            entries.push((n + r, c, v));
            entries.push((c, n + r, v));
        }
    }
    PermutedLdl::new(n + m, &entries)
}

/// Solves the conic program with the built-in splitting method.
/// Deterministic for fixed settings and program.
pub fn solve(prog: &ConicProgram, settings: &SolverSettings) -> Solution {
    let n = prog.nvars();
    let m = prog.nrows();
    let b_orig = prog.rhs();
    let c_orig = &prog.c;
    let cones = &prog.cones;

    // scale
    let mut triplets = prog.a_triplets.clone();
    let (e, d) = match settings.scaling {
        Scaling::RuizEquilibration => ruiz_equilibrate(m, n, &mut triplets, cones),
        Scaling::None => (alloc::vec![1.0; m], alloc::vec![1.0; n]),
    };
    let a = Csc::from_triplets(m, n, &triplets);
    let b: Vec<f64> = b_orig.iter().zip(&e).map(|(&bv, &ev)| bv * ev).collect();
    let c: Vec<f64> = c_orig.iter().zip(&d).map(|(&cv, &dv)| cv * dv).collect();
    let a_orig = Csc::from_triplets(m, n, &prog.a_triplets);

    let is_zero_row = row_cone_is_zero(cones);
    let mut rho_scale = 1.0f64;
    let rho_of = |scale: f64, zero: bool| -> f64 {
        let r = RHO_BASE * scale * if zero { RHO_ZERO_FACTOR } else { 1.0 };
        r.clamp(RHO_MIN, RHO_MAX * RHO_ZERO_FACTOR)
    };
    let rho: Vec<f64> =
        is_zero_row.iter().map(|&z| rho_of(rho_scale, z)).collect();
    let Some(kkt) = build_kkt(&a, SIGMA, &rho) else {
        return breakdown(n, m);
    };
    let mut ws = Workspace { a, b, c, e, d, rho, sigma: SIGMA, kkt };

    let alpha = settings.over_relaxation;
    let mut x = alloc::vec![0.0f64; n];
    let mut s = alloc::vec![0.0f64; m]; // cone copy s'
    let mut y = alloc::vec![0.0f64; m]; // internal dual (polar-cone sign)
    let mut rhs = alloc::vec![0.0f64; n + m];
    let mut sol = alloc::vec![0.0f64; n + m];
    let norm_b = 1.0 + math::norm(&b_orig);
    let norm_c = 1.0 + math::norm(c_orig);

    let mut best = Solution {
        z: x.clone(),
        y: alloc::vec![0.0; m],
        s: s.clone(),
        status: SolverStatus::MaxIters,
        residuals: Residuals { primal: f64::INFINITY, dual: f64::INFINITY, gap: f64::INFINITY },
        iterations: 0,
        objective: 0.0,
        solve_time: None,
    };

    let mut iter = 0usize;
    while iter < settings.max_iters {
        iter += 1;
        // KKT solve: [[σI, Aᵀ], [A, −R]] [x̃; ν] = [σx − c; b − s + R y]
        for j in 0..n {
            rhs[j] = ws.sigma * x[j] - ws.c[j];
        }
        for i in 0..m {
            rhs[n + i] = ws.b[i] - s[i] + y[i] / ws.rho[i];
        }
        ws.kkt.solve(&rhs, &mut sol);
        // s_int = s − R(y + ν)
        // x ← α x̃ + (1−α) x; u = α s_int + (1−α) s + R y; s ← Π_K(u);
        // y ← ρ∘(u − s)
        let mut nan = false;
        for j in 0..n {
            x[j] = alpha * sol[j] + (1.0 - alpha) * x[j];
            nan |= !x[j].is_finite();
        }
        let mut u = alloc::vec![0.0f64; m];
        for i in 0..m {
            let s_int = s[i] - (y[i] + sol[n + i]) / ws.rho[i];
            u[i] = alpha * s_int + (1.0 - alpha) * s[i] + y[i] / ws.rho[i];
        }
        s.copy_from_slice(&u);
        project_product(&mut s, cones);
        for i in 0..m {
            y[i] = ws.rho[i] * (u[i] - s[i]);
            nan |= !y[i].is_finite() || !s[i].is_finite();
        }
        if nan {
            let mut out = breakdown(n, m);
            out.iterations = iter;
            return out;
        }

        if iter % CHECK_EVERY != 0 && iter != settings.max_iters {
            continue;
        }
        // unscale: x_u = D x̂, s_u = ŝ / e, y_u(reported) = −e ∘ ŷ
        let xu: Vec<f64> = x.iter().zip(&ws.d).map(|(&v, &dv)| v * dv).collect();
        let su: Vec<f64> = s.iter().zip(&ws.e).map(|(&v, &ev)| v / ev).collect();
        let yu: Vec<f64> = y.iter().zip(&ws.e).map(|(&v, &ev)| -v * ev).collect();
        let mut pr = a_orig.matvec(&xu);
        for i in 0..m {
            pr[i] += su[i] - b_orig[i];
        }
        let mut dr = a_orig.matvec_t(&yu);
        for j in 0..n {
            dr[j] += c_orig[j];
        }
        let obj = math::dot(c_orig, &xu);
        let by = math::dot(&b_orig, &yu);
        let res = Residuals {
            primal: math::norm(&pr) / norm_b,
            dual: math::norm(&dr) / norm_c,
            gap: math::abs(obj + by) / (1.0 + math::abs(obj) + math::abs(by)),
        };
        if res.primal < best.residuals.primal.max(best.residuals.dual)
            || res.primal.max(res.dual) < best.residuals.primal.max(best.residuals.dual)
        {
            best = Solution {
                z: xu.clone(),
                y: yu.clone(),
                s: su.clone(),
                status: SolverStatus::MaxIters,
                residuals: res.clone(),
                iterations: iter,
                objective: obj,
                solve_time: None,
            };
        }
        if res.primal <= settings.eps_primal
            && res.dual <= settings.eps_dual
            && res.gap <= settings.eps_gap
        {
            return Solution {
                z: xu,
                y: yu,
                s: su,
                status: SolverStatus::Optimal,
                residuals: res,
                iterations: iter,
                objective: obj,
                solve_time: None,
            };
        }
        // adaptive penalty: rebalance primal vs dual progress
        let ratio = (res.primal / res.dual.max(1e-300)).max(1e-300);
        let factor = math::sqrt(ratio);
        if factor > 5.0 || factor < 0.2 {
            rho_scale = (rho_scale * factor.clamp(0.1, 10.0)).clamp(RHO_MIN, RHO_MAX);
            let new_rho: Vec<f64> =
                is_zero_row.iter().map(|&z| rho_of(rho_scale, z)).collect();
            if let Some(kkt) = build_kkt(&ws.a, ws.sigma, &new_rho) {
                ws.rho = new_rho;
                ws.kkt = kkt;
            }
        }
    }
    best.iterations = settings.max_iters;
    best
}

fn breakdown(n: usize, m: usize) -> Solution {
    Solution {
        z: alloc::vec![0.0; n],
        y: alloc::vec![0.0; m],
        s: alloc::vec![0.0; m],
        status: SolverStatus::NumericalBreakdown,
        residuals: Residuals { primal: f64::NAN, dual: f64::NAN, gap: f64::NAN },
        iterations: 0,
        objective: f64::NAN,
        solve_time: None,
    }
}

/// Post-hoc feasibility/optimality checker, independent of solver internals.
pub fn check_solution(prog: &ConicProgram, sol: &Solution, tol: f64) -> bool {
    let a = Csc::from_triplets(prog.nrows(), prog.nvars(), &prog.a_triplets);
    let b = prog.rhs();
    let mut pr = a.matvec(&sol.z);
    for i in 0..prog.nrows() {
        pr[i] += sol.s[i] - b[i];
    }
    let primal_ok = math::norm(&pr) / (1.0 + math::norm(&b)) <= tol;
    let obj = math::dot(&prog.c, &sol.z);
    let slack_gap = math::abs(math::dot(&sol.s, &sol.y));
    let gap_ok = slack_gap <= tol.max(1e-6) * (1.0 + math::abs(obj));
    // slacks in the cone (within tolerance): project and compare
    let mut proj = sol.s.clone();
    project_product(&mut proj, &prog.cones);
    let cone_ok = sol
        .s
        .iter()
        .zip(&proj)
        .all(|(a, b)| math::abs(a - b) <= tol * 10.0 * (1.0 + math::abs(*a)));
    primal_ok && gap_ok && cone_ok
}
