//! Ground-truth validation against known oracle dynamics: grid evaluation of
//! f(x)ᵀ∂L over a learnt region of attraction, fixed-step trajectory
//! simulation, and empirical soundness checks of the certificate.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, Sample};
use crate::geometry::Polytope;
use crate::lyapunov::{clarke_gradient, roa_contains, PwaLyapunov, RoaEstimate};
use crate::math;
use crate::rng::Rng;

/// Default per-axis grid resolution for negativity scans.
pub const DEFAULT_GRID_RESOLUTION: usize = 200;
/// Default convergence ball radius for trajectory classification.
pub const DEFAULT_BALL_RADIUS: f64 = 0.05;
/// Default simulation horizon.
pub const DEFAULT_T_MAX: f64 = 50.0;
/// Default integration step.
pub const DEFAULT_DT: f64 = 0.01;
/// Safety factor applied on top of the probe-grid Lipschitz floor when
/// generating datasets.
pub const M_SAFETY_FACTOR: f64 = 1.2;
/// Per-axis resolution of the probe grid used for Lipschitz floors and the
/// denominator safety check.
const PROBE_PER_AXIS: usize = 30;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VerifyError {
    UnknownOracle,
    /// The oracle is undefined or unsafe on the requested region.
    RegionUnsafe,
    /// A trajectory produced a non-finite state.
    NumericalBlowup,
    DimensionMismatch,
}

impl core::fmt::Display for VerifyError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            VerifyError::UnknownOracle => write!(f, "unknown oracle name"),
            VerifyError::RegionUnsafe => write!(f, "oracle is not safe on this region"),
            VerifyError::NumericalBlowup => write!(f, "trajectory produced non-finite state"),
            VerifyError::DimensionMismatch => write!(f, "dimension mismatch"),
        }
    }
}

impl core::error::Error for VerifyError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum OracleKind {
    /// f(x) = −x in any dimension (fixed here at 2).
    LinearStable,
    /// Two-dimensional non-polynomial system with a denominator that must be
    /// bounded away from zero on the working region.
    NonPolynomial2d,
    /// Reverse-time Van der Pol oscillator.
    ReverseVanDerPol,
}

/// A known right-hand side used to validate learnt certificates.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OracleDynamics {
    kind: OracleKind,
    pub name: String,
    pub dim: usize,
}

impl OracleDynamics {
    pub fn linear_stable() -> Self {
        OracleDynamics { kind: OracleKind::LinearStable, name: "linear-stable".into(), dim: 2 }
    }

    pub fn non_polynomial_2d() -> Self {
        OracleDynamics { kind: OracleKind::NonPolynomial2d, name: "nonpoly-2d".into(), dim: 2 }
    }

    pub fn reverse_van_der_pol() -> Self {
        OracleDynamics {
            kind: OracleKind::ReverseVanDerPol,
            name: "vdp-reverse".into(),
            dim: 2,
        }
    }

    pub fn by_name(name: &str) -> Result<Self, VerifyError> {
        match name {
            "linear-stable" => Ok(Self::linear_stable()),
            "nonpoly-2d" => Ok(Self::non_polynomial_2d()),
            "vdp-reverse" => Ok(Self::reverse_van_der_pol()),
            _ => Err(VerifyError::UnknownOracle),
        }
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        match self.kind {
            OracleKind::LinearStable => x.iter().map(|&v| -v).collect(),
            OracleKind::NonPolynomial2d => {
                let (x1, x2) = (x[0], x[1]);
                let den = libm::cos(x2) - 0.3 * x1;
                alloc::vec![
                    -0.9 * libm::sin(x1) * libm::cos(x2) + 0.2 * x1 * x2 + 0.25 * x2 * x2,
                    -libm::sin(x2) * libm::fabs(x1 + 0.2) + 0.5 * x1 * x2 / den,
                ]
            }
            OracleKind::ReverseVanDerPol => {
                // signs chosen so the origin is attracting (trace −2.1,
                // det 1.6 at the linearization) with anti-damping for
                // |x1| > 0.458, which destabilizes two opposite corners
                let (x1, x2) = (x[0], x[1]);
                alloc::vec![-2.0 * x2, 0.8 * x1 + 10.0 * (x1 * x1 - 0.21) * x2]
            }
        }
    }

    /// Refuses regions where the right-hand side can be singular. The
    /// non-polynomial system divides by cos(x₂) − 0.3x₁, which stays at least
    /// 0.1 in magnitude on [−1,1]²; larger boxes are rejected, and the bound
    /// is re-checked on a dense probe grid.
    pub fn assert_region(&self, region: &Polytope) -> Result<(), VerifyError> {
        if region.dim() != self.dim {
            return Err(VerifyError::DimensionMismatch);
        }
        if self.kind != OracleKind::NonPolynomial2d {
            return Ok(());
        }
        let bbox = bounding_box(region);
        for &(lo, hi) in &bbox {
            if lo < -1.0 - 1e-12 || hi > 1.0 + 1e-12 {
                return Err(VerifyError::RegionUnsafe);
            }
        }
        let n = 400;
        for i in 0..=n {
            for j in 0..=n {
                let x1 = bbox[0].0 + (bbox[0].1 - bbox[0].0) * i as f64 / n as f64;
                let x2 = bbox[1].0 + (bbox[1].1 - bbox[1].0) * j as f64 / n as f64;
                if math::abs(libm::cos(x2) - 0.3 * x1) < 0.1 {
                    return Err(VerifyError::RegionUnsafe);
                }
            }
        }
        Ok(())
    }

    /// Largest pairwise slope ‖f(x)−f(y)‖/‖x−y‖ over a regular probe grid on
    /// the region: a lower bound on any valid Lipschitz constant.
    pub fn probe_lipschitz_floor(&self, region: &Polytope) -> f64 {
        let pts = probe_grid(region, PROBE_PER_AXIS);
        let mut floor = 0.0f64;
        for i in 0..pts.len() {
            let fi = self.eval(&pts[i]);
            for j in (i + 1)..pts.len() {
                let d = math::dist(&pts[i], &pts[j]);
                if d > 0.0 {
                    let fj = self.eval(&pts[j]);
                    let slope = math::dist(&fi, &fj) / d;
                    floor = floor.max(slope);
                }
            }
        }
        floor
    }
}

/// Outcome of a single simulated trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrajectoryOutcome {
    /// Entered the convergence ball at the given time.
    Converged(f64),
    /// Left twice the region bounding box.
    Escaped,
    /// Reached the horizon without converging or escaping.
    Timeout,
}

/// Result of a grid scan and/or a trajectory batch against an oracle.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationReport {
    pub oracle: String,
    /// max over grid points x of max over Clarke generators g of f(x)ᵀg;
    /// absent when no grid point landed in the scanned set.
    pub grid_max: Option<f64>,
    pub grid_resolution: usize,
    pub grid_points_evaluated: usize,
    pub converged: usize,
    pub escaped: usize,
    pub timeout: usize,
    /// Lipschitz constant the certificate assumed, when known.
    pub m: Option<f64>,
    /// Probe-grid Lipschitz floor of the oracle on the region.
    pub probe_lipschitz_floor: Option<f64>,
    /// True when the assumed M is below the probe floor: any soundness
    /// failure is then attributable to a bad M rather than to a bug.
    pub m_below_floor: bool,
    #[serde(skip)]
    pub runtime_seconds: f64,
}

impl VerificationReport {
    fn empty(oracle: &OracleDynamics) -> Self {
        VerificationReport {
            oracle: oracle.name.clone(),
            grid_max: None,
            grid_resolution: 0,
            grid_points_evaluated: 0,
            converged: 0,
            escaped: 0,
            timeout: 0,
            m: None,
            probe_lipschitz_floor: None,
            m_below_floor: false,
            runtime_seconds: 0.0,
        }
    }
}

/// One grid sample of the negativity scan, for CSV/plot export.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridEvaluation {
    pub x: Vec<f64>,
    pub max_fg: f64,
}

fn bounding_box(region: &Polytope) -> Vec<(f64, f64)> {
    let vs = region.vertices.as_ref().expect("region needs explicit vertices");
    let dim = vs[0].len();
    (0..dim)
        .map(|d| {
            let lo = vs.iter().map(|v| v[d]).fold(f64::INFINITY, f64::min);
            let hi = vs.iter().map(|v| v[d]).fold(f64::NEG_INFINITY, f64::max);
            (lo, hi)
        })
        .collect()
}

fn probe_grid(region: &Polytope, per_axis: usize) -> Vec<Vec<f64>> {
    let bbox = bounding_box(region);
    let dim = bbox.len();
    let mut pts = Vec::new();
    let total = per_axis.pow(dim as u32);
    for flat in 0..total {
        let mut idx = flat;
        let mut x = Vec::with_capacity(dim);
        for d in 0..dim {
            let i = idx % per_axis;
            idx /= per_axis;
            let t = if per_axis == 1 { 0.5 } else { i as f64 / (per_axis - 1) as f64 };
            x.push(bbox[d].0 + (bbox[d].1 - bbox[d].0) * t);
        }
        if region.contains(&x, 1e-12) {
            pts.push(x);
        }
    }
    pts
}

/// Samples `n` i.i.d. uniform positions in the region, labels them with the
/// oracle's velocities, and sets M to a safety factor times the probe-grid
/// Lipschitz floor. Deterministic per seed.
pub fn generate_dataset(
    oracle: &OracleDynamics,
    region: &Polytope,
    n: usize,
    seed: u64,
) -> Result<Dataset, VerifyError> {
    assert!(n >= 1);
    oracle.assert_region(region)?;
    let bbox = bounding_box(region);
    let mut rng = Rng::new(seed);
    let mut samples = Vec::with_capacity(n);
    while samples.len() < n {
        let x: Vec<f64> = bbox.iter().map(|&(lo, hi)| rng.uniform_in(lo, hi)).collect();
        if region.contains(&x, 0.0) {
            let f = oracle.eval(&x);
            samples.push(Sample { x, f });
        }
    }
    let m = M_SAFETY_FACTOR * oracle.probe_lipschitz_floor(region);
    Ok(Dataset::new(samples, m, 0.0).expect("generated dataset is well-formed"))
}

/// Evaluates max_{g ∈ ∂L(x)} f(x)ᵀg on every grid point of the learnt RoA
/// outside the prior set, returning per-point values for export. Maximizing
/// over the generator set equals maximizing over its convex hull because the
/// functional is linear in g.
pub fn grid_scan(
    lyap: &PwaLyapunov,
    roa: &RoaEstimate,
    oracle: &OracleDynamics,
    resolution: usize,
) -> Vec<GridEvaluation> {
    let bbox = bounding_box(&lyap.tess.region);
    let n = resolution.max(2);
    let mut out = Vec::new();
    let dim = bbox.len();
    let total = n.pow(dim as u32);
    for flat in 0..total {
        let mut idx = flat;
        let mut x = Vec::with_capacity(dim);
        for d in 0..dim {
            let i = idx % n;
            idx /= n;
            x.push(bbox[d].0 + (bbox[d].1 - bbox[d].0) * i as f64 / (n - 1) as f64);
        }
        if !roa_contains(lyap, roa, &x) {
            continue;
        }
        if let Some(h) = &lyap.tess.hole {
            if h.contains(&x, 0.0) {
                continue;
            }
        }
        let f = oracle.eval(&x);
        let gens = clarke_gradient(lyap, &x);
        if gens.is_empty() {
            continue;
        }
        let max_fg = gens
            .iter()
            .map(|g| math::dot(&f, g))
            .fold(f64::NEG_INFINITY, f64::max);
        out.push(GridEvaluation { x, max_fg });
    }
    out
}

/// Grid negativity check of the decrease condition against the oracle: a
/// negative reported maximum confirms that the learnt function strictly
/// decreases along the true dynamics on the scanned set.
pub fn grid_negativity(
    lyap: &PwaLyapunov,
    roa: &RoaEstimate,
    oracle: &OracleDynamics,
    resolution: usize,
) -> VerificationReport {
    let pts = grid_scan(lyap, roa, oracle, resolution);
    let mut report = VerificationReport::empty(oracle);
    report.grid_resolution = resolution;
    report.grid_points_evaluated = pts.len();
    report.grid_max = pts
        .iter()
        .map(|p| p.max_fg)
        .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.max(v))));
    report
}

/// Classical fixed-step fourth-order integration of the oracle from `x0`.
pub fn simulate(
    oracle: &OracleDynamics,
    region: &Polytope,
    x0: &[f64],
    dt: f64,
    t_max: f64,
    ball_radius: f64,
) -> Result<TrajectoryOutcome, VerifyError> {
    assert!(dt > 0.0 && dt < t_max && ball_radius > 0.0);
    let bbox = bounding_box(region);
    // escape test: outside twice the region bounding box (scaled about its center)
    let escape: Vec<(f64, f64)> = bbox
        .iter()
        .map(|&(lo, hi)| {
            let c = 0.5 * (lo + hi);
            let h = hi - lo;
            (c - h, c + h)
        })
        .collect();
    let mut x = x0.to_vec();
    let mut t = 0.0;
    loop {
        if x.iter().any(|v| !v.is_finite()) {
            return Err(VerifyError::NumericalBlowup);
        }
        if math::norm(&x) <= ball_radius {
            return Ok(TrajectoryOutcome::Converged(t));
        }
        if x.iter().zip(&escape).any(|(&v, &(lo, hi))| v < lo || v > hi) {
            return Ok(TrajectoryOutcome::Escaped);
        }
        if t >= t_max {
            return Ok(TrajectoryOutcome::Timeout);
        }
        let k1 = oracle.eval(&x);
        let k2 = oracle.eval(&stepped(&x, &k1, 0.5 * dt));
        let k3 = oracle.eval(&stepped(&x, &k2, 0.5 * dt));
        let k4 = oracle.eval(&stepped(&x, &k3, dt));
        for d in 0..x.len() {
            x[d] += dt / 6.0 * (k1[d] + 2.0 * k2[d] + 2.0 * k3[d] + k4[d]);
        }
        t += dt;
    }
}

fn stepped(x: &[f64], k: &[f64], h: f64) -> Vec<f64> {
    x.iter().zip(k).map(|(&xi, &ki)| xi + h * ki).collect()
}

/// Samples starting points uniformly in the RoA estimate and simulates each:
/// under a correct certificate and an M that really bounds the oracle's
/// Lipschitz constant, every trajectory must converge. The report compares M
/// to the probe-grid floor so that a failure can be attributed.
pub fn roa_soundness(
    lyap: &PwaLyapunov,
    roa: &RoaEstimate,
    oracle: &OracleDynamics,
    m: f64,
    n_trajectories: usize,
    seed: u64,
) -> Result<VerificationReport, VerifyError> {
    let region = &lyap.tess.region;
    let bbox = bounding_box(region);
    let mut rng = Rng::new(seed);
    let mut report = VerificationReport::empty(oracle);
    let floor = oracle.probe_lipschitz_floor(region);
    report.m = Some(m);
    report.probe_lipschitz_floor = Some(floor);
    report.m_below_floor = m < floor;
    let mut done = 0;
    while done < n_trajectories {
        let x: Vec<f64> = bbox.iter().map(|&(lo, hi)| rng.uniform_in(lo, hi)).collect();
        if !roa_contains(lyap, roa, &x) {
            continue;
        }
        match simulate(oracle, region, &x, DEFAULT_DT, DEFAULT_T_MAX, DEFAULT_BALL_RADIUS)? {
            TrajectoryOutcome::Converged(_) => report.converged += 1,
            TrajectoryOutcome::Escaped => report.escaped += 1,
            TrajectoryOutcome::Timeout => report.timeout += 1,
        }
        done += 1;
    }
    Ok(report)
}
