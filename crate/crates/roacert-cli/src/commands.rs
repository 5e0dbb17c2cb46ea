//! Command implementations. Each returns the process exit code; `Err` maps
//! to exit 1 (config/IO) in `main`.

use std::path::Path;

use roacert_core::dataset::{covering_check, relevance_sets, Covering, Dataset};
use roacert_core::geometry::{delaunay_tessellate, Polytope};
use roacert_core::lyapunov::{
    algorithm1_learn, algorithm2_sequential_stages, algorithm3_learn_roa, extract_roa,
    make_seeds, prepare_tessellation, Assumptions, CertStatus, Certificate, LyapunovError,
    PwaLyapunov, RoaEstimate,
};
use roacert_core::program::{assemble, BoundaryMode};
use roacert_core::solver::{solve, SolverSettings};
use roacert_core::verify::{grid_negativity, grid_scan, roa_soundness, OracleDynamics};
use serde::Serialize;

use crate::artifacts::{
    read_json, write_json, LyapunovFile, ProblemFile, RunReport, SolutionFile,
};
use crate::config::RunConfig;
use crate::plot;
use crate::{CliError, EXIT_COVERING, EXIT_NOT_CERTIFIED, EXIT_OK, EXIT_STAGE};

#[derive(Debug, Serialize)]
struct CoveringDiagnostics {
    pass: bool,
    n_vertices: usize,
    uncovered_vertices: Vec<usize>,
    n_samples: usize,
    m: f64,
}

/// Tessellates the region and reports whether every vertex is strictly
/// covered by a sample ball. Exit 0 on pass, 2 on fail.
pub fn cmd_check_covering(cfg: &RunConfig) -> Result<i32, CliError> {
    let (ds, _) = cfg.build_dataset()?;
    let region = cfg.region_polytope()?;
    let prior = cfg.prior_polytope();
    let lcfg = cfg.learn_config();
    let seeds = make_seeds(&region, &ds, &lcfg);
    let tess = delaunay_tessellate(&region, prior.as_ref(), &seeds, lcfg.rng_seed)
        .map_err(|e| CliError::Core(e.to_string()))?;
    let (pass, uncovered) = match covering_check(&ds, &tess) {
        Covering::Pass => (true, Vec::new()),
        Covering::Fail { uncovered } => (false, uncovered),
    };
    std::fs::create_dir_all(&cfg.output_dir)?;
    let diag = CoveringDiagnostics {
        pass,
        n_vertices: tess.vertices.len(),
        uncovered_vertices: uncovered,
        n_samples: ds.len(),
        m: ds.m,
    };
    write_json(&cfg.output_dir.join("covering.json"), &diag)?;
    println!(
        "covering: {} ({} vertices, {} uncovered)",
        if pass { "pass" } else { "FAIL" },
        diag.n_vertices,
        diag.uncovered_vertices.len()
    );
    Ok(if pass { EXIT_OK } else { EXIT_NOT_CERTIFIED })
}

fn write_learn_artifacts(
    cfg: &RunConfig,
    ds: &Dataset,
    oracle: Option<&OracleDynamics>,
    lyap: &PwaLyapunov,
    cert: &Certificate,
    roa: Option<&RoaEstimate>,
    report: &mut RunReport,
) -> Result<(), CliError> {
    let out = &cfg.output_dir;
    std::fs::create_dir_all(out)?;
    write_json(&out.join("lyapunov.json"), &LyapunovFile::from_lyapunov(lyap, &cert.assumptions))?;
    write_json(&out.join("certificate.json"), cert)?;
    std::fs::write(out.join("tessellation.svg"), plot::svg_tessellation(&lyap.tess))?;
    std::fs::write(out.join("lyapunov.svg"), plot::svg_level_sets(lyap, 12))?;
    report.reduction_ratio = Some(relevance_sets(ds, &lyap.tess).reduction_ratio);
    if let Some(roa) = roa {
        write_json(&out.join("roa.json"), roa)?;
        std::fs::write(out.join("roa.svg"), plot::svg_roa(lyap, roa))?;
        if let Some(oracle) = oracle {
            let points = grid_scan(lyap, roa, oracle, cfg.grid_resolution);
            std::fs::write(out.join("negativity.csv"), plot::negativity_csv(&points))?;
            report.verification = Some(grid_negativity(lyap, roa, oracle, cfg.grid_resolution));
        }
    }
    Ok(())
}

/// Full learning pipeline. Exit 0 iff Certified, 2 NotCertified,
/// 3 covering failure.
pub fn cmd_learn(cfg: &RunConfig, force_no_boundary: bool) -> Result<i32, CliError> {
    let mut cfg = cfg.clone();
    if force_no_boundary {
        cfg.mode = BoundaryMode::NoBoundary;
    }
    let (ds, oracle) = cfg.build_dataset()?;
    let region = cfg.region_polytope()?;
    let prior = cfg.prior_polytope();
    let lcfg = cfg.learn_config();
    std::fs::create_dir_all(&cfg.output_dir)?;

    let result = if cfg.mode == BoundaryMode::NoBoundary {
        algorithm3_learn_roa(&region, prior.as_ref(), &ds, &lcfg)
            .map(|(l, r, c)| (l, c, Some(r)))
    } else {
        algorithm1_learn(&region, prior.as_ref(), &ds, &lcfg).map(|(l, c)| {
            let roa = extract_roa(&l).ok();
            (l, c, roa)
        })
    };
    match result {
        Ok((lyap, cert, roa)) => {
            let certified = cert.status == CertStatus::Certified;
            let mut report =
                RunReport::new("learn", if certified { "certified" } else { "not_certified" });
            if !certified {
                if prior.as_ref().is_some_and(|p| p.is_degenerate()) {
                    report.notes.push(
                        "the prior set has zero volume: no finite sample can enforce \
                         strict decrease arbitrarily close to the equilibrium, so \
                         certification is impossible by construction"
                            .into(),
                    );
                }
                report.notes.push(format!(
                    "optimal slack sum {:.6e} exceeds the all-slacks-at--epsilon target {:.6e}",
                    cert.optimal_slack_sum, cert.target
                ));
            }
            report.certificate = Some(cert.clone());
            write_learn_artifacts(&cfg, &ds, oracle.as_ref(), &lyap, &cert, roa.as_ref(), &mut report)?;
            write_json(&cfg.output_dir.join("report.json"), &report)?;
            println!("certificate: {:?}", cert.status);
            Ok(if certified { EXIT_OK } else { EXIT_NOT_CERTIFIED })
        }
        Err(LyapunovError::CoveringFailed { uncovered }) => {
            let mut report = RunReport::new("learn", "covering_failed");
            report.uncovered_vertices = uncovered;
            report.notes.push(
                "covering is necessary: an uncovered vertex admits dynamics that \
                 agree with every sample yet violate decrease there"
                    .into(),
            );
            write_json(&cfg.output_dir.join("report.json"), &report)?;
            println!("covering failed: {} uncovered vertices", report.uncovered_vertices.len());
            Ok(EXIT_COVERING)
        }
        Err(e) => Err(CliError::Core(e.to_string())),
    }
}

/// Nested-region sequential learning. Exit 4 on a failed stage.
pub fn cmd_sequential(cfg: &RunConfig) -> Result<i32, CliError> {
    if cfg.regions.is_empty() {
        return Err(CliError::Config("sequential needs a non-empty 'regions' list".into()));
    }
    let prior = cfg
        .prior_polytope()
        .ok_or_else(|| CliError::Config("sequential needs a prior".into()))?;
    let regions: Vec<Polytope> = cfg.regions.iter().map(|r| r.to_polytope()).collect();
    let (ds, oracle) = cfg.build_dataset()?;
    let lcfg = cfg.learn_config();
    std::fs::create_dir_all(&cfg.output_dir)?;
    match algorithm2_sequential_stages(&regions, &prior, &ds, &lcfg) {
        Ok((lyap, cert, stages)) => {
            for (i, (stage_lyap, stage_cert)) in stages.iter().enumerate() {
                let dir = cfg.output_dir.join(format!("stage{i}"));
                std::fs::create_dir_all(&dir)?;
                write_json(
                    &dir.join("lyapunov.json"),
                    &LyapunovFile::from_lyapunov(stage_lyap, &stage_cert.assumptions),
                )?;
                write_json(&dir.join("certificate.json"), stage_cert)?;
                std::fs::write(dir.join("lyapunov.svg"), plot::svg_level_sets(stage_lyap, 12))?;
            }
            let roa = extract_roa(&lyap).ok();
            let mut report = RunReport::new("sequential", "certified");
            report.certificate = Some(cert.clone());
            write_learn_artifacts(&cfg, &ds, oracle.as_ref(), &lyap, &cert, roa.as_ref(), &mut report)?;
            write_json(&cfg.output_dir.join("report.json"), &report)?;
            println!("sequential: all {} stages certified", stages.len());
            Ok(EXIT_OK)
        }
        Err(LyapunovError::StageFailed(i)) => {
            let mut report = RunReport::new("sequential", "stage_failed");
            report.failed_stage = Some(i);
            write_json(&cfg.output_dir.join("report.json"), &report)?;
            println!("sequential: stage {i} failed");
            Ok(EXIT_STAGE)
        }
        Err(e) => Err(CliError::Core(e.to_string())),
    }
}

/// Ground-truth verification of a learnt function against a named oracle:
/// grid negativity plus trajectory soundness. Exit 0 iff the grid maximum is
/// strictly negative and no sampled trajectory escapes.
#[allow(clippy::too_many_arguments)]
pub fn cmd_verify(
    lyapunov_path: &Path,
    roa_path: Option<&Path>,
    oracle_name: &str,
    grid_resolution: usize,
    n_trajectories: usize,
    seed: u64,
    output_dir: &Path,
) -> Result<i32, CliError> {
    let file: LyapunovFile = read_json(lyapunov_path)?;
    let assumptions: Assumptions = file.assumptions.clone();
    let lyap = file.into_lyapunov();
    let roa: RoaEstimate = match roa_path {
        Some(p) => read_json(p)?,
        None => extract_roa(&lyap).map_err(|e| CliError::Core(e.to_string()))?,
    };
    let oracle =
        OracleDynamics::by_name(oracle_name).map_err(|e| CliError::Config(e.to_string()))?;
    let mut report = grid_negativity(&lyap, &roa, &oracle, grid_resolution);
    let soundness = roa_soundness(&lyap, &roa, &oracle, assumptions.m, n_trajectories, seed)
        .map_err(|e| CliError::Core(e.to_string()))?;
    report.converged = soundness.converged;
    report.escaped = soundness.escaped;
    report.timeout = soundness.timeout;
    report.m = soundness.m;
    report.probe_lipschitz_floor = soundness.probe_lipschitz_floor;
    report.m_below_floor = soundness.m_below_floor;

    std::fs::create_dir_all(output_dir)?;
    write_json(&output_dir.join("verification.json"), &report)?;
    let points = grid_scan(&lyap, &roa, &oracle, grid_resolution);
    std::fs::write(output_dir.join("negativity.csv"), plot::negativity_csv(&points))?;
    let grid_ok = report.grid_max.is_some_and(|m| m < 0.0);
    let traj_ok = report.escaped == 0;
    println!(
        "verification: grid max {:?}, {} converged / {} escaped / {} timeout",
        report.grid_max, report.converged, report.escaped, report.timeout
    );
    Ok(if grid_ok && traj_ok { EXIT_OK } else { EXIT_NOT_CERTIFIED })
}

/// Assembles the conic program for a config and dumps it as a problem file.
pub fn cmd_export_problem(cfg: &RunConfig, output: &Path) -> Result<i32, CliError> {
    let (ds, _) = cfg.build_dataset()?;
    let region = cfg.region_polytope()?;
    let prior = cfg.prior_polytope();
    let lcfg = cfg.learn_config();
    let tess = prepare_tessellation(&region, prior.as_ref(), &ds, &lcfg)
        .map_err(|e| CliError::Core(e.to_string()))?;
    let rel = relevance_sets(&ds, &tess);
    let prog =
        assemble(&tess, &ds, &rel, &lcfg.program).map_err(|e| CliError::Core(e.to_string()))?;
    if let Some(parent) = output.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    write_json(output, &ProblemFile::from_program(&prog))?;
    println!("wrote {} ({} rows, {} vars)", output.display(), prog.nrows(), prog.nvars());
    Ok(EXIT_OK)
}

/// Solves a standard-form problem file with the built-in solver and writes a
/// solution file. Doubles as the reference implementation of the external
/// solver protocol.
pub fn cmd_solve_problem(problem: &Path, solution: &Path) -> Result<i32, CliError> {
    let file: ProblemFile = read_json(problem)?;
    let cones = file.cones()?;
    let prog = roacert_core::program::ConicProgram::from_raw(
        file.c.clone(),
        file.a_triplets.clone(),
        file.b.clone(),
        cones,
    );
    let sol = solve(&prog, &SolverSettings::default());
    write_json(solution, &SolutionFile::from_solution(&sol))?;
    println!("status: {:?} in {} iterations", sol.status, sol.iterations);
    Ok(EXIT_OK)
}
