use roacert_cli::config::{Overrides, RunConfig};
use roacert_core::geometry::VertexClass;
use roacert_core::lyapunov::algorithm1_learn;

fn main() {
    let path = std::env::args().nth(1).unwrap();
    let m_override: Option<f64> = std::env::args().nth(2).and_then(|s| s.parse().ok());
    let mut ov = Overrides::default();
    ov.m = m_override;
    let mut cfg = RunConfig::load(std::path::Path::new(&path), &ov).unwrap();
    if let Some(s) = std::env::args().nth(3).and_then(|s| s.parse().ok()) {
        cfg.oracle.as_mut().unwrap().seed = s;
    }
    if let Some(s) = std::env::args().nth(4).and_then(|s| s.parse().ok()) {
        cfg.rng_seed = s;
    }
    let (ds, _) = cfg.build_dataset().unwrap();
    println!(
        "floor={:?} m={}",
        roacert_core::dataset::lipschitz_floor(&ds),
        ds.m
    );
    let region = cfg.region.as_ref().unwrap().to_polytope();
    let prior = cfg.prior.as_ref().map(|p| p.to_polytope());
    let mut lc = cfg.learn_config();
    if let Ok(it) = std::env::var("DBG_ITERS") {
        lc.solver.max_iters = it.parse().unwrap();
    }
    if let Ok(e) = std::env::var("DBG_EPS") {
        let e: f64 = e.parse().unwrap();
        lc.solver.eps_primal = e;
        lc.solver.eps_dual = e;
        lc.solver.eps_gap = e;
    }
    if std::env::var("DBG_EXPORT").is_ok() {
        let tess =
            roacert_core::lyapunov::prepare_tessellation(&region, prior.as_ref(), &ds, &lc)
                .unwrap();
        let rel = roacert_core::dataset::relevance_sets(&ds, &tess);
        let prog = roacert_core::program::assemble(&tess, &ds, &rel, &lc.program).unwrap();
        roacert_cli::artifacts::write_json(
            std::path::Path::new("/tmp/prob_dbg.json"),
            &roacert_cli::artifacts::ProblemFile::from_program(&prog),
        )
        .unwrap();
        println!("exported {} rows {} vars", prog.nrows(), prog.nvars());
    }
    if std::env::var("DBG_SOLVE").is_ok() {
        let tess =
            roacert_core::lyapunov::prepare_tessellation(&region, prior.as_ref(), &ds, &lc)
                .unwrap();
        let rel = roacert_core::dataset::relevance_sets(&ds, &tess);
        let prog = roacert_core::program::assemble(&tess, &ds, &rel, &lc.program).unwrap();
        let t0 = std::time::Instant::now();
        let sol = roacert_core::solver::solve(&prog, &lc.solver);
        println!(
            "rows={} vars={} status={:?} iters={} res={:?} obj={} dt={:?}",
            prog.nrows(),
            prog.nvars(),
            sol.status,
            sol.iterations,
            sol.residuals,
            sol.objective,
            t0.elapsed()
        );
        return;
    }
    let (lyap, cert) = algorithm1_learn(&region, prior.as_ref(), &ds, &lc).unwrap();
    println!(
        "status={:?} slack_sum={} target={}",
        cert.status, cert.optimal_slack_sum, cert.target
    );
    let stars = lyap.tess.vertex_stars();
    let mut bmin = f64::INFINITY;
    let mut bmax = f64::NEG_INFINITY;
    let mut hmin = f64::INFINITY;
    let mut hmax = f64::NEG_INFINITY;
    let mut imin = f64::INFINITY;
    let mut imax = f64::NEG_INFINITY;
    for (vid, class) in lyap.tess.classes.iter().enumerate() {
        let Some(&k) = stars[vid].first() else { continue };
        let v = lyap.cell_value(k, &lyap.tess.vertices[vid]);
        match class {
            VertexClass::RegionBoundary => {
                if v < bmin {
                    bmin = v;
                    println!("  new bmin {} at {:?}", v, lyap.tess.vertices[vid]);
                }
                bmax = bmax.max(v);
            }
            VertexClass::HoleBoundary => {
                hmin = hmin.min(v);
                hmax = hmax.max(v);
            }
            _ => {
                imin = imin.min(v);
                imax = imax.max(v);
            }
        }
    }
    println!(
        "boundary [{bmin}, {bmax}]  hole [{hmin}, {hmax}]  interior [{imin}, {imax}]  alpha={}",
        lyap.alpha
    );
    match roacert_core::lyapunov::extract_roa(&lyap) {
        Ok(roa) => {
            let name = cfg.oracle.as_ref().unwrap().name.clone();
            let oracle = roacert_core::verify::OracleDynamics::by_name(&name).unwrap();
            let report = roacert_core::verify::grid_negativity(&lyap, &roa, &oracle, 200);
            let c = 0.9
                * lyap
                    .tess
                    .region
                    .vertices
                    .as_ref()
                    .unwrap()
                    .iter()
                    .map(|v| v[0].abs())
                    .fold(0.0, f64::max);
            let probes = [[c, -c], [-c, c], [c, c], [-c, -c]];
            let memb: Vec<bool> = probes
                .iter()
                .map(|p| roacert_core::lyapunov::evaluate(&lyap, p) <= roa.level)
                .collect();
            println!(
                "roa level={}  grid_max={:?}  probes_in_roa={:?}",
                roa.level, report.grid_max, memb
            );
            let sound =
                roacert_core::verify::roa_soundness(&lyap, &roa, &oracle, ds.m, 100, 7).unwrap();
            println!(
                "trajectories: {} converged / {} escaped / {} timeout",
                sound.converged, sound.escaped, sound.timeout
            );
        }
        Err(e) => println!("roa error: {e}"),
    }
}
