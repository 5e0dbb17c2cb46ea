//! End-to-end checks of the command-line interface: exit codes, artifact
//! determinism, CSV parsing, and the external-solver bridge.

use std::path::{Path, PathBuf};
use std::process::Command;

use roacert_cli::artifacts::{read_json, ProblemFile, SolutionFile};
use roacert_cli::csvio::{load_dataset_csv, write_dataset_csv};
use roacert_cli::external::ExternalSolvers;
use roacert_core::dataset::{Dataset, Sample};
use roacert_core::program::{Cone, ConicProgram};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_roacert"))
}

/// Small certifiable fixture: f(x) = −x sampled on a grid, learnt on a box.
fn write_linear_fixture(dir: &Path) -> (PathBuf, PathBuf) {
    let mut samples = Vec::new();
    let per = 7;
    for i in 0..per {
        for j in 0..per {
            let x = vec![
                -0.4 + 0.8 * i as f64 / (per - 1) as f64,
                -0.4 + 0.8 * j as f64 / (per - 1) as f64,
            ];
            let f = vec![-x[0], -x[1]];
            samples.push(Sample { x, f });
        }
    }
    let ds = Dataset::new(samples, 1.2, 0.0).unwrap();
    let csv_path = dir.join("linear.csv");
    write_dataset_csv(&csv_path, &ds).unwrap();
    let config = serde_json::json!({
        "region": { "box": [[-0.4, 0.4], [-0.4, 0.4]] },
        "prior": { "box": [[-0.1, 0.1], [-0.1, 0.1]] },
        "dataset_path": csv_path,
        "m": 1.2,
        "epsilon": 0.001,
        "output_dir": dir.join("out")
    });
    let cfg_path = dir.join("config.json");
    std::fs::write(&cfg_path, serde_json::to_string_pretty(&config).unwrap()).unwrap();
    (cfg_path, csv_path)
}

#[test]
fn csv_round_trip_preserves_samples() {
    let dir = tempfile::tempdir().unwrap();
    let (_, csv_path) = write_linear_fixture(dir.path());
    let ds = load_dataset_csv(&csv_path, 1.2, 0.0).unwrap();
    assert_eq!(ds.len(), 49);
    assert_eq!(ds.samples[0].x.len(), 2);
    for s in &ds.samples {
        assert_eq!(s.f[0], -s.x[0]);
        assert_eq!(s.f[1], -s.x[1]);
    }
}

#[test]
fn csv_rejects_bad_header_and_morphology() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "x1,x2,f1,g2\n0,0,0,0\n").unwrap();
    assert!(load_dataset_csv(&bad, 1.0, 0.0).is_err());
    let odd = dir.path().join("odd.csv");
    std::fs::write(&odd, "x1,x2,f1\n0,0,0\n").unwrap();
    assert!(load_dataset_csv(&odd, 1.0, 0.0).is_err());
    let text = dir.path().join("text.csv");
    std::fs::write(&text, "x1,x2,f1,f2\n0,zero,0,0\n").unwrap();
    assert!(load_dataset_csv(&text, 1.0, 0.0).is_err());
}

#[test]
fn csv_allows_comments() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("c.csv");
    std::fs::write(&p, "# generated fixture\nx1,x2,f1,f2\n0.1,0.2,-0.1,-0.2\n# tail\n").unwrap();
    let ds = load_dataset_csv(&p, 1.0, 0.0).unwrap();
    assert_eq!(ds.len(), 1);
}

#[test]
fn learn_certifies_and_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (cfg, _) = write_linear_fixture(dir.path());
    let out1 = dir.path().join("run1");
    let out2 = dir.path().join("run2");
    for out in [&out1, &out2] {
        let st = bin()
            .args(["learn", "--config"])
            .arg(&cfg)
            .arg("--output-dir")
            .arg(out)
            .status()
            .unwrap();
        assert_eq!(st.code(), Some(0));
    }
    for name in ["lyapunov.json", "certificate.json", "report.json", "roa.json"] {
        let a = std::fs::read(out1.join(name)).unwrap();
        let b = std::fs::read(out2.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical runs");
        assert!(!a.is_empty());
    }
    for name in ["tessellation.svg", "lyapunov.svg", "roa.svg"] {
        let a = std::fs::read(out1.join(name)).unwrap();
        let b = std::fs::read(out2.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical runs");
    }
}

#[test]
fn check_covering_pass_fail_and_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let (cfg, _) = write_linear_fixture(dir.path());
    let pass = bin().args(["check-covering", "--config"]).arg(&cfg).status().unwrap();
    assert_eq!(pass.code(), Some(0));
    // M × 10 shrinks every radius: covering must fail
    let fail = bin()
        .args(["check-covering", "--config"])
        .arg(&cfg)
        .args(["--m", "12.0"])
        .status()
        .unwrap();
    assert_eq!(fail.code(), Some(2));
    // missing dataset file
    let missing = bin()
        .args(["check-covering", "--config"])
        .arg(&cfg)
        .args(["--dataset", "no-such-file.csv"])
        .status()
        .unwrap();
    assert_eq!(missing.code(), Some(1));
}

#[test]
fn learn_exits_three_when_covering_fails() {
    let dir = tempfile::tempdir().unwrap();
    let (cfg, _) = write_linear_fixture(dir.path());
    let st = bin()
        .args(["learn", "--config"])
        .arg(&cfg)
        .args(["--m", "12.0", "--refinement-budget", "1"])
        .arg("--output-dir")
        .arg(dir.path().join("cov"))
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(3));
    assert!(!dir.path().join("cov").join("lyapunov.json").exists());
}

#[test]
fn degenerate_prior_exits_two_with_explanation() {
    let dir = tempfile::tempdir().unwrap();
    let (cfg_path, _) = write_linear_fixture(dir.path());
    let mut cfg: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&cfg_path).unwrap()).unwrap();
    cfg["prior"] = serde_json::json!({ "point": [0.0, 0.0] });
    cfg["output_dir"] = serde_json::json!(dir.path().join("deg"));
    let p = dir.path().join("deg.json");
    std::fs::write(&p, serde_json::to_string(&cfg).unwrap()).unwrap();
    let st = bin().args(["learn", "--config"]).arg(&p).status().unwrap();
    assert_eq!(st.code(), Some(2));
    let report: serde_json::Value =
        read_json(&dir.path().join("deg").join("report.json")).unwrap();
    assert_eq!(report["status"], "not_certified");
    let notes = report["notes"].as_array().unwrap();
    assert!(notes.iter().any(|n| n.as_str().unwrap().contains("zero volume")));
}

#[test]
fn invalid_configs_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.json");
    // both dataset and oracle set
    std::fs::write(
        &p,
        r#"{"region":{"box":[[-1,1],[-1,1]]},"dataset_path":"x.csv","m":1.0,
            "oracle":{"name":"linear-stable","samples":10,"seed":1}}"#,
    )
    .unwrap();
    let st = bin().args(["learn", "--config"]).arg(&p).status().unwrap();
    assert_eq!(st.code(), Some(1));
    // prior outside region
    std::fs::write(
        &p,
        r#"{"region":{"box":[[-0.1,0.1],[-0.1,0.1]]},
            "prior":{"box":[[-1,1],[-1,1]]},
            "oracle":{"name":"linear-stable","samples":10,"seed":1}}"#,
    )
    .unwrap();
    let st = bin().args(["learn", "--config"]).arg(&p).status().unwrap();
    assert_eq!(st.code(), Some(1));
}

#[test]
fn sequential_rejects_non_nested_and_matches_learn_for_single_region() {
    let dir = tempfile::tempdir().unwrap();
    let (cfg_path, _) = write_linear_fixture(dir.path());
    let mut cfg: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&cfg_path).unwrap()).unwrap();
    // non-nested sequence → config error
    cfg["regions"] = serde_json::json!([
        { "box": [[-0.4, 0.4], [-0.4, 0.4]] },
        { "box": [[-0.2, 0.2], [-0.2, 0.2]] }
    ]);
    let p = dir.path().join("seq.json");
    std::fs::write(&p, serde_json::to_string(&cfg).unwrap()).unwrap();
    let st = bin().args(["sequential", "--config"]).arg(&p).status().unwrap();
    assert_eq!(st.code(), Some(1));
    // single-element sequence reproduces cmd_learn's certificate byte-for-byte
    cfg["regions"] = serde_json::json!([{ "box": [[-0.4, 0.4], [-0.4, 0.4]] }]);
    cfg["output_dir"] = serde_json::json!(dir.path().join("seq-out"));
    std::fs::write(&p, serde_json::to_string(&cfg).unwrap()).unwrap();
    let st = bin().args(["sequential", "--config"]).arg(&p).status().unwrap();
    assert_eq!(st.code(), Some(0));
    let learn_out = dir.path().join("learn-out");
    let st = bin()
        .args(["learn", "--config"])
        .arg(&cfg_path)
        .arg("--output-dir")
        .arg(&learn_out)
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(0));
    let a = std::fs::read(dir.path().join("seq-out").join("certificate.json")).unwrap();
    let b = std::fs::read(learn_out.join("certificate.json")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn verify_command_on_learnt_linear_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let (cfg, _) = write_linear_fixture(dir.path());
    let out = dir.path().join("out");
    let st = bin()
        .args(["learn-roa", "--config"])
        .arg(&cfg)
        .arg("--output-dir")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(0));
    let st = bin()
        .args(["verify", "--lyapunov"])
        .arg(out.join("lyapunov.json"))
        .arg("--roa")
        .arg(out.join("roa.json"))
        .args(["--oracle", "linear-stable", "--grid-resolution", "60", "--trajectories", "20"])
        .arg("--output-dir")
        .arg(dir.path().join("verif"))
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(0));
    let report: serde_json::Value =
        read_json(&dir.path().join("verif").join("verification.json")).unwrap();
    assert!(report["grid_max"].as_f64().unwrap() < 0.0);
    assert_eq!(report["escaped"], 0);
    let csv = std::fs::read_to_string(dir.path().join("verif").join("negativity.csv")).unwrap();
    assert!(csv.starts_with("x1,x2,max_fg\n"));
    assert!(csv.lines().count() > 10);
}

#[test]
fn export_problem_round_trip_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let (cfg, _) = write_linear_fixture(dir.path());
    let problem_path = dir.path().join("problem.json");
    let st = bin()
        .args(["export-problem", "--config"])
        .arg(&cfg)
        .arg("--output")
        .arg(&problem_path)
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(0));
    let file: ProblemFile = read_json(&problem_path).unwrap();
    // serde_json emits shortest round-trip decimals, so re-reading is bit-exact
    let reread: ProblemFile = serde_json::from_str(
        &serde_json::to_string(&file).unwrap(),
    )
    .unwrap();
    assert_eq!(file.a_triplets, reread.a_triplets);
    assert_eq!(file.b, reread.b);
    assert_eq!(file.c, reread.c);
}

#[test]
fn external_solver_bridge_matches_builtin() {
    // trivial LP: min x s.t. x >= 3  (A = [-1], b = [-3], NonNeg)
    let prog = ConicProgram::from_raw(
        vec![1.0],
        vec![(0, 0, -1.0)],
        vec![-3.0],
        vec![Cone::NonNeg(1)],
    );
    let dir = tempfile::tempdir().unwrap();
    let mut reg = ExternalSolvers::new();
    assert!(matches!(
        reg.solve("mosek", &prog, dir.path()),
        Err(roacert_cli::CliError::NotRegistered(_))
    ));
    reg.register(
        "builtin-as-external",
        &format!("{} solve-problem {{problem}} {{solution}}", env!("CARGO_BIN_EXE_roacert")),
    );
    let sol = reg.solve("builtin-as-external", &prog, dir.path()).unwrap();
    assert!((sol.z[0] - 3.0).abs() <= 1e-5);
    let file: SolutionFile = read_json(&dir.path().join("solution.json")).unwrap();
    assert_eq!(file.z, sol.z);
    // a failing command surfaces as ExternalSolverFailure
    reg.register("broken", "exit 9");
    assert!(matches!(
        reg.solve("broken", &prog, dir.path()),
        Err(roacert_cli::CliError::ExternalSolverFailure(_))
    ));
}
