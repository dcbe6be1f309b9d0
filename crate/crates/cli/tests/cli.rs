use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tfwd"))
}

fn bundled_density() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data/exponential.txt")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("bad JSON ({e}); stderr: {}", String::from_utf8_lossy(&out.stderr))
    })
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn evaluate_bundled_density_sums_parts() {
    let d = bundled_density();
    let out = run(&["evaluate", "--density", d.to_str().unwrap(), "--Z", "1", "--c", "137.036"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let r = report(&out);
    let o = &r["outputs"];
    let b = &o["breakdown"];
    let f = |k: &str| b[k].as_f64().unwrap();
    let parts = f("weizsacker") + f("thomas_fermi") - f("exchange") + f("external") + f("hartree");
    assert!((f("total") - parts).abs() <= 1e-12 * f("total").abs());
    // Hydrogen 1s: N = 1, external -Z alpha N / 2 = -1, Hartree (5/32) alpha = 5/16.
    assert!((f("mass") - 1.0).abs() < 1e-8);
    assert!((f("external") + 1.0).abs() < 1e-8);
    // 1000 nodes leave a discretization error of a few 1e-6.
    assert!((f("hartree") - 0.3125).abs() < 2e-5);
    assert_eq!(o["above_lower_bound"], Value::Bool(true));
}

#[test]
fn bound_report_has_small_residual() {
    let out = run(&["bound", "--kappa", "1", "--Z", "10", "--N", "10"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let o = &report(&out)["outputs"];
    assert!(o["residual_recomputed"].as_f64().unwrap().abs() <= 1e-12);
    assert!(o["report"]["s0_residual"].as_f64().unwrap().abs() <= 1e-12);
    assert_eq!(o["params"]["kappa"].as_f64().unwrap(), 1.0);
}

#[test]
fn certify_default_passes_all() {
    let out = run(&["certify"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let o = &report(&out)["outputs"];
    assert_eq!(o["passed"], 13);
    assert_eq!(o["total"], 13);
    for r in o["reports"].as_array().unwrap() {
        assert_eq!(r["evidence"], "numerical scan (evidence, not proof)");
    }
}

#[test]
fn report_keys_have_fixed_order() {
    let out = run(&["bound", "--Z", "2"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let keys = ["\"tool\"", "\"version\"", "\"command\"", "\"status\"", "\"exit_code\"", "\"inputs\"", "\"outputs\""];
    let pos: Vec<usize> = keys.iter().map(|k| text.find(k).unwrap()).collect();
    assert!(pos.windows(2).all(|w| w[0] < w[1]), "{pos:?}");
    assert!(!text.contains("timing_seconds"));
    let timed = report(&run(&["bound", "--Z", "2", "--timing"]));
    assert!(timed["timing_seconds"].as_f64().unwrap() >= 0.0);
}

#[test]
fn c_and_kappa_together_is_a_validation_error() {
    let out = run(&["bound", "--c", "100", "--kappa", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("kappa"), "{}", stderr(&out));
    assert!(out.stdout.is_empty());
}

#[test]
fn malformed_config_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "command = bound\nZ = 2\nc = fast\n").unwrap();
    let out = run(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("line 3"), "{}", stderr(&out));

    std::fs::write(&cfg, "{\"command\": \"bound\",\n \"Zed\": 2}").unwrap();
    let out = run(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let msg = stderr(&out);
    assert!(msg.contains("line 2") && msg.contains("Zed"), "{msg}");
}

#[test]
fn missing_inputs_are_validation_errors() {
    for args in [
        vec!["evaluate"],
        vec!["evaluate", "--density", "/no/such/file.txt"],
        vec!["bound", "--Z", "-3"],
        vec!["certify", "--resolution", "5"],
        vec!["certify", "--certificate", "nope"],
        vec!["minimize", "--mass-mode", "sometimes"],
        vec!["bound", "--Z"],
        vec!["bound", "--bogus-flag"],
        vec![],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(1), "{args:?}: {}", stderr(&out));
    }
}

#[test]
fn malformed_density_file_is_rejected_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("rho.txt");
    std::fs::write(&p, "# r rho\n0.1 1.0\n0.05 0.5\n0.2 0.1\n").unwrap();
    let out = run(&["evaluate", "--density", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("line 3"), "{}", stderr(&out));
}

#[test]
fn key_value_and_json_configs_give_identical_reports() {
    let dir = tempfile::tempdir().unwrap();
    let kv = dir.path().join("a.cfg");
    let js = dir.path().join("b.json");
    std::fs::write(&kv, "command = bound\nZ = 5\nkappa = 0.5\nN = 4\n").unwrap();
    std::fs::write(&js, r#"{"command": "bound", "Z": 5, "kappa": 0.5, "N": 4}"#).unwrap();
    let a = run(&["--config", kv.to_str().unwrap()]);
    let b = run(&["--config", js.to_str().unwrap()]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let kv = dir.path().join("a.cfg");
    std::fs::write(&kv, "command = bound\nZ = 5\n").unwrap();
    let r = report(&run(&["--config", kv.to_str().unwrap(), "--Z", "7"]));
    assert_eq!(r["inputs"]["Z"].as_f64(), Some(7.0));
}

#[test]
fn echoed_inputs_reproduce_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let first = report(&run(&["bound", "--Z", "3", "--kappa", "0.37", "--N", "2.5"]));
    let cfg = dir.path().join("echo.json");
    std::fs::write(&cfg, serde_json::to_string(&first["inputs"]).unwrap()).unwrap();
    let second = report(&run(&["--config", cfg.to_str().unwrap()]));
    assert_eq!(first["outputs"], second["outputs"]);
}

#[test]
fn out_flag_writes_file_and_leaves_inputs_untouched() {
    let dir = tempfile::tempdir().unwrap();
    let src = bundled_density();
    let before = std::fs::read(&src).unwrap();
    let dest = dir.path().join("report.json");
    let out = run(&["evaluate", "--density", src.to_str().unwrap(), "--out", dest.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let r: Value = serde_json::from_slice(&std::fs::read(&dest).unwrap()).unwrap();
    assert_eq!(r["command"], "evaluate");
    assert_eq!(std::fs::read(&src).unwrap(), before);
}

#[test]
fn minimize_reports_and_dumps_density() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("rho.txt");
    let out = run(&["minimize", "--Z", "1", "--N", "1", "--grid-size", "600", "--dump-density", dump.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let o = &report(&out)["outputs"];
    assert_eq!(o["converged"], Value::Bool(true));
    assert_eq!(o["within_bounds"], Value::Bool(true));
    let rho = tfwd_core::model::io::parse_density(&std::fs::read_to_string(&dump).unwrap()).unwrap();
    assert!((tfwd_core::model::mass(&rho) - 1.0).abs() < 1e-6);

    // The dump is a valid seed for a further run.
    let out = run(&[
        "minimize", "--Z", "1", "--N", "1", "--grid-size", "600", "--seed-profile", "custom", "--seed-density",
        dump.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
}

#[test]
fn iteration_limit_exits_with_convergence_status() {
    let out = run(&["minimize", "--Z", "2", "--max-iters", "1", "--grid-size", "400"]);
    assert_eq!(out.status.code(), Some(2));
    let r = report(&out);
    assert_eq!(r["status"], "convergence_failure");
    assert_eq!(r["outputs"]["converged"], Value::Bool(false));
}

#[test]
fn tfhydrogen_methods_agree() {
    let out = run(&["tfhydrogen"]);
    assert_eq!(out.status.code(), Some(0));
    let o = &report(&out)["outputs"];
    assert!(o["relative_difference"].as_f64().unwrap() < 1e-3);
    let e = o["e_tf"].as_f64().unwrap();
    for row in o["z_scaling"].as_array().unwrap() {
        assert!((row["scaled"].as_f64().unwrap() / e - 1.0).abs() < 1e-3);
    }
}

#[test]
fn excess_scan_hydrogen() {
    let out = run(&["excess", "--Z", "1", "--kappa", "1", "--grid-size", "800"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let o = &report(&out)["outputs"];
    assert_eq!(o["n_c_within_rhs"], Value::Bool(true));
    let n_c = o["n_c"].as_f64().unwrap();
    assert!((1.0..2.0).contains(&n_c), "{n_c}");
}
