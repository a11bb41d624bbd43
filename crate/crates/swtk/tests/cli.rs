use std::path::Path;
use std::process::Command;

use serde_json::Value;

fn swtk(cmd: &str, config: &str, out: &Path) -> i32 {
    let cfg = out.join("run.cfg");
    std::fs::create_dir_all(out).unwrap();
    std::fs::write(&cfg, config).unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_swtk"))
        .arg(cmd)
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap();
    o.status.code().unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

const SMALL_IDENTITIES: &str =
    "geometry.dims = 4\ngeometry.spacing = 0.25\nidentities.samples = 200\nidentities.weitzenbock_grids = 8 16\n";

#[test]
fn screen_hyperbolic_has_five_rows() {
    let d = tempfile::tempdir().unwrap();
    let code = swtk(
        "screen",
        "screen.form = hyperbolic(1)\nscreen.coeff_bound = 2\nscreen.volume = 1\nscreen.k_minus = 1\n",
        d.path(),
    );
    assert_eq!(code, 0);
    let csv = std::fs::read_to_string(d.path().join("screen.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "alpha_1,alpha_2,q_value,window_lo,window_hi,margin");
    assert_eq!(lines.len(), 6);
    assert!(lines[1].starts_with("-2,0,0,"));
    let r = json(&d.path().join("screen.json"));
    assert_eq!(r["metadata"]["schema_version"], 1);
    assert_eq!(r["count"], 5);
}

#[test]
fn screen_e8_bound_zero_is_the_zero_class() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(
        swtk("screen", "screen.form = e8\nscreen.coeff_bound = 0\n", d.path()),
        0
    );
    let csv = std::fs::read_to_string(d.path().join("screen.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
    assert!(csv.lines().nth(1).unwrap().starts_with("0,0,0,0,0,0,0,0,0,"));
}

#[test]
fn screen_degenerate_window_keeps_square_zero() {
    let d = tempfile::tempdir().unwrap();
    let cfg = "screen.form = sum(h, h)\nscreen.coeff_bound = 2\nscreen.k_minus = 0\n";
    assert_eq!(swtk("screen", cfg, d.path()), 0);
    let r = json(&d.path().join("screen.json"));
    let rows = r["rows"].as_array().unwrap();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|row| row["q_value"] == 0));
}

#[test]
fn screen_budget_guard_exits_three() {
    let d = tempfile::tempdir().unwrap();
    let cfg = "screen.form = sum(hyperbolic(3), neg(e8), neg(e8))\nscreen.coeff_bound = 3\n";
    assert_eq!(swtk("screen", cfg, d.path()), 3);
}

#[test]
fn bad_config_exits_one_with_field_path() {
    let d = tempfile::tempdir().unwrap();
    let cfg = d.path().join("bad.cfg");
    std::fs::write(&cfg, "sector.flux = 1 0 0 0 0 0\n").unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_swtk"))
        .args(["flow", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("sector.flux"));
}

#[test]
fn identities_pass_and_fault_injection_fails_item_one() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(swtk("identities", SMALL_IDENTITIES, d.path()), 0);
    let r = json(&d.path().join("identities.json"));
    assert_eq!(r["all_passed"], true);
    assert_eq!(r["sup_bound"]["branch"], "k_minus_zero");

    let e = tempfile::tempdir().unwrap();
    let bad = format!("{SMALL_IDENTITIES}identities.clifford_scale = 1.001\n");
    assert_eq!(swtk("identities", &bad, e.path()), 1);
    let r = json(&e.path().join("identities.json"));
    let checks = r["checks"].as_array().unwrap();
    let item1 = checks.iter().find(|c| c["name"] == "clifford_pairing").unwrap();
    assert_eq!(item1["passed"], false);
    let sigma = checks.iter().find(|c| c["name"] == "sigma_norm").unwrap();
    assert_eq!(sigma["passed"], true);
}

#[test]
fn positive_curvature_reports_zero_branch() {
    let d = tempfile::tempdir().unwrap();
    let cfg = format!("{SMALL_IDENTITIES}geometry.k.value = 3\n");
    swtk("identities", &cfg, d.path());
    let r = json(&d.path().join("identities.json"));
    assert_eq!(r["sup_bound"]["branch"], "k_minus_zero");
    assert_eq!(r["sup_bound"]["k_minus"].as_f64(), Some(0.0));
}

#[test]
fn flow_constant_solution_needs_no_iterations() {
    let d = tempfile::tempdir().unwrap();
    let cfg = "geometry.dims = 4\ngeometry.spacing = 0.25\ngeometry.k.value = -1\nsector.flux = 0 0 0 0 0 0\nflow.init = constant\n";
    assert_eq!(swtk("flow", cfg, d.path()), 0);
    let r = json(&d.path().join("flow.json"));
    assert_eq!(r["iterations"], 0);
    assert_eq!(r["status"], "converged");
    assert!(r["el_residual_spinor"].as_f64().unwrap() <= 1e-12);
    let trace = std::fs::read_to_string(d.path().join("energy_trace.csv")).unwrap();
    assert_eq!(trace.lines().next(), Some("iteration,energy,grad_norm"));
    assert_eq!(trace.lines().count(), 2);
}

#[test]
fn flow_trivial_sector_energy_decays_toward_zero() {
    // with k = 0 the constant spinor mode only feels the quartic term, so the
    // energy decays like 1/t and the gradient tolerance is out of reach
    let d = tempfile::tempdir().unwrap();
    let cfg = "geometry.dims = 4\ngeometry.spacing = 0.25\nsector.flux = 0 0 0 0 0 0\nflow.max_iters = 2000\n";
    assert_eq!(swtk("flow", cfg, d.path()), 2);
    let r = json(&d.path().join("flow.json"));
    let e0 = r["initial_energy"].as_f64().unwrap();
    let e1 = r["final_energy"].as_f64().unwrap();
    assert!(e1 < 1e-3 * e0, "{e0} -> {e1}");
    assert_eq!(r["theorem"]["consistent"], true);
}

#[test]
fn flow_unconverged_exits_two_with_partial_report() {
    let d = tempfile::tempdir().unwrap();
    let cfg = "geometry.dims = 4\ngeometry.spacing = 0.25\nflow.max_iters = 3\n";
    assert_eq!(swtk("flow", cfg, d.path()), 2);
    let r = json(&d.path().join("flow.json"));
    assert_eq!(r["classification"], "NOT_CONVERGED");
    assert_eq!(r["status"], "max_iters");
    let trace = std::fs::read_to_string(d.path().join("energy_trace.csv")).unwrap();
    assert_eq!(trace.lines().count(), 5);
}

#[test]
fn seed_flag_overrides_config() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let cfg = "geometry.dims = 4\ngeometry.spacing = 0.25\nflow.max_iters = 2\n";
    swtk("flow", cfg, a.path());
    let cfg_path = b.path().join("run.cfg");
    std::fs::write(&cfg_path, cfg).unwrap();
    Command::new(env!("CARGO_BIN_EXE_swtk"))
        .args(["flow", "--seed", "9", "--config"])
        .arg(&cfg_path)
        .arg("--out")
        .arg(b.path())
        .output()
        .unwrap();
    let ra = json(&a.path().join("flow.json"));
    let rb = json(&b.path().join("flow.json"));
    assert_eq!(rb["metadata"]["seed"], 9);
    assert_ne!(ra["initial_energy"], rb["initial_energy"]);
}

#[test]
fn parallel_flag_is_recorded() {
    let d = tempfile::tempdir().unwrap();
    let cfg = d.path().join("run.cfg");
    std::fs::write(&cfg, "screen.form = h\n").unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_swtk"))
        .args(["screen", "--parallel", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(d.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let r = json(&d.path().join("screen.json"));
    assert_eq!(r["metadata"]["parallel"], true);
    assert_eq!(r["metadata"]["bit_reproducible"], false);
}
