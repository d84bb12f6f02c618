use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use dnls_core::spectral::snapshot::write_snapshot;
use dnls_core::{FieldState, Grid};
use num_complex::Complex64;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dnls-lab"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_json(dir: &Path, name: &str, v: &serde_json::Value) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, serde_json::to_string_pretty(v).unwrap()).unwrap();
    p
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(str::to_string).collect();
    let rows = lines
        .filter(|l| !l.is_empty())
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

#[test]
fn help_lists_every_flag() {
    let o = run(&["--help"]);
    assert!(o.status.success());
    let text = stdout(&o);
    for flag in ["--config", "--out", "--seed", "--threads", "--print-defaults"] {
        assert!(text.contains(flag), "{flag} missing from help");
    }
    for cmd in ["simulate", "scan", "experiment", "selftest"] {
        assert!(text.contains(cmd), "{cmd} missing from help");
    }
    assert!(!text.contains("inject-fault"));
}

#[test]
fn zero_horizon_writes_only_the_initial_snapshot() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(golden("gaussian-small.json")).unwrap()).unwrap();
    cfg["flow"]["t_final"] = 0.0.into();
    let path = write_json(dir.path(), "cfg.json", &cfg);
    let out = dir.path().join("out");
    let o = run(&["simulate", "--config", path.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let snaps: Vec<_> = std::fs::read_dir(&out)
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| e.file_name().to_string_lossy().starts_with("snap_"))
        .collect();
    assert_eq!(snaps.len(), 1);
    assert_eq!(read_csv(&out.join("monitors.csv")).1.len(), 1);
}

#[test]
fn malformed_config_fails_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"grid\": {\"modes\": 128, \"period\": 8.0}, \"oops\": 1").unwrap();
    let o = run(&["simulate", "--config", bad.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!out.exists());

    let mut cfg: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(golden("gaussian-small.json")).unwrap()).unwrap();
    cfg["flow"]["unknown_key"] = 3.into();
    let path = write_json(dir.path(), "cfg.json", &cfg);
    let o = run(&["simulate", "--config", path.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("unknown field"));
    assert!(!out.exists());
}

#[test]
fn gaussian_small_matches_golden() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = run(&[
        "simulate",
        "--config",
        golden("gaussian-small.json").to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let (h_got, got) = read_csv(&out.join("monitors.csv"));
    let (h_want, want) = read_csv(&golden("gaussian-small.monitors.csv"));
    assert_eq!(h_got, h_want);
    assert_eq!(got.len(), want.len());
    for (r, (a, b)) in got.iter().zip(&want).enumerate() {
        for (c, (x, y)) in a.iter().zip(b).enumerate() {
            assert!((x - y).abs() <= 1e-10, "row {r} column {}: {x} vs {y}", h_want[c]);
        }
    }
}

#[test]
fn guard_loss_exits_inconclusive() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = serde_json::json!({
        "grid": {"modes": 64, "period": 1.0},
        "initial": {"kind": "gaussian", "sigma": 0.1, "mass": 20.0, "centre": 0.5, "drift": 0.0},
        "flow": {"flow": "hk", "dt": 1e-5, "t_final": 1e-3, "scheme": "integrating-factor-rk4", "dealias": true,
                 "monitor_stride": 10, "kappa": 1.0, "probes": [], "window_factor": 8.0}
    });
    let path = write_json(dir.path(), "cfg.json", &cfg);
    let out = dir.path().join("out");
    let o = run(&["simulate", "--config", path.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

fn scan_config(dir: &Path, snapshot: &Path) -> PathBuf {
    let cfg = serde_json::json!({
        "snapshot": snapshot,
        "kappas": [1.0, 2.0, 4.0, 8.0],
        "determinant": {"policy": {"kappa_factor": 64.0, "support_factor": 4.0, "occupancy": 1e-13, "min_half_width": 8},
                        "tolerance": 1e-8}
    });
    write_json(dir, "scan.json", &cfg)
}

fn column(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap()
}

#[test]
fn scan_of_zero_field_has_unit_determinant() {
    let dir = tempfile::tempdir().unwrap();
    let snap = dir.path().join("zero.bin");
    write_snapshot(&snap, &FieldState::zeros(Grid::unit(32).unwrap())).unwrap();
    let cfg = scan_config(dir.path(), &snap);
    let out = dir.path().join("out");
    let o = run(&["scan", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let (h, rows) = read_csv(&out.join("scan.csv"));
    assert_eq!(rows.len(), 4);
    for r in &rows {
        assert_eq!((r[column(&h, "re_a")], r[column(&h, "im_a")]), (1.0, 0.0));
    }
}

#[test]
fn scan_of_single_mode_matches_quadratic_trace() {
    let dir = tempfile::tempdir().unwrap();
    let g = Grid::unit(32).unwrap();
    let amp = Complex64::new(0.3, -0.2);
    let mut c = vec![Complex64::new(0.0, 0.0); 32];
    c[g.index(2).unwrap()] = amp;
    let snap = dir.path().join("mode.bin");
    write_snapshot(&snap, &FieldState::from_coefficients(g, c).unwrap()).unwrap();
    let cfg = scan_config(dir.path(), &snap);
    let out = dir.path().join("out");
    let o = run(&["scan", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let (h, rows) = read_csv(&out.join("scan.csv"));
    for r in &rows {
        let kappa = r[column(&h, "kappa")];
        // iκ coth(κ/2) |c|² / (2κ − iξ) on the unit torus, ξ = 4π
        let want = Complex64::new(0.0, kappa) / (0.5 * kappa).tanh() * amp.norm_sqr() / Complex64::new(2.0 * kappa, -4.0 * PI);
        let got = Complex64::new(r[column(&h, "re_tr2")], r[column(&h, "im_tr2")]);
        assert!((got - want).norm() < 1e-12 * want.norm(), "kappa {kappa}: {got} vs {want}");
    }
}

#[test]
fn scan_without_snapshot_fails() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = scan_config(dir.path(), &dir.path().join("absent.bin"));
    let out = dir.path().join("out");
    let o = run(&["scan", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn unknown_experiment_lists_registry() {
    let o = run(&["experiment", "no_such_thing"]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    for name in dnls_core::experiments::EXPERIMENTS {
        assert!(err.contains(name), "{name} not listed");
    }
}

#[test]
fn inequality_suite_passes_with_default_seed() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = run(&["experiment", "inequality_suite", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["verdict"], "pass");
    assert!(out.join("operator_ratios.csv").exists());
}

#[test]
fn equicontinuity_above_threshold_is_exploratory() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = serde_json::json!({
        "ensemble": {"kind": "gaussian", "count": 2, "seed": 1, "mass_cap": 13.0, "modes": 256, "period": 8.0},
        "config": {"flow": "dnls", "t_final": 0.01, "dt": 2.5e-4, "kappa": null, "monitor_stride": 20,
                   "ladder": [1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0], "det_kappas": [1.0, 2.0, 4.0], "window_factor": 8.0}
    });
    let path = write_json(dir.path(), "eq.json", &cfg);
    let out = dir.path().join("out");
    let o = run(&["experiment", "equicontinuity", "--config", path.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stderr(&o).contains("exploratory"));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["verdict"], "exploratory");
}

#[test]
fn print_defaults_round_trip() {
    for args in [vec!["simulate"], vec!["scan"], vec!["experiment", "hs_growth"]] {
        let mut a = args.clone();
        a.push("--print-defaults");
        let o = run(&a);
        assert!(o.status.success(), "{args:?}");
        let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
        assert!(v.is_object());
    }
}

#[test]
fn selftest_is_clean_and_deterministic() {
    let a = run(&["selftest"]);
    let b = run(&["selftest"]);
    assert_eq!(a.status.code(), Some(0), "{}", stdout(&a));
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn corrupted_branch_convention_is_caught() {
    let o = run(&["selftest", "--inject-fault", "branch-convention"]);
    assert_eq!(o.status.code(), Some(3));
    let text = stdout(&o);
    assert!(text.contains("FAIL branch_consistency"));
    assert!(text.contains("failed: branch_consistency"));
}
