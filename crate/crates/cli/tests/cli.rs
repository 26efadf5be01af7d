use std::path::Path;
use std::process::{Command, Output};

fn greencell(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_greencell"))
        .args(args)
        .env_remove("GREENCELL_CONFIG")
        .env_remove("GREENCELL_SEED")
        .env_remove("GREENCELL_TRIALS")
        .env_remove("GREENCELL_OUT")
        .env_remove("GREENCELL_SHADOW_CONVENTION")
        .env_remove("GREENCELL_CURVES")
        .env_remove("GREENCELL_BUDGET")
        .env("RUST_LOG", "error")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(str::to_string).collect();
    let rows = lines.map(|l| l.split(',').map(str::to_string).collect()).collect();
    (header, rows)
}

fn column(header: &[String], name: &str) -> usize {
    header
        .iter()
        .position(|h| h == name || h.starts_with(&format!("{name} (")))
        .unwrap_or_else(|| panic!("no column {name} in {header:?}"))
}

fn f(s: &str) -> f64 {
    s.parse().unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn scenario_round_trips_through_a_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let first = greencell(&["scenario"]);
    assert!(first.status.success(), "{}", stderr(&first));
    let cfg = dir.path().join("scenario.toml");
    std::fs::write(&cfg, stdout(&first)).unwrap();
    let second = greencell(&["--config", path_str(&cfg), "scenario"]);
    assert!(second.status.success(), "{}", stderr(&second));
    assert_eq!(stdout(&first), stdout(&second));
}

#[test]
fn missing_shadow_convention_is_a_line_numbered_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let preset = stdout(&greencell(&["scenario"]));
    let without: String = preset
        .lines()
        .filter(|l| !l.starts_with("shadow_convention"))
        .map(|l| format!("{l}\n"))
        .collect();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, without).unwrap();
    let out = greencell(&["--config", path_str(&cfg), "scenario"]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("shadow_convention"), "{err}");
    assert!(err.contains("line "), "{err}");
}

#[test]
fn invalid_value_names_its_line() {
    let dir = tempfile::tempdir().unwrap();
    let preset = stdout(&greencell(&["scenario"]));
    let line = preset.lines().position(|l| l.starts_with("p_off_w")).unwrap() + 1;
    let broken = preset.replace("p_off_w = 4.3", "p_off_w = -1.0");
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, broken).unwrap();
    let out = greencell(&["--config", path_str(&cfg), "scenario"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains(&format!("line {line}")), "{}", stderr(&out));
}

#[test]
fn unknown_metric_lists_the_valid_ones() {
    let out = greencell(&["compute", "throughput"]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    for m in ["void_prob", "coverage", "t_c", "t_u", "g_c", "g_u", "v_star"] {
        assert!(err.contains(m), "{err}");
    }
}

#[test]
fn void_probability_on_an_explicit_grid() {
    let dir = tempfile::tempdir().unwrap();
    let out = greencell(&[
        "--out",
        path_str(dir.path()),
        "--curves",
        "nearest:0",
        "compute",
        "void_prob",
        "--grid",
        "0,1,2",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let (header, rows) = read_csv(&dir.path().join("compute_void_prob.csv"));
    assert_eq!(rows.len(), 3);
    let p = column(&header, "void_prob");
    assert_eq!(f(&rows[0][p]), 1.0);
    assert!((f(&rows[2][p]) - (1.0f64 + 2.0 / 3.5).powf(-3.5)).abs() < 1e-12);
}

#[test]
fn coverage_falls_with_threshold() {
    let dir = tempfile::tempdir().unwrap();
    let out = greencell(&[
        "--out",
        path_str(dir.path()),
        "--curves",
        "nearest:0,mrp:8",
        "compute",
        "coverage",
        "--grid",
        "-10,-5,0,5,10",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let (header, rows) = read_csv(&dir.path().join("compute_coverage.csv"));
    assert_eq!(rows.len(), 10);
    for col in ["coverage_bound", "coverage_exact"] {
        let c = column(&header, col);
        for curve in rows.chunks(5) {
            let vals: Vec<f64> = curve.iter().map(|r| f(&r[c])).collect();
            assert!(vals.windows(2).all(|w| w[1] < w[0]), "{col}: {vals:?}");
            assert!(vals.iter().all(|v| (0.0..=1.0).contains(v)));
        }
    }
}

#[test]
fn optimal_load_reports_the_calibrated_beta() {
    let dir = tempfile::tempdir().unwrap();
    let out = greencell(&[
        "--out",
        path_str(dir.path()),
        "--curves",
        "mrp:8",
        "compute",
        "v_star",
        "--kind",
        "user_throughput",
        "--grid",
        "200,400",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let (header, rows) = read_csv(&dir.path().join("compute_v_star.csv"));
    assert_eq!(rows.len(), 2);
    let beta = column(&header, "beta");
    let gap = column(&header, "calibration_rel_gap");
    for r in &rows {
        assert!(f(&r[beta]) > 1.0);
        assert!(f(&r[gap]) < 1e-6);
    }
}

#[test]
fn figure_two_matches_the_void_model() {
    let dir = tempfile::tempdir().unwrap();
    let out = greencell(&[
        "--out",
        path_str(dir.path()),
        "--trials",
        "2",
        "--curves",
        "nearest:0,mrp:8",
        "figure",
        "2",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let (header, rows) = read_csv(&dir.path().join("fig2_nearest_0db.csv"));
    let load = column(&header, "load");
    let row = rows.iter().find(|r| f(&r[load]) == 2.0).expect("v = 2 row");
    assert!((f(&row[column(&header, "void_prob_analytic")]) - 0.2056).abs() < 5e-5);
    assert!((f(&row[column(&header, "lower_bound")]) - 0.1353).abs() < 5e-5);
    assert!(dir.path().join("fig2_mrp_8db_sim.csv").exists());
}

#[test]
fn figure_four_has_a_single_maximum_per_curve() {
    let dir = tempfile::tempdir().unwrap();
    let out = greencell(&[
        "--out",
        path_str(dir.path()),
        "--trials",
        "2",
        "--curves",
        "nearest:0,mrp:0,mrp:8",
        "figure",
        "4",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let (header, rows) = read_csv(&dir.path().join("fig4_argmax.csv"));
    assert_eq!(rows.len(), 3);
    let peaks = column(&header, "grid_local_maxima");
    assert!(rows.iter().all(|r| r[peaks] == "1"));
}

#[test]
fn optimal_intensity_falls_with_shadowing() {
    let dir = tempfile::tempdir().unwrap();
    let out = greencell(&["--out", path_str(dir.path()), "--curves", "mrp:0,mrp:4,mrp:8", "figure", "7"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let (header, rows) = read_csv(&dir.path().join("fig7_summary.csv"));
    assert_eq!(rows.len(), 6);
    let flag = column(&header, "mrp_decreasing_in_shadowing");
    assert!(rows.iter().all(|r| r[flag] == "1"));
}

#[test]
fn csv_output_is_byte_stable_and_carries_units() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let out = greencell(&[
            "--out",
            path_str(dir.path()),
            "--seed",
            "5",
            "--trials",
            "2",
            "--curves",
            "nearest:0",
            "figure",
            "3",
        ]);
        assert!(out.status.success(), "{}", stderr(&out));
    }
    for name in ["fig3_nearest_0db.csv", "fig3_nearest_0db_sim.csv"] {
        let x = std::fs::read(a.path().join(name)).unwrap();
        let y = std::fs::read(b.path().join(name)).unwrap();
        assert_eq!(x, y, "{name}");
        assert!(!x.contains(&b'\r'));
    }
    let (header, _) = read_csv(&a.path().join("fig3_nearest_0db.csv"));
    assert!(header.iter().any(|h| h.contains("(users/BS)")));
    assert!(header.iter().any(|h| h.contains("(km⁻²)")));
}

#[test]
fn validation_detects_a_wrong_gamma_shape() {
    let dir = tempfile::tempdir().unwrap();
    let out = greencell(&["--out", path_str(dir.path()), "validate", "--criteria", "1", "--rho-hat", "2.5"]);
    assert_eq!(out.status.code(), Some(4), "{}", stderr(&out));
    assert!(stdout(&out).contains("AC-1 FAIL"));
    assert!(dir.path().join("validation.csv").exists());
}

#[test]
fn passing_validation_exits_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let out = greencell(&["--out", path_str(dir.path()), "validate", "--criteria", "5"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).contains("[PRIMARY] AC-5 PASS"));
}

#[test]
fn environment_variables_override_the_preset() {
    let out = Command::new(env!("CARGO_BIN_EXE_greencell"))
        .arg("scenario")
        .env("GREENCELL_SEED", "99")
        .env("GREENCELL_SHADOW_CONVENTION", "var-db")
        .output()
        .unwrap();
    let text = stdout(&out);
    assert!(text.contains("seed = 99"), "{text}");
    assert!(text.contains("shadow_convention = \"var-db\""), "{text}");
}
