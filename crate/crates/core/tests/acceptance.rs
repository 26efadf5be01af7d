use std::io::Write;

use greencell::validation::{run_criterion, ValidationOptions};

/// Prints the summary line and any failing checks past the harness capture.
fn criterion(n: u8) {
    let report = run_criterion(n, &ValidationOptions::default()).expect("criterion could not run");
    let mut text = format!("{}\n", report.summary_line());
    for c in report.checks.iter().filter(|c| !c.passed) {
        text.push_str(&format!("    {c}\n"));
    }
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes()).unwrap();
    out.flush().unwrap();
    assert!(report.passed(), "AC-{n} failed");
}

#[test]
fn ac01_void_probability() {
    criterion(1);
}

#[test]
fn ac02_bound_ordering() {
    criterion(2);
}

#[test]
fn ac03_heavy_shadowing() {
    criterion(3);
}

#[test]
fn ac04_coverage() {
    criterion(4);
}

#[test]
fn ac05_throughput_identity() {
    criterion(5);
}

#[test]
fn ac06_user_throughput() {
    criterion(6);
}

#[test]
fn ac07_quadrature() {
    criterion(7);
}

#[test]
fn ac08_optimizer() {
    criterion(8);
}

#[test]
fn ac09_conservation() {
    criterion(9);
}

#[test]
fn ac10_voronoi() {
    criterion(10);
}

#[test]
fn ac11_scaling() {
    criterion(11);
}
