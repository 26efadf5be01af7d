use greencell::validation::{run_criterion, Budget, ValidationOptions, CRITERIA};

#[test]
fn corrupted_gamma_shape_fails_void_criterion() {
    let opts = ValidationOptions {
        rho_hat: 2.5,
        ..ValidationOptions::default()
    };
    let report = run_criterion(1, &opts).unwrap();
    assert!(!report.passed(), "{}", report.summary_line());
    assert!(report.summary_line().contains("FAIL"));
}

#[test]
fn quadrature_criterion_reports_every_check() {
    let report = run_criterion(5, &ValidationOptions::default()).unwrap();
    assert!(report.passed());
    assert!(!report.checks.is_empty());
    assert!(report.summary_line().starts_with("[PRIMARY] AC-5 PASS"));
}

#[test]
fn criteria_table_and_budget_parsing() {
    let numbers: Vec<u8> = CRITERIA.iter().map(|c| c.0).collect();
    assert_eq!(numbers, (1..=11).collect::<Vec<u8>>());
    assert!(run_criterion(12, &ValidationOptions::default()).is_err());
    assert_eq!("full".parse::<Budget>().unwrap(), Budget::Full);
    assert!("huge".parse::<Budget>().is_err());
}
