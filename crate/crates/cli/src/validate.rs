//! Runs the acceptance criteria and tabulates every check.

use std::path::{Path, PathBuf};

use greencell::validation::{run_criterion, CriterionReport, ValidationOptions, CRITERIA};

use crate::error::CliError;
use crate::output::{num, Table};

pub struct ValidationRun {
    pub reports: Vec<CriterionReport>,
    pub table: PathBuf,
}

impl ValidationRun {
    pub fn passed(&self) -> bool {
        self.reports.iter().all(CriterionReport::passed)
    }

    /// `AC-n/check` for every failed check.
    pub fn failing_checks(&self) -> Vec<String> {
        self.reports
            .iter()
            .flat_map(|r| {
                r.checks
                    .iter()
                    .filter(|c| !c.passed)
                    .map(move |c| format!("AC-{}/{}", r.number, c.name))
            })
            .collect()
    }
}

pub fn run_validation(criteria: &[u8], opts: &ValidationOptions, out: &Path) -> Result<ValidationRun, CliError> {
    let selected: Vec<u8> = if criteria.is_empty() {
        CRITERIA.iter().map(|(n, _)| *n).collect()
    } else {
        criteria.to_vec()
    };
    let mut reports = Vec::new();
    for n in selected {
        let report = run_criterion(n, opts)?;
        println!("{}", report.summary_line());
        reports.push(report);
    }
    let mut t = Table::new(&[
        "criterion",
        "check",
        "passed",
        "measured",
        "reference",
        "lower",
        "upper",
        "elapsed (s)",
        "detail",
    ]);
    for r in &reports {
        for c in &r.checks {
            t.push(vec![
                format!("AC-{}", r.number),
                c.name.clone(),
                u8::from(c.passed).to_string(),
                num(c.measured),
                num(c.reference),
                num(c.lower),
                num(c.upper),
                format!("{:.3}", r.elapsed.as_secs_f64()),
                if c.detail.is_empty() { "-".to_string() } else { c.detail.clone() },
            ]);
        }
    }
    let table = t.write(&out.join("validation.csv"))?;
    Ok(ValidationRun { reports, table })
}
