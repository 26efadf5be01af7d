//! Single-metric evaluation over a grid.

use std::path::Path;
use std::str::FromStr;

use greencell::analytics::{avg_cell_throughput, coverage_prob, coverage_prob_exact, NetworkScenario, VoidModel};
use greencell::optimizer::{
    calibrate_beta, solve_fixed_point, FixedPointKind, FixedPointProblem, FIXED_POINT_MAX_ITER, FIXED_POINT_TOL,
};

use crate::error::CliError;
use crate::figures::RunOutput;
use crate::output::{num, Table};
use crate::scenario::Scenario;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    VoidProb,
    Coverage,
    CellThroughput,
    UserThroughput,
    GreenCell,
    GreenUser,
    VStar,
}

impl Metric {
    pub const ALL: [Self; 7] = [
        Self::VoidProb,
        Self::Coverage,
        Self::CellThroughput,
        Self::UserThroughput,
        Self::GreenCell,
        Self::GreenUser,
        Self::VStar,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::VoidProb => "void_prob",
            Self::Coverage => "coverage",
            Self::CellThroughput => "t_c",
            Self::UserThroughput => "t_u",
            Self::GreenCell => "g_c",
            Self::GreenUser => "g_u",
            Self::VStar => "v_star",
        }
    }
}

impl FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL.into_iter().find(|m| m.as_str() == s).ok_or_else(|| {
            format!(
                "unknown metric `{s}`; valid metrics: {}",
                Self::ALL.map(Metric::as_str).join(", ")
            )
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComputeOptions {
    /// Overrides the scenario grid: loads, SIR thresholds in dB, or user
    /// intensities, depending on the metric.
    pub grid: Option<Vec<f64>>,
    /// Objective of `v_star`.
    pub kind: FixedPointKind,
    /// Cell load at which coverage is evaluated.
    pub load: f64,
}

pub fn run_compute(metric: Metric, opts: &ComputeOptions, scenario: &Scenario, out: &Path) -> Result<RunOutput, CliError> {
    let curves = scenario.parsed_curves().map_err(CliError::Usage)?;
    let lu = scenario.lambda_u_per_km2;
    let mut run = RunOutput::default();
    let target = format!("compute_{}", metric.as_str());
    let table = match metric {
        Metric::VoidProb => {
            let grid = opts.grid.clone().unwrap_or_else(|| scenario.load_grid.clone());
            if let Some(bad) = grid.iter().find(|v| !(**v >= 0.0 && v.is_finite())) {
                return Err(CliError::Usage(format!("load {bad} must be finite and non-negative")));
            }
            let mut t = Table::new(&["curve", "load (users/BS)", "void_prob"]);
            for curve in &curves {
                let vm = VoidModel::new(&scenario.channel(curve)?, &curve.scheme())?;
                for &v in &grid {
                    t.push(vec![curve.to_string(), num(v), num(vm.void_prob(v))]);
                }
            }
            t
        }
        Metric::Coverage => {
            let grid = opts.grid.clone().unwrap_or_else(|| scenario.coverage_grid_db.clone());
            let s = NetworkScenario::from_load(lu, opts.load)?;
            let mut t = Table::new(&[
                "curve",
                "threshold (dB)",
                "load (users/BS)",
                "coverage_bound",
                "coverage_exact",
            ]);
            for curve in &curves {
                let channel = scenario.channel(curve)?;
                let scheme = curve.scheme();
                for &db in &grid {
                    let th = 10f64.powf(db / 10.0);
                    match coverage_prob(th, &s, &channel, &scheme)
                        .and_then(|b| Ok((b, coverage_prob_exact(th, &s, &channel, &scheme)?)))
                    {
                        Ok((b, e)) => t.push(vec![curve.to_string(), num(db), num(opts.load), num(b), num(e)]),
                        Err(e) => run.fail(&target, curve, db, e),
                    }
                }
            }
            t
        }
        Metric::CellThroughput | Metric::UserThroughput | Metric::GreenCell | Metric::GreenUser => {
            let grid = opts.grid.clone().unwrap_or_else(|| scenario.load_grid.clone());
            let header = match metric {
                Metric::CellThroughput => "t_c (bits/s/Hz/km²)",
                Metric::UserThroughput => "t_u (bits/s/Hz/user)",
                Metric::GreenCell => "g_c (bits/Hz/J)",
                _ => "g_u (bits/Hz/J/user)",
            };
            let quad = scenario.quadrature()?;
            let mut t = Table::new(&["curve", "load (users/BS)", "lambda_b (km⁻²)", header]);
            for curve in &curves {
                let ctx = scenario.load_context(curve)?;
                for &v in &grid {
                    let value = match metric {
                        Metric::CellThroughput => NetworkScenario::from_load(lu, v)
                            .and_then(|s| avg_cell_throughput(&s, ctx.channel(), ctx.scheme(), &quad)),
                        Metric::UserThroughput => ctx.objective(FixedPointKind::UserThroughput, v),
                        Metric::GreenCell => ctx.objective(FixedPointKind::GreenCell, v),
                        _ => ctx.objective(FixedPointKind::GreenUser, v),
                    };
                    match value {
                        Ok(x) => t.push(vec![curve.to_string(), num(v), num(lu / v), num(x)]),
                        Err(e) => run.fail(&target, curve, v, e),
                    }
                }
            }
            t
        }
        Metric::VStar => {
            let grid = opts.grid.clone().unwrap_or_else(|| scenario.lambda_u_grid_per_km2.clone());
            let mut t = Table::new(&[
                "curve",
                "kind",
                "lambda_u (km⁻²)",
                "beta",
                "v_star (users/BS)",
                "lambda_b_star (km⁻²)",
                "v_direct (users/BS)",
                "calibration_rel_gap",
            ]);
            for curve in &curves {
                let base = scenario.load_context(curve)?;
                for &lu in &grid {
                    let ctx = base.with_lambda_u(lu);
                    let row = calibrate_beta(opts.kind, &ctx, (scenario.beta_min, scenario.beta_max)).and_then(|cal| {
                        let p = FixedPointProblem::new(opts.kind, cal.beta, ctx.clone())?;
                        Ok((cal, solve_fixed_point(&p, FIXED_POINT_TOL, FIXED_POINT_MAX_ITER)?))
                    });
                    match row {
                        Ok((cal, sol)) => t.push(vec![
                            curve.to_string(),
                            opts.kind.as_str().to_string(),
                            num(lu),
                            num(cal.beta),
                            num(sol.v_star),
                            num(sol.lambda_b_star),
                            num(cal.v_direct),
                            num(cal.rel_gap),
                        ]),
                        Err(e) => run.fail(&target, curve, lu, e),
                    }
                }
            }
            t
        }
    };
    run.files.push(table.write(&out.join(format!("{target}.csv")))?);
    run.finish(out, &target)
}

