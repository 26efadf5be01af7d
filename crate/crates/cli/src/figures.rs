//! Figure data: one CSV per curve, plus simulation and summary tables.

use std::path::{Path, PathBuf};

use greencell::analytics::{avg_cell_throughput, avg_user_throughput, void_prob_bounds, NetworkScenario, VoidModel};
use greencell::geomsim::{estimate_cell_throughput, estimate_user_throughput, simulate_void_fraction, SimEstimate};
use greencell::optimizer::{
    calibrate_beta, maximize_direct, solve_fixed_point, FixedPointKind, FixedPointProblem, LoadContext,
    DIRECT_BRACKET, DIRECT_TOL, FIXED_POINT_MAX_ITER, FIXED_POINT_TOL,
};

use crate::error::CliError;
use crate::output::{num, write_manifest, Failure, Table};
use crate::scenario::{Curve, Scenario, SchemeKind};

pub const FIGURES: [u8; 7] = [2, 3, 4, 5, 6, 7, 8];

/// Files written by a run and the grid points that could not be computed.
#[derive(Debug, Default)]
pub struct RunOutput {
    pub files: Vec<PathBuf>,
    pub failures: Vec<Failure>,
}

impl RunOutput {
    pub(crate) fn fail(&mut self, target: &str, curve: &Curve, x: f64, err: impl ToString) {
        let error = err.to_string();
        log::warn!("{target} {curve} at {x}: {error}");
        self.failures.push(Failure {
            target: target.to_string(),
            curve: curve.to_string(),
            x,
            error,
        });
    }

    fn write(&mut self, table: &Table, path: PathBuf) -> Result<(), CliError> {
        self.files.push(table.write(&path)?);
        Ok(())
    }

    /// Writes the failure manifest when anything failed.
    pub fn finish(mut self, out: &Path, stem: &str) -> Result<Self, CliError> {
        if !self.failures.is_empty() {
            let path = write_manifest(&self.failures, &out.join(format!("{stem}_failures.csv")))?;
            self.files.push(path);
        }
        Ok(self)
    }
}

pub fn run_figure(id: u8, scenario: &Scenario, out: &Path) -> Result<RunOutput, CliError> {
    let curves = scenario.parsed_curves().map_err(CliError::Usage)?;
    let mut run = RunOutput::default();
    match id {
        2 => figure_void(scenario, &curves, out, &mut run)?,
        3 => figure_cell_throughput(scenario, &curves, out, &mut run)?,
        4 => figure_load_curve(4, FixedPointKind::UserThroughput, scenario, &curves, out, &mut run)?,
        5 => figure_load_curve(5, FixedPointKind::GreenCell, scenario, &curves, out, &mut run)?,
        6 => figure_load_curve(6, FixedPointKind::GreenUser, scenario, &curves, out, &mut run)?,
        7 => figure_optimal_intensity(7, FixedPointKind::GreenCell, scenario, &curves, out, &mut run)?,
        8 => figure_optimal_intensity(8, FixedPointKind::GreenUser, scenario, &curves, out, &mut run)?,
        other => {
            return Err(CliError::Usage(format!(
                "unknown figure {other} (expected one of {})",
                FIGURES.map(|f| f.to_string()).join(", ")
            )))
        }
    }
    run.finish(out, &format!("fig{id}"))
}

const SIM_HEADERS: [&str; 6] = [
    "load (users/BS)",
    "lambda_b (km⁻²)",
    "analytic",
    "sim_mean",
    "sim_stderr",
    "trials",
];

fn sim_row(v: f64, lambda_b: f64, analytic: f64, est: &SimEstimate) -> Vec<String> {
    vec![num(v), num(lambda_b), num(analytic), num(est.mean), num(est.stderr), est.trials.to_string()]
}

fn figure_void(scenario: &Scenario, curves: &[Curve], out: &Path, run: &mut RunOutput) -> Result<(), CliError> {
    let lu = scenario.lambda_u_per_km2;
    for curve in curves {
        let channel = scenario.channel(curve)?;
        let scheme = curve.scheme();
        let vm = VoidModel::new(&channel, &scheme)?;
        let mut t = Table::new(&[
            "load (users/BS)",
            "lambda_b (km⁻²)",
            "void_prob_analytic",
            "lower_bound",
            "upper_bound",
        ]);
        for &v in &scenario.load_grid {
            let (lo, hi) = void_prob_bounds(v, vm.zeta);
            t.push(vec![num(v), num(lu / v), num(vm.void_prob(v)), num(lo), num(hi)]);
        }
        run.write(&t, out.join(format!("fig2_{}.csv", curve.label())))?;

        let mut sim = Table::new(&SIM_HEADERS);
        for &v in &scenario.sim_load_grid {
            let lambda_b = lu / v;
            let est = scenario.sim_config(lambda_b).and_then(|cfg| {
                simulate_void_fraction(&channel, &scheme, lambda_b, lu, cfg.window, cfg.trials, cfg.seed)
            });
            match est {
                Ok(est) => sim.push(sim_row(v, lambda_b, vm.void_prob(v), &est)),
                Err(e) => run.fail("fig2_sim", curve, v, e),
            }
        }
        if !sim.is_empty() {
            run.write(&sim, out.join(format!("fig2_{}_sim.csv", curve.label())))?;
        }
    }
    Ok(())
}

fn figure_cell_throughput(
    scenario: &Scenario,
    curves: &[Curve],
    out: &Path,
    run: &mut RunOutput,
) -> Result<(), CliError> {
    let lu = scenario.lambda_u_per_km2;
    let quad = scenario.quadrature()?;
    for curve in curves {
        let channel = scenario.channel(curve)?;
        let scheme = curve.scheme();
        let tc = |v: f64| NetworkScenario::from_load(lu, v).and_then(|s| avg_cell_throughput(&s, &channel, &scheme, &quad));
        let mut t = Table::new(&["load (users/BS)", "lambda_b (km⁻²)", "t_c (bits/s/Hz/km²)"]);
        for &v in &scenario.load_grid {
            match tc(v) {
                Ok(x) => t.push(vec![num(v), num(lu / v), num(x)]),
                Err(e) => run.fail("fig3", curve, v, e),
            }
        }
        run.write(&t, out.join(format!("fig3_{}.csv", curve.label())))?;

        let mut sim = Table::new(&SIM_HEADERS);
        for &v in &scenario.sim_load_grid {
            let lambda_b = lu / v;
            let res = tc(v).and_then(|a| {
                let cfg = scenario.sim_config(lambda_b)?;
                Ok((a, estimate_cell_throughput(&cfg, &channel, &scheme, lambda_b, lu)?))
            });
            match res {
                Ok((a, est)) => sim.push(sim_row(v, lambda_b, a, &est.throughput)),
                Err(e) => run.fail("fig3_sim", curve, v, e),
            }
        }
        if !sim.is_empty() {
            run.write(&sim, out.join(format!("fig3_{}_sim.csv", curve.label())))?;
        }
    }
    Ok(())
}

/// Throughput against cell load for one objective, with a per-curve argmax
/// summary. Figure 4 also carries simulated user throughput.
fn figure_load_curve(
    id: u8,
    kind: FixedPointKind,
    scenario: &Scenario,
    curves: &[Curve],
    out: &Path,
    run: &mut RunOutput,
) -> Result<(), CliError> {
    let lu = scenario.lambda_u_per_km2;
    let quad = scenario.quadrature()?;
    let target = format!("fig{id}");
    let value_header = match kind {
        FixedPointKind::UserThroughput => "t_u (bits/s/Hz/user)",
        FixedPointKind::GreenCell => "g_c (bits/Hz/J)",
        FixedPointKind::GreenUser => "g_u (bits/Hz/J/user)",
    };
    let mut summary = Table::new(&[
        "curve",
        "argmax_load (users/BS)",
        "argmax_lambda_b (km⁻²)",
        value_header,
        "grid_local_maxima",
    ]);
    for curve in curves {
        let ctx = match scenario.load_context(curve) {
            Ok(c) => c,
            Err(e) => {
                run.fail(&target, curve, f64::NAN, e);
                continue;
            }
        };
        let mut t = Table::new(&["load (users/BS)", "lambda_b (km⁻²)", "p_t (W)", "mean_power (W)", value_header]);
        let mut values = Vec::new();
        for &v in &scenario.load_grid {
            let row = NetworkScenario::from_load(lu, v).and_then(|s| {
                let vm = ctx.void_model()?;
                let budget = ctx.power().budget(&s, ctx.channel(), &vm)?;
                Ok((budget, ctx.objective(kind, v)?))
            });
            match row {
                Ok((b, x)) => {
                    values.push(x);
                    t.push(vec![num(v), num(lu / v), num(b.p_t), num(b.mean_psi), num(x)]);
                }
                Err(e) => run.fail(&target, curve, v, e),
            }
        }
        run.write(&t, out.join(format!("{target}_{}.csv", curve.label())))?;

        let peaks = (1..values.len().saturating_sub(1))
            .filter(|&i| values[i] > values[i - 1] && values[i] >= values[i + 1])
            .count();
        match maximize_direct(|v| ctx.objective(kind, v), DIRECT_BRACKET, DIRECT_TOL) {
            Ok(m) => summary.push(vec![
                curve.to_string(),
                num(m.v_opt),
                num(lu / m.v_opt),
                num(m.value),
                peaks.to_string(),
            ]),
            Err(e) => run.fail(&format!("{target}_argmax"), curve, f64::NAN, e),
        }

        if kind == FixedPointKind::UserThroughput {
            user_throughput_sim(scenario, curve, &quad, &target, out, run)?;
        }
    }
    run.write(&summary, out.join(format!("{target}_argmax.csv")))
}

fn user_throughput_sim(
    scenario: &Scenario,
    curve: &Curve,
    quad: &greencell::analytics::QuadratureRule,
    target: &str,
    out: &Path,
    run: &mut RunOutput,
) -> Result<(), CliError> {
    let lu = scenario.lambda_u_per_km2;
    let channel = scenario.channel(curve)?;
    let scheme = curve.scheme();
    let mut sim = Table::new(&SIM_HEADERS);
    for &v in &scenario.sim_load_grid {
        let lambda_b = lu / v;
        let res = NetworkScenario::from_load(lu, v).and_then(|s| {
            let a = avg_user_throughput(&s, &channel, &scheme, quad)?;
            let cfg = scenario.sim_config(lambda_b)?;
            Ok((a, estimate_user_throughput(&cfg, &channel, &scheme, lambda_b, lu)?))
        });
        match res {
            Ok((a, est)) => sim.push(sim_row(v, lambda_b, a, &est.throughput)),
            Err(e) => run.fail(&format!("{target}_sim"), curve, v, e),
        }
    }
    if !sim.is_empty() {
        run.write(&sim, out.join(format!("{target}_{}_sim.csv", curve.label())))?;
    }
    Ok(())
}

/// Optimal BS intensity against user intensity: the direct argmax and the
/// fixed point at the β calibrated for the scenario's own user intensity.
fn figure_optimal_intensity(
    id: u8,
    kind: FixedPointKind,
    scenario: &Scenario,
    curves: &[Curve],
    out: &Path,
    run: &mut RunOutput,
) -> Result<(), CliError> {
    let target = format!("fig{id}");
    let grid = &scenario.lambda_u_grid_per_km2;
    let mut by_curve: Vec<(Curve, Vec<Option<f64>>)> = Vec::new();
    for curve in curves {
        let ctx = match scenario.load_context(curve) {
            Ok(c) => c,
            Err(e) => {
                run.fail(&target, curve, f64::NAN, e);
                continue;
            }
        };
        let beta = match calibrate_beta(kind, &ctx, (scenario.beta_min, scenario.beta_max)) {
            Ok(c) => Some(c.beta),
            Err(e) => {
                run.fail(&format!("{target}_calibration"), curve, scenario.lambda_u_per_km2, e);
                None
            }
        };
        let mut t = Table::new(&[
            "lambda_u (km⁻²)",
            "lambda_b_star_direct (km⁻²)",
            "v_star_direct (users/BS)",
            "beta",
            "v_star_fixed (users/BS)",
            "lambda_b_star_fixed (km⁻²)",
        ]);
        let mut direct = Vec::new();
        for &lu in grid {
            let at = ctx.with_lambda_u(lu);
            let row = optimal_row(kind, &at, beta);
            direct.push(row.as_ref().ok().map(|r| r.0));
            match row {
                Ok((lb, v, beta, vf)) => t.push(vec![num(lu), num(lb), num(v), num(beta), num(vf), num(lu / vf)]),
                Err(e) => run.fail(&target, curve, lu, e),
            }
        }
        run.write(&t, out.join(format!("{target}_{}.csv", curve.label())))?;
        by_curve.push((*curve, direct));
    }

    let mut mrp: Vec<&(Curve, Vec<Option<f64>>)> = by_curve.iter().filter(|(c, _)| c.scheme == SchemeKind::Mrp).collect();
    mrp.sort_by(|a, b| a.0.shadow_db.total_cmp(&b.0.shadow_db));
    let labels: Vec<String> = by_curve
        .iter()
        .map(|(c, _)| format!("lambda_b_star_{} (km⁻²)", c.label()))
        .collect();
    let mut headers = vec!["lambda_u (km⁻²)"];
    headers.extend(labels.iter().map(String::as_str));
    headers.push("mrp_decreasing_in_shadowing");
    let mut summary = Table::new(&headers);
    for (i, &lu) in grid.iter().enumerate() {
        let cells: Option<Vec<f64>> = by_curve.iter().map(|(_, d)| d[i]).collect();
        let Some(cells) = cells else { continue };
        let series: Vec<f64> = mrp.iter().filter_map(|(_, d)| d[i]).collect();
        let decreasing = series.windows(2).all(|w| w[1] < w[0]);
        let mut row = vec![num(lu)];
        row.extend(cells.into_iter().map(num));
        row.push(u8::from(decreasing).to_string());
        summary.push(row);
    }
    run.write(&summary, out.join(format!("{target}_summary.csv")))
}

fn optimal_row(kind: FixedPointKind, ctx: &LoadContext, beta: Option<f64>) -> greencell::Result<(f64, f64, f64, f64)> {
    let m = maximize_direct(|v| ctx.objective(kind, v), DIRECT_BRACKET, DIRECT_TOL)?;
    let lu = ctx.lambda_u();
    let beta = beta.ok_or(greencell::Error::Unsupported("fixed point without a calibrated beta"))?;
    let problem = FixedPointProblem::new(kind, beta, ctx.clone())?;
    let fixed = solve_fixed_point(&problem, FIXED_POINT_TOL, FIXED_POINT_MAX_ITER)?;
    Ok((lu / m.v_opt, m.v_opt, beta, fixed.v_star))
}
