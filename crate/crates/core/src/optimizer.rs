//! Optimal cell load: fixed-point maps, a direct maximizer used as the
//! reference answer, calibration of the map exponent β, and deployment sweeps.

use rayon::prelude::*;
use statrs::function::gamma::gamma;

use std::sync::Arc;

use crate::analytics::{
    user_throughput_from_integral, void_prob, NetworkScenario, QuadratureRule, ThroughputKernel, VoidModel,
};
use crate::channel::{AssociationScheme, ChannelModel};
use crate::error::{check, Error, Result};
use crate::powergreen::{green_cell_from_integral, green_user_from_integral, PowerModel, M2_PER_KM2};

/// Default search interval for positive fixed points, in cell-load units.
pub const LOAD_BRACKET: (f64, f64) = (1e-4, 100.0);

const SCAN_POINTS: usize = 400;

/// Which throughput the optimal load maximizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FixedPointKind {
    UserThroughput,
    GreenCell,
    GreenUser,
}

impl FixedPointKind {
    pub const ALL: [Self; 3] = [Self::UserThroughput, Self::GreenCell, Self::GreenUser];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::UserThroughput => "user_throughput",
            Self::GreenCell => "green_cell",
            Self::GreenUser => "green_user",
        }
    }
}

impl std::str::FromStr for FixedPointKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown kind `{s}` (expected user_throughput, green_cell or green_user)"))
    }
}

/// Everything needed to evaluate a throughput objective as a function of the
/// cell load at fixed user intensity (per km²).
///
/// Construction tabulates the load-independent part of the throughput
/// integral, so repeated objective evaluations are cheap.
#[derive(Debug, Clone)]
pub struct LoadContext {
    channel: ChannelModel,
    scheme: AssociationScheme,
    lambda_u: f64,
    power: PowerModel,
    vm: VoidModel,
    kernel: Arc<ThroughputKernel>,
}

impl LoadContext {
    pub fn new(
        channel: ChannelModel,
        scheme: AssociationScheme,
        lambda_u: f64,
        power: PowerModel,
        quad: &QuadratureRule,
    ) -> Result<Self> {
        check(lambda_u > 0.0 && lambda_u.is_finite(), "lambda_u", lambda_u, "must be positive")?;
        check(quad.order() >= 4, "quad_order", quad.order() as f64, "throughput needs a Gauss-Hermite order of at least 4")?;
        let vm = VoidModel::new(&channel, &scheme)?;
        let kernel = Arc::new(ThroughputKernel::new(vm.zeta, &channel, quad)?);
        Ok(Self {
            channel,
            scheme,
            lambda_u,
            power,
            vm,
            kernel,
        })
    }

    pub fn channel(&self) -> &ChannelModel {
        &self.channel
    }

    pub fn scheme(&self) -> &AssociationScheme {
        &self.scheme
    }

    /// Users per km².
    pub fn lambda_u(&self) -> f64 {
        self.lambda_u
    }

    pub fn power(&self) -> &PowerModel {
        &self.power
    }

    pub fn void_model(&self) -> Result<VoidModel> {
        Ok(self.vm)
    }

    pub fn with_lambda_u(&self, lambda_u: f64) -> Self {
        Self {
            lambda_u,
            ..self.clone()
        }
    }

    /// `T_U`, `G_C` or `G_U` at `λ_B = λ_U / v`.
    pub fn objective(&self, kind: FixedPointKind, v: f64) -> Result<f64> {
        let scenario = NetworkScenario::from_load(self.lambda_u, v)?;
        let vm = self.vm;
        let integral = self.kernel.integral(vm.void_prob(v))?;
        match kind {
            FixedPointKind::UserThroughput => Ok(user_throughput_from_integral(&scenario, &vm, integral)),
            FixedPointKind::GreenCell => green_cell_from_integral(&scenario, &self.channel, &vm, &self.power, integral),
            FixedPointKind::GreenUser => green_user_from_integral(&scenario, &self.channel, &vm, &self.power, integral),
        }
    }
}

/// `L(v) = [1 − (1+v/ρ)^{−ρ}]^{1/β}`.
pub fn map_l(v: f64, rho: f64, beta: f64) -> f64 {
    (1.0 - void_prob(v, rho)).powf(1.0 / beta)
}

/// Inputs of the green-throughput load maps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenMapParams {
    pub zeta: f64,
    pub rho: f64,
    pub alpha: f64,
    pub beta: f64,
    /// User intensity per km².
    pub lambda_u: f64,
    pub power: PowerModel,
}

fn green_map(v: f64, p: &GreenMapParams, k: f64, e: f64) -> Result<f64> {
    let pw = &p.power;
    if pw.p_on() <= pw.p_off() {
        return Err(Error::NoGreenGap {
            p_on: pw.p_on(),
            p_off: pw.p_off(),
        });
    }
    check(pw.delta() > 0.0, "delta", pw.delta(), "the green maps need a positive transmit scaling")?;
    let active = 1.0 - void_prob(v, p.rho);
    let gap = (pw.p_on() - pw.p_off()) / (pw.delta() * pw.p_min() * gamma(1.0 + 2.0 / p.alpha));
    let inner = gap * (active.powf(-k / p.beta) - 1.0);
    Ok(std::f64::consts::PI * p.zeta * (p.lambda_u / M2_PER_KM2) * inner.max(0.0).powf(e))
}

/// `𝕃_C(v) = πζλ_U·[(P_ON−P_OFF)/(δP_minΓ(1+2/α))·((1−p_∅)^{−1/β} − 1)]^{2/α}`.
pub fn map_lc(v: f64, p: &GreenMapParams) -> Result<f64> {
    green_map(v, p, 1.0, 2.0 / p.alpha)
}

/// `𝕃_U(v) = πζλ_U·[(P_ON−P_OFF)/(δP_minΓ(1+2/α))·((1−p_∅)^{−2/β} − 1)]^{2/(α+β)}`.
pub fn map_lu(v: f64, p: &GreenMapParams) -> Result<f64> {
    green_map(v, p, 2.0, 2.0 / (p.alpha + p.beta))
}

/// A fixed-point characterization of the optimal cell load.
#[derive(Debug, Clone)]
pub struct FixedPointProblem {
    kind: FixedPointKind,
    beta: f64,
    context: LoadContext,
    vm: VoidModel,
}

impl FixedPointProblem {
    pub fn new(kind: FixedPointKind, beta: f64, context: LoadContext) -> Result<Self> {
        check(beta > 1.0 && beta.is_finite(), "beta", beta, "must exceed 1")?;
        let vm = context.void_model()?;
        Ok(Self { kind, beta, context, vm })
    }

    pub fn kind(&self) -> FixedPointKind {
        self.kind
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn context(&self) -> &LoadContext {
        &self.context
    }

    pub fn green_params(&self) -> GreenMapParams {
        GreenMapParams {
            zeta: self.vm.zeta,
            rho: self.vm.rho,
            alpha: self.context.channel.alpha(),
            beta: self.beta,
            lambda_u: self.context.lambda_u,
            power: self.context.power,
        }
    }

    pub fn map(&self, v: f64) -> Result<f64> {
        match self.kind {
            FixedPointKind::UserThroughput => Ok(map_l(v, self.vm.rho, self.beta)),
            FixedPointKind::GreenCell => map_lc(v, &self.green_params()),
            FixedPointKind::GreenUser => map_lu(v, &self.green_params()),
        }
    }
}

/// Positive root of `map(v) = v` with its diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPoint {
    pub v_star: f64,
    pub iterations: usize,
    pub residual: f64,
}

/// Finds the first downward crossing of `map(v) − v` on a log grid over
/// `bracket`, then bisects until `|map(v) − v| < tol` or the bracket is a few
/// ulps wide, keeping the smallest residual seen. The left end of the
/// bracket is positive, which keeps the trivial root `v = 0` out of reach.
pub fn find_positive_fixed_point<F>(map: F, bracket: (f64, f64), tol: f64, max_iter: usize) -> Result<FixedPoint>
where
    F: Fn(f64) -> Result<f64>,
{
    check(tol > 0.0, "tol", tol, "must be positive")?;
    let (lo, hi) = bracket;
    check(lo > 0.0 && hi > lo, "bracket", lo, "needs 0 < lo < hi")?;
    let g = |v: f64| -> Result<f64> { Ok(map(v)? - v) };

    let ratio = (hi / lo).powf(1.0 / (SCAN_POINTS - 1) as f64);
    let mut a = lo;
    let mut ga = g(a)?;
    if ga == 0.0 {
        return Ok(FixedPoint { v_star: a, iterations: 0, residual: 0.0 });
    }
    let mut found = None;
    for i in 1..SCAN_POINTS {
        let b = if i == SCAN_POINTS - 1 { hi } else { lo * ratio.powi(i as i32) };
        let gb = g(b)?;
        if ga > 0.0 && gb <= 0.0 {
            found = Some((a, b, gb));
            break;
        }
        a = b;
        ga = gb;
    }
    let Some((mut a, mut b, gb)) = found else {
        return Err(Error::NoInteriorOptimum { lo, hi });
    };
    if gb.abs() < tol {
        return Ok(FixedPoint { v_star: b, iterations: 0, residual: gb.abs() });
    }
    let mut best = (b, gb.abs());
    for it in 1..=max_iter {
        let m = 0.5 * (a + b);
        let gm = g(m)?;
        if gm.abs() < best.1 {
            best = (m, gm.abs());
        }
        if gm.abs() < tol {
            return Ok(FixedPoint { v_star: m, iterations: it, residual: gm.abs() });
        }
        if gm > 0.0 {
            a = m;
        } else {
            b = m;
        }
        if b - a <= 2.0 * f64::EPSILON * m {
            return Ok(FixedPoint { v_star: best.0, iterations: it, residual: best.1 });
        }
    }
    Err(Error::NonConvergence {
        iterations: max_iter,
        residual: best.1,
    })
}

/// Solution of a fixed-point problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptResult {
    pub v_star: f64,
    /// BS/km².
    pub lambda_b_star: f64,
    pub objective_at_star: f64,
    pub iterations: usize,
    pub residual: f64,
}

pub fn solve_fixed_point(problem: &FixedPointProblem, tol: f64, max_iter: usize) -> Result<OptResult> {
    let fp = find_positive_fixed_point(|v| problem.map(v), LOAD_BRACKET, tol, max_iter)?;
    let ctx = problem.context();
    Ok(OptResult {
        v_star: fp.v_star,
        lambda_b_star: ctx.lambda_u / fp.v_star,
        objective_at_star: ctx.objective(problem.kind(), fp.v_star)?,
        iterations: fp.iterations,
        residual: fp.residual,
    })
}

/// Plain iteration `v ← map(v)` from `v0`, for cross-checking the bisection.
pub fn iterate_fixed_point<F>(map: F, v0: f64, tol: f64, max_iter: usize) -> Result<FixedPoint>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut v = v0;
    for it in 1..=max_iter {
        let next = map(v)?;
        if (next - v).abs() < tol {
            return Ok(FixedPoint {
                v_star: next,
                iterations: it,
                residual: (map(next)? - next).abs(),
            });
        }
        v = next;
    }
    Err(Error::NonConvergence {
        iterations: max_iter,
        residual: (map(v)? - v).abs(),
    })
}

/// Argmax of a scalar objective.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectMax {
    pub v_opt: f64,
    pub value: f64,
}

const PRESCAN_POINTS: usize = 64;
const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section maximization on `bracket` after a log-spaced pre-scan that
/// rejects objectives with more than one interior local maximum or with the
/// maximum at an end of the bracket.
pub fn maximize_direct<F>(objective: F, bracket: (f64, f64), tol: f64) -> Result<DirectMax>
where
    F: Fn(f64) -> Result<f64>,
{
    let (lo, hi) = bracket;
    check(lo > 0.0 && hi > lo, "bracket", lo, "needs 0 < lo < hi")?;
    check(tol > 0.0, "tol", tol, "must be positive")?;
    let ratio = (hi / lo).powf(1.0 / (PRESCAN_POINTS - 1) as f64);
    let grid: Vec<f64> = (0..PRESCAN_POINTS)
        .map(|i| if i == PRESCAN_POINTS - 1 { hi } else { lo * ratio.powi(i as i32) })
        .collect();
    let values = grid.iter().map(|&v| objective(v)).collect::<Result<Vec<_>>>()?;
    let peaks: Vec<usize> = (1..PRESCAN_POINTS - 1)
        .filter(|&i| values[i] > values[i - 1] && values[i] >= values[i + 1])
        .collect();
    match peaks.len() {
        0 => return Err(Error::NoInteriorOptimum { lo, hi }),
        1 => {}
        _ => {
            return Err(Error::MultiModal {
                peaks: peaks.iter().map(|&i| grid[i]).collect(),
            })
        }
    }
    let k = peaks[0];
    let (mut a, mut b) = (grid[k - 1], grid[k + 1]);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = objective(c)?;
    let mut fd = objective(d)?;
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = objective(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = objective(d)?;
        }
    }
    let v_opt = 0.5 * (a + b);
    Ok(DirectMax {
        v_opt,
        value: objective(v_opt)?,
    })
}

/// Bracket and tolerance used when the direct maximizer serves as reference.
pub const DIRECT_BRACKET: (f64, f64) = (1e-3, 100.0);
pub const DIRECT_TOL: f64 = 1e-7;
pub const FIXED_POINT_TOL: f64 = 1e-12;
pub const FIXED_POINT_MAX_ITER: usize = 500;

/// Reported when no β in the search range brings the fixed point within 5%
/// of the direct argmax.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationWarning {
    pub best_beta: f64,
    pub rel_gap: f64,
}

/// Outcome of [`calibrate_beta`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Calibration {
    pub beta: f64,
    pub v_fixed: f64,
    pub v_direct: f64,
    pub objective_direct: f64,
    pub rel_gap: f64,
    pub warning: Option<CalibrationWarning>,
}

const BETA_GRID: usize = 80;

/// Chooses β so that the fixed point of the `kind` map lands on the direct
/// argmax of the corresponding objective.
pub fn calibrate_beta(kind: FixedPointKind, context: &LoadContext, search_range: (f64, f64)) -> Result<Calibration> {
    let (lo, hi) = search_range;
    check(lo >= 1.0 && hi > lo && hi <= 20.0, "search_range", lo, "must lie in (1, 20]")?;
    let direct = maximize_direct(|v| context.objective(kind, v), DIRECT_BRACKET, DIRECT_TOL)?;
    let target = direct.v_opt;
    let fixed = |beta: f64| -> Option<f64> {
        let problem = FixedPointProblem::new(kind, beta, context.clone()).ok()?;
        find_positive_fixed_point(|v| problem.map(v), LOAD_BRACKET, FIXED_POINT_TOL, FIXED_POINT_MAX_ITER)
            .ok()
            .map(|fp| fp.v_star)
    };

    let betas: Vec<f64> = (1..=BETA_GRID)
        .map(|i| lo + (hi - lo) * i as f64 / BETA_GRID as f64)
        .collect();
    let gaps: Vec<Option<f64>> = betas.iter().map(|&b| fixed(b).map(|v| v - target)).collect();

    let mut best: Option<(f64, f64)> = None;
    for (&b, g) in betas.iter().zip(&gaps) {
        if let Some(g) = g {
            if best.is_none_or(|(_, bg)| g.abs() < bg.abs()) {
                best = Some((b, *g));
            }
        }
    }
    for i in 0..BETA_GRID - 1 {
        if let (Some(ga), Some(gb)) = (gaps[i], gaps[i + 1]) {
            if ga.signum() != gb.signum() {
                let (mut a, mut b, ga0) = (betas[i], betas[i + 1], ga);
                for _ in 0..60 {
                    let m = 0.5 * (a + b);
                    match fixed(m).map(|v| v - target) {
                        Some(gm) if gm.signum() == ga0.signum() => a = m,
                        Some(_) => b = m,
                        None => break,
                    }
                }
                let m = 0.5 * (a + b);
                if let Some(gm) = fixed(m).map(|v| v - target) {
                    if best.is_none_or(|(_, bg)| gm.abs() < bg.abs()) {
                        best = Some((m, gm));
                    }
                }
                break;
            }
        }
    }
    let Some((beta, gap)) = best else {
        return Err(Error::NoInteriorOptimum {
            lo: LOAD_BRACKET.0,
            hi: LOAD_BRACKET.1,
        });
    };
    let rel_gap = gap.abs() / target;
    let warning = (rel_gap > 0.05).then(|| {
        log::warn!(
            "{}: best β = {beta} leaves the fixed point {:.1}% away from the direct argmax",
            kind.as_str(),
            100.0 * rel_gap
        );
        CalibrationWarning { best_beta: beta, rel_gap }
    });
    Ok(Calibration {
        beta,
        v_fixed: target + gap,
        v_direct: target,
        objective_direct: direct.value,
        rel_gap,
        warning,
    })
}

/// One row of [`sweep_optimal_intensity`].
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub lambda_u: f64,
    pub outcome: std::result::Result<OptResult, Error>,
}

/// Optimal BS intensity for each user intensity in the grid at fixed β.
pub fn sweep_optimal_intensity(
    lambda_u_grid: &[f64],
    kind: FixedPointKind,
    context: &LoadContext,
    beta: f64,
) -> Result<Vec<SweepRow>> {
    check(!lambda_u_grid.is_empty(), "lambda_u_grid", 0.0, "must not be empty")?;
    Ok(lambda_u_grid
        .par_iter()
        .map(|&lambda_u| {
            let outcome = FixedPointProblem::new(kind, beta, context.with_lambda_u(lambda_u))
                .and_then(|p| solve_fixed_point(&p, FIXED_POINT_TOL, FIXED_POINT_MAX_ITER));
            SweepRow { lambda_u, outcome }
        })
        .collect())
}
