//! Closed-form and quadrature formulas: void probability, user-count
//! distributions, coverage and average cell/user throughput.

use std::f64::consts::{LN_2, PI, SQRT_2};

use statrs::function::gamma::ln_gamma;

use crate::channel::{AssociationScheme, ChannelModel, RHO_HAT};
use crate::error::{check, Error, Result};
use crate::integrate::{adaptive_breakpoints, integrate, integrate_half_line, kronrod_rule, Tolerance};

use std::collections::HashMap;

/// User and base-station intensities, both per km².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkScenario {
    lambda_u: f64,
    lambda_b: f64,
}

impl NetworkScenario {
    pub fn new(lambda_u: f64, lambda_b: f64) -> Result<Self> {
        check(lambda_u > 0.0 && lambda_u.is_finite(), "lambda_u", lambda_u, "user intensity must be positive")?;
        check(lambda_b > 0.0 && lambda_b.is_finite(), "lambda_b", lambda_b, "BS intensity must be positive")?;
        Ok(Self { lambda_u, lambda_b })
    }

    /// Scenario with the given user intensity and cell load `v = λ_U/λ_B`.
    pub fn from_load(lambda_u: f64, v: f64) -> Result<Self> {
        check(v > 0.0, "v", v, "cell load must be positive")?;
        Self::new(lambda_u, lambda_u / v)
    }

    pub fn lambda_u(&self) -> f64 {
        self.lambda_u
    }

    pub fn lambda_b(&self) -> f64 {
        self.lambda_b
    }

    /// Cell load `v = λ_U/λ_B`.
    pub fn load(&self) -> f64 {
        self.lambda_u / self.lambda_b
    }
}

/// Gauss–Hermite rule whose weights are normalized to sum to one, so that
/// `Σ ω_i f(√2σx_i + μ)` approximates `E[f(Z)]` for `Z ~ N(μ, σ²)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `E[f(Z)]` for `Z ~ N(mu, sigma²)`.
    pub fn expect_normal<F: FnMut(f64) -> f64>(&self, mu: f64, sigma: f64, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(SQRT_2 * sigma * x + mu))
            .sum()
    }
}

/// Orthonormal-scaled Hermite values `(h̃_n(x), h̃_{n-1}(x))` with
/// `h̃_k = H_k / √(2^k k!)`.
fn hermite_scaled(n: usize, x: f64) -> (f64, f64) {
    let mut prev = 0.0;
    let mut cur = 1.0;
    for k in 0..n {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

/// Gauss–Hermite rule of order `n` (1 ≤ n ≤ 64).
///
/// Nodes are the roots of the physicists' `H_n`, found by Newton iteration.
/// The weight `2^{n-1} n! / (n² H_{n-1}(x_i)²)` is evaluated in the scaled
/// form `1 / (n h̃_{n-1}(x_i)²)`, which is the same quantity without overflow.
pub fn gauss_hermite(n: usize) -> Result<QuadratureRule> {
    if !(1..=64).contains(&n) {
        return Err(Error::QuadratureOrder(n));
    }
    let nf = n as f64;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let mut z = 0.0;
    for i in 0..n.div_ceil(2) {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * nodes[0],
            3 => 1.91 * z - 0.91 * nodes[1],
            _ => 2.0 * z - nodes[i - 2],
        };
        for _ in 0..200 {
            let (hn, hn1) = hermite_scaled(n, z);
            let dz = hn / ((2.0 * nf).sqrt() * hn1);
            z -= dz;
            if dz.abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        let mirror = n - 1 - i;
        if mirror == i {
            z = 0.0;
        }
        let (_, hn1) = hermite_scaled(n, z);
        let w = 1.0 / (nf * hn1 * hn1);
        nodes[i] = z;
        nodes[mirror] = -z;
        weights[i] = w;
        weights[mirror] = w;
    }
    nodes.reverse();
    weights.reverse();
    Ok(QuadratureRule { nodes, weights })
}

/// Constants of the void-probability model for one association scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VoidModel {
    pub zeta: f64,
    pub rho: f64,
    pub rho_hat: f64,
}

impl VoidModel {
    pub fn new(channel: &ChannelModel, scheme: &AssociationScheme) -> Result<Self> {
        let zeta = scheme.zeta(channel)?;
        Ok(Self {
            zeta,
            rho: RHO_HAT * zeta,
            rho_hat: RHO_HAT,
        })
    }

    pub fn void_prob(&self, v: f64) -> f64 {
        void_prob(v, self.rho)
    }
}

/// `p_∅ = (1 + v/ρ)^{-ρ}`.
pub fn void_prob(v: f64, rho: f64) -> f64 {
    (-rho * (v / rho).ln_1p()).exp()
}

/// `(e^{-v}, (1 + v/ζ)^{-ζ})`.
pub fn void_prob_bounds(v: f64, zeta: f64) -> (f64, f64) {
    ((-v).exp(), void_prob(v, zeta))
}

fn neg_binomial_pmf(n: u64, mean: f64, shape: f64) -> f64 {
    if mean == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let nf = n as f64;
    let ln = ln_gamma(nf + shape) - ln_gamma(shape) - ln_gamma(nf + 1.0) + nf * (mean / (mean + shape)).ln()
        - shape * (mean / shape).ln_1p();
    ln.exp()
}

/// Number of users in a Voronoi cell of Gamma(ρ̂, ρ̂) normalized area:
/// negative binomial with mean `v` and shape `ρ̂`.
pub fn user_count_pmf(n: u64, v: f64, rho_hat: f64) -> f64 {
    neg_binomial_pmf(n, v, rho_hat)
}

/// Number of users in a non-void cell.
///
/// Users of a non-void cell follow a negative binomial with shape `ρ` and the
/// inflated load `v' = v/(1 - p_∅)`, conditioned on at least one user. The
/// normalizing prefactor is `p'/(1 - p')` with `p' = (1 + v'/ρ)^{-ρ}`.
pub fn nonvoid_user_count_pmf(n: u64, v: f64, rho: f64) -> Result<f64> {
    check(n >= 1, "n", n as f64, "a non-void cell has at least one user")?;
    check(v > 0.0, "v", v, "cell load must be positive")?;
    let v_inflated = v / (1.0 - void_prob(v, rho));
    let p0 = void_prob(v_inflated, rho);
    Ok(neg_binomial_pmf(n, v_inflated, rho) / (1.0 - p0))
}

/// `v / (1 - p_∅)²`.
pub fn mean_users_nonvoid(v: f64, rho: f64) -> Result<f64> {
    check(v > 0.0, "v", v, "cell load must be positive")?;
    let q = 1.0 - void_prob(v, rho);
    Ok(v / (q * q))
}

/// `∫_x^∞ dτ / (1 + τ^a)` for `a > 1`.
fn tail_integral(x: f64, a: f64) -> f64 {
    let total = (PI / a) / (PI / a).sin();
    if x <= 0.0 {
        return total;
    }
    if x <= 0.5 {
        // ∫₀^x = Σ (-1)^k x^{ak+1}/(ak+1)
        let xa = x.powf(a);
        let mut term = x;
        let mut sum = 0.0;
        for k in 0..400 {
            let t = term / (a * k as f64 + 1.0);
            sum += if k % 2 == 0 { t } else { -t };
            if t < 1e-17 * sum.abs() {
                break;
            }
            term *= xa;
        }
        return total - sum;
    }
    if x >= 2.0 {
        // Σ_{k≥1} (-1)^{k+1} x^{1-ak}/(ak-1)
        let xa = x.powf(-a);
        let mut term = x * xa;
        let mut sum = 0.0;
        for k in 1..400 {
            let t = term / (a * k as f64 - 1.0);
            sum += if k % 2 == 1 { t } else { -t };
            if t < 1e-17 * sum.abs() {
                break;
            }
            term *= xa;
        }
        return sum;
    }
    let head = integrate(|t| 1.0 / (1.0 + t.powf(a)), x, 2.0, Tolerance::new(1e-14, 1e-13))
        .map(|e| e.value)
        .unwrap_or(f64::NAN);
    head + tail_integral(2.0, a)
}

const ELL_SHADOW_ORDER: usize = 48;

/// `ℓ(s, φ) = s^{2/α}·{E[H^{2/α}]Γ(1−2/α) − ∫₀^{φ s^{−2/α}} [1 − L_H(t^{−α/2})] dt}`.
///
/// With `L_H(u) = E_S[1/(1+uS)]`, substituting `t = S^{2/α}τ` inside the
/// shadowing expectation gives `s^{2/α}·E_S[S^{2/α}·G(φ(sS)^{−2/α})]` with
/// `G(x) = ∫_x^∞ dτ/(1+τ^{α/2})`; the expectation over `S` uses a 48-point
/// Gauss–Hermite rule.
pub fn ell(s: f64, phi: f64, channel: &ChannelModel) -> Result<f64> {
    check(s > 0.0 && s.is_finite(), "s", s, "SIR threshold must be positive")?;
    check(phi >= 0.0, "phi", phi, "must be non-negative")?;
    let d = channel.delta();
    let a = channel.alpha() / 2.0;
    let scaled = |shadow: f64| shadow.powf(d) * tail_integral(phi * (s * shadow).powf(-d), a);
    let inner = if channel.sigma_s() == 0.0 {
        scaled(channel.mu_s().exp())
    } else {
        shadow_rule().expect_normal(channel.mu_s(), channel.sigma_s(), |z| scaled(z.exp()))
    };
    Ok(s.powf(d) * inner)
}

fn shadow_rule() -> &'static QuadratureRule {
    use std::sync::OnceLock;
    static RULE: OnceLock<QuadratureRule> = OnceLock::new();
    RULE.get_or_init(|| gauss_hermite(ELL_SHADOW_ORDER).expect("order within range"))
}

/// Coverage `P[SIR ≥ s]` in the Jensen-bound form `1/(1 + (1−p_∅)ℓ(s,ζ)/ζ)`.
pub fn coverage_prob(
    s: f64,
    scenario: &NetworkScenario,
    channel: &ChannelModel,
    scheme: &AssociationScheme,
) -> Result<f64> {
    let vm = VoidModel::new(channel, scheme)?;
    let p = vm.void_prob(scenario.load());
    Ok(1.0 / (1.0 + (1.0 - p) * ell(s, vm.zeta, channel)? / vm.zeta))
}

/// Coverage `E[G²/(G² + (1−p_∅)ℓ(s,G²))]` with `G² = (WH)^{−2/α}E[(WH)^{2/α}]`.
///
/// Available for nearest-BS and max-received-power association, where `WH`
/// is either constant or the channel gain itself.
pub fn coverage_prob_exact(
    s: f64,
    scenario: &NetworkScenario,
    channel: &ChannelModel,
    scheme: &AssociationScheme,
) -> Result<f64> {
    let vm = VoidModel::new(channel, scheme)?;
    let q = 1.0 - vm.void_prob(scenario.load());
    let d = channel.delta();
    let given = |g2: f64| -> Result<f64> { Ok(g2 / (g2 + q * ell(s, g2, channel)?)) };
    match scheme {
        AssociationScheme::NearestBs => given(1.0),
        AssociationScheme::MaxReceivedPower => {
            let m = channel.frac_moment_h(d)?;
            let rule = gauss_hermite(24)?;
            let mut failure = None;
            let mut over_x = |shadow: f64| {
                integrate_half_line(
                    |x| {
                        let h = x * shadow;
                        if h <= 0.0 {
                            return 0.0;
                        }
                        match given(h.powf(-d) * m) {
                            Ok(c) => (-x).exp() * c,
                            Err(e) => {
                                failure = Some(e);
                                0.0
                            }
                        }
                    },
                    Tolerance::new(1e-8, 1e-8),
                )
                .map(|e| e.value)
            };
            let mut total = 0.0;
            if channel.sigma_s() == 0.0 {
                total = over_x(channel.mu_s().exp())?;
            } else {
                for (&x, &w) in rule.nodes().iter().zip(rule.weights()) {
                    total += w * over_x((SQRT_2 * channel.sigma_s() * x + channel.mu_s()).exp())?;
                }
            }
            match failure {
                Some(e) => Err(e),
                None => Ok(total),
            }
        }
        AssociationScheme::GeneralWeighted(_) => Err(Error::Unsupported("exact coverage")),
    }
}

/// `E[(s + e^{−Z})^{−1}]` over the log-shadowing `Z ~ N(μ_s, σ_s²)` using `quad`.
pub fn shadow_rate_factor(s: f64, channel: &ChannelModel, quad: &QuadratureRule) -> f64 {
    quad.expect_normal(channel.mu_s(), channel.sigma_s(), |z| 1.0 / (s + (-z).exp()))
}

/// Maps `u ∈ [0, 1)` to `s = (u/(1−u))^m` and returns `(s, ds/du)`.
///
/// With `m = α/2` the throughput integrand, which decays like `s^{−1−2/α}`,
/// stays bounded as `u → 1`.
fn tail_map(u: f64, m: f64) -> (f64, f64) {
    let w = 1.0 - u;
    let t = u / w;
    let s = t.powf(m);
    (s, m * s / t / (w * w))
}

fn tail_exponent(channel: &ChannelModel) -> f64 {
    channel.alpha() / 2.0
}

/// `∫₀^∞ E[(s+e^{−Z})^{−1}] / (1 + (1−p_∅)ℓ(s,ζ)/ζ) ds`, shared by the
/// cell and user throughput formulas.
pub fn throughput_integral(
    p_void: f64,
    zeta: f64,
    channel: &ChannelModel,
    quad: &QuadratureRule,
) -> Result<f64> {
    let q = 1.0 - p_void;
    let m = tail_exponent(channel);
    let mut failure = None;
    let est = integrate(
        |u| {
            if u <= 0.0 || u >= 1.0 {
                return 0.0;
            }
            let (s, jac) = tail_map(u, m);
            if !jac.is_finite() {
                return 0.0;
            }
            match ell(s, zeta, channel) {
                Ok(l) => jac * shadow_rate_factor(s, channel, quad) / (1.0 + q * l / zeta),
                Err(e) => {
                    failure = Some(e);
                    0.0
                }
            }
        },
        0.0,
        1.0,
        Tolerance::default(),
    )?;
    match failure {
        Some(e) => Err(e),
        None => Ok(est.value),
    }
}

/// Active fractions `1−p_∅` whose adaptive partitions are merged into the
/// fixed rule of [`ThroughputKernel`].
const KERNEL_ACTIVE: [f64; 5] = [1.0, 1e-1, 1e-2, 1e-3, 1e-4];

/// The throughput integral as a fixed rule in `s`.
///
/// `ℓ(s,ζ)` and the shadowing factor do not depend on the load, so they are
/// tabulated once on a rule refined for several active fractions. Evaluating
/// the integral at a new void probability is then a weighted sum.
#[derive(Debug, Clone)]
pub struct ThroughputKernel {
    zeta: f64,
    channel: ChannelModel,
    quad: QuadratureRule,
    weighted_rate: Vec<f64>,
    ell_ratio: Vec<f64>,
}

impl ThroughputKernel {
    pub fn new(zeta: f64, channel: &ChannelModel, quad: &QuadratureRule) -> Result<Self> {
        let m = tail_exponent(channel);
        let mut cache: HashMap<u64, (f64, f64)> = HashMap::new();
        let mut failure = None;
        let mut tabulate = |u: f64| -> (f64, f64) {
            if u <= 0.0 || u >= 1.0 {
                return (0.0, 0.0);
            }
            *cache.entry(u.to_bits()).or_insert_with(|| {
                let (s, jac) = tail_map(u, m);
                if !jac.is_finite() {
                    return (0.0, 0.0);
                }
                match ell(s, zeta, channel) {
                    Ok(l) => (jac * shadow_rate_factor(s, channel, quad), l / zeta),
                    Err(e) => {
                        failure = Some(e);
                        (0.0, 0.0)
                    }
                }
            })
        };
        let mut breaks = Vec::new();
        for q in KERNEL_ACTIVE {
            let integrand = |u: f64| {
                let (rate, l) = tabulate(u);
                rate / (1.0 + q * l)
            };
            breaks.extend(adaptive_breakpoints(integrand, 0.0, 1.0, Tolerance::default())?);
        }
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
        let (nodes, weights) = kronrod_rule(&breaks);
        let mut weighted_rate = Vec::with_capacity(nodes.len());
        let mut ell_ratio = Vec::with_capacity(nodes.len());
        for (&u, &w) in nodes.iter().zip(&weights) {
            let (rate, l) = tabulate(u);
            weighted_rate.push(w * rate);
            ell_ratio.push(l);
        }
        if let Some(e) = failure {
            return Err(e);
        }
        Ok(Self {
            zeta,
            channel: *channel,
            quad: quad.clone(),
            weighted_rate,
            ell_ratio,
        })
    }

    pub fn nodes(&self) -> usize {
        self.weighted_rate.len()
    }

    /// Same value as [`throughput_integral`]. Void probabilities closer to 1
    /// than the tabulated range fall back to adaptive integration.
    pub fn integral(&self, p_void: f64) -> Result<f64> {
        let q = 1.0 - p_void;
        if q < KERNEL_ACTIVE[KERNEL_ACTIVE.len() - 1] {
            return throughput_integral(p_void, self.zeta, &self.channel, &self.quad);
        }
        Ok(self
            .weighted_rate
            .iter()
            .zip(&self.ell_ratio)
            .map(|(&w, &l)| w / (1.0 + q * l))
            .sum())
    }
}

fn check_quad(quad: &QuadratureRule) -> Result<()> {
    check(quad.order() >= 4, "quad_order", quad.order() as f64, "throughput needs a Gauss-Hermite order of at least 4")
}

/// Average cell throughput in bits/s/Hz per km².
pub fn avg_cell_throughput(
    scenario: &NetworkScenario,
    channel: &ChannelModel,
    scheme: &AssociationScheme,
    quad: &QuadratureRule,
) -> Result<f64> {
    check_quad(quad)?;
    let vm = VoidModel::new(channel, scheme)?;
    let p = vm.void_prob(scenario.load());
    let integral = throughput_integral(p, vm.zeta, channel, quad)?;
    Ok(cell_throughput_from_integral(scenario, &vm, integral))
}

pub(crate) fn cell_throughput_from_integral(scenario: &NetworkScenario, vm: &VoidModel, integral: f64) -> f64 {
    let p = vm.void_prob(scenario.load());
    scenario.lambda_b() * (1.0 - p) / (LN_2 * (1.0 - 1.0 / vm.rho)) * integral
}

pub(crate) fn user_throughput_from_integral(scenario: &NetworkScenario, vm: &VoidModel, integral: f64) -> f64 {
    let q = 1.0 - vm.void_prob(scenario.load());
    scenario.lambda_b() * q * q / (scenario.lambda_u() * LN_2) * integral
}

/// Average user throughput in bits/s/Hz per user, via
/// `T_U = (ρ−1)(1−p_∅)T_C/(ρλ_U)`.
pub fn avg_user_throughput(
    scenario: &NetworkScenario,
    channel: &ChannelModel,
    scheme: &AssociationScheme,
    quad: &QuadratureRule,
) -> Result<f64> {
    let tc = avg_cell_throughput(scenario, channel, scheme, quad)?;
    let vm = VoidModel::new(channel, scheme)?;
    let p = vm.void_prob(scenario.load());
    Ok((vm.rho - 1.0) * (1.0 - p) * tc / (vm.rho * scenario.lambda_u()))
}

/// Average user throughput from the direct form
/// `λ_B(1−p_∅)²/(λ_U ln 2)·∫…ds`.
pub fn avg_user_throughput_direct(
    scenario: &NetworkScenario,
    channel: &ChannelModel,
    scheme: &AssociationScheme,
    quad: &QuadratureRule,
) -> Result<f64> {
    check_quad(quad)?;
    let vm = VoidModel::new(channel, scheme)?;
    let p = vm.void_prob(scenario.load());
    let integral = throughput_integral(p, vm.zeta, channel, quad)?;
    Ok(user_throughput_from_integral(scenario, &vm, integral))
}
