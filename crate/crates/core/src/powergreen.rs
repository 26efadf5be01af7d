//! Two-mode base-station power model and green (per-joule) throughput.

use std::f64::consts::PI;

use statrs::function::gamma::gamma;

use crate::analytics::{
    cell_throughput_from_integral, throughput_integral, user_throughput_from_integral, NetworkScenario, QuadratureRule,
    VoidModel,
};
use crate::channel::{AssociationScheme, ChannelModel};
use crate::error::{check, Result};

/// m² per km².
pub const M2_PER_KM2: f64 = 1e6;

/// Converts a power level in dBm to watts.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0) * 1e-3
}

/// Base-station power constants.
///
/// `p_min` is the minimum received power referred to a distance of one
/// meter, so it already absorbs any constant path-loss and antenna terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerModel {
    p_on: f64,
    p_off: f64,
    delta: f64,
    p_min: f64,
    p_max: Option<f64>,
}

impl PowerModel {
    /// Accepts `p_on ≥ p_off > 0` and `delta ≥ 0`. A model without a green
    /// gap (`p_on = p_off`) is valid here and rejected only by the optimal
    /// load maps, which need the gap.
    pub fn new(p_on: f64, p_off: f64, delta: f64, p_min: f64) -> Result<Self> {
        check(p_off > 0.0 && p_off.is_finite(), "p_off", p_off, "dormant power must be positive")?;
        check(p_on >= p_off && p_on.is_finite(), "p_on", p_on, "active power must not be below dormant power")?;
        check(delta >= 0.0 && delta.is_finite(), "delta", delta, "transmit scaling must be non-negative")?;
        check(p_min > 0.0 && p_min.is_finite(), "p_min", p_min, "minimum received power must be positive")?;
        Ok(Self {
            p_on,
            p_off,
            delta,
            p_min,
            p_max: None,
        })
    }

    /// Transmit power above which a warning is logged.
    pub fn with_max_transmit_power(mut self, p_max: f64) -> Self {
        self.p_max = Some(p_max);
        self
    }

    pub fn p_on(&self) -> f64 {
        self.p_on
    }

    pub fn p_off(&self) -> f64 {
        self.p_off
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn p_min(&self) -> f64 {
        self.p_min
    }

    /// Per-BS transmit power and mean consumption at the given scenario.
    pub fn budget(&self, scenario: &NetworkScenario, channel: &ChannelModel, vm: &VoidModel) -> Result<PowerBudget> {
        let p_t = transmit_power(scenario.lambda_b(), vm.zeta, channel.alpha(), self.p_min)?;
        if let Some(p_max) = self.p_max {
            if p_t > p_max {
                log::warn!("transmit power {p_t} W exceeds the {p_max} W limit at λ_B = {}", scenario.lambda_b());
            }
        }
        Ok(PowerBudget {
            p_t,
            mean_psi: avg_power(vm.void_prob(scenario.load()), self, p_t),
        })
    }
}

/// Transmit power and mean consumption of one base station, in watts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerBudget {
    pub p_t: f64,
    pub mean_psi: f64,
}

/// `P_t = P_min Γ(1+α/2) / (πλ_Bζ)^{α/2}` with `λ_B` in BS/km² and `p_min`
/// referred to one meter.
pub fn transmit_power(lambda_b: f64, zeta: f64, alpha: f64, p_min: f64) -> Result<f64> {
    check(lambda_b > 0.0, "lambda_b", lambda_b, "must be positive")?;
    check(zeta >= 1.0, "zeta", zeta, "must be at least 1")?;
    check(alpha > 2.0, "alpha", alpha, "must exceed 2")?;
    check(p_min > 0.0, "p_min", p_min, "must be positive")?;
    let lambda_m2 = lambda_b / M2_PER_KM2;
    Ok(p_min * gamma(1.0 + alpha / 2.0) / (PI * lambda_m2 * zeta).powf(alpha / 2.0))
}

/// `E[Ψ] = (1−p_∅)(P_ON + δP_t) + p_∅ P_OFF`.
pub fn avg_power(p_void: f64, model: &PowerModel, p_t: f64) -> f64 {
    (1.0 - p_void) * (model.p_on + model.delta * p_t) + p_void * model.p_off
}

/// Green cell throughput `T_C/(λ_B E[Ψ])` in bits/Hz/J.
pub fn green_cell_throughput(
    scenario: &NetworkScenario,
    channel: &ChannelModel,
    scheme: &AssociationScheme,
    power: &PowerModel,
    quad: &QuadratureRule,
) -> Result<f64> {
    let vm = VoidModel::new(channel, scheme)?;
    let integral = throughput_integral(vm.void_prob(scenario.load()), vm.zeta, channel, quad)?;
    green_cell_from_integral(scenario, channel, &vm, power, integral)
}

/// Green user throughput `T_U/E[Ψ]` in bits/Hz/J per user.
pub fn green_user_throughput(
    scenario: &NetworkScenario,
    channel: &ChannelModel,
    scheme: &AssociationScheme,
    power: &PowerModel,
    quad: &QuadratureRule,
) -> Result<f64> {
    let vm = VoidModel::new(channel, scheme)?;
    let integral = throughput_integral(vm.void_prob(scenario.load()), vm.zeta, channel, quad)?;
    green_user_from_integral(scenario, channel, &vm, power, integral)
}

pub(crate) fn green_cell_from_integral(
    scenario: &NetworkScenario,
    channel: &ChannelModel,
    vm: &VoidModel,
    power: &PowerModel,
    integral: f64,
) -> Result<f64> {
    let budget = power.budget(scenario, channel, vm)?;
    Ok(cell_throughput_from_integral(scenario, vm, integral) / (scenario.lambda_b() * budget.mean_psi))
}

pub(crate) fn green_user_from_integral(
    scenario: &NetworkScenario,
    channel: &ChannelModel,
    vm: &VoidModel,
    power: &PowerModel,
    integral: f64,
) -> Result<f64> {
    let budget = power.budget(scenario, channel, vm)?;
    Ok(user_throughput_from_integral(scenario, vm, integral) / budget.mean_psi)
}

/// Outdoor-to-indoor urban micro link budget at 2 GHz, used to derive the
/// effective minimum received power referred to one meter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    /// Path loss at 1 km in dB.
    pub path_loss_1km_db: f64,
    /// Path-loss slope in dB per decade of distance.
    pub slope_db_per_decade: f64,
    /// Fraction of users indoors.
    pub indoor_fraction: f64,
    /// Extra penetration loss for indoor users in dB.
    pub penetration_db: f64,
    /// Transmit antenna gain in dBi.
    pub antenna_gain_dbi: f64,
}

impl LinkBudget {
    pub const URBAN_MICRO: Self = Self {
        path_loss_1km_db: 140.7,
        slope_db_per_decade: 37.6,
        indoor_fraction: 0.8,
        penetration_db: 20.0,
        antenna_gain_dbi: 5.0,
    };

    /// Path-loss exponent implied by the slope.
    pub fn alpha(&self) -> f64 {
        self.slope_db_per_decade / 10.0
    }

    /// Path loss at 1 m in dB.
    pub fn path_loss_1m_db(&self) -> f64 {
        self.path_loss_1km_db - 3.0 * self.slope_db_per_decade
    }

    /// Population-averaged linear penetration loss.
    pub fn mean_penetration(&self) -> f64 {
        self.indoor_fraction * 10f64.powf(self.penetration_db / 10.0) + (1.0 - self.indoor_fraction)
    }

    /// Effective `P_min` in W·m^α: the receiver threshold scaled by the 1 m
    /// path loss and the mean penetration loss, less the antenna gain.
    pub fn effective_p_min(&self, p_min_watts: f64) -> f64 {
        p_min_watts * 10f64.powf((self.path_loss_1m_db() - self.antenna_gain_dbi) / 10.0) * self.mean_penetration()
    }
}
