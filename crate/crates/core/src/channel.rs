//! Composite Rayleigh/log-normal channel gains and association weights.
//!
//! The channel power gain is `H = X·S` with `X ~ Exp(1)` and
//! `S = exp(N(μ_s, σ_s²))`. A user associates with the base station that
//! maximizes `W·H·d^{-α}`.

use std::f64::consts::{LN_10, PI};
use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use statrs::function::gamma::gamma;

use crate::error::{check, Error, Result};

/// Voronoi Gamma-fit shape used for nearest-BS cells.
pub const RHO_HAT: f64 = 3.5;

/// Converts a shadowing standard deviation in dB to natural-log units.
pub fn shadow_db_to_natural(sigma_db: f64) -> Result<f64> {
    check(sigma_db >= 0.0 && sigma_db.is_finite(), "sigma_db", sigma_db, "must be finite and non-negative")?;
    Ok(sigma_db * LN_10 / 10.0)
}

/// How a shadowing figure quoted in dB is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ShadowConvention {
    /// The figure is the standard deviation in dB.
    StdDb,
    /// The figure is the variance in dB², so the standard deviation is its square root.
    VarDb,
}

impl ShadowConvention {
    pub fn sigma_natural(self, value_db: f64) -> Result<f64> {
        match self {
            Self::StdDb => shadow_db_to_natural(value_db),
            Self::VarDb => {
                check(value_db >= 0.0, "shadow_variance_db", value_db, "must be non-negative")?;
                shadow_db_to_natural(value_db.sqrt())
            }
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::StdDb => "std-db",
            Self::VarDb => "var-db",
        }
    }
}

impl std::str::FromStr for ShadowConvention {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "std-db" => Ok(Self::StdDb),
            "var-db" => Ok(Self::VarDb),
            other => Err(format!("unknown shadow convention `{other}` (expected std-db or var-db)")),
        }
    }
}

impl fmt::Display for ShadowConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Path-loss exponent and log-normal shadowing parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelModel {
    alpha: f64,
    mu_s: f64,
    sigma_s: f64,
}

impl ChannelModel {
    pub fn new(alpha: f64, mu_s: f64, sigma_s: f64) -> Result<Self> {
        check(alpha > 2.0 && alpha.is_finite(), "alpha", alpha, "path-loss exponent must exceed 2")?;
        check(mu_s.is_finite(), "mu_s", mu_s, "must be finite")?;
        check(sigma_s >= 0.0 && sigma_s.is_finite(), "sigma_s", sigma_s, "must be finite and non-negative")?;
        Ok(Self { alpha, mu_s, sigma_s })
    }

    /// Rayleigh fading without shadowing.
    pub fn rayleigh(alpha: f64) -> Result<Self> {
        Self::new(alpha, 0.0, 0.0)
    }

    /// Builds a channel from shadowing figures quoted in dB.
    pub fn from_db(alpha: f64, mu_db: f64, sigma_db: f64, convention: ShadowConvention) -> Result<Self> {
        Self::new(alpha, mu_db * LN_10 / 10.0, convention.sigma_natural(sigma_db)?)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn mu_s(&self) -> f64 {
        self.mu_s
    }

    pub fn sigma_s(&self) -> f64 {
        self.sigma_s
    }

    /// `2/α`, the exponent that recurs throughout the analysis.
    pub fn delta(&self) -> f64 {
        2.0 / self.alpha
    }

    /// `E[H^t] = Γ(1+t)·exp(tμ_s + t²σ_s²/2)`.
    pub fn frac_moment_h(&self, t: f64) -> Result<f64> {
        if t <= -1.0 {
            return Err(Error::DivergentMoment { order: t });
        }
        Ok(gamma(1.0 + t) * (t * self.mu_s + 0.5 * t * t * self.sigma_s * self.sigma_s).exp())
    }

    /// `E[S^t]` for the log-normal shadowing factor alone.
    pub fn frac_moment_s(&self, t: f64) -> f64 {
        (t * self.mu_s + 0.5 * t * t * self.sigma_s * self.sigma_s).exp()
    }

    pub fn sample_shadow<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if self.sigma_s == 0.0 {
            self.mu_s.exp()
        } else {
            let z: f64 = StandardNormal.sample(rng);
            (self.mu_s + self.sigma_s * z).exp()
        }
    }

    pub fn sample_h<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let x: f64 = Exp1.sample(rng);
        x * self.sample_shadow(rng)
    }
}

/// Distribution of an association weight `W` independent of the channel.
pub trait WeightLaw: fmt::Debug + Send + Sync {
    /// `E[W^t]`.
    fn frac_moment(&self, t: f64) -> Result<f64>;

    fn sample(&self, rng: &mut dyn Rng) -> f64;
}

/// `W = exp(N(μ, σ²))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogNormalWeight {
    pub mu: f64,
    pub sigma: f64,
}

impl WeightLaw for LogNormalWeight {
    fn frac_moment(&self, t: f64) -> Result<f64> {
        Ok((t * self.mu + 0.5 * t * t * self.sigma * self.sigma).exp())
    }

    fn sample(&self, rng: &mut dyn Rng) -> f64 {
        let z: f64 = StandardNormal.sample(rng);
        (self.mu + self.sigma * z).exp()
    }
}

/// Generalized cell association rule.
#[derive(Debug, Clone)]
pub enum AssociationScheme {
    /// `W = 1/H`: every user picks the geometrically nearest base station.
    NearestBs,
    /// `W = 1`: every user picks the strongest received signal.
    MaxReceivedPower,
    /// `W` drawn independently of `H` from the given law.
    GeneralWeighted(Arc<dyn WeightLaw>),
}

impl AssociationScheme {
    pub fn name(&self) -> &'static str {
        match self {
            Self::NearestBs => "nearest",
            Self::MaxReceivedPower => "max-received-power",
            Self::GeneralWeighted(_) => "general-weighted",
        }
    }

    /// `E[(WH)^t]`.
    pub fn product_moment(&self, channel: &ChannelModel, t: f64) -> Result<f64> {
        match self {
            Self::NearestBs => Ok(1.0),
            Self::MaxReceivedPower => channel.frac_moment_h(t),
            Self::GeneralWeighted(law) => Ok(law.frac_moment(t)? * channel.frac_moment_h(t)?),
        }
    }

    /// `ζ = E[(WH)^{2/α}]·E[(WH)^{-2/α}]`.
    pub fn zeta(&self, channel: &ChannelModel) -> Result<f64> {
        match self {
            Self::NearestBs => Ok(1.0),
            Self::MaxReceivedPower => {
                let a = channel.alpha();
                let s = channel.sigma_s();
                Ok(2.0 * PI / (a * (2.0 * PI / a).sin()) * (4.0 * s * s / (a * a)).exp())
            }
            Self::GeneralWeighted(_) => {
                let d = channel.delta();
                Ok(self.product_moment(channel, d)? * self.product_moment(channel, -d)?)
            }
        }
    }

    /// `ρ = 3.5·ζ`.
    pub fn rho(&self, channel: &ChannelModel) -> Result<f64> {
        Ok(RHO_HAT * self.zeta(channel)?)
    }

    /// Draws the weight of one link whose channel gain is `h`.
    pub fn sample_weight<R: Rng>(&self, h: f64, rng: &mut R) -> f64 {
        match self {
            Self::NearestBs => 1.0 / h,
            Self::MaxReceivedPower => 1.0,
            Self::GeneralWeighted(law) => law.sample(rng),
        }
    }
}

/// One realized link mark.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainSample {
    pub h: f64,
    pub w: f64,
}

pub fn sample_gain<R: Rng>(channel: &ChannelModel, scheme: &AssociationScheme, rng: &mut R) -> GainSample {
    let h = channel.sample_h(rng);
    let w = scheme.sample_weight(h, rng);
    GainSample { h, w }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_xoshiro::Xoshiro256PlusPlus;

    #[test]
    fn db_conversion() {
        assert_eq!(shadow_db_to_natural(0.0).unwrap(), 0.0);
        assert_relative_eq!(shadow_db_to_natural(8.0).unwrap(), 1.842_068_074_395_237, max_relative = 1e-14);
        assert_relative_eq!(shadow_db_to_natural(4.0).unwrap(), 0.921_034_037_197_618_3, max_relative = 1e-14);
        assert!(shadow_db_to_natural(-1.0).is_err());
        assert_relative_eq!(
            ShadowConvention::VarDb.sigma_natural(4.0).unwrap(),
            shadow_db_to_natural(2.0).unwrap()
        );
    }

    #[test]
    fn moments() {
        let c = ChannelModel::rayleigh(4.0).unwrap();
        assert_relative_eq!(c.frac_moment_h(0.0).unwrap(), 1.0, max_relative = 1e-15);
        assert_relative_eq!(c.frac_moment_h(0.5).unwrap(), 0.886_226_925_452_758, max_relative = 1e-12);
        assert_relative_eq!(
            c.frac_moment_h(0.5).unwrap() * c.frac_moment_h(-0.5).unwrap(),
            std::f64::consts::FRAC_PI_2,
            max_relative = 1e-12
        );
        assert!(matches!(c.frac_moment_h(-1.0), Err(Error::DivergentMoment { .. })));
    }

    #[test]
    fn zeta_and_rho() {
        let c4 = ChannelModel::rayleigh(4.0).unwrap();
        let c = ChannelModel::rayleigh(3.76).unwrap();
        assert_eq!(AssociationScheme::NearestBs.zeta(&c).unwrap(), 1.0);
        assert_eq!(AssociationScheme::NearestBs.rho(&c).unwrap(), 3.5);
        assert_relative_eq!(
            AssociationScheme::MaxReceivedPower.zeta(&c4).unwrap(),
            std::f64::consts::FRAC_PI_2,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            AssociationScheme::MaxReceivedPower.rho(&c4).unwrap(),
            7.0 * PI / 4.0,
            max_relative = 1e-12
        );
        let z = AssociationScheme::MaxReceivedPower.zeta(&c).unwrap();
        assert!((z - 1.679).abs() < 1e-3, "{z}");
        assert!((3.5 * z - 5.878).abs() < 2e-3);
    }

    #[test]
    fn nearest_weights_cancel_gain() {
        let c = ChannelModel::new(3.76, 0.0, 1.8).unwrap();
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(3);
        for _ in 0..1000 {
            let g = sample_gain(&c, &AssociationScheme::NearestBs, &mut rng);
            assert_relative_eq!(g.w * g.h, 1.0, max_relative = 1e-12);
        }
    }
}
