//! Empirical check that randomly rescaling the points of a PPP yields a PPP.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use super::ppp::sample_ppp;
use super::rng::{stream_rng, Stream};
use super::stats::{ks_p_value, ks_statistic};
use super::window::SimWindow;
use crate::channel::{AssociationScheme, ChannelModel};
use crate::error::{check, Error, Result};

/// Distribution of the product mark `WH` attached to each point.
#[derive(Debug, Clone)]
pub enum MarkLaw {
    Constant(f64),
    /// `WH = exp(N(mu, sigma²))`.
    LogNormal { mu: f64, sigma: f64 },
    Scheme {
        channel: ChannelModel,
        scheme: AssociationScheme,
    },
}

impl MarkLaw {
    fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        match self {
            Self::Constant(c) => *c,
            Self::LogNormal { mu, sigma } => {
                let z: f64 = StandardNormal.sample(rng);
                (mu + sigma * z).exp()
            }
            Self::Scheme { channel, scheme } => match scheme {
                AssociationScheme::NearestBs => 1.0,
                _ => {
                    let h = channel.sample_h(rng);
                    h * scheme.sample_weight(h, rng)
                }
            },
        }
    }

    /// `E[(WH)^t]`.
    pub fn moment(&self, t: f64) -> Result<f64> {
        match self {
            Self::Constant(c) => Ok(c.powf(t)),
            Self::LogNormal { mu, sigma } => Ok((t * mu + 0.5 * t * t * sigma * sigma).exp()),
            Self::Scheme { channel, scheme } => scheme.product_moment(channel, t),
        }
    }
}

/// Goodness of fit of the nearest mapped distance² to its predicted law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConservationReport {
    pub trials: usize,
    /// Rate `πλE[(WH)^{2/α}]` of the predicted exponential law of distance².
    pub predicted_rate: f64,
    pub mean_d2: f64,
    pub ks_statistic: f64,
    pub p_value: f64,
}

/// Scales every point of a PPP of intensity `lambda` on a square centred at
/// the origin by `(WH)^{−1/α}` and compares the nearest squared distance to
/// the origin against `Exp(πλE[(WH)^{2/α}])`.
pub fn conservation_check(
    lambda: f64,
    marks: &MarkLaw,
    alpha: f64,
    window: SimWindow,
    trials: usize,
    seed: u64,
) -> Result<ConservationReport> {
    if trials < 500 {
        return Err(Error::TooFewTrials { got: trials, min: 500 });
    }
    check(alpha > 2.0, "alpha", alpha, "must exceed 2")?;
    let delta = 2.0 / alpha;
    let rate = std::f64::consts::PI * lambda * marks.moment(delta)?;
    let half = 0.5 * window.side();
    let mut d2 = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = stream_rng(seed, Stream::Conservation, t, 0, 0);
            let points = sample_ppp(lambda, &window, &mut rng)?;
            Ok(points
                .iter()
                .map(|p| {
                    let (x, y) = (p[0] - half, p[1] - half);
                    (x * x + y * y) * marks.sample(&mut rng).powf(-delta)
                })
                .fold(f64::INFINITY, f64::min))
        })
        .collect::<Result<Vec<f64>>>()?;
    let mean_d2 = d2.iter().sum::<f64>() / trials as f64;
    let ks = ks_statistic(&mut d2, |x| 1.0 - (-rate * x).exp());
    Ok(ConservationReport {
        trials,
        predicted_rate: rate,
        mean_d2,
        ks_statistic: ks,
        p_value: ks_p_value(ks, trials),
    })
}
