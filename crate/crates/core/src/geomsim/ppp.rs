use rand::{Rng, RngExt};
use rand_distr::{Distribution, Poisson};

use super::rng::{stream_rng, Stream};
use super::window::SimWindow;
use crate::error::{check, Result};

pub type Point = [f64; 2];

/// Homogeneous PPP of `intensity` points per km² on `window`.
pub fn sample_ppp<R: Rng>(intensity: f64, window: &SimWindow, rng: &mut R) -> Result<Vec<Point>> {
    check(intensity >= 0.0 && intensity.is_finite(), "intensity", intensity, "must be non-negative")?;
    let mean = intensity * window.area();
    if mean == 0.0 {
        return Ok(Vec::new());
    }
    let n: f64 = Poisson::new(mean)
        .map_err(|_| crate::Error::InvalidParameter {
            name: "intensity",
            value: intensity,
            reason: "Poisson mean out of range",
        })?
        .sample(rng);
    let side = window.side();
    Ok((0..n as usize)
        .map(|_| [rng.random::<f64>() * side, rng.random::<f64>() * side])
        .collect())
}

/// Base stations and users of one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct PointPattern {
    pub window: SimWindow,
    pub bs: Vec<Point>,
    pub users: Vec<Point>,
    pub seed: u64,
    pub trial: u64,
}

impl PointPattern {
    /// Independent BS and user PPPs for trial `trial` of the run keyed by `seed`.
    pub fn sample(lambda_b: f64, lambda_u: f64, window: SimWindow, seed: u64, trial: u64) -> Result<Self> {
        let bs = sample_ppp(lambda_b, &window, &mut stream_rng(seed, Stream::BaseStations, trial, 0, 0))?;
        let users = sample_ppp(lambda_u, &window, &mut stream_rng(seed, Stream::Users, trial, 0, 0))?;
        Ok(Self {
            window,
            bs,
            users,
            seed,
            trial,
        })
    }

    /// Fixed layout, mainly for tests.
    pub fn from_points(window: SimWindow, bs: Vec<Point>, users: Vec<Point>) -> Self {
        Self {
            window,
            bs,
            users,
            seed: 0,
            trial: 0,
        }
    }
}
