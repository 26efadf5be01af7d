use rayon::prelude::*;

use super::grid::TorusGrid;
use super::ppp::PointPattern;
use super::rng::LinkGains;
use super::stats::SimEstimate;
use super::window::SimWindow;
use crate::channel::{AssociationScheme, ChannelModel};
use crate::error::{Error, Result};

/// Serving BS of every user and the number of users at every BS.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssignmentTable {
    serving: Vec<u32>,
    load: Vec<u32>,
}

impl AssignmentTable {
    pub fn from_serving(serving: Vec<u32>, n_bs: usize) -> Self {
        let mut load = vec![0u32; n_bs];
        for &b in &serving {
            load[b as usize] += 1;
        }
        Self { serving, load }
    }

    pub fn serving(&self) -> &[u32] {
        &self.serving
    }

    /// Users per BS.
    pub fn load(&self) -> &[u32] {
        &self.load
    }

    pub fn n_bs(&self) -> usize {
        self.load.len()
    }

    pub fn n_users(&self) -> usize {
        self.serving.len()
    }

    pub fn is_void(&self, bs: usize) -> bool {
        self.load[bs] == 0
    }

    pub fn void_count(&self) -> usize {
        self.load.iter().filter(|&&n| n == 0).count()
    }

    pub fn void_fraction(&self) -> f64 {
        self.void_count() as f64 / self.n_bs() as f64
    }
}

/// Minimum torus distance association.
pub fn associate_nearest(pattern: &PointPattern) -> Result<AssignmentTable> {
    if pattern.bs.is_empty() {
        return Err(Error::EmptyBaseStations);
    }
    let grid = TorusGrid::new(pattern.window, &pattern.bs);
    let serving = pattern
        .users
        .iter()
        .map(|&u| grid.nearest(u).map(|(i, _)| i as u32).ok_or(Error::EmptyBaseStations))
        .collect::<Result<Vec<_>>>()?;
    Ok(AssignmentTable::from_serving(serving, pattern.bs.len()))
}

/// Association maximizing `log_mark(user, bs) − α·ln d` over every BS.
pub fn associate_with<F>(pattern: &PointPattern, alpha: f64, log_mark: F) -> Result<AssignmentTable>
where
    F: Fn(usize, usize) -> f64,
{
    if pattern.bs.is_empty() {
        return Err(Error::EmptyBaseStations);
    }
    let half_alpha = 0.5 * alpha;
    let w = &pattern.window;
    let serving = pattern
        .users
        .iter()
        .enumerate()
        .map(|(u, &pu)| {
            let mut best = (0u32, f64::NEG_INFINITY);
            for (b, &pb) in pattern.bs.iter().enumerate() {
                let score = log_mark(u, b) - half_alpha * w.dist2(pu, pb).ln();
                if score > best.1 {
                    best = (b as u32, score);
                }
            }
            best.0
        })
        .collect();
    Ok(AssignmentTable::from_serving(serving, pattern.bs.len()))
}

/// Generalized cell association with per-link gains from `gains`.
///
/// Nearest-BS association ignores the gains and uses the spatial grid; the
/// weighted schemes compare every BS because a large gain can beat any
/// distance.
pub fn associate(pattern: &PointPattern, gains: &LinkGains<'_>) -> Result<AssignmentTable> {
    match gains.scheme {
        AssociationScheme::NearestBs => associate_nearest(pattern),
        _ => associate_with(pattern, gains.channel.alpha(), |u, b| gains.log_mark(u, b)),
    }
}

/// Void fraction across trials.
pub fn void_fraction(tables: &[AssignmentTable]) -> Result<SimEstimate> {
    if tables.iter().any(|t| t.n_bs() == 0) {
        return Err(Error::EmptyBaseStations);
    }
    SimEstimate::from_trials(&tables.iter().map(AssignmentTable::void_fraction).collect::<Vec<_>>())
}

/// Samples `trials` independent layouts and estimates the void fraction.
pub fn simulate_void_fraction(
    channel: &ChannelModel,
    scheme: &AssociationScheme,
    lambda_b: f64,
    lambda_u: f64,
    window: SimWindow,
    trials: usize,
    seed: u64,
) -> Result<SimEstimate> {
    window.check_size(lambda_b);
    let fractions = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let pattern = PointPattern::sample(lambda_b, lambda_u, window, seed, t)?;
            let gains = LinkGains {
                channel,
                scheme,
                seed,
                trial: t,
            };
            let table = associate(&pattern, &gains)?;
            if table.n_bs() == 0 {
                return Err(Error::EmptyBaseStations);
            }
            Ok(table.void_fraction())
        })
        .collect::<Result<Vec<_>>>()?;
    SimEstimate::from_trials(&fractions)
}
