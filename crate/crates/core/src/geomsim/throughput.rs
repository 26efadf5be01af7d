use rand::RngExt;
use rayon::prelude::*;

use super::assoc::{associate, AssignmentTable};
use super::ppp::PointPattern;
use super::rng::{stream_rng, LinkGains, Stream};
use super::sir::{sir_sample, InterferenceGains};
use super::stats::SimEstimate;
use super::voronoi::voronoi_areas;
use super::window::SimWindow;
use crate::channel::{AssociationScheme, ChannelModel};
use crate::error::{check, Result};

/// Run-level simulation settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub window: SimWindow,
    pub trials: usize,
    pub seed: u64,
    /// Typical users sampled per trial for SIR evaluation.
    pub users_per_trial: usize,
    pub interference: InterferenceGains,
    /// Probe points per BS for Voronoi areas.
    pub probes_per_cell: usize,
}

impl SimConfig {
    pub fn new(window: SimWindow, trials: usize, seed: u64) -> Self {
        Self {
            window,
            trials,
            seed,
            users_per_trial: 1000,
            interference: InterferenceGains::Fresh,
            probes_per_cell: 400,
        }
    }
}

/// Per-trial ingredients shared by the throughput estimators.
#[derive(Debug, Clone, Default)]
struct TrialSamples {
    rate_sum: f64,
    rate_n: usize,
    co_users_sum: f64,
    co_users_n: usize,
    inv_area_sum: f64,
    censored: usize,
}

fn run_trial(
    cfg: &SimConfig,
    channel: &ChannelModel,
    scheme: &AssociationScheme,
    lambda_b: f64,
    lambda_u: f64,
    trial: u64,
    with_area: bool,
) -> Result<TrialSamples> {
    let pattern = PointPattern::sample(lambda_b, lambda_u, cfg.window, cfg.seed, trial)?;
    let gains = LinkGains {
        channel,
        scheme,
        seed: cfg.seed,
        trial,
    };
    let table = associate(&pattern, &gains)?;
    let mut out = TrialSamples::default();
    if pattern.users.is_empty() {
        return Ok(out);
    }
    let areas = if with_area && matches!(scheme, AssociationScheme::NearestBs) {
        let mut rng = stream_rng(cfg.seed, Stream::Probes, trial, 0, 0);
        Some(voronoi_areas(&pattern.bs, &cfg.window, cfg.probes_per_cell * pattern.bs.len(), &mut rng))
    } else {
        None
    };
    let mut pick = stream_rng(cfg.seed, Stream::TypicalUsers, trial, 0, 0);
    for _ in 0..cfg.users_per_trial {
        let u = pick.random_range(0..pattern.users.len());
        sample_user(&pattern, &table, u, &gains, cfg.interference, lambda_u, areas.as_deref(), &mut out);
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn sample_user(
    pattern: &PointPattern,
    table: &AssignmentTable,
    u: usize,
    gains: &LinkGains<'_>,
    mode: InterferenceGains,
    lambda_u: f64,
    areas: Option<&[f64]>,
    out: &mut TrialSamples,
) {
    let serving = table.serving()[u] as usize;
    let load = table.load()[serving] as f64;
    out.co_users_sum += load;
    out.co_users_n += 1;
    out.inv_area_sum += match areas {
        Some(a) => 1.0 / a[serving],
        None => lambda_u / load,
    };
    match sir_sample(pattern, table, u, gains, mode).value() {
        Some(sir) => {
            out.rate_sum += sir.ln_1p() / std::f64::consts::LN_2;
            out.rate_n += 1;
        }
        None => out.censored += 1,
    }
}

fn run_trials(
    cfg: &SimConfig,
    channel: &ChannelModel,
    scheme: &AssociationScheme,
    lambda_b: f64,
    lambda_u: f64,
    with_area: bool,
) -> Result<Vec<TrialSamples>> {
    check(cfg.trials >= 2, "trials", cfg.trials as f64, "at least two trials are needed")?;
    check(lambda_u > 0.0, "lambda_u", lambda_u, "throughput needs users")?;
    cfg.window.check_size(lambda_b);
    (0..cfg.trials as u64)
        .into_par_iter()
        .map(|t| run_trial(cfg, channel, scheme, lambda_b, lambda_u, t, with_area))
        .collect()
}

fn trial_means(trials: &[TrialSamples], f: impl Fn(&TrialSamples) -> (f64, usize)) -> Vec<f64> {
    trials
        .iter()
        .filter_map(|t| {
            let (s, n) = f(t);
            (n > 0).then(|| s / n as f64)
        })
        .collect()
}

/// Empirical `E[log₂(1+SIR)] / E[users sharing the serving BS]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UserThroughputEstimate {
    pub rate: SimEstimate,
    pub co_users: SimEstimate,
    pub throughput: SimEstimate,
    pub samples: usize,
    pub censored: usize,
}

pub fn estimate_user_throughput(
    cfg: &SimConfig,
    channel: &ChannelModel,
    scheme: &AssociationScheme,
    lambda_b: f64,
    lambda_u: f64,
) -> Result<UserThroughputEstimate> {
    let trials = run_trials(cfg, channel, scheme, lambda_b, lambda_u, false)?;
    let both: Vec<&TrialSamples> = trials.iter().filter(|t| t.rate_n > 0 && t.co_users_n > 0).collect();
    let rate: Vec<f64> = both.iter().map(|t| t.rate_sum / t.rate_n as f64).collect();
    let co: Vec<f64> = both.iter().map(|t| t.co_users_sum / t.co_users_n as f64).collect();
    Ok(UserThroughputEstimate {
        rate: SimEstimate::from_trials(&rate)?,
        co_users: SimEstimate::from_trials(&trial_means(&trials, |t| (t.co_users_sum, t.co_users_n)))?,
        throughput: SimEstimate::ratio(&rate, &co)?,
        samples: trials.iter().map(|t| t.co_users_n).sum(),
        censored: trials.iter().map(|t| t.censored).sum(),
    })
}

/// Empirical `E[log₂(1+SIR)]·E[1/Â]` with `Â` the serving-cell area.
///
/// Nearest-BS runs measure `Â` as the Voronoi area of the serving BS. Other
/// schemes have no deterministic cell, so `Â` is the serving BS's user count
/// divided by `λ_U`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellThroughputEstimate {
    pub rate: SimEstimate,
    pub inv_area: SimEstimate,
    pub throughput: SimEstimate,
    pub samples: usize,
    pub censored: usize,
}

pub fn estimate_cell_throughput(
    cfg: &SimConfig,
    channel: &ChannelModel,
    scheme: &AssociationScheme,
    lambda_b: f64,
    lambda_u: f64,
) -> Result<CellThroughputEstimate> {
    let trials = run_trials(cfg, channel, scheme, lambda_b, lambda_u, true)?;
    let rate = SimEstimate::from_trials(&trial_means(&trials, |t| (t.rate_sum, t.rate_n)))?;
    let inv_area = SimEstimate::from_trials(&trial_means(&trials, |t| (t.inv_area_sum, t.co_users_n)))?;
    Ok(CellThroughputEstimate {
        rate,
        inv_area,
        throughput: rate.product(&inv_area),
        samples: trials.iter().map(|t| t.co_users_n).sum(),
        censored: trials.iter().map(|t| t.censored).sum(),
    })
}

/// Empirical `P[SIR ≥ s]` for each threshold, with the censored-sample count.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageEstimate {
    pub thresholds: Vec<f64>,
    pub coverage: Vec<SimEstimate>,
    pub samples: usize,
    pub censored: usize,
}

pub fn estimate_coverage(
    cfg: &SimConfig,
    channel: &ChannelModel,
    scheme: &AssociationScheme,
    lambda_b: f64,
    lambda_u: f64,
    thresholds: &[f64],
) -> Result<CoverageEstimate> {
    check(cfg.trials >= 2, "trials", cfg.trials as f64, "at least two trials are needed")?;
    check(lambda_u > 0.0, "lambda_u", lambda_u, "coverage needs users")?;
    cfg.window.check_size(lambda_b);
    let per_trial = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|trial| {
            let pattern = PointPattern::sample(lambda_b, lambda_u, cfg.window, cfg.seed, trial)?;
            let gains = LinkGains {
                channel,
                scheme,
                seed: cfg.seed,
                trial,
            };
            let table = associate(&pattern, &gains)?;
            let mut hits = vec![0usize; thresholds.len()];
            let (mut finite, mut censored) = (0usize, 0usize);
            if !pattern.users.is_empty() {
                let mut pick = stream_rng(cfg.seed, Stream::TypicalUsers, trial, 0, 0);
                for _ in 0..cfg.users_per_trial {
                    let u = pick.random_range(0..pattern.users.len());
                    match sir_sample(&pattern, &table, u, &gains, cfg.interference).value() {
                        Some(sir) => {
                            finite += 1;
                            for (h, &s) in hits.iter_mut().zip(thresholds) {
                                if sir >= s {
                                    *h += 1;
                                }
                            }
                        }
                        None => censored += 1,
                    }
                }
            }
            Ok((hits, finite, censored))
        })
        .collect::<Result<Vec<_>>>()?;
    let used: Vec<_> = per_trial.iter().filter(|t| t.1 > 0).collect();
    let coverage = (0..thresholds.len())
        .map(|k| SimEstimate::from_trials(&used.iter().map(|t| t.0[k] as f64 / t.1 as f64).collect::<Vec<_>>()))
        .collect::<Result<Vec<_>>>()?;
    Ok(CoverageEstimate {
        thresholds: thresholds.to_vec(),
        coverage,
        samples: per_trial.iter().map(|t| t.1).sum(),
        censored: per_trial.iter().map(|t| t.2).sum(),
    })
}
