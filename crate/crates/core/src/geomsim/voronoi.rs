use rand::{Rng, RngExt};

use super::grid::TorusGrid;
use super::ppp::Point;
use super::window::SimWindow;
use crate::error::{check, Result};

/// Probes per cell below which [`AreaStats::widened`] is set.
pub const MIN_PROBES_PER_CELL: f64 = 100.0;

/// Voronoi cell areas (km²) on the torus, estimated from `probes` jittered
/// lattice points, each credited to its nearest point of `bs`.
pub fn voronoi_areas<R: Rng>(bs: &[Point], window: &SimWindow, probes: usize, rng: &mut R) -> Vec<f64> {
    let mut areas = vec![0.0; bs.len()];
    if bs.is_empty() {
        return areas;
    }
    let m = (probes as f64).sqrt().ceil().max(1.0) as usize;
    let step = window.side() / m as f64;
    let per_probe = step * step;
    let grid = TorusGrid::new(*window, bs);
    for i in 0..m {
        for j in 0..m {
            let q = [(i as f64 + rng.random::<f64>()) * step, (j as f64 + rng.random::<f64>()) * step];
            if let Some((b, _)) = grid.nearest(q) {
                areas[b] += per_probe;
            }
        }
    }
    areas
}

/// Moments of Voronoi areas normalized by the realized BS density.
#[derive(Debug, Clone, PartialEq)]
pub struct AreaStats {
    pub cells: usize,
    pub mean: f64,
    pub variance: f64,
    pub skewness: f64,
    pub probes_per_cell: f64,
    /// Set when the probe density is too low for the moments to be trusted.
    pub widened: bool,
    pub normalized: Vec<f64>,
}

impl AreaStats {
    /// `E[exp(−v·A)]` over cells, the chance that a cell of normalized area
    /// `A` receives no users at load `v`.
    pub fn empty_cell_prob(&self, v: f64) -> f64 {
        self.normalized.iter().map(|a| (-v * a).exp()).sum::<f64>() / self.cells as f64
    }
}

pub fn voronoi_area_stats<R: Rng>(bs: &[Point], window: &SimWindow, probes: usize, rng: &mut R) -> Result<AreaStats> {
    check(bs.len() >= 10, "bs", bs.len() as f64, "at least 10 base stations are needed")?;
    let density = bs.len() as f64 / window.area();
    let normalized: Vec<f64> = voronoi_areas(bs, window, probes, rng).iter().map(|a| a * density).collect();
    let n = normalized.len() as f64;
    let mean = normalized.iter().sum::<f64>() / n;
    let variance = normalized.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let skewness = normalized.iter().map(|a| (a - mean).powi(3)).sum::<f64>() / n / variance.powf(1.5);
    let probes_per_cell = probes as f64 / n;
    Ok(AreaStats {
        cells: normalized.len(),
        mean,
        variance,
        skewness,
        probes_per_cell,
        widened: probes_per_cell < MIN_PROBES_PER_CELL,
        normalized,
    })
}
