//! Monte Carlo simulation of base stations and users on a torus.
//!
//! Every random quantity is drawn from a stream keyed by the run seed, a
//! stream tag and the entity indices it belongs to (see [`rng`]), so results
//! do not depend on thread scheduling and per-link gains can be regenerated
//! on demand instead of stored.

pub mod assoc;
pub mod conservation;
pub mod grid;
pub mod ppp;
pub mod rng;
pub mod sir;
pub mod stats;
pub mod throughput;
pub mod voronoi;
pub mod window;

pub use assoc::{associate, associate_nearest, associate_with, simulate_void_fraction, void_fraction, AssignmentTable};
pub use conservation::{conservation_check, ConservationReport, MarkLaw};
pub use ppp::{sample_ppp, Point, PointPattern};
pub use rng::{LinkGains, Stream};
pub use sir::{sir_sample, InterferenceGains, SirSample};
pub use stats::{RunningStats, SimEstimate};
pub use throughput::{
    estimate_cell_throughput, estimate_coverage, estimate_user_throughput, CellThroughputEstimate, CoverageEstimate, SimConfig,
    UserThroughputEstimate,
};
pub use voronoi::{voronoi_area_stats, voronoi_areas, AreaStats};
pub use window::SimWindow;
