//! Reference deployment: urban micro small cells at 2 GHz with picocell
//! power figures.

use crate::analytics::gauss_hermite;
use crate::channel::{AssociationScheme, ChannelModel, ShadowConvention};
use crate::error::Result;
use crate::optimizer::LoadContext;
use crate::powergreen::{dbm_to_watts, LinkBudget, PowerModel};

pub const ALPHA: f64 = 3.76;
/// Users per km².
pub const LAMBDA_U: f64 = 370.0;
pub const MU_DB: f64 = 0.0;
pub const P_ON_W: f64 = 6.8;
pub const P_OFF_W: f64 = 4.3;
pub const DELTA: f64 = 4.0;
pub const P_MIN_DBM: f64 = -106.0;
pub const QUAD_ORDER: usize = 6;
/// Shadowing used when a single shadowed scenario stands for the preset.
pub const CANONICAL_SHADOW_DB: f64 = 8.0;
/// Shadowing levels (dB) of the max-received-power curves.
pub const MRP_SHADOW_DB: [f64; 4] = [0.0, 4.0, 8.0, 12.0];
/// Cell loads of the figure grids.
pub const LOAD_GRID: [f64; 24] = [
    0.05, 0.1, 0.15, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 1.0, 1.25, 1.5, 2.0, 2.5, 3.0, 4.0, 5.0, 6.0, 8.0, 10.0, 12.0,
    16.0, 20.0,
];
/// User intensities (per km²) of the optimal-intensity sweeps.
pub const LAMBDA_U_GRID: [f64; 6] = [100.0, 200.0, 300.0, 400.0, 500.0, 600.0];

pub fn channel(shadow_db: f64, convention: ShadowConvention) -> Result<ChannelModel> {
    ChannelModel::from_db(ALPHA, MU_DB, shadow_db, convention)
}

/// Power model with `P_min` scaled by the urban micro link budget.
pub fn power_model() -> Result<PowerModel> {
    PowerModel::new(
        P_ON_W,
        P_OFF_W,
        DELTA,
        LinkBudget::URBAN_MICRO.effective_p_min(dbm_to_watts(P_MIN_DBM)),
    )
}

pub fn load_context(scheme: AssociationScheme, shadow_db: f64, convention: ShadowConvention) -> Result<LoadContext> {
    LoadContext::new(
        channel(shadow_db, convention)?,
        scheme,
        LAMBDA_U,
        power_model()?,
        &gauss_hermite(QUAD_ORDER)?,
    )
}

/// The shadowed max-received-power scenario that stands for the preset.
pub fn canonical_context() -> Result<LoadContext> {
    load_context(AssociationScheme::MaxReceivedPower, CANONICAL_SHADOW_DB, ShadowConvention::StdDb)
}
