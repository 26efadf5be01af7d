use thiserror::Error;

/// Errors raised by the analytical engine, the optimizer and the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("fractional moment of order {order} diverges")]
    DivergentMoment { order: f64 },

    #[error("quadrature order {0} outside 1..=64")]
    QuadratureOrder(usize),

    #[error("integration did not converge: estimate {estimate}, error bound {error_bound}")]
    Integration { estimate: f64, error_bound: f64 },

    #[error("no green gap: P_ON = {p_on} W does not exceed P_OFF = {p_off} W")]
    NoGreenGap { p_on: f64, p_off: f64 },

    #[error("no interior optimum or fixed point on ({lo}, {hi})")]
    NoInteriorOptimum { lo: f64, hi: f64 },

    #[error("fixed-point search did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("objective is not unimodal: {} local maxima at v = {peaks:?}", peaks.len())]
    MultiModal { peaks: Vec<f64> },

    #[error("{0} is not available for this association scheme")]
    Unsupported(&'static str),

    #[error("no base station in the window")]
    EmptyBaseStations,

    #[error("at least {min} trials required, got {got}")]
    TooFewTrials { got: usize, min: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check(cond: bool, name: &'static str, value: f64, reason: &'static str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name, value, reason })
    }
}
