use crate::error::{check, Result};

/// Expected BS count below which estimates are flagged as too small.
pub const MIN_PRODUCTION_BS: f64 = 500.0;

/// Square window of side `side` (km) with periodic boundaries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimWindow {
    side: f64,
}

impl SimWindow {
    pub fn new(side: f64) -> Result<Self> {
        check(side > 0.0 && side.is_finite(), "side", side, "window side must be positive")?;
        Ok(Self { side })
    }

    /// Window holding `count` base stations on average at intensity `lambda_b`.
    pub fn for_expected_count(lambda_b: f64, count: f64) -> Result<Self> {
        check(lambda_b > 0.0, "lambda_b", lambda_b, "must be positive")?;
        Self::new((count / lambda_b).sqrt())
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    pub fn area(&self) -> f64 {
        self.side * self.side
    }

    /// Logs a warning when the expected BS count is under 500.
    pub fn check_size(&self, lambda_b: f64) -> bool {
        let expected = lambda_b * self.area();
        let ok = expected >= MIN_PRODUCTION_BS;
        if !ok {
            log::warn!("window holds {expected:.0} base stations on average; estimates may carry edge bias");
        }
        ok
    }

    /// Shortest periodic displacement along one axis.
    #[inline]
    pub fn wrap(&self, d: f64) -> f64 {
        let h = 0.5 * self.side;
        if d > h {
            d - self.side
        } else if d < -h {
            d + self.side
        } else {
            d
        }
    }

    /// Squared torus distance.
    #[inline]
    pub fn dist2(&self, a: [f64; 2], b: [f64; 2]) -> f64 {
        let dx = self.wrap(a[0] - b[0]);
        let dy = self.wrap(a[1] - b[1]);
        dx * dx + dy * dy
    }
}
