//! Fixtures shared by the benchmarks.

use lightasep::{BoundaryParams, RateParams};

/// Maximal current parameters with all four boundary rates active.
pub fn max_current() -> BoundaryParams {
    BoundaryParams::new(0.5, -0.2, 0.3, -0.1, 0.3).unwrap()
}

/// High density fan, the setting of the coalescence runs.
pub fn high_density() -> BoundaryParams {
    BoundaryParams::new(2.0, 0.0, 0.0, 0.0, 0.0).unwrap()
}

pub fn rates(b: &BoundaryParams) -> RateParams {
    lightasep::phase::boundary_to_rates(b)
}
