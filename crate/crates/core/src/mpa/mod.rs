//! Matrix product ansatz with an explicit tridiagonal representation.

mod aw;
mod coefficients;
mod real;
mod representation;
mod sweep;

pub use aw::{aw_first_moment, sigma_left_via_aw};
pub use coefficients::{AwCoefficients, DENOMINATOR_GUARD};
pub use real::{DoubleDouble, Precision, Real};
pub use representation::{build_representation, verify_dehp, DehpResiduals, MpaRepresentation, Tridiagonal};
pub use sweep::{
    config_probability, default_truncation, densities_with, guard_nonzero, loc1_distribution, loc1_with,
    partition_values, site_densities_mpa, site_density_mpa, LocMethod, PartitionValues, Scaled,
};
