//! Open ASEP with light (second-class) particles.
//!
//! Three independent routes to the stationary measure: brute-force generator
//! solves ([`exact`]), the matrix product ansatz with an explicit tridiagonal
//! representation ([`mpa`]), and coupled Monte Carlo ([`sim`]). The
//! [`phase`] module holds the parameter maps and closed-form limits, and
//! [`experiments`] confronts the three with each other.

mod error;
pub mod exact;
pub mod experiments;
pub mod mpa;
pub mod phase;
pub mod sim;

pub use error::{Error, Result};
pub use phase::{BoundaryParams, Phase, PhaseLabel, RateParams, Region};
