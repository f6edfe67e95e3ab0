//! Desk-scale experiments confronting exact, MPA and simulated data with the
//! large-N limits.

pub mod acceptance;
mod analytic;
mod config;
mod report;
mod stochastic;

pub use analytic::{exp_boundary_density, exp_coexistence_profile, exp_mass_split, exp_uniformity, TREND_SLACK};
pub use config::ExperimentConfig;
pub use report::{median_interval, quantile, to_json17, Fit, RawTable, Row, ScalingReport, Verdict, Z95};
pub use stochastic::{
    exp_coalescence, exp_concentration, exp_drift, exp_hitting, extremal_pair, replicate, EXACT_START_LIMIT,
};

/// Names accepted by [`run_experiment`].
pub const EXPERIMENTS: [&str; 8] = [
    "mass-split",
    "concentration",
    "uniformity",
    "coexistence-profile",
    "boundary-density",
    "drift",
    "hitting",
    "coalescence",
];

pub fn run_experiment(name: &str, cfg: &ExperimentConfig) -> crate::Result<ScalingReport> {
    match name {
        "mass-split" => exp_mass_split(cfg),
        "concentration" => exp_concentration(cfg),
        "uniformity" => exp_uniformity(cfg),
        "coexistence-profile" => exp_coexistence_profile(cfg),
        "boundary-density" => exp_boundary_density(cfg),
        "drift" => exp_drift(cfg),
        "hitting" => exp_hitting(cfg),
        "coalescence" => exp_coalescence(cfg),
        other => Err(crate::Error::Config(format!("unknown experiment {other:?}"))),
    }
}
