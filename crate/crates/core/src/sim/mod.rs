//! Graphical-construction simulation of the open segment and of windows of the line.

mod clock;
mod coupling;
mod engine;
mod record;
mod state;
mod stationary;
mod window;

pub use clock::{init_rng, BoundaryChannel, Channel, ChannelLayout, ClockStream, Event};
pub use coupling::{
    attractivity_violations, color_projection, disagreement, dominates, overlay, pair_ordering, random_pair_setup,
    second_class_positions, second_class_types, DisagreementSample, PairOrdering, PairSide,
};
pub use engine::{
    coalescence_time, couple, occupation_fractions, sample_times, simulate_open, time_average, CoupledTrajectory,
    Dynamics, Engine, Touched,
};
pub use record::{fmt_f64, rle_decode, rle_encode, Sample, SampleSpec, TrajectoryRecord};
pub use state::{LatticeKind, SimState};
pub use stationary::{
    burnin_start, default_burnin, sample_stationary, ExactSampler, StationaryMode, COALESCENCE_PER_SITE,
};
pub use window::{light_path, min_half_width, simulate_window, window_init};
