//! Brute-force ground truth on small lattices.

mod generator;
mod observables;
mod sector;
mod solve;

pub use generator::{build_generator, build_generator_with_cap, GeneratorMatrix};
pub use observables::{
    loc_marginals, simple_relation_guard, simple_relation_table, site_densities, site_density, solve_sector,
    verify_simple_relation, RelationRow, RELATION_GUARD, RELATION_GUARD_POWERS,
};
pub use sector::{sector_size, Sector, DEFAULT_STATE_CAP, MAX_SITES};
pub use solve::{
    mixing_time_exact, mixing_time_of, stationary, transient, tv_distance, worst_case_tv, Distribution, DENSE_LIMIT,
    NEGATIVE_SLACK, RESIDUAL_TOL,
};
