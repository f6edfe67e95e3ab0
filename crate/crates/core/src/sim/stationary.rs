//! Draws from the stationary law of the open segment.

use rand::Rng;

use super::clock::init_rng;
use super::engine::{Dynamics, Engine};
use super::state::SimState;
use crate::error::{Error, Result};
use crate::exact::{solve_sector, Distribution, Sector, DEFAULT_STATE_CAP};
use crate::phase::RateParams;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StationaryMode {
    /// Inverse-CDF draw from the brute-force stationary vector.
    ExactSmall,
    /// Run from a fixed start for `horizon` time units; `None` uses [`default_burnin`].
    Burnin { horizon: Option<f64> },
}

/// Median coalescence time of the extremal pair per site, measured in the
/// high-density fan (A = 2, q = 0, one light, N ≤ 128).
pub const COALESCENCE_PER_SITE: f64 = 9.0;

/// Burn-in horizon `8·C·n/(1−q)` with `C` = [`COALESCENCE_PER_SITE`].
pub fn default_burnin(n: usize, q: f64) -> f64 {
    8.0 * COALESCENCE_PER_SITE * n as f64 / (1.0 - q)
}

/// Start of the burn-in run: lights on `1..=r`, every other site occupied.
pub fn burnin_start(n: usize, r: usize) -> Vec<u8> {
    (0..n).map(|i| if i < r { 2 } else { 1 }).collect()
}

/// Reusable inverse-CDF sampler over one sector.
#[derive(Debug, Clone)]
pub struct ExactSampler {
    sector: Sector,
    cdf: Vec<f64>,
    pi: Distribution,
}

impl ExactSampler {
    pub fn new(n: usize, r: usize, rates: &RateParams) -> Result<Self> {
        let size = crate::exact::sector_size(n, r);
        if size > DEFAULT_STATE_CAP as u128 {
            return Err(Error::Resource { what: format!("sector ({n}, {r})"), needed: size, cap: DEFAULT_STATE_CAP });
        }
        let (sector, pi) = solve_sector(n, r, rates)?;
        let mut acc = 0.0;
        let cdf = pi
            .as_slice()
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        Ok(ExactSampler { sector, cdf, pi })
    }

    pub fn distribution(&self) -> &Distribution {
        &self.pi
    }

    pub fn sector(&self) -> &Sector {
        &self.sector
    }

    /// Index of a drawn configuration in the sector.
    pub fn draw_index<R: Rng>(&self, rng: &mut R) -> usize {
        let u = rng.random::<f64>() * self.cdf.last().copied().unwrap_or(1.0);
        self.cdf.partition_point(|&c| c <= u).min(self.cdf.len() - 1)
    }

    pub fn draw<R: Rng>(&self, rng: &mut R) -> SimState {
        let occ = self.sector.state(self.draw_index(rng));
        SimState::open(occ).expect("sector states are valid")
    }
}

/// One configuration on `1..=n` with `r` lights, approximately or exactly stationary.
pub fn sample_stationary(n: usize, r: usize, rates: &RateParams, mode: StationaryMode, seed: u64) -> Result<SimState> {
    if r > n || n == 0 {
        return Err(Error::Param(format!("need 1 ≤ n and r ≤ n, got n = {n}, r = {r}")));
    }
    rates.validate()?;
    match mode {
        StationaryMode::ExactSmall => Ok(ExactSampler::new(n, r, rates)?.draw(&mut init_rng(seed))),
        StationaryMode::Burnin { horizon } => {
            let horizon = horizon.unwrap_or_else(|| default_burnin(n, rates.q));
            if !(horizon >= 0.0 && horizon.is_finite()) {
                return Err(Error::Param(format!("burn-in horizon must be finite and nonnegative, got {horizon}")));
            }
            static WARNED: std::sync::Once = std::sync::Once::new();
            WARNED.call_once(|| log::warn!("burn-in samples (t = {horizon}) are only approximately stationary"));
            let mut eng = Engine::new(vec![SimState::open(burnin_start(n, r))?], Dynamics::Open(*rates), seed)?;
            eng.run_until(horizon);
            let mut s = eng.into_chains().remove(0);
            s.time = 0.0;
            Ok(s)
        }
    }
}
