//! Disagreement overlays, color projection and trajectory-level ordering checks.

use super::clock::init_rng;
use super::engine::{sample_times, CoupledTrajectory, Dynamics, Engine};
use super::record::{Sample, TrajectoryRecord};
use super::state::{LatticeKind, SimState};
use crate::error::{Error, Result};
use crate::phase::RateParams;

/// `ξ_x = top_x` where the two agree, `2` where they differ.
pub fn overlay(top: &[u8], bottom: &[u8]) -> Vec<u8> {
    top.iter().zip(bottom).map(|(&a, &b)| if a == b { a } else { 2 }).collect()
}

/// Indices of the `2`s of an overlay, increasing.
pub fn second_class_positions(xi: &[u8]) -> Vec<usize> {
    xi.iter().enumerate().filter(|(_, &v)| v == 2).map(|(i, _)| i).collect()
}

/// Type of each second-class particle of `xi`: the value of `partner` at its site.
pub fn second_class_types(xi: &[u8], partner: &[u8]) -> Vec<u8> {
    second_class_positions(xi).into_iter().map(|i| partner[i]).collect()
}

fn binary(occ: &[u8]) -> bool {
    occ.iter().all(|&v| v <= 1)
}

/// `top ≥ bottom` cellwise on `{0,1}` configurations.
pub fn dominates(top: &[u8], bottom: &[u8]) -> bool {
    top.len() == bottom.len() && top.iter().zip(bottom).all(|(a, b)| a >= b)
}

/// One sample of a disagreement process.
#[derive(Debug, Clone, PartialEq)]
pub struct DisagreementSample {
    pub t: f64,
    pub xi: Vec<u8>,
    pub positions: Vec<usize>,
}

/// Overlay trajectory of a coupled pair started from ordered `{0,1}` configurations.
pub fn disagreement(pair: &CoupledTrajectory) -> Result<Vec<DisagreementSample>> {
    let (Some(a), Some(b)) = (pair.first.first(), pair.second.first()) else {
        return Ok(Vec::new());
    };
    if !(binary(a) && binary(b) && dominates(a, b)) {
        return Err(Error::Param("disagreement needs an ordered pair of {0,1} configurations".into()));
    }
    Ok(pair
        .times
        .iter()
        .zip(pair.first.iter().zip(&pair.second))
        .map(|(&t, (a, b))| {
            let xi = overlay(a, b);
            let positions = second_class_positions(&xi);
            DisagreementSample { t, xi, positions }
        })
        .collect())
}

/// Replays an open-segment trajectory from its seed with colored light particles.
///
/// Colors default to all 1. The returned record carries the projected
/// configuration as the snapshot of every sample, and no light positions.
pub fn color_projection(
    record: &TrajectoryRecord,
    rates: &RateParams,
    colors: Option<&[u8]>,
) -> Result<TrajectoryRecord> {
    if !matches!(record.kind, LatticeKind::Open { .. }) {
        return Err(Error::Incompatible("color projection needs an open-segment trajectory".into()));
    }
    let base = SimState::open(record.init.clone())?;
    let colors = match colors {
        Some(c) => c.to_vec(),
        None => vec![1; base.light_count()],
    };
    let start = base.with_colors(colors)?;
    let init = start.projected().expect("colors attached");
    let mut eng = Engine::new(vec![start], Dynamics::Open(*rates), record.seed)?;
    let mut samples = Vec::with_capacity(record.samples.len());
    for s in &record.samples {
        eng.run_until(s.t);
        let st = &eng.chains()[0];
        if st.light_positions() != s.loc {
            return Err(Error::Incompatible("trajectory was not produced by these rates and seed".into()));
        }
        samples.push(Sample { t: s.t, loc: Vec::new(), sites: Vec::new(), snapshot: st.projected() });
    }
    Ok(TrajectoryRecord {
        seed: record.seed,
        kind: record.kind,
        init,
        horizon: record.horizon,
        sample_dt: record.sample_dt,
        samples,
        events: record.events,
    })
}

/// Number of events after which two coupled `{0,1}` chains, ordered at time 0, are not ordered.
///
/// The order is checked after every event, not only at sample times.
pub fn attractivity_violations(
    top: SimState,
    bottom: SimState,
    dynamics: Dynamics,
    horizon: f64,
    seed: u64,
) -> Result<u64> {
    if top.kind() != bottom.kind() {
        return Err(Error::Incompatible("attractivity needs two chains on the same lattice".into()));
    }
    if !(binary(top.occupancy()) && binary(bottom.occupancy()) && dominates(top.occupancy(), bottom.occupancy())) {
        return Err(Error::Param("attractivity needs ordered {0,1} configurations".into()));
    }
    let off = top.offset();
    let mut eng = Engine::new(vec![top, bottom], dynamics, seed)?;
    let mut violations = 0;
    while let Some(ev) = eng.step_until(horizon) {
        if !ev.changed {
            continue;
        }
        let (a, b) = (eng.chains()[0].occupancy(), eng.chains()[1].occupancy());
        let bad = (ev.lo..=ev.hi).any(|x| {
            let i = (x - off) as usize;
            a[i] < b[i]
        });
        violations += bad as u64;
    }
    Ok(violations)
}

/// Which extreme second-class particles two disagreement processes compare.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairSide {
    /// `S` lies left of `S′`: rightmost of `ξ` stays ≤ rightmost of `ξ′`.
    Left,
    /// `S` lies right of `S′`: leftmost of `ξ′` stays ≤ leftmost of `ξ`.
    Right,
}

/// Result of one pair-ordering trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct PairOrdering {
    pub side: PairSide,
    pub samples: usize,
    pub violations: usize,
    pub events: u64,
}

/// Runs two disagreement processes on a window, both built over the same `{0,1}`
/// background `zeta` by marking the sets `s` and `s_prime`, and checks the ordering of
/// their extreme second-class particles at each sample time.
///
/// Errors unless the sets are disjoint and on opposite sides and, for each value
/// `v ∈ {0,1}`, `#{x ∈ s : zeta_x = v} ≤ #{x ∈ s_prime : zeta_x = v}`.
#[allow(clippy::too_many_arguments)]
pub fn pair_ordering(
    l: i64,
    zeta: &[u8],
    s: &[i64],
    s_prime: &[i64],
    q: f64,
    horizon: f64,
    seed: u64,
    sample_dt: f64,
) -> Result<PairOrdering> {
    if zeta.len() as i64 != 2 * l + 1 || !binary(zeta) {
        return Err(Error::Param("background must be a {0,1} configuration on the window".into()));
    }
    if s.is_empty() || s_prime.is_empty() {
        return Err(Error::Param("both marked sets must be nonempty".into()));
    }
    if s.iter().chain(s_prime).any(|x| x.abs() > l - 1) {
        return Err(Error::Index("marked sites must be interior cells".into()));
    }
    let (s_max, s_min) = (*s.iter().max().unwrap(), *s.iter().min().unwrap());
    let (p_max, p_min) = (*s_prime.iter().max().unwrap(), *s_prime.iter().min().unwrap());
    let side = if s_max < p_min {
        PairSide::Left
    } else if p_max < s_min {
        PairSide::Right
    } else {
        return Err(Error::Param("marked sets must lie on opposite sides".into()));
    };
    let at = |x: i64| zeta[(x + l) as usize];
    for v in 0..=1u8 {
        let a = s.iter().filter(|&&x| at(x) == v).count();
        let b = s_prime.iter().filter(|&&x| at(x) == v).count();
        if a > b {
            return Err(Error::Param(format!("type-{v} count of S exceeds that of S'")));
        }
    }
    let marked = |set: &[i64], v: u8| {
        let mut c = zeta.to_vec();
        for &x in set {
            c[(x + l) as usize] = v;
        }
        SimState::window(l, c)
    };
    let chains = vec![marked(s, 1)?, marked(s, 0)?, marked(s_prime, 1)?, marked(s_prime, 0)?];
    let mut eng = Engine::new(chains, Dynamics::Line { q }, seed)?;
    let times = sample_times(horizon, sample_dt)?;
    let mut violations = 0;
    for &t in &times {
        eng.run_until(t);
        let c = eng.chains();
        let xi = overlay(c[0].occupancy(), c[1].occupancy());
        let xi2 = overlay(c[2].occupancy(), c[3].occupancy());
        let (z, z2) = (second_class_positions(&xi), second_class_positions(&xi2));
        let ok = match side {
            PairSide::Left => z.last() <= z2.last(),
            PairSide::Right => z2.first() <= z.first(),
        };
        if z.len() != s.len() || z2.len() != s_prime.len() || !ok {
            violations += 1;
        }
    }
    Ok(PairOrdering { side, samples: times.len(), violations, events: eng.events() })
}

/// Random inputs for [`pair_ordering`] satisfying its hypotheses, drawn from `seed`.
///
/// `S` gets up to `max_set` cells in the left half, `S′` one or more in the right
/// half; the background is Bernoulli(`rho`) and is resampled until the counts hold.
pub fn random_pair_setup(l: i64, rho: f64, max_set: usize, seed: u64) -> (Vec<u8>, Vec<i64>, Vec<i64>) {
    use rand::seq::index::sample;
    use rand::Rng;
    let mut rng = init_rng(seed);
    let half = (l - 2) as usize;
    loop {
        let zeta: Vec<u8> = (0..2 * l + 1).map(|_| rng.random_bool(rho) as u8).collect();
        let a = rng.random_range(1..=max_set.min(half));
        let b = rng.random_range(a..=(2 * max_set).min(half));
        let mut s: Vec<i64> = sample(&mut rng, half, a).into_iter().map(|i| -(i as i64) - 1).collect();
        let mut p: Vec<i64> = sample(&mut rng, half, b).into_iter().map(|i| i as i64 + 1).collect();
        if rng.random_bool(0.5) {
            s.iter_mut().for_each(|x| *x = -*x);
            p.iter_mut().for_each(|x| *x = -*x);
        }
        let at = |x: i64| zeta[(x + l) as usize];
        let ok =
            (0..=1u8).all(|v| s.iter().filter(|&&x| at(x) == v).count() <= p.iter().filter(|&&x| at(x) == v).count());
        if ok {
            return (zeta, s, p);
        }
    }
}
