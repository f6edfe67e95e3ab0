//! The line ASEP approximated on a window whose two extreme cells never move.

use rand::Rng;

use super::clock::init_rng;
use super::engine::{sample_times, take_sample, Dynamics, Engine};
use super::record::{SampleSpec, TrajectoryRecord};
use super::state::{LatticeKind, SimState};
use crate::error::{Error, Result};

/// Smallest half-width that keeps the frozen ends out of reach of the observed
/// region up to time `t`, with high probability.
pub fn min_half_width(t: f64, range: i64) -> i64 {
    (4.0 * t + 10.0 * t.sqrt()).ceil() as i64 + range.max(0)
}

/// Bernoulli(`rho`) cells on `[−l, l]` with fixed values at `overrides`.
pub fn window_init(l: i64, rho: f64, overrides: &[(i64, u8)], seed: u64) -> Result<SimState> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::Param(format!("rho must lie in [0, 1], got {rho}")));
    }
    if l < 2 {
        return Err(Error::Param(format!("window half-width must be at least 2, got {l}")));
    }
    let mut rng = init_rng(seed);
    let mut occ: Vec<u8> = (0..2 * l + 1).map(|_| rng.random_bool(rho) as u8).collect();
    for &(x, v) in overrides {
        if x.abs() > l - 1 {
            return Err(Error::Index(format!("override at {x} is not an interior cell of [-{l}, {l}]")));
        }
        if v > 2 {
            return Err(Error::Param(format!("species must be 0, 1 or 2, got {v}")));
        }
        occ[(x + l) as usize] = v;
    }
    SimState::window(l, occ)
}

fn observed_range(init: &SimState, spec: &SampleSpec) -> i64 {
    init.light_positions().iter().chain(&spec.sites).map(|x| x.abs()).max().unwrap_or(0)
}

/// Runs the window dynamics to `horizon`, sampling at multiples of `sample_dt`.
///
/// Between samples all events are applied in one burst, which gives the exact
/// law of the process at the sample times.
pub fn simulate_window(
    init: &SimState,
    q: f64,
    horizon: f64,
    seed: u64,
    sample_dt: f64,
    spec: &SampleSpec,
) -> Result<TrajectoryRecord> {
    let LatticeKind::Window { l } = init.kind() else {
        return Err(Error::Incompatible("simulate_window needs a window state".into()));
    };
    let need = min_half_width(horizon, observed_range(init, spec));
    if l < need {
        return Err(Error::WindowTooSmall { have: l, need });
    }
    let times = sample_times(horizon, sample_dt)?;
    let mut start = init.clone();
    start.time = 0.0;
    let mut eng = Engine::new(vec![start], Dynamics::Line { q }, seed)?;
    let mut samples = Vec::with_capacity(times.len());
    for &t in &times {
        let dt = t - eng.time();
        if dt > 0.0 {
            eng.advance_burst(dt);
        }
        samples.push(take_sample(&eng.chains()[0], t, spec));
    }
    Ok(TrajectoryRecord {
        seed,
        kind: init.kind(),
        init: init.occupancy().to_vec(),
        horizon,
        sample_dt,
        samples,
        events: eng.events(),
    })
}

/// Positions at `times` of a single light particle started at 0 in a Bernoulli(`rho`) window of half-width `l`.
///
/// Same random stream as [`simulate_window`] on the state from
/// `window_init(l, rho, &[(0, 2)], seed)`, with a tighter inner loop.
pub fn light_path(l: i64, rho: f64, q: f64, times: &[f64], seed: u64) -> Result<Vec<i64>> {
    if !(0.0..1.0).contains(&q) {
        return Err(Error::Param(format!("q must lie in [0, 1), got {q}")));
    }
    let horizon = times.last().copied().unwrap_or(0.0);
    if times.windows(2).any(|w| w[1] <= w[0]) || times.first().is_some_and(|&t| t < 0.0) {
        return Err(Error::Param("sample times must be nonnegative and increasing".into()));
    }
    let need = min_half_width(horizon, 0);
    if l < need {
        return Err(Error::WindowTooSmall { have: l, need });
    }
    let init = window_init(l, rho, &[(0, 2)], seed)?;
    // Cells hold species ranks so that each clock ring is a min/max sort.
    let rank = super::state::RANK;
    let mut cells: Vec<u8> = init.occupancy().iter().map(|&v| rank[v as usize]).collect();
    let light = rank[2];
    let layout = super::clock::ChannelLayout { edge_lo: -l + 1, n_edges: (2 * l - 2) as u64, q, boundary: [0.0; 4] };
    let mut stream = super::clock::ClockStream::new(seed, layout);
    let total = layout.total_rate();
    let mut out = Vec::with_capacity(times.len());
    let mut now = 0.0;
    for &t in times {
        let k = if t > now { stream.poisson_count(t - now) } else { 0 };
        now = t;
        for _ in 0..k {
            let r = stream.next_word();
            let Ok((e, up)) = super::clock::bulk_from_word(r, layout.n_edges, q, total, true) else {
                unreachable!("no boundary clocks on a window")
            };
            // edge index e covers cells e+1 and e+2
            let i = e as usize + 1;
            let (a, b) = (cells[i], cells[i + 1]);
            let (lo, hi) = (a.min(b), a.max(b));
            let (x, y) = if up { (lo, hi) } else { (hi, lo) };
            cells[i] = x;
            cells[i + 1] = y;
        }
        let pos = cells.iter().position(|&v| v == light).expect("the light particle is conserved");
        out.push(pos as i64 - l);
    }
    Ok(out)
}
