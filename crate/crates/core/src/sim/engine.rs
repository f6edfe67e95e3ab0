//! Event loop driving any number of chains from one clock stream.

use super::clock::{BoundaryChannel, Channel, ChannelLayout, ClockStream, Event};
use super::record::{Sample, SampleSpec, TrajectoryRecord};
use super::state::{union_edges, LatticeKind, SimState};
use crate::error::{Error, Result};
use crate::phase::RateParams;

/// Rates shared by all chains of an engine.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Dynamics {
    /// Bulk clocks only.
    Line { q: f64 },
    /// Bulk clocks plus reservoirs acting on every open chain.
    Open(RateParams),
}

impl Dynamics {
    pub fn q(&self) -> f64 {
        match self {
            Dynamics::Line { q } => *q,
            Dynamics::Open(r) => r.q,
        }
    }
}

/// Coordinates an applied event may have modified.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Touched {
    pub time: f64,
    pub channel: Channel,
    pub lo: i64,
    pub hi: i64,
    /// True when at least one chain changed.
    pub changed: bool,
}

#[derive(Debug, Clone)]
pub struct Engine {
    stream: ClockStream,
    chains: Vec<SimState>,
    pending: Option<Event>,
    now: f64,
    open_n: Option<usize>,
}

impl Engine {
    pub fn new(chains: Vec<SimState>, dynamics: Dynamics, seed: u64) -> Result<Self> {
        if chains.is_empty() {
            return Err(Error::Param("an engine needs at least one chain".into()));
        }
        let q = dynamics.q();
        if !(0.0..1.0).contains(&q) {
            return Err(Error::Param(format!("q must lie in [0, 1), got {q}")));
        }
        let mut open_n = None;
        for c in &chains {
            if let LatticeKind::Open { n } = c.kind() {
                if open_n.is_some_and(|m| m != n) {
                    return Err(Error::Incompatible("open chains of different lengths".into()));
                }
                open_n = Some(n);
            }
        }
        let boundary = match (dynamics, open_n) {
            (Dynamics::Open(r), Some(_)) => {
                r.validate()?;
                [r.alpha, r.gamma, r.beta, r.delta]
            }
            (Dynamics::Line { .. }, Some(_)) => {
                return Err(Error::Incompatible("open chains need reservoir rates".into()))
            }
            _ => [0.0; 4],
        };
        let (lo, hi) = union_edges(&chains);
        let n_edges = if hi >= lo { (hi - lo + 1) as u64 } else { 0 };
        let layout = ChannelLayout { edge_lo: if n_edges > 0 { lo } else { 0 }, n_edges, q, boundary };
        if layout.total_rate() <= 0.0 {
            return Err(Error::Param("no clock has positive rate".into()));
        }
        let now = chains[0].time;
        Ok(Engine { stream: ClockStream::new(seed, layout), chains, pending: None, now, open_n })
    }

    pub fn chains(&self) -> &[SimState] {
        &self.chains
    }

    pub fn into_chains(self) -> Vec<SimState> {
        self.chains
    }

    pub fn time(&self) -> f64 {
        self.now
    }

    /// Clock rings processed so far.
    pub fn events(&self) -> u64 {
        self.stream.draws() - self.pending.is_some() as u64
    }

    pub fn stream(&self) -> &ClockStream {
        &self.stream
    }

    fn touched_range(&self, ch: Channel) -> (i64, i64) {
        match ch {
            Channel::Edge { x, .. } => (x, x + 1),
            Channel::Boundary(BoundaryChannel::Alpha | BoundaryChannel::Gamma) => (1, 1),
            Channel::Boundary(_) => {
                let n = self.open_n.unwrap_or(1) as i64;
                (n, n)
            }
        }
    }

    #[inline]
    fn apply_all(&mut self, ch: Channel) -> bool {
        let mut changed = false;
        for c in self.chains.iter_mut() {
            changed |= c.apply(ch);
        }
        changed
    }

    /// Applies the next event if it rings no later than `t_end`; otherwise advances time to `t_end`.
    pub fn step_until(&mut self, t_end: f64) -> Option<Touched> {
        let ev = match self.pending.take() {
            Some(ev) => ev,
            None => self.stream.next_event(),
        };
        if ev.time > t_end {
            self.pending = Some(ev);
            self.set_time(t_end);
            return None;
        }
        let changed = self.apply_all(ev.channel);
        self.set_time(ev.time);
        let (lo, hi) = self.touched_range(ev.channel);
        Some(Touched { time: ev.time, channel: ev.channel, lo, hi, changed })
    }

    fn set_time(&mut self, t: f64) {
        self.now = t;
        for c in self.chains.iter_mut() {
            c.time = t;
        }
    }

    /// Applies all events of the next `dt` time units without resolving their times.
    ///
    /// The state after the burst has the exact law of the process at `time + dt`.
    pub fn advance_burst(&mut self, dt: f64) {
        debug_assert!(self.pending.is_none(), "burst mode cannot follow event mode");
        let k = self.stream.poisson_count(dt);
        for _ in 0..k {
            let ch = self.stream.draw_channel();
            self.apply_all(ch);
        }
        let t = self.now + dt;
        self.set_time(t);
    }

    /// Runs to `t_end` in event mode.
    pub fn run_until(&mut self, t_end: f64) {
        while self.step_until(t_end).is_some() {}
    }
}

/// Sample times `0, dt, 2dt, … ≤ horizon`.
pub fn sample_times(horizon: f64, dt: f64) -> Result<Vec<f64>> {
    if !(horizon >= 0.0 && horizon.is_finite()) {
        return Err(Error::Param(format!("horizon must be finite and nonnegative, got {horizon}")));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Param(format!("sample interval must be positive, got {dt}")));
    }
    let k = (horizon / dt + 1e-9).floor() as usize;
    Ok((0..=k).map(|i| i as f64 * dt).collect())
}

pub(crate) fn take_sample(s: &SimState, t: f64, spec: &SampleSpec) -> Sample {
    Sample {
        t,
        loc: s.light_positions(),
        sites: spec.sites.iter().map(|&x| s.at(x).unwrap_or(u8::MAX)).collect(),
        snapshot: spec.snapshots.then(|| s.occupancy().to_vec()),
    }
}

fn check_sites(s: &SimState, spec: &SampleSpec) -> Result<()> {
    if let Some(x) = spec.sites.iter().find(|&&x| s.at(x).is_none()) {
        return Err(Error::Index(format!("observed site {x} is not on the lattice")));
    }
    Ok(())
}

/// Exact event-driven run of the open ASEP with light particles.
pub fn simulate_open(
    init: &SimState,
    rates: &RateParams,
    horizon: f64,
    seed: u64,
    sample_dt: f64,
    spec: &SampleSpec,
) -> Result<(TrajectoryRecord, SimState)> {
    if !matches!(init.kind(), LatticeKind::Open { .. }) {
        return Err(Error::Incompatible("simulate_open needs an open-segment state".into()));
    }
    check_sites(init, spec)?;
    let times = sample_times(horizon, sample_dt)?;
    let mut start = init.clone();
    start.time = 0.0;
    let mut eng = Engine::new(vec![start], Dynamics::Open(*rates), seed)?;
    let mut samples = Vec::with_capacity(times.len());
    for &t in &times {
        eng.run_until(t);
        samples.push(take_sample(&eng.chains()[0], t, spec));
    }
    eng.run_until(horizon);
    let events = eng.events();
    let last = eng.into_chains().remove(0);
    let record = TrajectoryRecord {
        seed,
        kind: init.kind(),
        init: init.occupancy().to_vec(),
        horizon,
        sample_dt,
        samples,
        events,
    };
    Ok((record, last))
}

/// Time average over `[t_from, t_to]` of `f(state of chain 0)`, evaluated after every change.
pub fn time_average<F: FnMut(&SimState) -> f64>(eng: &mut Engine, t_from: f64, t_to: f64, mut f: F) -> f64 {
    eng.run_until(t_from);
    let mut acc = 0.0;
    let mut last_t = t_from;
    let mut val = f(&eng.chains()[0]);
    while let Some(ev) = eng.step_until(t_to) {
        if ev.changed {
            acc += val * (ev.time - last_t);
            last_t = ev.time;
            val = f(&eng.chains()[0]);
        }
    }
    acc += val * (t_to - last_t);
    acc / (t_to - t_from)
}

/// Fraction of `[t_from, t_to]` each cell of chain `chain` spends with value 1.
///
/// With `projected`, light particles count with their colors.
pub fn occupation_fractions(eng: &mut Engine, chain: usize, t_from: f64, t_to: f64, projected: bool) -> Vec<f64> {
    let view = |s: &SimState| {
        if projected {
            s.projected().unwrap_or_else(|| s.occupancy().to_vec())
        } else {
            s.occupancy().to_vec()
        }
    };
    eng.run_until(t_from);
    let off = eng.chains()[chain].offset();
    let mut cur = view(&eng.chains()[chain]);
    let mut since = vec![t_from; cur.len()];
    let mut acc = vec![0.0; cur.len()];
    while let Some(ev) = eng.step_until(t_to) {
        if !ev.changed {
            continue;
        }
        let s = &eng.chains()[chain];
        let colors_touched = projected && s.light_count() > 0;
        let range: Box<dyn Iterator<Item = usize>> = if colors_touched {
            Box::new(0..cur.len())
        } else {
            let lo = (ev.lo - off).max(0) as usize;
            let hi = ((ev.hi - off) as usize).min(cur.len() - 1);
            Box::new(lo..=hi)
        };
        let now = if colors_touched { Some(view(s)) } else { None };
        for i in range {
            let v = match &now {
                Some(p) => p[i],
                None => s.occupancy()[i],
            };
            if v != cur[i] {
                if cur[i] == 1 {
                    acc[i] += ev.time - since[i];
                }
                since[i] = ev.time;
                cur[i] = v;
            }
        }
    }
    for i in 0..cur.len() {
        if cur[i] == 1 {
            acc[i] += t_to - since[i];
        }
    }
    acc.iter().map(|a| a / (t_to - t_from)).collect()
}

/// Trajectory of two chains under shared clocks.
#[derive(Debug, Clone)]
pub struct CoupledTrajectory {
    pub seed: u64,
    pub times: Vec<f64>,
    pub first: Vec<Vec<u8>>,
    pub second: Vec<Vec<u8>>,
    pub coalescence_time: Option<f64>,
    pub events: u64,
}

/// Runs two chains under the basic coupling.
///
/// Channels outside a chain's lattice leave it unchanged, so each chain sees
/// independent clocks wherever the other one has none.
pub fn couple(
    a: SimState,
    b: SimState,
    dynamics: Dynamics,
    horizon: f64,
    seed: u64,
    sample_dt: f64,
) -> Result<CoupledTrajectory> {
    let same_lattice = a.kind() == b.kind();
    let compatible = match (a.kind(), b.kind()) {
        (LatticeKind::Open { n }, LatticeKind::Open { n: m }) => n == m,
        (LatticeKind::Open { n }, LatticeKind::Window { l }) | (LatticeKind::Window { l }, LatticeKind::Open { n }) => {
            (n as i64) < l
        }
        _ => true,
    };
    if !compatible {
        return Err(Error::Incompatible(format!("cannot couple {:?} with {:?}", a.kind(), b.kind())));
    }
    let times = sample_times(horizon, sample_dt)?;
    let mut eng = Engine::new(vec![a, b], dynamics, seed)?;
    let mut diff = if same_lattice { count_diff(&eng.chains()[0], &eng.chains()[1]) } else { usize::MAX };
    let mut coal = (diff == 0).then_some(0.0);
    let mut out = CoupledTrajectory {
        seed,
        times: times.clone(),
        first: Vec::with_capacity(times.len()),
        second: Vec::with_capacity(times.len()),
        coalescence_time: None,
        events: 0,
    };
    for &t in &times {
        while let Some(ev) = eng.step_until(t) {
            if same_lattice && coal.is_none() && ev.changed {
                diff = count_diff(&eng.chains()[0], &eng.chains()[1]);
                if diff == 0 {
                    coal = Some(ev.time);
                }
            }
        }
        out.first.push(eng.chains()[0].occupancy().to_vec());
        out.second.push(eng.chains()[1].occupancy().to_vec());
    }
    out.coalescence_time = coal;
    out.events = eng.events();
    Ok(out)
}

fn count_diff(a: &SimState, b: &SimState) -> usize {
    a.occupancy().iter().zip(b.occupancy()).filter(|(x, y)| x != y).count()
}

/// First time two open chains under shared clocks become identical, if before `max_time`.
pub fn coalescence_time(a: SimState, b: SimState, rates: &RateParams, seed: u64, max_time: f64) -> Result<Option<f64>> {
    if a.kind() != b.kind() {
        return Err(Error::Incompatible("coalescence needs chains on the same lattice".into()));
    }
    let mut eng = Engine::new(vec![a, b], Dynamics::Open(*rates), seed)?;
    let off = eng.chains()[0].offset();
    let mut diff = count_diff(&eng.chains()[0], &eng.chains()[1]);
    if diff == 0 {
        return Ok(Some(0.0));
    }
    let mut mismatch: Vec<bool> =
        eng.chains()[0].occupancy().iter().zip(eng.chains()[1].occupancy()).map(|(x, y)| x != y).collect();
    while let Some(ev) = eng.step_until(max_time) {
        if !ev.changed {
            continue;
        }
        for x in ev.lo..=ev.hi {
            let i = (x - off) as usize;
            let now = eng.chains()[0].occupancy()[i] != eng.chains()[1].occupancy()[i];
            if now != mismatch[i] {
                mismatch[i] = now;
                if now {
                    diff += 1;
                } else {
                    diff -= 1;
                }
            }
        }
        if diff == 0 {
            return Ok(Some(ev.time));
        }
    }
    Ok(None)
}
