//! One superposed Poisson clock for every channel of the graphical construction.
//!
//! Each bulk edge `{x, x+1}` carries a rate-1 "sort up" clock and a rate-q
//! "sort down" clock, and an open segment adds four boundary clocks. The
//! superposition has a state-independent total rate Λ, so drawing event times
//! at rate Λ and marking each event with a channel chosen proportionally to its
//! rate realizes the independent clocks exactly. Chains fed from the same
//! stream therefore share clocks on every channel they both own.

use rand::{RngCore, SeedableRng};
use rand_distr::{Distribution, Poisson};
use rand_xoshiro::Xoshiro256PlusPlus;

const UNIT: f64 = 1.0 / (1u64 << 53) as f64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryChannel {
    /// Left injection, rate α.
    Alpha,
    /// Left ejection, rate γ.
    Gamma,
    /// Right ejection, rate β.
    Beta,
    /// Right injection, rate δ.
    Delta,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Channel {
    /// Edge `{x, x+1}`; `up` for the rate-1 clock.
    Edge {
        x: i64,
        up: bool,
    },
    Boundary(BoundaryChannel),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    pub time: f64,
    pub channel: Channel,
}

/// Map of channels: edges `edge_lo ..= edge_lo + n_edges − 1` plus optional boundary clocks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelLayout {
    pub edge_lo: i64,
    pub n_edges: u64,
    pub q: f64,
    /// `(α, γ, β, δ)`; all zero when no open segment is present.
    pub boundary: [f64; 4],
}

impl ChannelLayout {
    pub fn bulk_rate(&self) -> f64 {
        self.n_edges as f64 * (1.0 + self.q)
    }

    pub fn boundary_rate(&self) -> f64 {
        self.boundary.iter().sum()
    }

    pub fn total_rate(&self) -> f64 {
        self.bulk_rate() + self.boundary_rate()
    }
}

/// Decodes one uniform word into a bulk channel when `u` lies below the bulk rate.
#[inline(always)]
pub(crate) fn bulk_from_word(r: u64, n_edges: u64, q: f64, total: f64, pure_edges: bool) -> Result<(u64, bool), f64> {
    if pure_edges && q == 0.0 {
        return Ok((((r as u128 * n_edges as u128) >> 64) as u64, true));
    }
    let u = (r >> 11) as f64 * UNIT * total;
    let bulk = n_edges as f64 * (1.0 + q);
    if u < bulk {
        let k = u / (1.0 + q);
        let e = (k as u64).min(n_edges - 1);
        let up = (k - e as f64) * (1.0 + q) < 1.0;
        Ok((e, up))
    } else {
        Err(u - bulk)
    }
}

#[derive(Debug, Clone)]
pub struct ClockStream {
    seed: u64,
    rng: Xoshiro256PlusPlus,
    layout: ChannelLayout,
    total: f64,
    pure: bool,
    time: f64,
    draws: u64,
}

impl ClockStream {
    pub fn new(seed: u64, layout: ChannelLayout) -> Self {
        ClockStream {
            seed,
            rng: Xoshiro256PlusPlus::seed_from_u64(seed),
            total: layout.total_rate(),
            pure: layout.boundary_rate() == 0.0,
            layout,
            time: 0.0,
            draws: 0,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn layout(&self) -> &ChannelLayout {
        &self.layout
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn total_rate(&self) -> f64 {
        self.total
    }

    /// Number of channel marks drawn so far.
    pub fn draws(&self) -> u64 {
        self.draws
    }

    /// Channel of the next event, chosen proportionally to the channel rates.
    #[inline]
    pub fn draw_channel(&mut self) -> Channel {
        let r = self.next_word();
        let l = &self.layout;
        match bulk_from_word(r, l.n_edges, l.q, self.total, self.pure) {
            Ok((e, up)) => Channel::Edge { x: l.edge_lo + e as i64, up },
            Err(mut v) => {
                use BoundaryChannel::*;
                let names = [Alpha, Gamma, Beta, Delta];
                let mut last = Alpha;
                for (name, &rate) in names.iter().zip(&l.boundary) {
                    if rate > 0.0 {
                        last = *name;
                        if v < rate {
                            return Channel::Boundary(*name);
                        }
                        v -= rate;
                    }
                }
                Channel::Boundary(last)
            }
        }
    }

    /// Raw word behind the next channel mark.
    #[inline(always)]
    pub(crate) fn next_word(&mut self) -> u64 {
        self.draws += 1;
        self.rng.next_u64()
    }

    /// Next event of the superposed clock.
    pub fn next_event(&mut self) -> Event {
        let r = self.rng.next_u64();
        let u = ((r >> 11) + 1) as f64 * UNIT;
        self.time += -u.ln() / self.total;
        let channel = self.draw_channel();
        Event { time: self.time, channel }
    }

    /// Number of events in the next `dt` time units; advances the clock by `dt`.
    pub fn poisson_count(&mut self, dt: f64) -> u64 {
        self.time += dt;
        let mean = self.total * dt;
        if mean <= 0.0 {
            return 0;
        }
        Poisson::new(mean).expect("finite positive mean").sample(&mut self.rng) as u64
    }
}

/// Independent generator for initial data, derived from a run seed.
pub fn init_rng(seed: u64) -> Xoshiro256PlusPlus {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    rng.long_jump();
    rng
}

#[cfg(test)]
mod tests {
    use super::*;

    fn layout(q: f64, boundary: [f64; 4]) -> ChannelLayout {
        ChannelLayout { edge_lo: 1, n_edges: 5, q, boundary }
    }

    #[test]
    fn identical_seeds_give_identical_streams() {
        let mut a = ClockStream::new(9, layout(0.3, [1.0, 0.2, 0.5, 0.1]));
        let mut b = ClockStream::new(9, layout(0.3, [1.0, 0.2, 0.5, 0.1]));
        for _ in 0..1000 {
            assert_eq!(a.next_event(), b.next_event());
        }
        let mut c = ClockStream::new(10, layout(0.3, [1.0, 0.2, 0.5, 0.1]));
        assert_ne!(a.next_event(), c.next_event());
    }

    #[test]
    fn channel_frequencies_follow_rates() {
        let l = layout(0.5, [1.0, 0.25, 0.75, 0.0]);
        let mut s = ClockStream::new(4, l);
        let draws = 400_000;
        let mut up = 0usize;
        let mut down = 0usize;
        let mut bnd = [0usize; 4];
        for _ in 0..draws {
            match s.draw_channel() {
                Channel::Edge { up: true, .. } => up += 1,
                Channel::Edge { up: false, .. } => down += 1,
                Channel::Boundary(b) => bnd[b as usize] += 1,
            }
        }
        let total = l.total_rate();
        let check = |count: usize, rate: f64| {
            let p = rate / total;
            let sd = (draws as f64 * p * (1.0 - p)).sqrt();
            assert!((count as f64 - draws as f64 * p).abs() < 5.0 * sd + 1.0, "{count} vs {p}");
        };
        check(up, 5.0);
        check(down, 2.5);
        check(bnd[0], 1.0);
        check(bnd[1], 0.25);
        check(bnd[2], 0.75);
        assert_eq!(bnd[3], 0);
    }
}
