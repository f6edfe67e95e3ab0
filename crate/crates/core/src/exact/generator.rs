//! Sparse CTMC generator of the open ASEP with light particles on one sector.

use super::sector::{Sector, DEFAULT_STATE_CAP};
use crate::error::Result;
use crate::phase::RateParams;

/// Position of a species in the order `0 ≺ 2 ≺ 1`.
#[inline]
pub(crate) fn rank(species: u8) -> u8 {
    match species {
        0 => 0,
        2 => 1,
        _ => 2,
    }
}

/// Off-diagonal rates in CSR layout plus per-state exit rates. Immutable once built.
#[derive(Debug, Clone)]
pub struct GeneratorMatrix {
    sector: Sector,
    rates: RateParams,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<f64>,
    exit: Vec<f64>,
}

pub fn build_generator(n: usize, r: usize, rates: &RateParams) -> Result<GeneratorMatrix> {
    build_generator_with_cap(n, r, rates, DEFAULT_STATE_CAP)
}

pub fn build_generator_with_cap(n: usize, r: usize, rates: &RateParams, cap: usize) -> Result<GeneratorMatrix> {
    rates.validate()?;
    let sector = Sector::enumerate_with_cap(n, r, cap)?;
    Ok(GeneratorMatrix::from_sector(sector, rates))
}

impl GeneratorMatrix {
    pub fn from_sector(sector: Sector, rates: &RateParams) -> Self {
        let n = sector.n();
        let dim = sector.len();
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut cols = Vec::with_capacity(dim * (n + 1));
        let mut vals = Vec::with_capacity(dim * (n + 1));
        let mut exit = Vec::with_capacity(dim);
        let mut tau = vec![0u8; n];
        let mut row: Vec<(u32, f64)> = Vec::with_capacity(n + 2);
        row_ptr.push(0);

        for idx in 0..dim {
            sector.decode_into(idx, &mut tau);
            let code = sector.code(idx);
            row.clear();
            let mut push = |new_code: u64, rate: f64| {
                if rate > 0.0 {
                    let j = sector.index_of_code(new_code).expect("transition stays inside the sector");
                    row.push((j as u32, rate));
                }
            };

            for i in 0..n.saturating_sub(1) {
                let (a, b) = (tau[i], tau[i + 1]);
                if a == b {
                    continue;
                }
                let rate = if rank(a) > rank(b) { 1.0 } else { rates.q };
                let (pa, pb) = (sector.place(i) as i64, sector.place(i + 1) as i64);
                let delta = (b as i64 - a as i64) * pa + (a as i64 - b as i64) * pb;
                push((code as i64 + delta) as u64, rate);
            }

            let first = sector.place(0);
            match tau[0] {
                0 => push(code + first, rates.alpha),
                1 => push(code - first, rates.gamma),
                _ => {}
            }
            let last = sector.place(n - 1);
            match tau[n - 1] {
                1 => push(code - last, rates.beta),
                0 => push(code + last, rates.delta),
                _ => {}
            }

            row.sort_unstable_by_key(|e| e.0);
            let mut total = 0.0;
            let start = cols.len();
            for &(j, v) in row.iter() {
                total += v;
                if cols.len() > start && *cols.last().unwrap() == j {
                    *vals.last_mut().unwrap() += v;
                } else {
                    cols.push(j);
                    vals.push(v);
                }
            }
            exit.push(total);
            row_ptr.push(cols.len());
        }

        GeneratorMatrix { sector, rates: *rates, row_ptr, cols, vals, exit }
    }

    pub fn dim(&self) -> usize {
        self.exit.len()
    }

    pub fn sector(&self) -> &Sector {
        &self.sector
    }

    pub fn rates(&self) -> &RateParams {
        &self.rates
    }

    /// Total exit rate of state `i` (the negated diagonal entry).
    pub fn exit_rate(&self, i: usize) -> f64 {
        self.exit[i]
    }

    pub fn max_exit_rate(&self) -> f64 {
        self.exit.iter().cloned().fold(0.0, f64::max)
    }

    /// Off-diagonal entries of row `i` as `(column, rate)`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[span.clone()].iter().zip(&self.vals[span]).map(|(&j, &v)| (j as usize, v))
    }

    /// Entry `Q[i][j]`.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return -self.exit[i];
        }
        self.row(i).find(|&(c, _)| c == j).map_or(0.0, |(_, v)| v)
    }

    pub fn nnz_offdiag(&self) -> usize {
        self.cols.len()
    }

    /// `out = p · Q`.
    pub fn left_mul(&self, p: &[f64], out: &mut [f64]) {
        for (o, (&pi, &e)) in out.iter_mut().zip(p.iter().zip(&self.exit)) {
            *o = -e * pi;
        }
        for (i, &pi) in p.iter().enumerate() {
            if pi == 0.0 {
                continue;
            }
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                out[self.cols[k] as usize] += pi * self.vals[k];
            }
        }
    }

    /// Max-norm of `p · Q`.
    pub fn residual(&self, p: &[f64]) -> f64 {
        let mut out = vec![0.0; self.dim()];
        self.left_mul(p, &mut out);
        out.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// True when every state reaches every other along positive rates.
    pub fn is_irreducible(&self) -> bool {
        let dim = self.dim();
        let reach = |forward: bool| {
            let mut adj: Vec<Vec<usize>> = vec![Vec::new(); dim];
            for i in 0..dim {
                for (j, _) in self.row(i) {
                    if forward {
                        adj[i].push(j);
                    } else {
                        adj[j].push(i);
                    }
                }
            }
            let mut seen = vec![false; dim];
            let mut stack = vec![0usize];
            seen[0] = true;
            while let Some(i) = stack.pop() {
                for &j in &adj[i] {
                    if !seen[j] {
                        seen[j] = true;
                        stack.push(j);
                    }
                }
            }
            seen.into_iter().all(|s| s)
        };
        reach(true) && reach(false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rp(q: f64, alpha: f64, beta: f64, gamma: f64, delta: f64) -> RateParams {
        RateParams::new(q, alpha, beta, gamma, delta).unwrap()
    }

    #[test]
    fn single_site_merges_reservoirs() {
        let g = build_generator(1, 0, &rp(0.3, 0.7, 0.4, 0.2, 0.1)).unwrap();
        assert_eq!(g.dim(), 2);
        assert!((g.entry(0, 1) - 0.8).abs() < 1e-15);
        assert!((g.entry(1, 0) - 0.6).abs() < 1e-15);

        let g = build_generator(1, 1, &rp(0.3, 0.7, 0.4, 0.2, 0.1)).unwrap();
        assert_eq!(g.dim(), 1);
        assert_eq!(g.exit_rate(0), 0.0);
    }

    #[test]
    fn four_cycle() {
        let g = build_generator(2, 1, &rp(0.0, 1.0, 1.0, 0.0, 0.0)).unwrap();
        let s = g.sector();
        let id = |v: [u8; 2]| s.index_of(&v).unwrap();
        let cycle = [[2, 0], [0, 2], [1, 2], [2, 1], [2, 0]];
        for w in cycle.windows(2) {
            assert_eq!(g.entry(id(w[0]), id(w[1])), 1.0);
        }
        for i in 0..4 {
            assert_eq!(g.row(i).count(), 1);
            assert_eq!(g.exit_rate(i), 1.0);
        }
    }

    #[test]
    fn rows_sum_to_zero_and_irreducible() {
        let rates = rp(0.4, 0.9, 0.3, 0.05, 0.2);
        for n in 1..=5 {
            for r in 0..n {
                let g = build_generator(n, r, &rates).unwrap();
                for i in 0..g.dim() {
                    let s: f64 = g.row(i).map(|(_, v)| v).sum();
                    assert!((s - g.exit_rate(i)).abs() < 1e-12);
                    assert!(g.row(i).all(|(j, v)| v > 0.0 && j != i));
                }
                assert!(g.is_irreducible(), "n={n} r={r}");
            }
        }
    }

    #[test]
    fn light_particles_never_leave() {
        let g = build_generator(4, 2, &rp(0.5, 1.0, 1.0, 1.0, 1.0)).unwrap();
        let s = g.sector();
        for i in 0..g.dim() {
            for (j, _) in g.row(i) {
                assert_eq!(s.state(j).iter().filter(|&&v| v == 2).count(), 2);
            }
        }
    }
}
