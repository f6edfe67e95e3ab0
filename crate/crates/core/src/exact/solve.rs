//! Stationary, transient and mixing-time computations on a generator.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::generator::{build_generator, GeneratorMatrix};
use crate::error::{Error, Result};
use crate::phase::RateParams;

/// Round-off band in which negative probabilities are clamped to zero.
pub const NEGATIVE_SLACK: f64 = 1e-14;
/// Largest stationary residual accepted.
pub const RESIDUAL_TOL: f64 = 1e-10;
/// Sectors up to this size are solved by dense LU.
pub const DENSE_LIMIT: usize = 2500;
/// Poisson mean per uniformization chunk; keeps `e^{-λ}` far from underflow.
const CHUNK_MEAN: f64 = 30.0;

/// A probability vector over the states of one sector.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    probs: Vec<f64>,
}

impl Distribution {
    /// Checks nonnegativity and unit mass (clamping round-off negatives).
    pub fn new(mut probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::Param("empty distribution".into()));
        }
        for p in probs.iter_mut() {
            if !p.is_finite() || *p < -NEGATIVE_SLACK {
                return Err(Error::Numeric(format!("invalid probability {p:e}")));
            }
            if *p < 0.0 {
                *p = 0.0;
            }
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Numeric(format!("distribution mass {total} differs from 1")));
        }
        probs.iter_mut().for_each(|p| *p /= total);
        Ok(Distribution { probs })
    }

    pub fn point_mass(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::Index(format!("state {index} outside sector of size {dim}")));
        }
        let mut probs = vec![0.0; dim];
        probs[index] = 1.0;
        Ok(Distribution { probs })
    }

    pub fn uniform(dim: usize) -> Self {
        Distribution { probs: vec![1.0 / dim as f64; dim] }
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.probs
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.probs
    }
}

/// `(1/2) Σ |p − q|`.
pub fn tv_distance(p: &Distribution, q: &Distribution) -> Result<f64> {
    tv_slices(p.as_slice(), q.as_slice())
}

pub(crate) fn tv_slices(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::Dimension(p.len(), q.len()));
    }
    let s: f64 = p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum();
    Ok((0.5 * s).min(1.0))
}

/// Solves `πQ = 0`, `Σπ = 1`.
pub fn stationary(gen: &GeneratorMatrix) -> Result<Distribution> {
    let dim = gen.dim();
    if dim == 1 {
        return Ok(Distribution { probs: vec![1.0] });
    }
    let raw = if dim <= DENSE_LIMIT { solve_dense(gen)? } else { solve_gmres(gen)? };
    finish(gen, raw)
}

fn finish(gen: &GeneratorMatrix, mut pi: Vec<f64>) -> Result<Distribution> {
    if let Some(bad) = pi.iter().find(|p| !p.is_finite() || **p < -NEGATIVE_SLACK) {
        return Err(Error::Numeric(format!(
            "stationary solve produced entry {bad:e}; residual {:e}",
            gen.residual(&pi)
        )));
    }
    pi.iter_mut().for_each(|p| *p = p.max(0.0));
    let total: f64 = pi.iter().sum();
    pi.iter_mut().for_each(|p| *p /= total);
    let res = gen.residual(&pi);
    if res > RESIDUAL_TOL {
        return Err(Error::Numeric(format!("stationary residual {res:e} exceeds {RESIDUAL_TOL:e}")));
    }
    Ok(Distribution { probs: pi })
}

fn solve_dense(gen: &GeneratorMatrix) -> Result<Vec<f64>> {
    let dim = gen.dim();
    // Q^T with the last balance equation replaced by normalization.
    let mut m = DMatrix::<f64>::zeros(dim, dim);
    for i in 0..dim {
        m[(i, i)] = -gen.exit_rate(i);
        for (j, v) in gen.row(i) {
            m[(j, i)] += v;
        }
    }
    for j in 0..dim {
        m[(dim - 1, j)] = 1.0;
    }
    let mut rhs = DVector::<f64>::zeros(dim);
    rhs[dim - 1] = 1.0;
    let sol = m.lu().solve(&rhs).ok_or_else(|| Error::Numeric("singular stationary system".into()))?;
    Ok(sol.iter().cloned().collect())
}

/// Restarted GMRES on `Q^T x + (Σx) e_last = e_last`, right-preconditioned by the diagonal.
fn solve_gmres(gen: &GeneratorMatrix) -> Result<Vec<f64>> {
    let dim = gen.dim();
    let last = dim - 1;
    let mut diag: Vec<f64> = (0..dim).map(|i| -gen.exit_rate(i)).collect();
    diag[last] += 1.0;
    let inv: Vec<f64> = diag.iter().map(|&d| if d != 0.0 { 1.0 / d } else { 1.0 }).collect();

    let mut scratch = vec![0.0; dim];
    let apply = |x: &[f64], out: &mut [f64], scratch: &mut [f64]| {
        for ((s, &xi), &di) in scratch.iter_mut().zip(x).zip(&inv) {
            *s = xi * di;
        }
        gen.left_mul(scratch, out);
        out[last] += scratch.iter().sum::<f64>();
    };

    const RESTART: usize = 60;
    const MAX_CYCLES: usize = 400;
    let mut b = vec![0.0; dim];
    b[last] = 1.0;
    let mut y = vec![0.0; dim]; // preconditioned unknown
    let mut ax = vec![0.0; dim];

    for _ in 0..MAX_CYCLES {
        apply(&y, &mut ax, &mut scratch);
        let r: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
        let beta = norm(&r);
        if beta <= 1e-15 {
            break;
        }
        let mut basis: Vec<Vec<f64>> = vec![r.iter().map(|v| v / beta).collect()];
        let mut h = vec![vec![0.0; RESTART]; RESTART + 1];
        let (mut cs, mut sn) = (vec![0.0; RESTART], vec![0.0; RESTART]);
        let mut g = vec![0.0; RESTART + 1];
        g[0] = beta;
        let mut k_used = 0;
        for k in 0..RESTART {
            let mut w = vec![0.0; dim];
            apply(&basis[k], &mut w, &mut scratch);
            for (i, v) in basis.iter().enumerate() {
                let hik = dot(&w, v);
                h[i][k] = hik;
                w.iter_mut().zip(v).for_each(|(wj, vj)| *wj -= hik * vj);
            }
            let hn = norm(&w);
            h[k + 1][k] = hn;
            for i in 0..k {
                let t = cs[i] * h[i][k] + sn[i] * h[i + 1][k];
                h[i + 1][k] = -sn[i] * h[i][k] + cs[i] * h[i + 1][k];
                h[i][k] = t;
            }
            let den = h[k][k].hypot(h[k + 1][k]);
            cs[k] = h[k][k] / den;
            sn[k] = h[k + 1][k] / den;
            h[k][k] = den;
            h[k + 1][k] = 0.0;
            g[k + 1] = -sn[k] * g[k];
            g[k] *= cs[k];
            k_used = k + 1;
            if g[k + 1].abs() <= 1e-15 || hn == 0.0 {
                break;
            }
            basis.push(w.iter().map(|v| v / hn).collect());
        }
        let mut coef = vec![0.0; k_used];
        for i in (0..k_used).rev() {
            let s: f64 = (i + 1..k_used).map(|j| h[i][j] * coef[j]).sum();
            coef[i] = (g[i] - s) / h[i][i];
        }
        for (c, v) in coef.iter().zip(&basis) {
            y.iter_mut().zip(v).for_each(|(yj, vj)| *yj += c * vj);
        }
        let x: Vec<f64> = y.iter().zip(&inv).map(|(a, b)| a * b).collect();
        let total: f64 = x.iter().sum();
        if total != 0.0 {
            let probe: Vec<f64> = x.iter().map(|v| v / total).collect();
            if gen.residual(&probe) <= 1e-3 * RESIDUAL_TOL {
                return Ok(probe);
            }
        }
    }
    let x: Vec<f64> = y.iter().zip(&inv).map(|(a, b)| a * b).collect();
    let total: f64 = x.iter().sum();
    Ok(x.iter().map(|v| v / total).collect())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Distribution at time `t` started from `init`, by chunked uniformization.
pub fn transient(gen: &GeneratorMatrix, init: &Distribution, t: f64) -> Result<Distribution> {
    if init.len() != gen.dim() {
        return Err(Error::Dimension(init.len(), gen.dim()));
    }
    if !t.is_finite() || t < 0.0 {
        return Err(Error::Param(format!("time must be finite and nonnegative, got {t}")));
    }
    let probs = propagate(gen, init.as_slice(), t);
    Ok(Distribution { probs })
}

pub(crate) fn propagate(gen: &GeneratorMatrix, init: &[f64], t: f64) -> Vec<f64> {
    let lambda = gen.max_exit_rate();
    if t == 0.0 || lambda == 0.0 {
        return init.to_vec();
    }
    let chunks = (lambda * t / CHUNK_MEAN).ceil().max(1.0) as usize;
    let mean = lambda * t / chunks as f64;
    // Poisson(mean ≤ 30) tail beyond this index is below 1e-16.
    let terms = (mean + 10.0 * mean.sqrt() + 25.0).ceil() as usize;
    let dim = gen.dim();
    let mut p = init.to_vec();
    let mut term = vec![0.0; dim];
    let mut next = vec![0.0; dim];
    let mut acc = vec![0.0; dim];
    for _ in 0..chunks {
        term.copy_from_slice(&p);
        let mut w = (-mean).exp();
        acc.iter_mut().zip(&term).for_each(|(a, v)| *a = w * v);
        for k in 1..=terms {
            // term ← term · (I + Q/Λ)
            gen.left_mul(&term, &mut next);
            term.iter_mut().zip(&next).for_each(|(v, d)| *v += d / lambda);
            w *= mean / k as f64;
            acc.iter_mut().zip(&term).for_each(|(a, v)| *a += w * v);
        }
        let total: f64 = acc.iter().sum();
        p.iter_mut().zip(&acc).for_each(|(v, a)| *v = (a / total).max(0.0));
    }
    p
}

/// Worst-case TV distance to `pi` at time `t` over all initial states.
pub fn worst_case_tv(gen: &GeneratorMatrix, pi: &Distribution, t: f64) -> f64 {
    let dim = gen.dim();
    (0..dim)
        .into_par_iter()
        .map(|i| {
            let mut e = vec![0.0; dim];
            e[i] = 1.0;
            let p = propagate(gen, &e, t);
            tv_slices(&p, pi.as_slice()).unwrap_or(1.0)
        })
        .reduce(|| 0.0, f64::max)
}

/// Smallest `t` with worst-case TV distance at most `eps`, to relative precision 1e-6.
pub fn mixing_time_exact(n: usize, r: usize, rates: &RateParams, eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Param(format!("eps must lie in (0,1), got {eps}")));
    }
    let gen = build_generator(n, r, rates)?;
    mixing_time_of(&gen, eps)
}

pub fn mixing_time_of(gen: &GeneratorMatrix, eps: f64) -> Result<f64> {
    let pi = stationary(gen)?;
    if gen.dim() == 1 || worst_case_tv(gen, &pi, 0.0) <= eps {
        return Ok(0.0);
    }
    let n = gen.sector().n() as f64;
    let mut lo = 0.0;
    let mut hi = 64.0 * n / (1.0 - gen.rates().q);
    let mut grown = 0;
    while worst_case_tv(gen, &pi, hi) > eps {
        lo = hi;
        hi *= 2.0;
        grown += 1;
        if grown > 20 {
            return Err(Error::Numeric("mixing time bracket failed to close".into()));
        }
    }
    while hi - lo > 1e-6 * hi {
        let mid = 0.5 * (lo + hi);
        if worst_case_tv(gen, &pi, mid) > eps {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}
