//! Banded vector sweeps: partition values, densities and the one-light location law.
//!
//! Working vectors are rescaled by powers of two after every factor so that
//! long products neither overflow nor underflow; the exponents are carried
//! separately and every reported quantity is a ratio.

use super::real::{Precision, Real};
use super::representation::{build_representation, MpaRepresentation, Tridiagonal};
use crate::error::{Error, Result};
use crate::exact::{RELATION_GUARD, RELATION_GUARD_POWERS};
use crate::phase::BoundaryParams;

/// `mant · 2^exp2`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Scaled {
    pub mant: f64,
    pub exp2: i64,
}

impl Scaled {
    fn from_parts<T: Real>(v: T, exp2: i64) -> Self {
        Scaled { mant: v.to_f64(), exp2 }
    }

    /// Value as an `f64`; infinite or zero when out of range.
    pub fn value(&self) -> f64 {
        self.mant * 2f64.powf(self.exp2 as f64)
    }

    pub fn log2_abs(&self) -> f64 {
        self.mant.abs().log2() + self.exp2 as f64
    }

    /// `self / other` as an `f64`.
    pub fn ratio(&self, other: &Scaled) -> f64 {
        (self.mant / other.mant) * 2f64.powf((self.exp2 - other.exp2) as f64)
    }

    fn is_usable(&self) -> bool {
        self.mant.is_finite() && self.mant != 0.0
    }
}

/// `Z_0..Z_N` and `Ẑ_1..Ẑ_N` (stored at `zhat[k-1]`).
#[derive(Debug, Clone, serde::Serialize)]
pub struct PartitionValues {
    pub z: Vec<Scaled>,
    pub zhat: Vec<Scaled>,
}

/// Which identity computes the location law of the single light particle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LocMethod {
    Direct,
    Relation,
}

impl LocMethod {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "direct" => Some(LocMethod::Direct),
            "relation" => Some(LocMethod::Relation),
            _ => None,
        }
    }
}

fn max_abs<T: Real>(v: &[T]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.to_f64().abs()))
}

fn exponent_of(x: f64) -> i32 {
    if x == 0.0 || !x.is_finite() {
        0
    } else {
        x.log2().floor() as i32
    }
}

fn rescale<T: Real>(v: &mut [T], e: i32) {
    if e != 0 {
        v.iter_mut().for_each(|x| *x = x.scale2(-e));
    }
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |s, (x, y)| s + *x * *y)
}

fn unit<T: Real>(m: usize) -> Vec<T> {
    let mut v = vec![T::zero(); m];
    v[0] = T::one();
    v
}

fn require_truncation<T: Real>(rep: &MpaRepresentation<T>, sites: usize) -> Result<()> {
    if rep.size() < sites + 2 {
        return Err(Error::Param(format!(
            "truncation {} too small for {sites} sites (need at least {})",
            rep.size(),
            sites + 2
        )));
    }
    Ok(())
}

/// Rescaled powers `⟨W|C^k` (left) or `C^k|V⟩` (right) for `k = 0..=n`.
struct Powers<T> {
    vecs: Vec<Vec<T>>,
    exps: Vec<i64>,
}

fn powers<T: Real>(c: &Tridiagonal<T>, n: usize, left: bool) -> Powers<T> {
    let m = c.size();
    let mut vecs = Vec::with_capacity(n + 1);
    let mut exps = Vec::with_capacity(n + 1);
    vecs.push(unit::<T>(m));
    exps.push(0i64);
    for k in 1..=n {
        let mut next = vec![T::zero(); m];
        if left {
            c.left_apply(&vecs[k - 1], &mut next);
        } else {
            c.right_apply(&vecs[k - 1], &mut next);
        }
        let e = exponent_of(max_abs(&next));
        rescale(&mut next, e);
        exps.push(exps[k - 1] + e as i64);
        vecs.push(next);
    }
    Powers { vecs, exps }
}

/// Coefficient of `y` in `⟨W|(C + y(DE − ED))^n|V⟩`, from degree-one vector pairs.
fn zhat<T: Real>(rep: &MpaRepresentation<T>, n: usize) -> Vec<Scaled> {
    let m = rep.size();
    let mut a0 = unit::<T>(m);
    let mut a1 = vec![T::zero(); m];
    let mut exp = 0i64;
    let mut out = Vec::with_capacity(n);
    let (mut n0, mut n1, mut scratch) = (vec![T::zero(); m], vec![T::zero(); m], vec![T::zero(); m]);
    let mut comm = vec![T::zero(); m];
    for _ in 0..n {
        rep.c.left_apply(&a0, &mut n0);
        rep.c.left_apply(&a1, &mut n1);
        rep.left_apply_commutator(&a0, &mut comm, &mut scratch);
        n1.iter_mut().zip(&comm).for_each(|(x, y)| *x += *y);
        let e = exponent_of(max_abs(&n0).max(max_abs(&n1)));
        rescale(&mut n0, e);
        rescale(&mut n1, e);
        exp += e as i64;
        std::mem::swap(&mut a0, &mut n0);
        std::mem::swap(&mut a1, &mut n1);
        out.push(Scaled::from_parts(a1[0], exp));
    }
    out
}

pub fn partition_values<T: Real>(rep: &MpaRepresentation<T>, n: usize) -> Result<PartitionValues> {
    require_truncation(rep, n)?;
    let left = powers(&rep.c, n, true);
    let z = left.vecs.iter().zip(&left.exps).map(|(v, &e)| Scaled::from_parts(v[0], e)).collect();
    Ok(PartitionValues { z, zhat: zhat(rep, n) })
}

/// Stationary probability of `tau ∈ {0,1}^N`.
pub fn config_probability<T: Real>(rep: &MpaRepresentation<T>, tau: &[u8]) -> Result<f64> {
    let n = tau.len();
    require_truncation(rep, n)?;
    if tau.iter().any(|&v| v > 1) {
        return Err(Error::Param("configurations must be over {0, 1}".into()));
    }
    let m = rep.size();
    let mut v = unit::<T>(m);
    let mut next = vec![T::zero(); m];
    let mut exp = 0i64;
    for &s in tau {
        let x = if s == 1 { &rep.d } else { &rep.e };
        x.left_apply(&v, &mut next);
        let e = exponent_of(max_abs(&next));
        rescale(&mut next, e);
        exp += e as i64;
        std::mem::swap(&mut v, &mut next);
    }
    let weight = Scaled::from_parts(v[0], exp);
    let zn = {
        let left = powers(&rep.c, n, true);
        Scaled::from_parts(left.vecs[n][0], left.exps[n])
    };
    if !zn.is_usable() {
        return Err(Error::Guard(format!("Z_{n} vanishes or overflows")));
    }
    Ok(weight.ratio(&zn))
}

/// `μ_N(τ_k = 1)` for `k = 1..=n`.
pub fn site_densities_mpa<T: Real>(rep: &MpaRepresentation<T>, n: usize) -> Result<Vec<f64>> {
    require_truncation(rep, n)?;
    if n == 0 {
        return Ok(Vec::new());
    }
    let left = powers(&rep.c, n - 1, true);
    let right = powers(&rep.c, n - 1, false);
    let m = rep.size();
    let (mut dr, mut cr) = (vec![T::zero(); m], vec![T::zero(); m]);
    let mut out = Vec::with_capacity(n);
    for k in 1..=n {
        let l = &left.vecs[k - 1];
        let r = &right.vecs[n - k];
        rep.d.right_apply(r, &mut dr);
        rep.c.right_apply(r, &mut cr);
        let num = dot(l, &dr);
        let den = dot(l, &cr);
        if den.to_f64() == 0.0 || !den.to_f64().is_finite() {
            return Err(Error::Guard(format!("Z_{n} vanishes in the density sweep")));
        }
        out.push((num / den).to_f64());
    }
    Ok(out)
}

pub fn site_density_mpa<T: Real>(rep: &MpaRepresentation<T>, n: usize, k: usize) -> Result<f64> {
    if k == 0 || k > n {
        return Err(Error::Index(format!("site {k} outside [1, {n}]")));
    }
    Ok(site_densities_mpa(rep, n)?[k - 1])
}

/// True iff `|ABCD·q^l − 1| > 1e-8` for all `0 ≤ l ≤ lmax` (only `l = 0` when `q = 0`).
pub fn guard_nonzero(b: &BoundaryParams, lmax: u32) -> bool {
    let u = b.abcd();
    if b.q == 0.0 {
        return (u - 1.0).abs() > RELATION_GUARD;
    }
    let mut ql = 1.0;
    for _ in 0..=lmax {
        if (u * ql - 1.0).abs() <= RELATION_GUARD {
            return false;
        }
        ql *= b.q;
    }
    true
}

fn loc_guard(b: &BoundaryParams) -> Result<()> {
    if (b.ac() - 1.0).abs() < RELATION_GUARD {
        return Err(Error::Guard(format!("AC = {} is within {RELATION_GUARD:e} of 1", b.ac())));
    }
    if !guard_nonzero(b, RELATION_GUARD_POWERS as u32) {
        return Err(Error::Guard("ABCD is within 1e-8 of some q^{-l}".into()));
    }
    Ok(())
}

/// Law of the position of the single light particle on `n` sites, `out[i-1] = P(loc₁ = i)`.
pub fn loc1_distribution<T: Real>(rep: &MpaRepresentation<T>, n: usize, via: LocMethod) -> Result<Vec<f64>> {
    loc_guard(&rep.params)?;
    if n == 0 {
        return Err(Error::Param("lattice size must be positive".into()));
    }
    match via {
        LocMethod::Direct => loc1_direct(rep, n),
        LocMethod::Relation => loc1_relation(rep, n),
    }
}

fn loc1_direct<T: Real>(rep: &MpaRepresentation<T>, n: usize) -> Result<Vec<f64>> {
    require_truncation(rep, n)?;
    let total = *zhat(rep, n).last().expect("n ≥ 1");
    if !total.is_usable() {
        return Err(Error::Guard(format!("Ẑ_{n} vanishes")));
    }
    let left = powers(&rep.c, n - 1, true);
    let right = powers(&rep.c, n - 1, false);
    let m = rep.size();
    let (mut a, mut scratch) = (vec![T::zero(); m], vec![T::zero(); m]);
    let mut out = Vec::with_capacity(n);
    for i in 1..=n {
        let l = &left.vecs[i - 1];
        rep.left_apply_commutator(l, &mut a, &mut scratch);
        let num = Scaled::from_parts(dot(&a, &right.vecs[n - i]), left.exps[i - 1] + right.exps[n - i]);
        out.push(num.ratio(&total));
    }
    Ok(out)
}

fn loc1_relation<T: Real>(rep: &MpaRepresentation<T>, n: usize) -> Result<Vec<f64>> {
    let rho = site_densities_mpa(rep, n + 1)?;
    let den = rho[0] - rho[n];
    if den == 0.0 {
        return Err(Error::Guard("density drop across N+1 sites vanishes".into()));
    }
    Ok(rho.windows(2).map(|w| (w[0] - w[1]) / den).collect())
}

/// Truncation used by the convenience entry points for `n` sites.
pub fn default_truncation(n: usize) -> usize {
    n + 3
}

/// Densities on `n` sites at the chosen precision.
pub fn densities_with(b: &BoundaryParams, n: usize, precision: Precision) -> Result<Vec<f64>> {
    let m = default_truncation(n);
    match precision {
        Precision::Double => site_densities_mpa(&build_representation::<f64>(b, m)?, n),
        Precision::High => site_densities_mpa(&build_representation::<super::real::DoubleDouble>(b, m)?, n),
    }
}

/// `loc₁` law on `n` sites at the chosen precision.
pub fn loc1_with(b: &BoundaryParams, n: usize, via: LocMethod, precision: Precision) -> Result<Vec<f64>> {
    let m = default_truncation(n);
    match precision {
        Precision::Double => loc1_distribution(&build_representation::<f64>(b, m)?, n, via),
        Precision::High => loc1_distribution(&build_representation::<super::real::DoubleDouble>(b, m)?, n, via),
    }
}
