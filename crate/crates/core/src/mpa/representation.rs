//! Truncated tridiagonal matrices `D`, `E` and boundary vectors.

use super::coefficients::AwCoefficients;
use super::real::Real;
use crate::error::{Error, Result};
use crate::phase::{boundary_to_rates, BoundaryParams};

/// Square tridiagonal matrix: `sub[i] = T[i+1][i]`, `sup[i] = T[i][i+1]`.
#[derive(Debug, Clone)]
pub struct Tridiagonal<T> {
    pub sub: Vec<T>,
    pub diag: Vec<T>,
    pub sup: Vec<T>,
}

impl<T: Real> Tridiagonal<T> {
    pub fn size(&self) -> usize {
        self.diag.len()
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        if i == j {
            self.diag[i]
        } else if j == i + 1 {
            self.sup[i]
        } else if i == j + 1 {
            self.sub[j]
        } else {
            T::zero()
        }
    }

    /// `out = v · T` (row vector).
    pub fn left_apply(&self, v: &[T], out: &mut [T]) {
        let n = self.size();
        for j in 0..n {
            let mut s = v[j] * self.diag[j];
            if j > 0 {
                s += v[j - 1] * self.sup[j - 1];
            }
            if j + 1 < n {
                s += v[j + 1] * self.sub[j];
            }
            out[j] = s;
        }
    }

    /// `out = T · v` (column vector).
    pub fn right_apply(&self, v: &[T], out: &mut [T]) {
        let n = self.size();
        for i in 0..n {
            let mut s = self.diag[i] * v[i];
            if i > 0 {
                s += self.sub[i - 1] * v[i - 1];
            }
            if i + 1 < n {
                s += self.sup[i] * v[i + 1];
            }
            out[i] = s;
        }
    }

    fn plus(&self, o: &Self) -> Self {
        let zip = |a: &[T], b: &[T]| a.iter().zip(b).map(|(x, y)| *x + *y).collect();
        Tridiagonal { sub: zip(&self.sub, &o.sub), diag: zip(&self.diag, &o.diag), sup: zip(&self.sup, &o.sup) }
    }

    pub fn to_dense(&self) -> Vec<Vec<T>> {
        let n = self.size();
        (0..n).map(|i| (0..n).map(|j| self.get(i, j)).collect()).collect()
    }
}

/// Truncated representation of the quadratic algebra, with `⟨W| = ⟨e_0|` and `|V⟩ = |e_0⟩`.
#[derive(Debug, Clone)]
pub struct MpaRepresentation<T = f64> {
    pub params: BoundaryParams,
    pub coefficients: AwCoefficients<T>,
    pub d: Tridiagonal<T>,
    pub e: Tridiagonal<T>,
    /// `D + E`.
    pub c: Tridiagonal<T>,
}

/// Truncation of size `m` (matrices are `m × m`).
pub fn build_representation<T: Real>(b: &BoundaryParams, m: usize) -> Result<MpaRepresentation<T>> {
    if m == 0 {
        return Err(Error::Param("truncation size must be positive".into()));
    }
    let co = AwCoefficients::<T>::compute(b, m)?;
    let one = T::one();
    let q = T::from_f64(b.q);
    let sq = (one - q).sqrt();
    let shift = one / (one - q);
    let mk = |diag: &[T], sup: &[T], sub: &[T]| Tridiagonal {
        diag: diag[..m].iter().map(|&v| shift + v / sq).collect(),
        sup: sup[1..m].iter().map(|&v| v / sq).collect(),
        sub: sub[..m - 1].iter().map(|&v| v / sq).collect(),
    };
    let d = mk(&co.gamma, &co.eps, &co.alpha);
    let e = mk(&co.delta, &co.phi, &co.beta);
    let c = d.plus(&e);
    Ok(MpaRepresentation { params: *b, coefficients: co, d, e, c })
}

impl<T: Real> MpaRepresentation<T> {
    pub fn size(&self) -> usize {
        self.d.size()
    }

    /// `out = v · (DE − ED)` for a row vector.
    pub fn left_apply_commutator(&self, v: &[T], out: &mut [T], scratch: &mut [T]) {
        let m = self.size();
        let mut tmp = vec![T::zero(); m];
        self.d.left_apply(v, scratch);
        self.e.left_apply(scratch, out);
        self.e.left_apply(v, scratch);
        self.d.left_apply(scratch, &mut tmp);
        for (o, t) in out.iter_mut().zip(&tmp) {
            *o = *o - *t;
        }
    }
}

/// Residuals of the quadratic algebra on the part of the truncation it leaves intact.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct DehpResiduals {
    pub bulk: f64,
    pub left: f64,
    pub right: f64,
}

impl DehpResiduals {
    pub fn max(&self) -> f64 {
        self.bulk.max(self.left).max(self.right)
    }
}

/// Checks `DE − qED = D + E`, `⟨W|(αE − γD) = ⟨W|` and `(βD − δE)|V⟩ = |V⟩`.
pub fn verify_dehp<T: Real>(rep: &MpaRepresentation<T>) -> Result<DehpResiduals> {
    let m = rep.size();
    if m < 4 {
        return Err(Error::Param(format!("algebra check needs truncation at least 4, got {m}")));
    }
    let rates = boundary_to_rates(&rep.params);
    let q = T::from_f64(rep.params.q);
    let keep = m - 2;
    let prod = |x: &Tridiagonal<T>, y: &Tridiagonal<T>, i: usize, j: usize| {
        let lo = i.saturating_sub(1);
        let hi = (i + 1).min(m - 1);
        (lo..=hi).fold(T::zero(), |s, k| s + x.get(i, k) * y.get(k, j))
    };
    let mut bulk: f64 = 0.0;
    for i in 0..keep {
        for j in 0..keep {
            let v = prod(&rep.d, &rep.e, i, j) - q * prod(&rep.e, &rep.d, i, j) - rep.d.get(i, j) - rep.e.get(i, j);
            bulk = bulk.max(v.to_f64().abs());
        }
    }
    let (al, be, ga, de) =
        (T::from_f64(rates.alpha), T::from_f64(rates.beta), T::from_f64(rates.gamma), T::from_f64(rates.delta));
    let mut left: f64 = 0.0;
    let mut right: f64 = 0.0;
    for j in 0..keep {
        let unit = if j == 0 { T::one() } else { T::zero() };
        let l = al * rep.e.get(0, j) - ga * rep.d.get(0, j) - unit;
        let r = be * rep.d.get(j, 0) - de * rep.e.get(j, 0) - unit;
        left = left.max(l.to_f64().abs());
        right = right.max(r.to_f64().abs());
    }
    Ok(DehpResiduals { bulk, left, right })
}
