//! Recurrence coefficients of the tridiagonal representation.
//!
//! The defining formulas divide by `A` and by `(1 − AC q^{m−1})(1 − AD q^{m−1})`.
//! Both divisions cancel algebraically, and the forms below are the cancelled
//! ones. They are continuous at `A = 0`, at `q = 0` and on `AC = 1`, so only the
//! `ABCD` factors need a nonzero guard.

use super::real::Real;
use crate::error::{Error, Result};
use crate::phase::BoundaryParams;

/// Smallest admissible magnitude of a denominator factor.
pub const DENOMINATOR_GUARD: f64 = 1e-10;

/// `α_m … φ_m` for `m = 0..=M`.
#[derive(Debug, Clone)]
pub struct AwCoefficients<T> {
    pub alpha: Vec<T>,
    pub beta: Vec<T>,
    pub gamma: Vec<T>,
    pub delta: Vec<T>,
    pub eps: Vec<T>,
    pub phi: Vec<T>,
}

impl<T: Real> AwCoefficients<T> {
    pub fn len(&self) -> usize {
        self.beta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.beta.is_empty()
    }

    pub fn compute(b: &BoundaryParams, max_m: usize) -> Result<Self> {
        b.validate()?;
        let f = T::from_f64;
        let (a, bb, c, d, q) = (f(b.a), f(b.b), f(b.c), f(b.d), f(b.q));
        let one = T::one();
        let u = a * bb * c * d;
        let sq = (one - q).sqrt();

        let guard = |v: T, factor: &'static str, m: usize| -> Result<T> {
            if v.abs().to_f64() <= DENOMINATOR_GUARD {
                Err(Error::Singular { factor, m })
            } else {
                Ok(v)
            }
        };

        let cap = max_m + 1;
        let mut out = AwCoefficients {
            alpha: Vec::with_capacity(cap),
            beta: Vec::with_capacity(cap),
            gamma: Vec::with_capacity(cap),
            delta: Vec::with_capacity(cap),
            eps: Vec::with_capacity(cap),
            phi: Vec::with_capacity(cap),
        };

        // m = 0: the q^{-1} factors cancel exactly
        let d0 = guard(one - u, "1 - ABCD", 0)?;
        let beta0 = one / (sq * d0);
        out.alpha.push(-(a * bb) * beta0);
        out.beta.push(beta0);
        out.eps.push(T::zero());
        out.phi.push(T::zero());
        out.gamma.push(a / sq + bb * beta0 * (one - a * c) * (one - a * d));
        out.delta.push(-(bb * c * d) / (sq * d0) + beta0 * ((c + d) - a * c * d));

        let mut qm1 = one; // q^{m-1}
        for m in 1..=max_m {
            let qm = qm1 * q;
            let q2m1 = qm1 * qm; // q^{2m-1}
            let q2m2 = qm1 * qm1;
            let q2m = qm * qm;
            let f2m = guard(one - u * q2m, "1 - ABCD q^(2m)", m)?;
            let f2m1 = guard(one - u * q2m1, "1 - ABCD q^(2m-1)", m)?;
            let f2m2 = guard(one - u * q2m2, "1 - ABCD q^(2m-2)", m)?;

            let beta = (one - u * qm1) / (sq * f2m * f2m1);
            // ε_m without the (1 − AC q^{m−1})(1 − AD q^{m−1}) factors
            let eps_red = (one - qm) * (one - bb * c * qm1) * (one - bb * d * qm1) / (sq * f2m2 * f2m1);
            let eps = eps_red * (one - a * c * qm1) * (one - a * d * qm1);
            // (1/A)(1/√(1−q) − β_m) with the 1/A cancelled
            let lead = bb * c * d * (qm1 - q2m - q2m1 + u * q2m1 * q2m) / (sq * f2m * f2m1);

            out.alpha.push(-(a * bb) * qm * beta);
            out.beta.push(beta);
            out.eps.push(eps);
            out.phi.push(-(c * d) * qm1 * eps);
            out.gamma.push(a / sq + bb * qm * beta * (one - a * c * qm) * (one - a * d * qm) - a * eps_red);
            out.delta.push(lead + beta * ((c + d) * qm - a * c * d * q2m) + a * c * d * qm1 * eps_red);
            qm1 = qm;
        }
        Ok(out)
    }
}

/// The defining formulas evaluated literally, for `A ≠ 0`, `q > 0` and generic parameters.
#[cfg(test)]
pub(crate) fn literal(b: &BoundaryParams, m: usize) -> [f64; 6] {
    let (a, bb, c, d, q) = (b.a, b.b, b.c, b.d, b.q);
    let u = a * bb * c * d;
    let sq = (1.0 - q).sqrt();
    let mi = m as i32;
    let p = |k: i32| q.powi(k);
    let beta = (1.0 - u * p(mi - 1)) / (sq * (1.0 - u * p(2 * mi)) * (1.0 - u * p(2 * mi - 1)));
    let alpha = -a * bb * p(mi) * beta;
    let eps = (1.0 - p(mi))
        * (1.0 - a * c * p(mi - 1))
        * (1.0 - a * d * p(mi - 1))
        * (1.0 - bb * c * p(mi - 1))
        * (1.0 - bb * d * p(mi - 1))
        / (sq * (1.0 - u * p(2 * mi - 2)) * (1.0 - u * p(2 * mi - 1)));
    let phi = -c * d * p(mi - 1) * eps;
    let den = (1.0 - a * c * p(mi - 1)) * (1.0 - a * d * p(mi - 1));
    let fac = (1.0 - a * c * p(mi)) * (1.0 - a * d * p(mi));
    let gamma = a / sq - alpha / a * fac - a * eps / den;
    let delta = 1.0 / (a * sq) - beta / a * fac - a * phi / den;
    [alpha, beta, gamma, delta, eps, phi]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mpa::real::DoubleDouble;

    fn bp(a: f64, b: f64, c: f64, d: f64, q: f64) -> BoundaryParams {
        BoundaryParams::new(a, b, c, d, q).unwrap()
    }

    fn rel(x: f64, y: f64) -> f64 {
        (x - y).abs() / x.abs().max(y.abs()).max(1e-300)
    }

    #[test]
    fn matches_literal_formulas() {
        for b in [bp(0.7, -0.3, 0.4, -0.5, 0.45), bp(2.5, -0.2, 1.3, -0.6, 0.8), bp(0.3, 0.0, 0.9, -0.1, 0.1)] {
            let co = AwCoefficients::<f64>::compute(&b, 12).unwrap();
            for m in 0..=12 {
                let lit = literal(&b, m);
                let got = [co.alpha[m], co.beta[m], co.gamma[m], co.delta[m], co.eps[m], co.phi[m]];
                for (k, (g, l)) in got.iter().zip(&lit).enumerate() {
                    assert!(rel(*g, *l) < 1e-9 || (g - l).abs() < 1e-12, "m={m} k={k} {g} vs {l}");
                }
            }
        }
    }

    #[test]
    fn structural_identities() {
        let b = bp(1.7, -0.4, 0.6, -0.3, 0.55);
        let co = AwCoefficients::<f64>::compute(&b, 20).unwrap();
        assert_eq!(co.eps[0], 0.0);
        for m in 0..=20 {
            let want = -b.a * b.b * b.q.powi(m as i32) * co.beta[m];
            assert!(rel(co.alpha[m], want) < 1e-13 || co.alpha[m] == want);
            if m >= 1 {
                let want = -b.c * b.d * b.q.powi(m as i32 - 1) * co.eps[m];
                assert!(rel(co.phi[m], want) < 1e-13 || co.phi[m] == want);
            }
        }
    }

    #[test]
    fn zero_parameters() {
        let co = AwCoefficients::<f64>::compute(&bp(0.0, 0.0, 0.0, 0.0, 0.0), 5).unwrap();
        assert_eq!(co.beta, vec![1.0; 6]);
        assert_eq!(co.eps, vec![0.0, 1.0, 1.0, 1.0, 1.0, 1.0]);
        assert_eq!(co.gamma, vec![0.0; 6]);
        assert_eq!(co.delta, vec![0.0; 6]);
        assert_eq!(co.alpha, vec![0.0; 6]);
        assert_eq!(co.phi, vec![0.0; 6]);
    }

    #[test]
    fn continuous_at_a_zero_and_q_zero() {
        for (b0, b1) in [
            (bp(0.0, -0.3, 0.6, -0.2, 0.4), bp(1e-6, -0.3, 0.6, -0.2, 0.4)),
            (bp(0.8, -0.3, 0.6, -0.2, 0.0), bp(0.8, -0.3, 0.6, -0.2, 1e-6)),
            (bp(0.0, 0.0, 0.0, 0.0, 0.3), bp(1e-6, 0.0, 0.0, 0.0, 0.3)),
        ] {
            let x = AwCoefficients::<f64>::compute(&b0, 8).unwrap();
            // evaluated away from the limit by the literal formulas
            for m in 0..=8 {
                if b1.a > 0.0 && b1.q > 0.0 {
                    let lit = literal(&b1, m);
                    let got = [x.alpha[m], x.beta[m], x.gamma[m], x.delta[m], x.eps[m], x.phi[m]];
                    for (g, l) in got.iter().zip(&lit) {
                        assert!((g - l).abs() <= 1e-5, "m={m} {g} vs {l}");
                    }
                }
            }
        }
    }

    #[test]
    fn bernoulli_line_needs_no_guard() {
        let b = bp(2.0, -0.1, 0.5, -0.3, 0.0);
        let co = AwCoefficients::<f64>::compute(&b, 4).unwrap();
        assert_eq!(co.eps[1], 0.0);
        assert!(co.gamma.iter().chain(&co.delta).all(|v| v.is_finite()));
    }

    #[test]
    fn guard_names_the_factor() {
        // ABCD = 1/q makes 1 − ABCD q^{2m−1} vanish at m = 1
        let b = bp(4.0, -0.8, 2.5, -0.5, 0.25);
        assert!((b.abcd() * b.q - 1.0).abs() < 1e-15);
        match AwCoefficients::<f64>::compute(&b, 3) {
            Err(Error::Singular { factor, m }) => {
                assert_eq!(m, 1);
                assert!(factor.contains("2m-1"));
            }
            other => panic!("expected guard error, got {other:?}"),
        }
    }

    #[test]
    fn double_double_agrees_with_double() {
        let b = bp(1.2, -0.5, 0.7, -0.25, 0.6);
        let x = AwCoefficients::<f64>::compute(&b, 10).unwrap();
        let y = AwCoefficients::<DoubleDouble>::compute(&b, 10).unwrap();
        for m in 0..=10 {
            assert!((x.gamma[m] - y.gamma[m].to_f64()).abs() < 1e-13);
            assert!((x.delta[m] - y.delta[m].to_f64()).abs() < 1e-13);
        }
    }
}
