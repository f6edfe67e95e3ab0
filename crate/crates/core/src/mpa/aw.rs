//! First moment of the Askey–Wilson signed measure and the left boundary density it yields.
//!
//! Only the closed-form first moment is implemented; the measure itself is
//! never built, and checking that `(a, b, c, d)` lies in the admissible region
//! is left to the caller.

use crate::error::{Error, Result};
use crate::phase::{classify, BoundaryParams, Phase};

pub fn aw_first_moment(a: f64, b: f64, c: f64, d: f64) -> Result<f64> {
    let den = 1.0 - a * b * c * d;
    if den.abs() < 1e-14 {
        return Err(Error::Degenerate("abcd = 1 in the first moment".into()));
    }
    Ok((a + b + c + d - a * b * c - a * b * d - a * c * d - b * c * d) / (2.0 * den))
}

/// Solves `tσ + 1 − σ = P(1 + t + 2√t·m₁)` for the left boundary density `σ`.
///
/// Maximal-current parameters use `m₁` at `(√t, √t, C/√t, D/√t)` with `P = 1/4`;
/// high-density ones use `(A√t, √t/A, C/√t, D/√t)` with `P = A/(1+A)²`.
pub fn sigma_left_via_aw(b: &BoundaryParams, t: f64) -> Result<f64> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::Param(format!("t must lie in (0, 1), got {t}")));
    }
    let st = t.sqrt();
    let (m1, pre) = match classify(b).phase {
        Phase::MaxCurrent => (aw_first_moment(st, st, b.c / st, b.d / st)?, 0.25),
        Phase::HighDensity => {
            (aw_first_moment(b.a * st, st / b.a, b.c / st, b.d / st)?, b.a / ((1.0 + b.a) * (1.0 + b.a)))
        }
        other => {
            return Err(Error::WrongPhase {
                op: "sigma_left_via_aw",
                expected: "MaxCurrent or HighDensity",
                found: other.name().into(),
            })
        }
    };
    Ok((pre * (1.0 + t + 2.0 * st * m1) - 1.0) / (t - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moment_examples() {
        assert_eq!(aw_first_moment(0.0, 0.0, 0.0, 0.0).unwrap(), 0.0);
        assert_eq!(aw_first_moment(0.5, 0.0, 0.0, 0.0).unwrap(), 0.25);
        assert!(aw_first_moment(1.0, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn sigma_examples() {
        let mc = BoundaryParams::new(0.0, 0.0, 0.0, 0.0, 0.0).unwrap();
        for t in [0.2, 0.5, 0.9] {
            assert!((sigma_left_via_aw(&mc, t).unwrap() - 0.75).abs() < 1e-14);
        }
        let hd = BoundaryParams::new(2.0, 0.0, 0.0, 0.0, 0.0).unwrap();
        for t in [0.99, 0.995] {
            assert!((sigma_left_via_aw(&hd, t).unwrap() - 7.0 / 9.0).abs() < 1e-12);
        }
        let ld = BoundaryParams::new(0.0, 0.0, 2.0, 0.0, 0.0).unwrap();
        assert!(matches!(sigma_left_via_aw(&ld, 0.5), Err(Error::WrongPhase { .. })));
        assert!(sigma_left_via_aw(&mc, 1.0).is_err());
    }
}
