//! Boundary parameterization and phase diagram of the open ASEP.
//!
//! The five jump rates `(q, α, β, γ, δ)` are mapped to the boundary parameters
//! `(A, B, C, D)` through the roots of `x φ² − (1 − q − x + y) φ − y = 0`.
//! Everything downstream (phase labels, limiting densities, drift) is a
//! closed-form function of `(A, B, C, D, q)`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance used for every tie comparison on the phase diagram.
pub const TIE_TOL: f64 = 1e-12;

/// Jump rates of the open ASEP: bulk asymmetry `q`, left injection `alpha`,
/// right ejection `beta`, left ejection `gamma`, right injection `delta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateParams {
    pub q: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
}

impl RateParams {
    pub fn new(q: f64, alpha: f64, beta: f64, gamma: f64, delta: f64) -> Result<Self> {
        let r = RateParams { q, alpha, beta, gamma, delta };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        check_q(self.q)?;
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::Param(format!("alpha must be > 0, got {}", self.alpha)));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(Error::Param(format!("beta must be > 0, got {}", self.beta)));
        }
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return Err(Error::Param(format!("gamma must be >= 0, got {}", self.gamma)));
        }
        if !(self.delta >= 0.0 && self.delta.is_finite()) {
            return Err(Error::Param(format!("delta must be >= 0, got {}", self.delta)));
        }
        Ok(())
    }

    /// Rates of the particle-hole reflected system (`α ↔ β`, `γ ↔ δ`).
    pub fn reflected(&self) -> RateParams {
        RateParams { q: self.q, alpha: self.beta, beta: self.alpha, gamma: self.delta, delta: self.gamma }
    }

    pub fn boundary(&self) -> BoundaryParams {
        rates_to_boundary(self)
    }
}

fn check_q(q: f64) -> Result<()> {
    if !(0.0..1.0).contains(&q) {
        return Err(Error::Param(format!("q must lie in [0, 1), got {q}")));
    }
    Ok(())
}

/// Boundary parameters `(A, B, C, D)` together with `q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub q: f64,
}

impl BoundaryParams {
    pub fn new(a: f64, b: f64, c: f64, d: f64, q: f64) -> Result<Self> {
        let p = BoundaryParams { a, b, c, d, q };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        check_q(self.q)?;
        if !(self.a >= 0.0 && self.a.is_finite()) || !(self.c >= 0.0 && self.c.is_finite()) {
            return Err(Error::Param(format!("A and C must be >= 0, got A = {}, C = {}", self.a, self.c)));
        }
        if !(self.b > -1.0 && self.b <= 0.0) || !(self.d > -1.0 && self.d <= 0.0) {
            return Err(Error::Param(format!("B and D must lie in (-1, 0], got B = {}, D = {}", self.b, self.d)));
        }
        Ok(())
    }

    pub fn ac(&self) -> f64 {
        self.a * self.c
    }

    pub fn abcd(&self) -> f64 {
        self.a * self.b * self.c * self.d
    }

    /// Parameters of the particle-hole reflected system (`A ↔ C`, `B ↔ D`).
    pub fn reflected(&self) -> BoundaryParams {
        BoundaryParams { a: self.c, b: self.d, c: self.a, d: self.b, q: self.q }
    }

    /// Effective left density `1/(1+C)`.
    pub fn rho_left(&self) -> f64 {
        1.0 / (1.0 + self.c)
    }

    /// Effective right density `A/(1+A)`.
    pub fn rho_right(&self) -> f64 {
        self.a / (1.0 + self.a)
    }

    pub fn rates(&self) -> RateParams {
        boundary_to_rates(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

/// The two roots `φ±(x, y)` of `x φ² − (1 − q − x + y) φ − y = 0`.
///
/// Evaluated without cancellation: the larger-magnitude root comes from the
/// quadratic formula and the other from the product of roots `−y/x`.
pub fn phi_pm(x: f64, y: f64, q: f64, sign: Sign) -> Result<f64> {
    check_q(q)?;
    if !(x > 0.0 && x.is_finite()) || !(y >= 0.0 && y.is_finite()) {
        return Err(Error::Param(format!("phi requires x > 0 and y >= 0, got x = {x}, y = {y}")));
    }
    let b = 1.0 - q - x + y;
    let s = (b * b + 4.0 * x * y).sqrt();
    let (plus, minus) = if b >= 0.0 {
        let plus = (b + s) / (2.0 * x);
        let minus = if plus > 0.0 { -y / (x * plus) } else { 0.0 };
        (plus, minus)
    } else {
        let minus = (b - s) / (2.0 * x);
        (-y / (x * minus), minus)
    };
    Ok(match sign {
        Sign::Plus => plus,
        Sign::Minus => minus + 0.0,
    })
}

pub fn rates_to_boundary(r: &RateParams) -> BoundaryParams {
    let f = |x, y, s| phi_pm(x, y, r.q, s).expect("validated rates");
    BoundaryParams {
        a: f(r.beta, r.delta, Sign::Plus),
        b: f(r.beta, r.delta, Sign::Minus),
        c: f(r.alpha, r.gamma, Sign::Plus),
        d: f(r.alpha, r.gamma, Sign::Minus),
        q: r.q,
    }
}

/// Inverse of [`rates_to_boundary`].
///
/// `C + D` and `CD` are the sum and product of the roots, which gives
/// `α = (1−q)/((1+C)(1+D))`, `γ = −CD α`, and symmetrically for `β, δ`.
pub fn boundary_to_rates(b: &BoundaryParams) -> RateParams {
    let one_q = 1.0 - b.q;
    let alpha = one_q / ((1.0 + b.c) * (1.0 + b.d));
    let beta = one_q / ((1.0 + b.a) * (1.0 + b.b));
    RateParams { q: b.q, alpha, beta, gamma: -b.c * b.d * alpha + 0.0, delta: -b.a * b.b * beta + 0.0 }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Phase {
    MaxCurrent,
    HighDensity,
    LowDensity,
    Coexistence,
    TriplePoint,
}

impl Phase {
    pub fn name(&self) -> &'static str {
        match self {
            Phase::MaxCurrent => "MaxCurrent",
            Phase::HighDensity => "HighDensity",
            Phase::LowDensity => "LowDensity",
            Phase::Coexistence => "Coexistence",
            Phase::TriplePoint => "TriplePoint",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Region {
    Fan,
    Shock,
    /// The curve `AC = 1` on which the stationary measure is Bernoulli.
    Boundary,
}

impl Region {
    pub fn name(&self) -> &'static str {
        match self {
            Region::Fan => "Fan",
            Region::Shock => "Shock",
            Region::Boundary => "Boundary",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseLabel {
    pub phase: Phase,
    pub region: Region,
}

/// Places `(A, C)` on the phase diagram.
///
/// Ties within [`TIE_TOL`] are reported explicitly: `A = C > 1` is the
/// coexistence line and `A = C = 1` the triple point. The lines `A = 1 > C`
/// and `C = 1 > A` are assigned to the maximal current phase.
pub fn classify(b: &BoundaryParams) -> PhaseLabel {
    let (a, c) = (b.a, b.c);
    let one = |x: f64| (x - 1.0).abs() <= TIE_TOL;
    let phase = if (a - c).abs() <= TIE_TOL {
        if one(a) || one(c) {
            Phase::TriplePoint
        } else if a > 1.0 {
            Phase::Coexistence
        } else {
            Phase::MaxCurrent
        }
    } else if a.max(c) < 1.0 || one(a.max(c)) {
        Phase::MaxCurrent
    } else if a > c {
        Phase::HighDensity
    } else {
        Phase::LowDensity
    };
    let ac = a * c;
    let region = if (ac - 1.0).abs() <= TIE_TOL {
        Region::Boundary
    } else if ac < 1.0 {
        Region::Fan
    } else {
        Region::Shock
    };
    PhaseLabel { phase, region }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum BulkDensity {
    Constant {
        value: f64,
    },
    /// Linear interpolation between `left` at θ = 0 and `right` at θ = 1.
    LinearProfile {
        left: f64,
        right: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitingDensities {
    pub sigma_left: f64,
    pub sigma_right: f64,
    pub rho_left: f64,
    pub rho_right: f64,
    pub bulk: BulkDensity,
}

/// `σ_ℓ` from the maximal-current formula.
pub fn sigma_left_mc(b: &BoundaryParams) -> f64 {
    (3.0 - b.c - b.d - b.c * b.d) / (4.0 * (1.0 - b.c * b.d))
}

/// `σ_r` from the maximal-current formula.
pub fn sigma_right_mc(b: &BoundaryParams) -> f64 {
    (1.0 + b.a + b.b - 3.0 * b.a * b.b) / (4.0 * (1.0 - b.a * b.b))
}

/// `σ_ℓ` from the high-density formula.
pub fn sigma_left_hd(b: &BoundaryParams) -> f64 {
    let (a, c, d) = (b.a, b.c, b.d);
    (a * a + a + 1.0 - a * c * d - a * c - a * d) / ((a + 1.0).powi(2) * (1.0 - c * d))
}

/// `σ_r` from the low-density formula.
pub fn sigma_right_ld(b: &BoundaryParams) -> f64 {
    let (a, bb, c) = (b.a, b.b, b.c);
    (a * c + bb * c - a * bb * c * c - a * bb + c - a * bb * c) / ((c + 1.0).powi(2) * (1.0 - a * bb))
}

pub fn limiting_densities(b: &BoundaryParams) -> LimitingDensities {
    let (a, c) = (b.a, b.c);
    let label = classify(b);
    let (sigma_left, sigma_right) = if a <= 1.0 && c <= 1.0 {
        (sigma_left_mc(b), sigma_right_mc(b))
    } else if a >= c {
        (sigma_left_hd(b), b.rho_right())
    } else {
        (b.rho_left(), sigma_right_ld(b))
    };
    let bulk = match label.phase {
        Phase::MaxCurrent | Phase::TriplePoint => BulkDensity::Constant { value: 0.5 },
        Phase::HighDensity => BulkDensity::Constant { value: b.rho_right() },
        Phase::LowDensity => BulkDensity::Constant { value: b.rho_left() },
        Phase::Coexistence => BulkDensity::LinearProfile { left: 1.0 / (1.0 + a), right: a / (1.0 + a) },
    };
    LimitingDensities { sigma_left, sigma_right, rho_left: b.rho_left(), rho_right: b.rho_right(), bulk }
}

/// Limiting density at macroscopic position `theta` on the coexistence line.
pub fn bulk_profile(b: &BoundaryParams, theta: f64) -> Result<f64> {
    let label = classify(b);
    if label.phase != Phase::Coexistence {
        return Err(Error::WrongPhase {
            op: "bulk_profile",
            expected: "Coexistence",
            found: label.phase.name().into(),
        });
    }
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::Param(format!("theta must lie in [0, 1], got {theta}")));
    }
    let a = b.a;
    Ok((1.0 - theta) / (1.0 + a) + theta * a / (1.0 + a))
}

/// Limiting masses of a single light particle near the left and right ends in
/// the maximal current phase.
pub fn light_mass_split(b: &BoundaryParams) -> Result<(f64, f64)> {
    let label = classify(b);
    if label.phase != Phase::MaxCurrent {
        return Err(Error::WrongPhase {
            op: "light_mass_split",
            expected: "MaxCurrent",
            found: label.phase.name().into(),
        });
    }
    if label.region == Region::Boundary {
        return Err(Error::Degenerate("AC = 1 gives sigma_left = sigma_right".into()));
    }
    let ld = limiting_densities(b);
    let gap = ld.sigma_left - ld.sigma_right;
    Ok(((ld.sigma_left - 0.5) / gap, (0.5 - ld.sigma_right) / gap))
}

/// Speed `(1−q)(1−2ρ)` of a second class particle in a Bernoulli-ρ environment.
pub fn drift_kappa(rho: f64, q: f64) -> Result<f64> {
    check_q(q)?;
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::Param(format!("rho must lie in (0, 1), got {rho}")));
    }
    Ok((1.0 - q) * (1.0 - 2.0 * rho))
}

/// Target cells of the phase diagram for random parameter draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cell {
    MaxCurrent,
    HighDensityFan,
    HighDensityShock,
    LowDensityFan,
    LowDensityShock,
    Coexistence,
}

impl Cell {
    pub const ALL: [Cell; 6] = [
        Cell::MaxCurrent,
        Cell::HighDensityFan,
        Cell::HighDensityShock,
        Cell::LowDensityFan,
        Cell::LowDensityShock,
        Cell::Coexistence,
    ];
}

/// Draws boundary parameters inside `cell`, with `q ≤ q_max`.
///
/// Draws stay away from phase boundaries and from `AC = 1` so that the
/// nonzero-denominator guards hold; callers that need the guards should
/// still check them.
pub fn sample_boundary<R: Rng + ?Sized>(cell: Cell, q_max: f64, rng: &mut R) -> BoundaryParams {
    let q = rng.random_range(0.0..q_max);
    let b = -rng.random_range(0.0..0.8);
    let d = -rng.random_range(0.0..0.8);
    let (a, c) = match cell {
        Cell::MaxCurrent => (rng.random_range(0.0..0.95), rng.random_range(0.0..0.95)),
        Cell::HighDensityFan => {
            let a = rng.random_range(1.1..3.0);
            (a, rng.random_range(0.0..0.9 / a))
        }
        Cell::HighDensityShock => {
            let a: f64 = rng.random_range(1.3..3.0);
            (a, rng.random_range(1.1 / a..a - 0.15))
        }
        Cell::LowDensityFan => {
            let c = rng.random_range(1.1..3.0);
            (rng.random_range(0.0..0.9 / c), c)
        }
        Cell::LowDensityShock => {
            let c: f64 = rng.random_range(1.3..3.0);
            (rng.random_range(1.1 / c..c - 0.15), c)
        }
        Cell::Coexistence => {
            let a = rng.random_range(1.2..3.0);
            (a, a)
        }
    };
    BoundaryParams { a, b, c, d, q }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bp(a: f64, b: f64, c: f64, d: f64, q: f64) -> BoundaryParams {
        BoundaryParams::new(a, b, c, d, q).unwrap()
    }

    #[test]
    fn phi_examples() {
        assert_eq!(phi_pm(1.0, 0.0, 0.0, Sign::Plus).unwrap(), 0.0);
        assert_eq!(phi_pm(0.5, 0.0, 0.0, Sign::Plus).unwrap(), 1.0);
        for q in [0.0, 0.3, 0.9] {
            assert_eq!(phi_pm(1.0 - q, 0.0, q, Sign::Plus).unwrap(), 0.0);
            assert_eq!(phi_pm(1.0 - q, 0.0, q, Sign::Minus).unwrap(), 0.0);
        }
        assert!(phi_pm(0.0, 0.0, 0.0, Sign::Plus).is_err());
        assert!(phi_pm(1.0, -0.1, 0.0, Sign::Plus).is_err());
        assert!(phi_pm(1.0, 0.0, 1.0, Sign::Plus).is_err());
    }

    #[test]
    fn rates_to_boundary_examples() {
        let b = RateParams::new(0.0, 1.0, 1.0, 0.0, 0.0).unwrap().boundary();
        assert_eq!((b.a, b.b, b.c, b.d), (0.0, 0.0, 0.0, 0.0));
        let b = RateParams::new(0.0, 0.5, 1.0, 0.0, 0.0).unwrap().boundary();
        assert_eq!((b.a, b.b, b.c, b.d), (0.0, 0.0, 1.0, 0.0));
        let b = RateParams::new(0.5, 0.5, 0.25, 0.0, 0.0).unwrap().boundary();
        assert_eq!((b.a, b.b, b.c, b.d), (1.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn boundary_to_rates_examples() {
        for q in [0.0, 0.4] {
            let r = bp(0.0, 0.0, 0.0, 0.0, q).rates();
            assert_eq!((r.alpha, r.beta, r.gamma, r.delta), (1.0 - q, 1.0 - q, 0.0, 0.0));
        }
        let r = bp(1.0, 0.0, 0.0, 0.0, 0.5).rates();
        assert_eq!((r.alpha, r.beta, r.gamma, r.delta), (0.5, 0.25, 0.0, 0.0));
    }

    #[test]
    fn rejects_invalid() {
        assert!(RateParams::new(1.0, 1.0, 1.0, 0.0, 0.0).is_err());
        assert!(RateParams::new(0.0, 0.0, 1.0, 0.0, 0.0).is_err());
        assert!(RateParams::new(0.0, 1.0, 1.0, -0.1, 0.0).is_err());
        assert!(BoundaryParams::new(0.0, -1.0, 0.0, 0.0, 0.0).is_err());
        assert!(BoundaryParams::new(0.0, 0.0, 0.0, 0.1, 0.0).is_err());
        assert!(BoundaryParams::new(-0.1, 0.0, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn classify_examples() {
        let l = classify(&bp(0.0, 0.0, 0.0, 0.0, 0.0));
        assert_eq!((l.phase, l.region), (Phase::MaxCurrent, Region::Fan));
        let l = classify(&bp(2.0, 0.0, 2.0, 0.0, 0.0));
        assert_eq!((l.phase, l.region), (Phase::Coexistence, Region::Shock));
        let l = classify(&bp(2.0, 0.0, 0.5, 0.0, 0.0));
        assert_eq!((l.phase, l.region), (Phase::HighDensity, Region::Boundary));
        let l = classify(&bp(1.0, 0.0, 1.0, 0.0, 0.0));
        assert_eq!(l.phase, Phase::TriplePoint);
        let l = classify(&bp(0.5, 0.0, 3.0, 0.0, 0.0));
        assert_eq!((l.phase, l.region), (Phase::LowDensity, Region::Shock));
        let l = classify(&bp(1.0, 0.0, 0.3, 0.0, 0.0));
        assert_eq!(l.phase, Phase::MaxCurrent);
    }

    #[test]
    fn limiting_density_examples() {
        let ld = limiting_densities(&bp(0.0, 0.0, 0.0, 0.0, 0.0));
        assert!((ld.sigma_left - 0.75).abs() < 1e-15);
        assert!((ld.sigma_right - 0.25).abs() < 1e-15);
        assert_eq!(ld.bulk, BulkDensity::Constant { value: 0.5 });

        let ld = limiting_densities(&bp(2.0, 0.0, 0.0, 0.0, 0.0));
        assert!((ld.sigma_left - 7.0 / 9.0).abs() < 1e-15);
        assert!((ld.sigma_right - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(ld.bulk, BulkDensity::Constant { value: 2.0 / 3.0 });

        let ld = limiting_densities(&bp(2.0, 0.0, 2.0, 0.0, 0.0));
        assert_eq!(ld.bulk, BulkDensity::LinearProfile { left: 1.0 / 3.0, right: 2.0 / 3.0 });
    }

    #[test]
    fn bernoulli_line_has_equal_boundary_densities() {
        for (a, b, d, q) in [(2.0, -0.3, -0.5, 0.2), (0.5, 0.0, -0.9, 0.0), (4.0, -0.7, 0.0, 0.7)] {
            let p = bp(a, b, 1.0 / a, d, q);
            let ld = limiting_densities(&p);
            assert!((ld.sigma_left - ld.sigma_right).abs() < 1e-12, "{p:?} {ld:?}");
            assert!((ld.sigma_left - p.rho_left()).abs() < 1e-12);
        }
    }

    #[test]
    fn densities_continuous_across_phase_lines() {
        // coexistence line: HD and LD formulas meet
        for (a, b, d) in [(2.0, 0.0, 0.0), (1.7, -0.4, -0.2), (3.0, -0.9, -0.5)] {
            let p = bp(a, b, a, d, 0.3);
            assert!((sigma_left_hd(&p) - p.rho_left()).abs() < 1e-12);
            assert!((sigma_right_ld(&p) - p.rho_right()).abs() < 1e-12);
        }
        // A = 1 line: MC and HD formulas meet
        for (b, c, d) in [(0.0, 0.5, 0.0), (-0.3, 0.2, -0.6), (-0.8, 0.9, -0.1)] {
            let p = bp(1.0, b, c, d, 0.1);
            assert!((sigma_left_mc(&p) - sigma_left_hd(&p)).abs() < 1e-12);
            assert!((sigma_right_mc(&p) - p.rho_right()).abs() < 1e-12);
        }
    }

    #[test]
    fn bulk_profile_examples() {
        let p = bp(2.0, 0.0, 2.0, 0.0, 0.0);
        assert!((bulk_profile(&p, 0.0).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!((bulk_profile(&p, 1.0).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        let p = bp(3.0, 0.0, 3.0, 0.0, 0.0);
        assert!((bulk_profile(&p, 0.5).unwrap() - 0.5).abs() < 1e-15);
        assert!(matches!(bulk_profile(&bp(2.0, 0.0, 0.0, 0.0, 0.0), 0.5), Err(Error::WrongPhase { .. })));
    }

    #[test]
    fn light_mass_split_examples() {
        let (l, r) = light_mass_split(&bp(0.0, 0.0, 0.0, 0.0, 0.0)).unwrap();
        assert!((l - 0.5).abs() < 1e-15 && (r - 0.5).abs() < 1e-15);
        let (l, r) = light_mass_split(&bp(0.0, 0.0, 0.5, 0.0, 0.0)).unwrap();
        assert!((l - 1.0 / 3.0).abs() < 1e-12 && (r - 2.0 / 3.0).abs() < 1e-12);
        assert!(light_mass_split(&bp(2.0, 0.0, 0.0, 0.0, 0.0)).is_err());
        assert!(matches!(light_mass_split(&bp(0.8, 0.0, 1.25, 0.0, 0.0)), Err(Error::WrongPhase { .. })));
    }

    #[test]
    fn kappa_examples() {
        assert_eq!(drift_kappa(0.5, 0.7).unwrap(), 0.0);
        assert_eq!(drift_kappa(0.75, 0.0).unwrap(), -0.5);
        let k = drift_kappa(2.0 / 3.0, 0.5).unwrap();
        assert!((k + 1.0 / 6.0).abs() < 1e-15);
        assert!(drift_kappa(1.0, 0.0).is_err());
    }

    fn rate_strategy() -> impl Strategy<Value = RateParams> {
        (0.0..0.99f64, 1e-3..5.0f64, 1e-3..5.0f64, 0.0..5.0f64, 0.0..5.0f64)
            .prop_map(|(q, a, b, g, d)| RateParams::new(q, a, b, g, d).unwrap())
    }

    fn rel(x: f64, y: f64) -> f64 {
        (x - y).abs() / x.abs().max(y.abs()).max(1e-300)
    }

    proptest! {
        #[test]
        fn round_trip(r in rate_strategy()) {
            let b = rates_to_boundary(&r);
            b.validate().unwrap();
            let back = boundary_to_rates(&b);
            prop_assert!(rel(back.alpha, r.alpha) < 1e-10);
            prop_assert!(rel(back.beta, r.beta) < 1e-10);
            prop_assert!(back.gamma == r.gamma || rel(back.gamma, r.gamma) < 1e-10);
            prop_assert!(back.delta == r.delta || rel(back.delta, r.delta) < 1e-10);
        }

        #[test]
        fn boundary_round_trip(a in 0.0..5.0f64, b in -0.99..=0.0f64, c in 0.0..5.0f64,
                               d in -0.99..=0.0f64, q in 0.0..0.99f64) {
            let p = bp(a, b, c, d, q);
            let back = rates_to_boundary(&boundary_to_rates(&p));
            for (x, y) in [(back.a, a), (back.b, b), (back.c, c), (back.d, d)] {
                prop_assert!((x - y).abs() <= 1e-12 * (1.0 + y.abs()) * 10.0, "{x} vs {y}");
            }
        }

        #[test]
        fn split_sums_to_one(a in 0.0..0.99f64, b in -0.99..=0.0f64, c in 0.0..0.99f64,
                             d in -0.99..=0.0f64, q in 0.0..0.99f64) {
            let p = bp(a, b, c, d, q);
            let ld = limiting_densities(&p);
            prop_assert!(ld.sigma_left > 0.5 && ld.sigma_right < 0.5);
            let (l, r) = light_mass_split(&p).unwrap();
            prop_assert!((l + r - 1.0).abs() < 1e-12);
            prop_assert!(l > 0.0 && l < 1.0 && r > 0.0 && r < 1.0);
        }

        #[test]
        fn densities_in_unit_interval(a in 1e-3..6.0f64, b in -0.99..=0.0f64, c in 0.0..6.0f64,
                                      d in -0.99..=0.0f64, q in 0.0..0.99f64) {
            let ld = limiting_densities(&bp(a, b, c, d, q));
            for v in [ld.sigma_left, ld.sigma_right, ld.rho_left, ld.rho_right] {
                prop_assert!(v > 0.0 && v < 1.0, "{ld:?}");
            }
        }
    }
}
