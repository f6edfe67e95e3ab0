//! Scalar types the matrix product sweeps run in.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

/// Field operations needed by the representation and the sweeps.
pub trait Real:
    Copy
    + fmt::Debug
    + PartialOrd
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
{
    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
    fn sqrt(self) -> Self;
    /// Exact multiplication by `2^k`.
    fn scale2(self, k: i32) -> Self;

    fn zero() -> Self {
        Self::from_f64(0.0)
    }
    fn one() -> Self {
        Self::from_f64(1.0)
    }
    fn abs(self) -> Self {
        if self < Self::zero() {
            -self
        } else {
            self
        }
    }
    fn powi(self, k: i32) -> Self {
        let (mut base, mut e) = if k < 0 { (Self::one() / self, -k) } else { (self, k) };
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }
}

impl Real for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(self) -> f64 {
        self
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn scale2(self, k: i32) -> Self {
        self * pow2(k)
    }
}

fn pow2(k: i32) -> f64 {
    // split so that each factor stays a normal double
    if k.abs() <= 1000 {
        f64::from_bits(((1023 + k) as u64) << 52)
    } else {
        let h = k / 2;
        pow2(h) * pow2(k - h)
    }
}

/// Unevaluated sum `hi + lo` with `|lo| ≤ ulp(hi)/2`: about 32 significant digits.
#[derive(Clone, Copy, Default, PartialEq)]
pub struct DoubleDouble {
    hi: f64,
    lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl DoubleDouble {
    pub fn new(hi: f64, lo: f64) -> Self {
        let (hi, lo) = quick_two_sum(hi, lo);
        DoubleDouble { hi, lo }
    }

    pub fn hi(self) -> f64 {
        self.hi
    }

    pub fn lo(self) -> f64 {
        self.lo
    }
}

impl fmt::Debug for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DD({:e} + {:e})", self.hi, self.lo)
    }
}

impl PartialOrd for DoubleDouble {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(std::cmp::Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            o => o,
        }
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        DoubleDouble { hi, lo }
    }
}

impl AddAssign for DoubleDouble {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    fn neg(self) -> Self {
        DoubleDouble { hi: -self.hi, lo: -self.lo }
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        let (hi, lo) = quick_two_sum(p, e);
        DoubleDouble { hi, lo }
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let q1 = self.hi / o.hi;
        let r = self - o * DoubleDouble::from_f64(q1);
        let q2 = r.hi / o.hi;
        let r = r - o * DoubleDouble::from_f64(q2);
        let q3 = r.hi / o.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        DoubleDouble { hi, lo } + DoubleDouble::from_f64(q3)
    }
}

impl Real for DoubleDouble {
    fn from_f64(x: f64) -> Self {
        DoubleDouble { hi: x, lo: 0.0 }
    }
    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
    fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return DoubleDouble::from_f64(self.hi.sqrt());
        }
        let x = self.hi.sqrt();
        let xx = DoubleDouble::from_f64(x);
        let r = self - xx * xx;
        xx + DoubleDouble::from_f64(r.hi / (2.0 * x))
    }
    fn scale2(self, k: i32) -> Self {
        let s = pow2(k);
        DoubleDouble { hi: self.hi * s, lo: self.lo * s }
    }
}

/// Floating-point mode of the matrix product sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    Double,
    High,
}

impl Precision {
    pub fn name(&self) -> &'static str {
        match self {
            Precision::Double => "double",
            Precision::High => "high",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "double" => Some(Precision::Double),
            "high" => Some(Precision::High),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type DD = DoubleDouble;

    #[test]
    fn captures_bits_below_double() {
        let tiny = 2f64.powi(-70);
        let x = DD::from_f64(1.0) + DD::from_f64(tiny);
        assert_eq!(x.hi(), 1.0);
        assert_eq!(x.lo(), tiny);
        assert_eq!((x - DD::one()).to_f64(), tiny);
    }

    #[test]
    fn division_and_sqrt_round_trip() {
        let three = DD::from_f64(3.0);
        let third = DD::one() / three;
        let err = (third * three - DD::one()).to_f64().abs();
        assert!(err < 1e-31, "{err:e}");
        let s = DD::from_f64(2.0).sqrt();
        let err = (s * s - DD::from_f64(2.0)).to_f64().abs();
        assert!(err < 1e-31, "{err:e}");
    }

    #[test]
    fn scaling_is_exact() {
        let x = DD::one() / DD::from_f64(7.0);
        assert_eq!(x.scale2(-300).scale2(300), x);
        assert_eq!(1.5f64.scale2(-1074 + 1), 1.5 * 2f64.powi(-1073));
        assert_eq!(3.0f64.scale2(10), 3072.0);
    }

    #[test]
    fn powers() {
        assert_eq!(0.5f64.powi(3), 0.125);
        assert_eq!(0.0f64.powi(0), 1.0);
        assert!((DD::from_f64(0.9).powi(40).to_f64() - 0.9f64.powi(40)).abs() < 1e-15);
    }
}
