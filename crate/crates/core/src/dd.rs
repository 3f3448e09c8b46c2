//! Double-double arithmetic.
//!
//! A [`DoubleDouble`] carries an unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`,
//! giving roughly 32 significant decimal digits. It is used for quadrature
//! accumulators, for polynomial evaluation where the coefficients alternate in
//! sign, and for the exponential-series representation of `p(x;n)`.
//!
//! [`RealScalar`] pairs a double-double value with an absolute error bound and
//! propagates the bound through the few operations the pipelines need.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use num::bigint::BigInt;
use num::ToPrimitive;
use serde::{Serialize, Serializer};

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

// valid only for |a| >= |b|
#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let err = b - (s - a);
    (s, err)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let err = a.mul_add(b, -p);
    (p, err)
}

#[derive(Copy, Clone, Default, PartialEq)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

impl DoubleDouble {
    pub const ZERO: DoubleDouble = DoubleDouble { hi: 0.0, lo: 0.0 };
    pub const ONE: DoubleDouble = DoubleDouble { hi: 1.0, lo: 0.0 };
    pub const PI: DoubleDouble = DoubleDouble {
        hi: std::f64::consts::PI,
        lo: 1.224_646_799_147_353_2e-16,
    };
    pub const LN_2: DoubleDouble = DoubleDouble {
        hi: std::f64::consts::LN_2,
        lo: 2.319_046_813_846_299_6e-17,
    };

    #[inline]
    pub const fn new(hi: f64, lo: f64) -> Self {
        DoubleDouble { hi, lo }
    }

    #[inline]
    pub fn from_sum(a: f64, b: f64) -> Self {
        let (hi, lo) = two_sum(a, b);
        DoubleDouble { hi, lo }
    }

    #[inline]
    pub fn from_prod(a: f64, b: f64) -> Self {
        let (hi, lo) = two_prod(a, b);
        DoubleDouble { hi, lo }
    }

    /// Nearest double-double to an exact integer.
    pub fn from_bigint(n: &BigInt) -> Self {
        let hi = n.to_f64().unwrap_or(f64::NAN);
        if !hi.is_finite() {
            return DoubleDouble::new(hi, 0.0);
        }
        // hi is integer valued, so the residual is exact in BigInt
        let hi_exact = if hi.abs() < 1.0e38 {
            BigInt::from(hi as i128)
        } else {
            big_from_f64(hi)
        };
        let lo = (n - hi_exact).to_f64().unwrap_or(0.0);
        let (h, l) = quick_two_sum(hi, lo);
        DoubleDouble::new(h, l)
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn abs(self) -> Self {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            -self
        } else {
            self
        }
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }

    pub fn is_sign_negative(self) -> bool {
        self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0)
    }

    #[inline]
    pub fn add_f64(self, b: f64) -> Self {
        let (s1, s2) = two_sum(self.hi, b);
        let s2 = s2 + self.lo;
        let (hi, lo) = quick_two_sum(s1, s2);
        DoubleDouble { hi, lo }
    }

    #[inline]
    pub fn mul_f64(self, b: f64) -> Self {
        let (p1, p2) = two_prod(self.hi, b);
        let p2 = self.lo.mul_add(b, p2);
        let (hi, lo) = quick_two_sum(p1, p2);
        DoubleDouble { hi, lo }
    }

    pub fn div_f64(self, b: f64) -> Self {
        let q1 = self.hi / b;
        let (p1, p2) = two_prod(q1, b);
        let (s, e) = two_sum(self.hi, -p1);
        let e = e + self.lo - p2;
        let q2 = (s + e) / b;
        let (hi, lo) = quick_two_sum(q1, q2);
        DoubleDouble { hi, lo }
    }

    pub fn recip(self) -> Self {
        DoubleDouble::ONE / self
    }

    pub fn sqr(self) -> Self {
        self * self
    }

    /// Multiplication by an exact power of two.
    pub fn ldexp(self, e: i32) -> Self {
        let s = 2f64.powi(e);
        DoubleDouble::new(self.hi * s, self.lo * s)
    }

    /// Integer power by repeated squaring.
    pub fn powi(self, mut e: u32) -> Self {
        let mut base = self;
        let mut acc = DoubleDouble::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base.sqr();
            e >>= 1;
        }
        acc
    }

    pub fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return if self.hi == 0.0 {
                DoubleDouble::ZERO
            } else {
                DoubleDouble::new(f64::NAN, f64::NAN)
            };
        }
        // one Newton step from the double approximation
        let x = self.hi.sqrt();
        let r = self - DoubleDouble::from_prod(x, x);
        let corr = r.hi / (2.0 * x);
        DoubleDouble::from_sum(x, corr)
    }

    /// Exponential with about 30 correct digits for |x| up to ~700.
    pub fn exp(self) -> Self {
        if self.hi > 709.0 {
            return DoubleDouble::new(f64::INFINITY, 0.0);
        }
        if self.hi < -745.0 {
            return DoubleDouble::ZERO;
        }
        if self.hi == 0.0 && self.lo == 0.0 {
            return DoubleDouble::ONE;
        }
        const SQUARINGS: i32 = 10;
        let k = (self.hi / Self::LN_2.hi).round();
        let r = (self - Self::LN_2.mul_f64(k)).ldexp(-SQUARINGS);

        // expm1(r) by Taylor series; |r| < 3.5e-4 so a dozen terms is plenty
        let mut term = r;
        let mut s = r;
        let mut i = 2.0;
        while term.hi.abs() > 1e-36 * s.hi.abs().max(1e-300) && i < 30.0 {
            term = (term * r).div_f64(i);
            s += term;
            i += 1.0;
        }
        // (1+s)^2 - 1 = 2s + s^2 keeps the small part accurate
        for _ in 0..SQUARINGS {
            s = s.mul_f64(2.0) + s.sqr();
        }
        (s + DoubleDouble::ONE).ldexp(k as i32)
    }

    /// Scientific notation with `digits` significant digits, e.g. `9.94241556e-1`.
    pub fn to_sci_string(self, digits: usize) -> String {
        let digits = digits.clamp(1, 34);
        if self.hi.is_nan() {
            return "NaN".to_string();
        }
        if self.hi.is_infinite() {
            return if self.hi > 0.0 { "inf" } else { "-inf" }.to_string();
        }
        if self.hi == 0.0 {
            return "0".to_string();
        }
        let neg = self.is_sign_negative();
        let mut x = self.abs();
        let mut exp10 = x.hi.log10().floor() as i32;
        x = x * DoubleDouble::from(10.0).powi_signed(-exp10);
        if x.hi >= 10.0 {
            x = x.div_f64(10.0);
            exp10 += 1;
        } else if x.hi < 1.0 {
            x = x.mul_f64(10.0);
            exp10 -= 1;
        }

        let mut ds: Vec<u8> = Vec::with_capacity(digits + 1);
        for _ in 0..=digits {
            let mut d = x.hi.floor().clamp(0.0, 9.0);
            let mut r = x.add_f64(-d);
            if r.is_sign_negative() && d > 0.0 {
                d -= 1.0;
                r = r.add_f64(1.0);
            }
            ds.push(d as u8);
            x = r.mul_f64(10.0);
        }
        // round half up on the guard digit
        let guard = ds.pop().unwrap_or(0);
        if guard >= 5 {
            let mut i = ds.len();
            loop {
                if i == 0 {
                    ds.insert(0, 1);
                    ds.pop();
                    exp10 += 1;
                    break;
                }
                i -= 1;
                if ds[i] == 9 {
                    ds[i] = 0;
                } else {
                    ds[i] += 1;
                    break;
                }
            }
        }
        let mut out = String::with_capacity(digits + 8);
        if neg {
            out.push('-');
        }
        out.push((b'0' + ds[0]) as char);
        if ds.len() > 1 {
            out.push('.');
            for d in &ds[1..] {
                out.push((b'0' + d) as char);
            }
        }
        out.push('e');
        out.push_str(&exp10.to_string());
        out
    }

    fn powi_signed(self, e: i32) -> Self {
        if e >= 0 {
            self.powi(e as u32)
        } else {
            self.powi(e.unsigned_abs()).recip()
        }
    }
}

fn big_from_f64(x: f64) -> BigInt {
    // x is integer valued; decompose mantissa and exponent exactly
    let bits = x.to_bits();
    let sign = if (bits >> 63) == 1 { -1 } else { 1 };
    let exponent = ((bits >> 52) & 0x7ff) as i64 - 1075;
    let mantissa = (bits & 0x000f_ffff_ffff_ffff) | 0x0010_0000_0000_0000;
    let m = BigInt::from(mantissa) * sign;
    if exponent >= 0 {
        m << exponent as usize
    } else {
        m >> (-exponent) as usize
    }
}

impl From<f64> for DoubleDouble {
    #[inline]
    fn from(x: f64) -> Self {
        DoubleDouble::new(x, 0.0)
    }
}

impl fmt::Debug for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DD({})", self.to_sci_string(32))
    }
}

impl fmt::Display for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(32);
        f.write_str(&self.to_sci_string(digits))
    }
}

impl Serialize for DoubleDouble {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_sci_string(32))
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        DoubleDouble::new(-self.hi, -self.lo)
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    #[inline]
    fn add(self, b: Self) -> Self {
        let (s1, s2) = two_sum(self.hi, b.hi);
        let (t1, t2) = two_sum(self.lo, b.lo);
        let s2 = s2 + t1;
        let (s1, s2) = quick_two_sum(s1, s2);
        let s2 = s2 + t2;
        let (hi, lo) = quick_two_sum(s1, s2);
        DoubleDouble { hi, lo }
    }
}

impl Add<f64> for DoubleDouble {
    type Output = Self;
    #[inline]
    fn add(self, b: f64) -> Self {
        self.add_f64(b)
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    #[inline]
    fn sub(self, b: Self) -> Self {
        self + (-b)
    }
}

impl Sub<f64> for DoubleDouble {
    type Output = Self;
    #[inline]
    fn sub(self, b: f64) -> Self {
        self.add_f64(-b)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    #[inline]
    fn mul(self, b: Self) -> Self {
        let (p1, p2) = two_prod(self.hi, b.hi);
        let p2 = p2 + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p1, p2);
        DoubleDouble { hi, lo }
    }
}

impl Mul<f64> for DoubleDouble {
    type Output = Self;
    #[inline]
    fn mul(self, b: f64) -> Self {
        self.mul_f64(b)
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    fn div(self, b: Self) -> Self {
        let q1 = self.hi / b.hi;
        let r = self - b * q1;
        let q2 = r.hi / b.hi;
        let r = r - b * q2;
        let q3 = r.hi / b.hi;
        let (q1, q2) = quick_two_sum(q1, q2);
        DoubleDouble::new(q1, q2).add_f64(q3)
    }
}

impl Div<f64> for DoubleDouble {
    type Output = Self;
    #[inline]
    fn div(self, b: f64) -> Self {
        self.div_f64(b)
    }
}

impl AddAssign for DoubleDouble {
    #[inline]
    fn add_assign(&mut self, b: Self) {
        *self = *self + b;
    }
}

impl AddAssign<f64> for DoubleDouble {
    #[inline]
    fn add_assign(&mut self, b: f64) {
        *self = self.add_f64(b);
    }
}

impl SubAssign for DoubleDouble {
    #[inline]
    fn sub_assign(&mut self, b: Self) {
        *self = *self - b;
    }
}

impl PartialOrd for DoubleDouble {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi)? {
            Ordering::Equal => self.lo.partial_cmp(&other.lo),
            o => Some(o),
        }
    }
}

impl Sum for DoubleDouble {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(DoubleDouble::ZERO, |a, b| a + b)
    }
}

impl Sum<f64> for DoubleDouble {
    fn sum<I: Iterator<Item = f64>>(iter: I) -> Self {
        iter.fold(DoubleDouble::ZERO, |a, b| a + b)
    }
}

/// Extended-precision value with an absolute error bound.
#[derive(Copy, Clone, Debug, Default, PartialEq, Serialize)]
pub struct RealScalar {
    pub value: DoubleDouble,
    #[serde(serialize_with = "ser_f64_str")]
    pub bound: f64,
}

impl RealScalar {
    pub fn new(value: DoubleDouble, bound: f64) -> Self {
        RealScalar { value, bound }
    }

    pub fn exact(value: f64) -> Self {
        RealScalar {
            value: value.into(),
            bound: 0.0,
        }
    }

    pub fn to_f64(self) -> f64 {
        self.value.to_f64()
    }

    pub fn scale(self, c: f64) -> Self {
        RealScalar {
            value: self.value * c,
            bound: self.bound * c.abs(),
        }
    }

    /// `value - bound`: the smallest value consistent with the bound.
    pub fn lower(self) -> f64 {
        (self.value - self.bound).to_f64()
    }

    pub fn upper(self) -> f64 {
        (self.value + self.bound).to_f64()
    }

    /// Whether two enclosures overlap.
    pub fn agrees_with(&self, other: &RealScalar) -> bool {
        (self.value - other.value).abs().to_f64() <= self.bound + other.bound
    }
}

impl Add for RealScalar {
    type Output = Self;
    fn add(self, b: Self) -> Self {
        RealScalar {
            value: self.value + b.value,
            bound: self.bound + b.bound,
        }
    }
}

impl Sub for RealScalar {
    type Output = Self;
    fn sub(self, b: Self) -> Self {
        RealScalar {
            value: self.value - b.value,
            bound: self.bound + b.bound,
        }
    }
}

pub fn ser_f64_str<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_f64(*x))
}

/// Shortest round-trip decimal rendering of an `f64` in scientific notation.
pub fn format_f64(x: f64) -> String {
    if x == 0.0 {
        "0".to_string()
    } else {
        format!("{x:e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn pi_string() {
        assert_eq!(
            DoubleDouble::PI.to_sci_string(30),
            "3.14159265358979323846264338328e0"
        );
    }

    #[test]
    fn exp_one_matches_e() {
        let e = DoubleDouble::ONE.exp();
        assert_eq!(e.to_sci_string(30), "2.71828182845904523536028747135e0");
        let e10 = DoubleDouble::from(-10.0).exp();
        // e^-10 = 4.539992976248485153559151556055...e-5
        assert_eq!(e10.to_sci_string(28), "4.539992976248485153559151556e-5");
    }

    #[test]
    fn division_round_trip() {
        let third = DoubleDouble::ONE / DoubleDouble::from(3.0);
        let back = third * 3.0;
        assert!((back - DoubleDouble::ONE).abs().hi < 1e-31);
        assert_eq!(third.to_sci_string(31), "3.333333333333333333333333333333e-1");
    }

    #[test]
    fn bigint_conversion_keeps_low_part() {
        let n = BigInt::from(1u64 << 60) + BigInt::from(7);
        let d = DoubleDouble::from_bigint(&n);
        assert_eq!(d.hi, (1u64 << 60) as f64);
        assert_eq!(d.lo, 7.0);
        let m = -BigInt::from(3) * BigInt::from(10u64).pow(40) - BigInt::from(1);
        let d = DoubleDouble::from_bigint(&m);
        assert_eq!(d.to_sci_string(32), "-3.0000000000000000000000000000000e40");
    }

    #[test]
    fn sci_string_rounding_carries() {
        assert_eq!(DoubleDouble::from(9.9999).to_sci_string(3), "1.00e1");
        assert_eq!(DoubleDouble::from(-0.125).to_sci_string(2), "-1.3e-1");
        assert_eq!(DoubleDouble::ZERO.to_sci_string(5), "0");
    }

    #[test]
    fn real_scalar_bounds_add() {
        let a = RealScalar::new(1.0.into(), 1e-12);
        let b = RealScalar::new(2.0.into(), 3e-12);
        let c = a + b;
        assert_eq!(c.bound, 4e-12);
        assert!(a.agrees_with(&RealScalar::new((1.0 + 5e-13).into(), 0.0)));
        assert!(!a.agrees_with(&RealScalar::new((1.0 + 5e-12).into(), 0.0)));
    }

    proptest! {
        #[test]
        fn sum_is_exact_for_two_doubles(a in -1e10f64..1e10, b in -1e-10f64..1e-10) {
            let s = DoubleDouble::from(a) + DoubleDouble::from(b);
            // hi + lo reproduces a + b exactly
            let back = (s - DoubleDouble::from(a)).to_f64();
            prop_assert!((back - b).abs() <= 1e-30 * a.abs().max(1.0));
        }

        #[test]
        fn exp_is_multiplicative(x in -20.0f64..20.0, y in -20.0f64..20.0) {
            let lhs = DoubleDouble::from(x + y).exp();
            let rhs = DoubleDouble::from(x).exp() * DoubleDouble::from(y).exp();
            // x + y rounds in f64; compare against the exact sum instead
            let exact = (DoubleDouble::from(x) + DoubleDouble::from(y)).exp();
            let rel = ((exact - rhs) / exact).abs().to_f64();
            prop_assert!(rel < 1e-28, "rel {}", rel);
            let _ = lhs;
        }
    }
}
