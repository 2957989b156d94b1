//! Scalar abstraction shared by every numeric routine in the crate.
//!
//! The engine runs on any [`Real`]: `f32`/`f64` for quick low-order work and
//! [`rug::Float`] for the multiple-precision runs the small divisors demand.
//! Precision travels with the values; constructors take an explicit bit count
//! which hardware floats simply ignore.

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_traits::{Float, FloatConst, ToPrimitive};
use rug::float::Constant;
use rug::Integer;

/// Real scalar with runtime precision.
pub trait Real:
    Clone
    + Debug
    + PartialOrd
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + for<'a> AddAssign<&'a Self>
    + for<'a> SubAssign<&'a Self>
    + for<'a> MulAssign<&'a Self>
    + for<'a> DivAssign<&'a Self>
{
    fn from_f64_prec(v: f64, prec: u32) -> Self;
    fn from_i64_prec(v: i64, prec: u32) -> Self;
    fn from_integer(v: &Integer, prec: u32) -> Self;
    /// Rounds a multiple-precision value into `Self`, keeping its precision.
    fn from_mp(v: &rug::Float) -> Self;
    fn to_mp(&self) -> rug::Float;
    /// Parses a decimal literal at the requested precision.
    fn parse_prec(s: &str, prec: u32) -> Option<Self>;
    fn pi(prec: u32) -> Self;
    /// Mantissa bits carried by this value (53 for `f64`).
    fn precision(&self) -> u32;

    fn sqrt(&self) -> Self;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn ln(&self) -> Self;
    fn exp(&self) -> Self;
    fn abs(&self) -> Self;
    fn floor(&self) -> Self;
    fn atan2(&self, x: &Self) -> Self;
    fn hypot(&self, other: &Self) -> Self;
    fn is_zero(&self) -> bool;
    fn is_finite(&self) -> bool;
    fn to_f64(&self) -> f64;

    /// `self += a * b`.
    fn fma_assign(&mut self, a: &Self, b: &Self);
    /// `self -= a * b`.
    fn fms_assign(&mut self, a: &Self, b: &Self);
    fn mul_i64(&mut self, k: i64);
    fn div_i64(&mut self, k: i64);

    fn zero(prec: u32) -> Self {
        Self::from_i64_prec(0, prec)
    }
    fn one(prec: u32) -> Self {
        Self::from_i64_prec(1, prec)
    }
    fn zero_like(&self) -> Self {
        Self::zero(self.precision())
    }
    fn square(&self) -> Self {
        let mut s = self.clone();
        s *= self;
        s
    }
}

macro_rules! impl_real_for_primitive {
    ($($t:ty => $bits:expr),*) => {$(
        impl Real for $t {
            fn from_f64_prec(v: f64, _prec: u32) -> Self { v as $t }
            fn from_i64_prec(v: i64, _prec: u32) -> Self { v as $t }
            fn from_integer(v: &Integer, _prec: u32) -> Self { v.to_f64() as $t }
            fn from_mp(v: &rug::Float) -> Self { v.to_f64() as $t }
            fn to_mp(&self) -> rug::Float { rug::Float::with_val($bits, *self) }
            fn parse_prec(s: &str, _prec: u32) -> Option<Self> { s.trim().parse().ok() }
            fn pi(_prec: u32) -> Self { <$t as FloatConst>::PI() }
            fn precision(&self) -> u32 { $bits }
            fn sqrt(&self) -> Self { Float::sqrt(*self) }
            fn sin(&self) -> Self { Float::sin(*self) }
            fn cos(&self) -> Self { Float::cos(*self) }
            fn ln(&self) -> Self { Float::ln(*self) }
            fn exp(&self) -> Self { Float::exp(*self) }
            fn abs(&self) -> Self { Float::abs(*self) }
            fn floor(&self) -> Self { Float::floor(*self) }
            fn atan2(&self, x: &Self) -> Self { Float::atan2(*self, *x) }
            fn hypot(&self, other: &Self) -> Self { Float::hypot(*self, *other) }
            fn is_zero(&self) -> bool { *self == 0.0 }
            fn is_finite(&self) -> bool { Float::is_finite(*self) }
            fn to_f64(&self) -> f64 { ToPrimitive::to_f64(self).unwrap_or(f64::NAN) }
            fn fma_assign(&mut self, a: &Self, b: &Self) { *self += *a * *b; }
            fn fms_assign(&mut self, a: &Self, b: &Self) { *self -= *a * *b; }
            fn mul_i64(&mut self, k: i64) { *self *= k as $t; }
            fn div_i64(&mut self, k: i64) { *self /= k as $t; }
        }
    )*};
}

impl_real_for_primitive!(f32 => 24, f64 => 53);

impl Real for rug::Float {
    fn from_f64_prec(v: f64, prec: u32) -> Self {
        rug::Float::with_val(prec, v)
    }
    fn from_i64_prec(v: i64, prec: u32) -> Self {
        rug::Float::with_val(prec, v)
    }
    fn from_integer(v: &Integer, prec: u32) -> Self {
        rug::Float::with_val(prec, v)
    }
    fn from_mp(v: &rug::Float) -> Self {
        v.clone()
    }
    fn to_mp(&self) -> rug::Float {
        self.clone()
    }
    fn parse_prec(s: &str, prec: u32) -> Option<Self> {
        rug::Float::parse(s.trim())
            .ok()
            .map(|p| rug::Float::with_val(prec, p))
    }
    fn pi(prec: u32) -> Self {
        rug::Float::with_val(prec, Constant::Pi)
    }
    fn precision(&self) -> u32 {
        self.prec()
    }
    fn sqrt(&self) -> Self {
        self.clone().sqrt()
    }
    fn sin(&self) -> Self {
        self.clone().sin()
    }
    fn cos(&self) -> Self {
        self.clone().cos()
    }
    fn ln(&self) -> Self {
        self.clone().ln()
    }
    fn exp(&self) -> Self {
        self.clone().exp()
    }
    fn abs(&self) -> Self {
        self.clone().abs()
    }
    fn floor(&self) -> Self {
        self.clone().floor()
    }
    fn atan2(&self, x: &Self) -> Self {
        self.clone().atan2(x)
    }
    fn hypot(&self, other: &Self) -> Self {
        self.clone().hypot(other)
    }
    fn is_zero(&self) -> bool {
        rug::Float::is_zero(self)
    }
    fn is_finite(&self) -> bool {
        rug::Float::is_finite(self)
    }
    fn to_f64(&self) -> f64 {
        rug::Float::to_f64(self)
    }
    fn fma_assign(&mut self, a: &Self, b: &Self) {
        *self += a * b;
    }
    fn fms_assign(&mut self, a: &Self, b: &Self) {
        *self -= a * b;
    }
    fn mul_i64(&mut self, k: i64) {
        *self *= k;
    }
    fn div_i64(&mut self, k: i64) {
        *self /= k;
    }
}

/// Complex number over any [`Real`].
#[derive(Clone, Debug, PartialEq)]
pub struct Complex<T> {
    pub re: T,
    pub im: T,
}

impl<T: Real> Complex<T> {
    pub fn new(re: T, im: T) -> Self {
        Complex { re, im }
    }

    pub fn zero(prec: u32) -> Self {
        Complex::new(T::zero(prec), T::zero(prec))
    }

    pub fn one(prec: u32) -> Self {
        Complex::new(T::one(prec), T::zero(prec))
    }

    pub fn from_real(re: T) -> Self {
        let im = re.zero_like();
        Complex { re, im }
    }

    /// `modulus * e^{i arg}`.
    pub fn from_polar(modulus: &T, arg: &T) -> Self {
        let mut re = arg.cos();
        re *= modulus;
        let mut im = arg.sin();
        im *= modulus;
        Complex { re, im }
    }

    /// `i^k` exactly.
    pub fn i_pow(k: u32, prec: u32) -> Self {
        let (one, zero) = (T::one(prec), T::zero(prec));
        match k % 4 {
            0 => Complex::new(one, zero),
            1 => Complex::new(zero, one),
            2 => Complex::new(-one, zero),
            _ => Complex::new(zero, -one),
        }
    }

    pub fn precision(&self) -> u32 {
        self.re.precision()
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn abs(&self) -> T {
        self.re.hypot(&self.im)
    }

    /// `ln |z|`; callers must not pass zero.
    pub fn ln_abs(&self) -> T {
        self.abs().ln()
    }

    pub fn arg(&self) -> T {
        self.im.atan2(&self.re)
    }

    pub fn conj(&self) -> Self {
        Complex::new(self.re.clone(), -self.im.clone())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Complex::zero(self.precision());
        out.mul_add_assign(self, other);
        out
    }

    /// `self += a * b`.
    pub fn mul_add_assign(&mut self, a: &Self, b: &Self) {
        self.re.fma_assign(&a.re, &b.re);
        self.re.fms_assign(&a.im, &b.im);
        self.im.fma_assign(&a.re, &b.im);
        self.im.fma_assign(&a.im, &b.re);
    }

    pub fn add_assign(&mut self, other: &Self) {
        self.re += &other.re;
        self.im += &other.im;
    }

    pub fn sub_assign(&mut self, other: &Self) {
        self.re -= &other.re;
        self.im -= &other.im;
    }

    pub fn scale(&mut self, s: &T) {
        self.re *= s;
        self.im *= s;
    }

    pub fn div_real(&mut self, s: &T) {
        self.re /= s;
        self.im /= s;
    }

    pub fn mul_i64(&mut self, k: i64) {
        self.re.mul_i64(k);
        self.im.mul_i64(k);
    }

    pub fn div_i64(&mut self, k: i64) {
        self.re.div_i64(k);
        self.im.div_i64(k);
    }

    pub fn div(&self, other: &Self) -> Self {
        let mut num = self.mul(&other.conj());
        let den = other.re.square() + other.im.square();
        num.div_real(&den);
        num
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    pub fn convert<U: Real>(&self) -> Complex<U> {
        Complex::new(U::from_mp(&self.re.to_mp()), U::from_mp(&self.im.to_mp()))
    }
}

/// Distance between two angles on the circle, in `[0, pi]`.
pub fn angular_distance<T: Real>(a: &T, b: &T) -> T {
    let prec = a.precision();
    let two_pi = {
        let mut p = T::pi(prec);
        p.mul_i64(2);
        p
    };
    let mut d = a.clone() - b.clone();
    let mut turns = d.clone();
    turns /= &two_pi;
    let mut whole = turns.floor();
    whole *= &two_pi;
    d -= &whole;
    // d in [0, 2pi)
    let other = two_pi - d.clone();
    if other < d {
        other
    } else {
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_mul_matches_hand_expansion() {
        let a = Complex::new(1.5f64, -2.0);
        let b = Complex::new(0.25f64, 3.0);
        let c = a.mul(&b);
        assert!((c.re - (1.5 * 0.25 + 6.0)).abs() < 1e-15);
        assert!((c.im - (4.5 - 0.5)).abs() < 1e-15);
    }

    #[test]
    fn i_powers_cycle() {
        let p: Vec<(f64, f64)> = (0..5).map(|k| Complex::<f64>::i_pow(k, 53).to_f64_pair()).collect();
        assert_eq!(p, vec![(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0), (1.0, 0.0)]);
    }

    #[test]
    fn mp_and_f64_agree_on_elementary_functions() {
        let x = rug::Float::with_val(256, 0.7);
        let y: f64 = 0.7;
        assert!((Real::sin(&x).to_f64() - y.sin()).abs() < 1e-15);
        assert!((Real::ln(&x).to_f64() - y.ln()).abs() < 1e-15);
        assert_eq!(Real::precision(&x), 256);
    }

    #[test]
    fn angular_distance_wraps() {
        let d = angular_distance(&0.1f64, &(2.0 * std::f64::consts::PI - 0.1));
        assert!((d - 0.2).abs() < 1e-12);
        let d = angular_distance(&7.0f64, &(7.0 + 4.0 * std::f64::consts::PI));
        assert!(d.abs() < 1e-12);
    }

    #[test]
    fn mp_exponent_range_exceeds_hardware() {
        let big = rug::Float::with_val(128, 1e300);
        let huge = big.clone() * big.clone() * big;
        assert!(Real::ln(&huge).to_f64() > 2000.0);
    }
}
