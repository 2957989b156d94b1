//! Distances `||l alpha||` to the integers and small divisors `D_l = -4 sin^2(pi l alpha)`.

use rug::float::Constant;
use rug::{Float, Integer};
use serde::{Deserialize, Serialize};

use super::Frequency;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Working precision of a run. `guard` extra bits are carried when evaluating
/// `l alpha`, and a distance below `2^-guard` is treated as lost.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Precision {
    pub bits: u32,
    pub guard: u32,
}

impl Precision {
    pub const DEFAULT_GUARD: u32 = 64;

    pub fn new(bits: u32) -> Self {
        Precision { bits, guard: Self::DEFAULT_GUARD }
    }

    pub fn with_guard(bits: u32, guard: u32) -> Self {
        Precision { bits, guard }
    }

    /// Bits needed to evaluate `l alpha` for all `l <= n`.
    fn work_bits(&self, n: u64) -> u32 {
        self.bits + self.guard + (64 - n.leading_zeros()) + 8
    }
}

fn bit_floor(guard: u32) -> Float {
    Float::with_val(32, Float::i_exp(1, -(guard as i32)))
}

/// `||x||` for `x` held at working precision.
fn dist_to_integers(x: &Float) -> Float {
    let mut f = x.clone();
    f -= x.clone().floor();
    let g = Float::with_val(f.prec(), 1u32 - &f);
    if g < f {
        g
    } else {
        f
    }
}

fn checked_dist(l: u64, alpha: &Float, guard: u32) -> Result<Float> {
    let mut x = alpha.clone();
    x *= l;
    let dist = dist_to_integers(&x);
    if dist < bit_floor(guard) {
        return Err(Error::PrecisionExhausted { index: l, guard });
    }
    Ok(dist)
}

fn divisor_from_dist(dist: &Float) -> Float {
    let mut s = Float::with_val(dist.prec(), Constant::Pi);
    s *= dist;
    s.sin_mut();
    s.square_mut();
    s *= -4i32;
    s
}

/// `||l alpha||` rounded to `prec.bits`.
pub fn norm_dist(l: u64, freq: &Frequency, prec: Precision) -> Result<Float> {
    if l == 0 {
        return Err(Error::IndexOutOfRange(0));
    }
    if let Some((num, den)) = freq.rational_parts() {
        let (_, r) = (num * l).div_rem_floor(den.clone());
        let r = std::cmp::min(r.clone(), Integer::from(&den - &r));
        let mut v = Float::with_val(prec.bits, r);
        v /= &den;
        return Ok(v);
    }
    let alpha = freq.value(prec.work_bits(l))?;
    let dist = checked_dist(l, &alpha, prec.guard)?;
    Ok(Float::with_val(prec.bits, dist))
}

/// `D_l = -4 sin^2(pi l alpha)` rounded to `prec.bits`.
pub fn small_divisor(l: u64, freq: &Frequency, prec: Precision) -> Result<Float> {
    if l == 0 {
        return Err(Error::IndexOutOfRange(0));
    }
    if freq.is_rational() {
        return Err(Error::RationalFrequency(freq.to_string()));
    }
    let alpha = freq.value(prec.work_bits(l))?;
    let dist = checked_dist(l, &alpha, prec.guard)?;
    Ok(Float::with_val(prec.bits, divisor_from_dist(&dist)))
}

/// `D_l` for an index beyond `u64`. The caller sizes `prec.guard` so that
/// `||l alpha||` stays above `2^-guard` (about `log2 q_{k+1}` at a convergent).
pub fn small_divisor_big(l: &Integer, freq: &Frequency, prec: Precision) -> Result<Float> {
    if *l <= 0 {
        return Err(Error::IndexOutOfRange(0));
    }
    if freq.is_rational() {
        return Err(Error::RationalFrequency(freq.to_string()));
    }
    let work = prec.bits + prec.guard + l.significant_bits() + 8;
    let mut x = freq.value(work)?;
    x *= l;
    let dist = dist_to_integers(&x);
    if dist < bit_floor(prec.guard) {
        return Err(Error::PrecisionExhausted { index: l.to_u64().unwrap_or(u64::MAX), guard: prec.guard });
    }
    Ok(Float::with_val(prec.bits, divisor_from_dist(&dist)))
}

/// `||l alpha||` and `D_l` for `l = 1..=n_max`, stored in the scalar type `T`.
#[derive(Clone, Debug)]
pub struct SmallDivisorTable<T> {
    precision: Precision,
    dist: Vec<T>,
    divisor: Vec<T>,
    smallest: u64,
}

impl<T: Real> SmallDivisorTable<T> {
    pub fn build(freq: &Frequency, n_max: u64, prec: Precision) -> Result<Self> {
        if freq.is_rational() {
            return Err(Error::RationalFrequency(freq.to_string()));
        }
        let alpha = freq.value(prec.work_bits(n_max))?;
        let mut dist = Vec::with_capacity(n_max as usize + 1);
        let mut divisor = Vec::with_capacity(n_max as usize + 1);
        dist.push(T::zero(prec.bits));
        divisor.push(T::zero(prec.bits));
        let mut smallest = 0u64;
        let mut best = Float::with_val(prec.bits, 1);
        for l in 1..=n_max {
            let d = checked_dist(l, &alpha, prec.guard)?;
            let big = divisor_from_dist(&d);
            if l == 1 || d < best {
                best = Float::with_val(prec.bits, &d);
                smallest = l;
            }
            dist.push(T::from_mp(&Float::with_val(prec.bits, &d)));
            divisor.push(T::from_mp(&Float::with_val(prec.bits, &big)));
        }
        Ok(SmallDivisorTable { precision: prec, dist, divisor, smallest })
    }

    pub fn precision(&self) -> Precision {
        self.precision
    }

    pub fn n_max(&self) -> u64 {
        (self.dist.len() - 1) as u64
    }

    /// `||l alpha||`.
    pub fn dist(&self, l: u64) -> &T {
        &self.dist[l as usize]
    }

    /// `D_l`.
    pub fn divisor(&self, l: u64) -> &T {
        &self.divisor[l as usize]
    }

    /// `|D_l|^{1/2}`.
    pub fn sqrt_abs(&self, l: u64) -> T {
        (-self.divisor[l as usize].clone()).sqrt()
    }

    /// Index with the smallest `||l alpha||` in the table.
    pub fn smallest_index(&self) -> u64 {
        self.smallest
    }
}
