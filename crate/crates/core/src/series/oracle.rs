//! Direct evaluation of the multi-sum formula for `phi_l`, by literal
//! enumeration of compositions. Exponential cost; small orders only.

use crate::arith::{small_divisor, Frequency, Precision};
use crate::error::{Error, Result};
use crate::scalar::{Complex, Real};

use super::TrigPolynomial;

/// Largest order accepted by [`linearize_oracle`].
pub const ORACLE_LIMIT: usize = 25;

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// Sum over ordered tuples `(j_1..j_parts)` of positive indices with
/// `j_1 + ... + j_parts = target` of `phi_{j_1} ... phi_{j_parts}`.
fn composition_sum<T: Real>(phi: &[Complex<T>], nonzero: &[usize], target: usize, parts: usize, min: usize) -> Complex<T> {
    let prec = phi[0].precision();
    if parts == 0 {
        return if target == 0 { Complex::one(prec) } else { Complex::zero(prec) };
    }
    let mut acc = Complex::zero(prec);
    for &j in nonzero {
        // every remaining part is at least `min`
        if j + (parts - 1) * min > target {
            break;
        }
        let rest = composition_sum(phi, nonzero, target - j, parts - 1, min);
        if !rest.is_zero() {
            acc.mul_add_assign(&phi[j], &rest);
        }
    }
    acc
}

/// Sum over `(p_1..p_m)` with `p_i >= 1` of `prod 1/p_i!` times `comp[p_1 + ... + p_m]`.
fn tuple_sum<T: Real>(comp: &[Complex<T>], m: usize, used: usize, weight: &T, out: &mut Complex<T>) {
    let max_parts = comp.len() - 1;
    if m == 0 {
        let mut term = comp[used].clone();
        term.scale(weight);
        out.add_assign(&term);
        return;
    }
    let mut w = weight.clone();
    for p in 1..=max_parts.saturating_sub(used + m - 1) {
        w.div_i64(p as i64);
        tuple_sum(comp, m - 1, used + p, &w, out);
    }
}

/// `phi_1..phi_n` from the explicit multi-sum; index 0 holds zero.
pub fn linearize_oracle<T: Real>(
    polynomial: &TrigPolynomial<T>,
    frequency: &Frequency,
    n: usize,
    precision: Precision,
) -> Result<Vec<Complex<T>>> {
    if n > ORACLE_LIMIT {
        return Err(Error::OracleTooLarge(n, ORACLE_LIMIT));
    }
    let prec = precision.bits;
    let k0 = polynomial.kappa0() as usize;
    let mut phi = vec![Complex::zero(prec); n + 1];
    let mut nonzero: Vec<usize> = Vec::new();
    for l in k0..=n {
        let mut total = Complex::zero(prec);
        for (k, a) in polynomial.modes() {
            let k = *k as usize;
            if k > l {
                break;
            }
            let t = l - k;
            let mut bracket = Complex::zero(prec);
            if t == 0 {
                bracket = Complex::one(prec);
            } else {
                // comp[P] = sum over compositions of t into P parts
                let max_parts = t / k0;
                let comp: Vec<Complex<T>> =
                    (0..=max_parts).map(|parts| composition_sum(&phi, &nonzero, t, parts, k0)).collect();
                for m in 1..=k.min(t) {
                    let mut inner = Complex::zero(prec);
                    tuple_sum(&comp, m, 0, &T::one(prec), &mut inner);
                    inner.mul_i64(binomial(k as u64, m as u64) as i64);
                    bracket.add_assign(&inner);
                }
            }
            let seed = Complex::i_pow(k as u32 + 1, prec).mul(a);
            total.mul_add_assign(&seed, &bracket);
        }
        let d = T::from_mp(&small_divisor(l as u64, frequency, precision)?);
        total.div_real(&d);
        if !total.is_zero() {
            nonzero.push(l);
        }
        phi[l] = total;
    }
    Ok(phi)
}
