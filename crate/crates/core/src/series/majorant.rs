//! The divisor-free majorant `w = sum_K (z e^w)^K` over the modes of `A`.

use crate::scalar::Real;
use crate::semigroup::NumericalSemigroup;
use crate::error::Result;

#[derive(Clone, Debug)]
pub struct MajorantSeries<T> {
    sigma: Vec<T>,
    ln_radius: f64,
}

impl<T: Real> MajorantSeries<T> {
    pub fn n_max(&self) -> u64 {
        (self.sigma.len() - 1) as u64
    }

    pub fn sigma(&self, n: u64) -> &T {
        &self.sigma[n as usize]
    }

    /// `ln R`, from the tail maximum of `ln(sigma_n)/n` over the upper half.
    pub fn ln_radius(&self) -> f64 {
        self.ln_radius
    }

    pub fn radius(&self) -> f64 {
        self.ln_radius.exp()
    }
}

/// `sigma_n` by the psi-type recurrence with unit seeds and no divisors:
/// `sigma_n = sum_K s_{K,n}`, `s_{K,K} = 1`, `(n - K) s_{K,n} = K sum_k k sigma_k s_{K,n-k}`.
pub fn majorant_series<T: Real>(modes: &[u64], n_max: u64, prec: u32) -> Result<MajorantSeries<T>> {
    let sg = NumericalSemigroup::build(modes)?;
    let modes = sg.generators().to_vec();
    let n = n_max as usize;
    let mut sigma = vec![T::zero(prec); n + 1];
    let mut ksigma = vec![T::zero(prec); n + 1];
    let mut rows = vec![vec![T::zero(prec); n + 1]; modes.len()];
    let mut support: Vec<usize> = Vec::new();
    for m in modes[0] as usize..=n {
        if !sg.contains(m as u64) {
            continue;
        }
        let mut total = T::zero(prec);
        for (row, &k) in rows.iter_mut().zip(&modes) {
            let k = k as usize;
            if m < k {
                continue;
            }
            if m == k {
                row[m] = T::one(prec);
            } else {
                let mut acc = T::zero(prec);
                for &j in support.iter().take_while(|&&j| j <= m - k) {
                    if !row[m - j].is_zero() {
                        acc.fma_assign(&ksigma[j], &row[m - j]);
                    }
                }
                acc.mul_i64(k as i64);
                acc.div_i64((m - k) as i64);
                row[m] = acc;
            }
            total += &row[m];
        }
        if !total.is_zero() {
            let mut s = total.clone();
            s.mul_i64(m as i64);
            ksigma[m] = s;
            support.push(m);
        }
        sigma[m] = total;
    }
    let lo = (n / 2).max(1);
    let ln_growth = (lo..=n)
        .filter(|&m| !sigma[m].is_zero())
        .map(|m| sigma[m].ln().to_f64() / m as f64)
        .fold(f64::NEG_INFINITY, f64::max);
    let ln_radius = if ln_growth.is_finite() { -ln_growth } else { f64::INFINITY };
    Ok(MajorantSeries { sigma, ln_radius })
}
