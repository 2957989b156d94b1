//! The linearization engine: the coefficients `phi_l` of `Phi`, the per-mode
//! coefficients `psi_{K,l}`, and diagnostics built on them.

pub mod formal;
pub mod majorant;
pub mod oracle;
pub mod radius;
pub mod residual;

use rayon::prelude::*;

use crate::arith::{Frequency, Precision, SmallDivisorTable};
use crate::error::{Error, Result};
use crate::scalar::{angular_distance, Complex, Real};
use crate::semigroup::NumericalSemigroup;

pub use formal::exp_series;
pub use majorant::{majorant_series, MajorantSeries};
pub use oracle::linearize_oracle;
pub use radius::{default_window, radius_estimate, radius_from_coefficients, RadiusEstimate};
pub use residual::{residual_check, ResidualReport};

/// `A(x) = sum_K a_K e^{iKx}` with strictly increasing positive modes.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigPolynomial<T> {
    modes: Vec<(u32, Complex<T>)>,
}

impl<T: Real> TrigPolynomial<T> {
    pub fn new(mut modes: Vec<(u32, Complex<T>)>) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::InvalidPolynomial("no Fourier modes".into()));
        }
        modes.sort_by_key(|(k, _)| *k);
        if modes.iter().any(|(k, _)| *k == 0) {
            return Err(Error::InvalidPolynomial("modes must be positive".into()));
        }
        if modes.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidPolynomial("repeated mode".into()));
        }
        if let Some((k, _)) = modes.iter().find(|(_, a)| a.is_zero()) {
            return Err(Error::InvalidPolynomial(format!("coefficient of mode {k} is zero")));
        }
        Ok(TrigPolynomial { modes })
    }

    /// Modes `a_k = |a_k| e^{i(k theta + pi/2)}`, the argument class of the upper bound.
    pub fn with_phase(moduli: &[(u32, T)], theta: &T) -> Result<Self> {
        let prec = theta.precision();
        let half_pi = {
            let mut p = T::pi(prec);
            p.div_i64(2);
            p
        };
        let modes = moduli
            .iter()
            .map(|(k, r)| {
                let mut arg = theta.clone();
                arg.mul_i64(*k as i64);
                arg += &half_pi;
                (*k, Complex::from_polar(r, &arg))
            })
            .collect();
        TrigPolynomial::new(modes)
    }

    pub fn modes(&self) -> &[(u32, Complex<T>)] {
        &self.modes
    }

    pub fn generators(&self) -> Vec<u64> {
        self.modes.iter().map(|(k, _)| *k as u64).collect()
    }

    /// Smallest mode.
    pub fn kappa0(&self) -> u32 {
        self.modes[0].0
    }

    /// Largest mode index.
    pub fn top_mode(&self) -> u32 {
        self.modes[self.modes.len() - 1].0
    }

    /// Mode with the largest `|a_k|` (smallest index on ties).
    pub fn kappa_max(&self) -> u32 {
        let mut best = 0;
        for i in 1..self.modes.len() {
            if self.modes[i].1.abs() > self.modes[best].1.abs() {
                best = i;
            }
        }
        self.modes[best].0
    }

    /// Mode with the smallest `|a_k|` (smallest index on ties).
    pub fn kappa_min(&self) -> u32 {
        let mut best = 0;
        for i in 1..self.modes.len() {
            if self.modes[i].1.abs() < self.modes[best].1.abs() {
                best = i;
            }
        }
        self.modes[best].0
    }

    pub fn coefficient(&self, k: u32) -> Option<&Complex<T>> {
        self.modes.iter().find(|(m, _)| *m == k).map(|(_, a)| a)
    }

    pub fn is_monomial(&self) -> bool {
        self.modes.len() == 1
    }

    /// A phase `theta` with `arg a_k = k theta + pi/2` for every mode, trying each
    /// of the `kappa_0` branches of `(Arg a_{kappa_0} - pi/2)/kappa_0`.
    /// On failure returns the first mode that no branch accommodates.
    pub fn phase(&self, tol: &T) -> std::result::Result<T, u32> {
        let prec = self.modes[0].1.precision();
        let pi = T::pi(prec);
        let mut half_pi = pi.clone();
        half_pi.div_i64(2);
        let k0 = self.kappa0() as i64;
        let base = self.modes[0].1.arg() - half_pi.clone();
        let mut first_bad = None;
        for j in 0..k0 {
            let mut theta = pi.clone();
            theta.mul_i64(2 * j);
            theta += &base;
            theta.div_i64(k0);
            match self.phase_violation(&theta, &half_pi, tol) {
                None => return Ok(theta),
                Some(k) => {
                    first_bad.get_or_insert(k);
                }
            }
        }
        Err(first_bad.unwrap_or(self.kappa0()))
    }

    fn phase_violation(&self, theta: &T, half_pi: &T, tol: &T) -> Option<u32> {
        for (k, a) in &self.modes {
            let mut want = theta.clone();
            want.mul_i64(*k as i64);
            want += half_pi;
            if angular_distance(&a.arg(), &want) > *tol {
                return Some(*k);
            }
        }
        None
    }

    pub fn convert<U: Real>(&self) -> TrigPolynomial<U> {
        TrigPolynomial { modes: self.modes.iter().map(|(k, a)| (*k, a.convert())).collect() }
    }
}

/// Coefficients of `Phi` and of each `Psi_K` up to `n_max`.
#[derive(Clone, Debug)]
pub struct LinearizationSeries<T> {
    polynomial: TrigPolynomial<T>,
    frequency: Frequency,
    semigroup: NumericalSemigroup,
    divisors: SmallDivisorTable<T>,
    phi: Vec<Complex<T>>,
    psi: Vec<Vec<Complex<T>>>,
}

/// Computes `phi_1..phi_{n_max}` by the per-mode convolution
/// `(n - K) psi_{K,n} = K sum_k k phi_k psi_{K,n-k}` and `phi_n = sum_K psi_{K,n} / D_n`.
pub fn linearize<T: Real>(
    polynomial: &TrigPolynomial<T>,
    frequency: &Frequency,
    n_max: u64,
    precision: Precision,
) -> Result<LinearizationSeries<T>> {
    if n_max < polynomial.kappa0() as u64 {
        return Err(Error::Config(format!("n_max {n_max} is below the smallest mode")));
    }
    let divisors = SmallDivisorTable::build(frequency, n_max, precision)?;
    linearize_with_table(polynomial, frequency, divisors)
}

/// As [`linearize`], reusing a divisor table; `n_max` is the table's.
pub fn linearize_with_table<T: Real>(
    polynomial: &TrigPolynomial<T>,
    frequency: &Frequency,
    divisors: SmallDivisorTable<T>,
) -> Result<LinearizationSeries<T>> {
    let n_max = divisors.n_max() as usize;
    let prec = divisors.precision().bits;
    let semigroup = NumericalSemigroup::build(&polynomial.generators())?;
    let member: Vec<bool> = (0..=n_max as u64).map(|m| semigroup.contains(m)).collect();
    let seeds: Vec<(usize, Complex<T>)> = polynomial
        .modes()
        .iter()
        .map(|(k, a)| (*k as usize, Complex::i_pow(k + 1, prec).mul(a)))
        .collect();

    let mut phi = vec![Complex::zero(prec); n_max + 1];
    let mut kphi = vec![Complex::zero(prec); n_max + 1];
    let mut psi: Vec<Vec<Complex<T>>> = vec![vec![Complex::zero(prec); n_max + 1]; seeds.len()];
    let mut support: Vec<usize> = Vec::new();

    for n in polynomial.kappa0() as usize..=n_max {
        if !member[n] {
            continue;
        }
        let phi_ref = &kphi;
        let support_ref = &support;
        let member_ref = &member;
        psi.par_iter_mut().zip(seeds.par_iter()).for_each(|(row, (k, seed))| {
            let k = *k;
            if n < k {
                return;
            }
            if n == k {
                row[n] = seed.clone();
                return;
            }
            let mut acc = Complex::zero(prec);
            for &j in support_ref.iter().take_while(|&&j| j <= n - k) {
                if member_ref[n - j] && !row[n - j].is_zero() {
                    acc.mul_add_assign(&phi_ref[j], &row[n - j]);
                }
            }
            acc.mul_i64(k as i64);
            acc.div_i64((n - k) as i64);
            row[n] = acc;
        });
        let mut total = Complex::zero(prec);
        for row in &psi {
            total.add_assign(&row[n]);
        }
        let d = divisors.divisor(n as u64);
        if d.is_zero() {
            return Err(Error::DivisorVanished(n as u64));
        }
        total.div_real(d);
        if !total.is_zero() {
            let mut scaled = total.clone();
            scaled.mul_i64(n as i64);
            kphi[n] = scaled;
            support.push(n);
        }
        phi[n] = total;
    }
    Ok(LinearizationSeries {
        polynomial: polynomial.clone(),
        frequency: frequency.clone(),
        semigroup,
        divisors,
        phi,
        psi,
    })
}

impl<T: Real> LinearizationSeries<T> {
    /// Reassembles a series from stored coefficients; the divisor table is rebuilt.
    pub fn from_parts(
        polynomial: TrigPolynomial<T>,
        frequency: Frequency,
        precision: Precision,
        phi: Vec<Complex<T>>,
        psi: Vec<Vec<Complex<T>>>,
    ) -> Result<Self> {
        let n_max = phi.len().saturating_sub(1) as u64;
        if psi.len() != polynomial.modes().len() || psi.iter().any(|r| r.len() != phi.len()) {
            return Err(Error::CacheCorrupt("coefficient array shapes disagree".into()));
        }
        let divisors = SmallDivisorTable::build(&frequency, n_max, precision)?;
        let semigroup = NumericalSemigroup::build(&polynomial.generators())?;
        Ok(LinearizationSeries { polynomial, frequency, semigroup, divisors, phi, psi })
    }

    pub fn n_max(&self) -> u64 {
        (self.phi.len() - 1) as u64
    }

    pub fn precision(&self) -> Precision {
        self.divisors.precision()
    }

    pub fn polynomial(&self) -> &TrigPolynomial<T> {
        &self.polynomial
    }

    pub fn frequency(&self) -> &Frequency {
        &self.frequency
    }

    pub fn semigroup(&self) -> &NumericalSemigroup {
        &self.semigroup
    }

    pub fn divisors(&self) -> &SmallDivisorTable<T> {
        &self.divisors
    }

    /// `phi_l`, with `phi_0 = 0`.
    pub fn phi(&self, l: u64) -> &Complex<T> {
        &self.phi[l as usize]
    }

    pub fn phi_all(&self) -> &[Complex<T>] {
        &self.phi
    }

    /// `psi_{K,l}` for the `m`-th mode.
    pub fn psi(&self, m: usize, l: u64) -> &Complex<T> {
        &self.psi[m][l as usize]
    }

    pub fn psi_rows(&self) -> &[Vec<Complex<T>>] {
        &self.psi
    }

    /// `sum_K psi_{K,l}`.
    pub fn psi_total(&self, l: u64) -> Complex<T> {
        let mut t = Complex::zero(self.precision().bits);
        for row in &self.psi {
            t.add_assign(&row[l as usize]);
        }
        t
    }

    /// CSV with columns `l,re_phi,im_phi,ln_abs_phi,abs_D_l,in_semigroup`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("l,re_phi,im_phi,ln_abs_phi,abs_D_l,in_semigroup\n");
        for l in 1..=self.n_max() {
            let p = self.phi(l);
            let ln = if p.is_zero() { String::new() } else { format!("{:.17e}", p.ln_abs().to_f64()) };
            let d = -self.divisors.divisor(l).to_f64();
            // decimal strings: |phi_l| leaves the f64 range at moderate orders
            out.push_str(&format!(
                "{},{},{},{},{:.17e},{}\n",
                l,
                p.re.to_mp().to_string_radix(10, Some(18)),
                p.im.to_mp().to_string_radix(10, Some(18)),
                ln,
                d,
                u8::from(self.semigroup.contains(l))
            ));
        }
        out
    }
}

/// Largest angular deviation of `arg phi_l` from `l(theta + pi/2)` and of
/// `arg psi_{K,l}` from `l(theta + pi/2) + pi`, over nonzero coefficients.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct ArgumentReport {
    pub theta: f64,
    pub max_phi_deviation: f64,
    pub max_psi_deviation: f64,
    pub worst_index: u64,
    pub checked: usize,
}

impl ArgumentReport {
    pub fn max_deviation(&self) -> f64 {
        self.max_phi_deviation.max(self.max_psi_deviation)
    }
}

/// Checks the argument rigidity of every coefficient; `theta` must fit every mode
/// within `2^-(bits/2)` radians.
pub fn argument_audit<T: Real>(series: &LinearizationSeries<T>, theta: &T) -> Result<ArgumentReport> {
    let prec = series.precision().bits;
    let tol = T::from_mp(&rug::Float::with_val(prec, rug::Float::i_exp(1, -((prec / 2) as i32))));
    let pi = T::pi(prec);
    let mut half_pi = pi.clone();
    half_pi.div_i64(2);
    if let Some(k) = series.polynomial().phase_violation(theta, &half_pi, &tol) {
        return Err(Error::HypothesisViolated(k));
    }
    let step = theta.clone() + half_pi;
    let mut report = ArgumentReport {
        theta: theta.to_f64(),
        max_phi_deviation: 0.0,
        max_psi_deviation: 0.0,
        worst_index: 0,
        checked: 0,
    };
    let mut worst = T::zero(prec);
    for l in 1..=series.n_max() {
        let mut want = step.clone();
        want.mul_i64(l as i64);
        let p = series.phi(l);
        if !p.is_zero() {
            let dev = angular_distance(&p.arg(), &want);
            report.checked += 1;
            if dev > worst {
                worst = dev.clone();
                report.worst_index = l;
            }
            report.max_phi_deviation = report.max_phi_deviation.max(dev.to_f64());
        }
        let want_psi = want + pi.clone();
        for row in series.psi_rows() {
            let c = &row[l as usize];
            if !c.is_zero() {
                let dev = angular_distance(&c.arg(), &want_psi);
                report.checked += 1;
                if dev > worst {
                    worst = dev.clone();
                    report.worst_index = l;
                }
                report.max_psi_deviation = report.max_psi_deviation.max(dev.to_f64());
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Mp;

    fn mp(v: f64) -> Mp {
        Mp::with_val(256, v)
    }

    fn semi_standard() -> TrigPolynomial<Mp> {
        TrigPolynomial::new(vec![(1, Complex::new(mp(1.0), mp(0.0)))]).unwrap()
    }

    #[test]
    fn first_coefficient_of_semi_standard() {
        let s = linearize(&semi_standard(), &Frequency::golden(), 5, Precision::new(256)).unwrap();
        let d1 = s.divisors().divisor(1).clone();
        // phi_1 = i^2 / D_1
        let want = Mp::with_val(256, -1) / d1;
        assert_eq!(s.phi(1).re, want);
        assert!(s.phi(1).im.is_zero());
    }

    #[test]
    fn monomial_support() {
        let p = TrigPolynomial::new(vec![(3, Complex::new(mp(0.5), mp(2.0)))]).unwrap();
        let s = linearize(&p, &Frequency::golden(), 60, Precision::new(128)).unwrap();
        for l in 1..=60 {
            assert_eq!(s.phi(l).is_zero(), l % 3 != 0, "l = {l}");
        }
    }

    #[test]
    fn consistency_with_divisors() {
        let p = TrigPolynomial::new(vec![
            (3, Complex::new(mp(0.0), mp(1.0))),
            (5, Complex::new(mp(0.3), mp(-0.7))),
        ])
        .unwrap();
        let s = linearize(&p, &Frequency::surd(-1, 1, 2, 1).unwrap(), 80, Precision::new(256)).unwrap();
        for l in 3..=80u64 {
            let mut lhs = s.phi(l).clone();
            lhs.scale(s.divisors().divisor(l));
            let mut diff = s.psi_total(l);
            diff.sub_assign(&lhs);
            let scale = s.psi_total(l).abs() + Mp::with_val(256, 1);
            assert!(diff.abs() / scale < 1e-70, "l = {l}");
            assert_eq!(s.phi(l).is_zero(), !s.semigroup().contains(l));
        }
    }

    #[test]
    fn phase_branches() {
        // a_3 = i forces 3 theta = 0 mod 2 pi; theta = 2 pi / 3 also fits a_5
        let theta = Mp::with_val(256, rug::float::Constant::Pi) * 2u32 / 3u32;
        let p = TrigPolynomial::with_phase(&[(3, mp(1.0)), (5, mp(1.0))], &theta).unwrap();
        let tol = mp(1e-30);
        let got = p.phase(&tol).unwrap();
        assert!(angular_distance(&got, &theta) < 1e-30);
        let bad = TrigPolynomial::new(vec![(1, Complex::new(mp(0.0), mp(1.0))), (2, Complex::new(mp(1.0), mp(0.0)))])
            .unwrap();
        assert_eq!(bad.phase(&tol), Err(2));
    }

    #[test]
    fn argument_audit_semi_standard() {
        let p = TrigPolynomial::new(vec![(1, Complex::new(mp(0.0), mp(1.0)))]).unwrap();
        let s = linearize(&p, &Frequency::golden(), 100, Precision::new(256)).unwrap();
        let r = argument_audit(&s, &mp(0.0)).unwrap();
        assert!(r.max_deviation() < 1e-60);
        let monomial = TrigPolynomial::new(vec![(4, Complex::new(mp(2.0), mp(3.0)))]).unwrap();
        let theta = monomial.phase(&mp(1e-40)).unwrap();
        let s = linearize(&monomial, &Frequency::golden(), 100, Precision::new(256)).unwrap();
        assert!(argument_audit(&s, &theta).unwrap().max_deviation() < 1e-60);
    }

    #[test]
    fn generic_over_f64() {
        let p: TrigPolynomial<f64> = TrigPolynomial::new(vec![(1, Complex::new(1.0, 0.0))]).unwrap();
        let s = linearize(&p, &Frequency::golden(), 30, Precision::new(53)).unwrap();
        let m = linearize(&semi_standard(), &Frequency::golden(), 30, Precision::new(256)).unwrap();
        for l in 1..=30 {
            let rel = (s.phi(l).re - m.phi(l).re.to_f64()).abs() / m.phi(l).abs().to_f64();
            assert!(rel < 1e-10, "l = {l}: {rel}");
        }
    }
}
