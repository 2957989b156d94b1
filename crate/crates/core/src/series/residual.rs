//! Coefficient-wise residuals of the functional equation for `Phi` and of the
//! two components of the conjugacy `F o H = H o R`, with `h(z) = iz e^{Phi(z)}`
//! and `h_2(z) = h(z)/h(lambda^{-1} z)`.

use rug::float::Constant;
use rug::Float;
use serde::Serialize;

use crate::arith::{Frequency, Precision};
use crate::error::Result;
use crate::scalar::{Complex, Real};

use super::formal::{exp_series, hadamard, pow_series};
use super::{LinearizationSeries, TrigPolynomial};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualReport {
    /// Orders `1..=upto` were compared.
    pub upto: u64,
    /// `max |LHS_n - RHS_n| / max(1, |RHS_n|)` for the functional equation.
    pub functional: f64,
    pub functional_worst: u64,
    /// Same measure for the first component of the conjugacy.
    pub first_component: f64,
    /// Same measure for the second component, built from `h_2 = h(z)/h(lambda^{-1} z)`.
    pub second_component: f64,
}

impl ResidualReport {
    pub fn max(&self) -> f64 {
        self.functional.max(self.first_component).max(self.second_component)
    }
}

/// `lambda^n = e^{2 pi i n alpha}` for `n = 0..len`, evaluated from `alpha` with guard bits.
fn lambda_powers<T: Real>(freq: &Frequency, len: usize, precision: Precision) -> Result<Vec<Complex<T>>> {
    let work = precision.bits + precision.guard + 64;
    let alpha = freq.value(work)?;
    let two_pi = Float::with_val(work, Constant::Pi) * 2u32;
    let mut out = Vec::with_capacity(len);
    for n in 0..len {
        let mut x = Float::with_val(work, &alpha * n as u64);
        let whole = x.clone().floor();
        x -= whole;
        x *= &two_pi;
        let (s, c) = x.sin_cos(Float::new(work));
        out.push(Complex::new(
            T::from_mp(&Float::with_val(precision.bits, &c)),
            T::from_mp(&Float::with_val(precision.bits, &s)),
        ));
    }
    Ok(out)
}

fn relative_gap<T: Real>(lhs: &[Complex<T>], rhs: &[Complex<T>], upto: usize) -> (f64, u64) {
    let mut worst = (0.0f64, 0u64);
    for n in 1..=upto {
        let mut diff = lhs[n].clone();
        diff.sub_assign(&rhs[n]);
        let scale = rhs[n].abs().to_f64().max(1.0);
        let r = diff.abs().to_f64() / scale;
        if r > worst.0 || r.is_nan() {
            worst = (r, n as u64);
        }
    }
    worst
}

/// Residuals for an arbitrary coefficient array `phi` (index 0 must be zero).
pub fn residual_from_coefficients<T: Real>(
    polynomial: &TrigPolynomial<T>,
    frequency: &Frequency,
    phi: &[Complex<T>],
    precision: Precision,
) -> Result<ResidualReport> {
    let prec = precision.bits;
    let n_max = phi.len() - 1;
    let upto = n_max.saturating_sub(polynomial.top_mode() as usize);
    let len = upto + 1;
    let phi = &phi[..len];
    let lam = lambda_powers::<T>(frequency, len, precision)?;
    let lam_inv: Vec<Complex<T>> = lam.iter().map(|c| c.conj()).collect();

    // Psi = sum_K i^{K+1} a_K z^K (e^Phi)^K
    let e = exp_series(phi)?;
    let mut psi = vec![Complex::zero(prec); len];
    for (k, a) in polynomial.modes() {
        let k = *k as usize;
        if k >= len {
            continue;
        }
        let seed = Complex::i_pow(k as u32 + 1, prec).mul(a);
        let ek = pow_series(&e, k as u32);
        for n in k..len {
            psi[n].mul_add_assign(&seed, &ek[n - k]);
        }
    }

    // Phi(lambda^{-1} z) + Phi(lambda z) - 2 Phi(z)
    let two = T::from_i64_prec(2, prec);
    let rhs: Vec<Complex<T>> = phi
        .iter()
        .zip(&lam)
        .map(|(p, l)| {
            let mut f = l.re.clone();
            f *= &two;
            f -= &two;
            let mut c = p.clone();
            c.scale(&f);
            c
        })
        .collect();
    let (functional, functional_worst) = relative_gap(&psi, &rhs, upto);

    let phi_fwd = hadamard(phi, &lam);
    let phi_back = hadamard(phi, &lam_inv);

    // first component: h(z)^2 / h(lambda^{-1} z) prod e^{i a_k h^k} = h(lambda z), common factor i lambda z removed
    let mut arg1 = vec![Complex::zero(prec); len];
    let mut arg2 = vec![Complex::zero(prec); len];
    let mut rhs2 = vec![Complex::zero(prec); len];
    for n in 0..len {
        let mut a = phi[n].clone();
        a.mul_i64(2);
        a.sub_assign(&phi_back[n]);
        a.add_assign(&psi[n]);
        arg1[n] = a;
        let mut b = phi[n].clone();
        b.sub_assign(&phi_back[n]);
        b.add_assign(&psi[n]);
        arg2[n] = b;
        let mut c = phi_fwd[n].clone();
        c.sub_assign(&phi[n]);
        rhs2[n] = c;
    }
    let (first_component, _) = relative_gap(&exp_series(&arg1)?, &exp_series(&phi_fwd)?, upto);
    // second component: h_2(z) prod e^{i a_k h^k} = h_2(lambda z), common factor lambda removed
    let (second_component, _) = relative_gap(&exp_series(&arg2)?, &exp_series(&rhs2)?, upto);

    Ok(ResidualReport { upto: upto as u64, functional, functional_worst, first_component, second_component })
}

/// Residuals of a computed series up to `n_max` minus the largest mode.
pub fn residual_check<T: Real>(series: &LinearizationSeries<T>) -> Result<ResidualReport> {
    residual_from_coefficients(series.polynomial(), series.frequency(), series.phi_all(), series.precision())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::linearize;
    use crate::Mp;

    fn poly() -> TrigPolynomial<Mp> {
        TrigPolynomial::new(vec![
            (1, Complex::new(Mp::with_val(256, 0.5), Mp::with_val(256, 0.25))),
            (3, Complex::new(Mp::with_val(256, -1), Mp::with_val(256, 2))),
        ])
        .unwrap()
    }

    #[test]
    fn fresh_series_has_tiny_residual() {
        let s = linearize(&poly(), &Frequency::golden(), 80, Precision::new(256)).unwrap();
        let r = residual_check(&s).unwrap();
        assert!(r.max() < 2f64.powi(-128), "{r:?}");
        assert_eq!(r.upto, 77);
    }

    #[test]
    fn perturbation_is_detected() {
        let s = linearize(&poly(), &Frequency::golden(), 40, Precision::new(256)).unwrap();
        let mut phi = s.phi_all().to_vec();
        let mut bump = phi[7].clone();
        bump.scale(&Mp::with_val(256, 0.1));
        phi[7].add_assign(&bump);
        let r = residual_from_coefficients(s.polynomial(), s.frequency(), &phi, s.precision()).unwrap();
        assert!(r.functional > 1e-3);
        assert!(r.first_component > 1e-3 && r.second_component > 1e-3);
    }

    #[test]
    fn zero_series_on_zero_polynomial_part() {
        let phi = vec![Complex::<Mp>::zero(128); 5];
        let p = TrigPolynomial::new(vec![(10, Complex::new(Mp::with_val(128, 1), Mp::with_val(128, 0)))]).unwrap();
        let r = residual_from_coefficients(&p, &Frequency::golden(), &phi, Precision::new(128)).unwrap();
        assert_eq!(r.max(), 0.0);
    }
}
