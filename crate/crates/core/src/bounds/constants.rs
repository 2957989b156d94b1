//! The named constants entering the two radius bounds.

use serde::Serialize;

use crate::scalar::Real;
use crate::semigroup::NumericalSemigroup;
use crate::series::TrigPolynomial;

use super::brjuno::fibonacci_constants;
use super::subsequence::{c2, c2_prime};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstantsBundle {
    #[serde(rename = "C0")]
    pub c0: f64,
    #[serde(rename = "C1")]
    pub c1: f64,
    pub zeta: f64,
    pub eta: f64,
    #[serde(rename = "C2")]
    pub c2: f64,
    #[serde(rename = "C2_prime")]
    pub c2_prime: f64,
    #[serde(rename = "C4")]
    pub c4: f64,
    /// `|ln min(1, |a_min|/4)|`.
    pub c_tilde: f64,
    #[serde(rename = "C_prop")]
    pub c_prop: f64,
    #[serde(rename = "C_M")]
    pub c_m: f64,
    /// `ln|a_max|^+ + C0`; the unspecified `r` of the statement is left out.
    #[serde(rename = "C_lower_stmt")]
    pub c_lower_stmt: f64,
    /// `ln|a_max|^+ + 16 C1/d + 36 + max(0, -ln R)`.
    #[serde(rename = "C_lower_proof")]
    pub c_lower_proof: f64,
    /// `ln R` of the divisor-free majorant.
    pub ln_majorant_radius: f64,
    pub d: u64,
    pub n_m: u64,
    pub kappa_0: u64,
    pub kappa_max: u64,
    pub ln_a_max: f64,
    pub ln_a_min: f64,
}

pub fn constants_bundle<T: Real>(
    polynomial: &TrigPolynomial<T>,
    semigroup: &NumericalSemigroup,
    ln_majorant_radius: f64,
) -> ConstantsBundle {
    let fib = fibonacci_constants();
    let (c0, c1) = (fib.c0, fib.c1);
    let d = semigroup.d();
    let df = d as f64;
    let kappa_max = polynomial.kappa_max();
    let kf = kappa_max as f64;
    let ln_a_max = polynomial.coefficient(kappa_max).map_or(0.0, |a| a.ln_abs().to_f64());
    let ln_a_min = polynomial.coefficient(polynomial.kappa_min()).map_or(0.0, |a| a.ln_abs().to_f64());
    let zeta = kf / df + 3.0 * kf + 2.0;
    let eta = (kf / df + 2.0 * kf) * (kf + 1.0);
    let c2 = c2(zeta, eta);
    let c2_prime = c2_prime();
    let ln2 = std::f64::consts::LN_2;
    let c4 = 2.0 * c2 + 4.0 * c1 + 4.0 * ln2 * c0;
    let c_tilde = (ln_a_min - 4f64.ln()).min(0.0).abs();
    let n_m = semigroup.n_m();
    let c_prop =
        c_tilde + (2.0 + 9.0 * 4f64.ln()) / (1.0 + n_m as f64) + c1 + (c_tilde + ln_a_max.abs() / df) * c0;
    let c_m = c4 / df + c_prop;
    let delta = ln_a_max.max(0.0);
    let c_lower_stmt = delta + c0;
    let c_lower_proof = delta + 16.0 * c1 / df + 36.0 + (-ln_majorant_radius).max(0.0);
    ConstantsBundle {
        c0,
        c1,
        zeta,
        eta,
        c2,
        c2_prime,
        c4,
        c_tilde,
        c_prop,
        c_m,
        c_lower_stmt,
        c_lower_proof,
        ln_majorant_radius,
        d,
        n_m,
        kappa_0: polynomial.kappa0() as u64,
        kappa_max: kappa_max as u64,
        ln_a_max,
        ln_a_min,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Complex;

    #[test]
    fn semi_standard_identities() {
        let p = TrigPolynomial::new(vec![(1, Complex::new(0.0f64, 1.0))]).unwrap();
        let sg = NumericalSemigroup::build(&[1]).unwrap();
        let c = constants_bundle(&p, &sg, -1.0);
        assert_eq!(c.zeta, 6.0);
        assert_eq!(c.eta, 6.0);
        assert_eq!(c.c2, 2.0 * c.c1 + c.c0 * (3f64.ln() + 13f64.ln()));
        assert_eq!(c.c4, 2.0 * c.c2 + 4.0 * c.c1 + 4.0 * 2f64.ln() * c.c0);
        // |a| = 1: C~ = ln 4
        assert!((c.c_tilde - 4f64.ln()).abs() < 1e-15);
        assert_eq!(c.c_m, c.c4 + c.c_prop);
        assert_eq!(c.c_lower_proof, 16.0 * c.c1 + 36.0 + 1.0);
        assert_eq!(c.c_lower_stmt, c.c0);
        for v in [c.c0, c.c1, c.c2, c.c2_prime, c.c4, c.c_prop, c.c_m, c.c_lower_stmt, c.c_lower_proof] {
            assert!(v >= 0.0);
        }
    }
}
