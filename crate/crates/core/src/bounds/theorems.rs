//! The two radius bounds `exp(-(2/d) B(d alpha) - C')` and `exp(-(2/d) B(d alpha) + C_M)`.

use serde::Serialize;

use crate::scalar::Real;
use crate::series::TrigPolynomial;

use super::brjuno::BrjunoSum;
use super::constants::ConstantsBundle;

/// A phase `theta` with `arg a_k = k theta + pi/2` for every mode, within
/// `2^-(bits/2)` radians, or the first mode that admits none.
pub fn hypothesis_theta<T: Real>(polynomial: &TrigPolynomial<T>) -> Result<T, u32> {
    let prec = polynomial.modes()[0].1.precision();
    let tol = T::from_mp(&rug::Float::with_val(prec.max(2), rug::Float::i_exp(1, -((prec / 2) as i32))));
    polynomial.phase(&tol)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TheoremBounds {
    #[serde(rename = "B_partial")]
    pub b_partial: f64,
    #[serde(rename = "B_tail")]
    pub b_tail: Option<f64>,
    pub ln_lower: f64,
    pub lower: f64,
    /// The lower bound uses `B_partial + B_tail`; without a tail bound it is not certified.
    pub lower_certified: bool,
    /// Present only when the argument condition holds.
    pub ln_upper: Option<f64>,
    pub upper: Option<f64>,
    pub theta: Option<f64>,
    pub violated_mode: Option<u32>,
    pub constants: ConstantsBundle,
}

pub fn theorem_bounds<T: Real>(
    polynomial: &TrigPolynomial<T>,
    brjuno: &BrjunoSum,
    constants: &ConstantsBundle,
) -> TheoremBounds {
    let d = constants.d as f64;
    let b_upper = brjuno.upper().unwrap_or(brjuno.partial);
    let ln_lower = -2.0 / d * b_upper - constants.c_lower_proof;
    let phase = hypothesis_theta(polynomial);
    // B >= B_partial, so the partial sum gives a valid (weaker) upper bound
    let ln_upper = phase.is_ok().then(|| -2.0 / d * brjuno.partial + constants.c_m);
    TheoremBounds {
        b_partial: brjuno.partial,
        b_tail: brjuno.tail_bound,
        ln_lower,
        lower: ln_lower.exp(),
        lower_certified: brjuno.tail_bound.is_some(),
        ln_upper,
        upper: ln_upper.map(f64::exp),
        theta: phase.as_ref().ok().map(|t| t.to_f64()),
        violated_mode: phase.err(),
        constants: constants.clone(),
    }
}
