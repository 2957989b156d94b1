//! Finite-order estimates of the radius of convergence from `ln|phi_l|/l`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{Complex, Real};

use super::LinearizationSeries;

/// Nonzero coefficients required in the window.
pub const MIN_NONZERO: usize = 10;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RadiusEstimate {
    /// `-max ln|phi_l|/l` over the window.
    pub ln_rho: f64,
    /// `-mean ln|phi_l|/l` over the window.
    pub ln_rho_mean: f64,
    pub window: (u64, u64),
    /// `(l, ln|phi_l|/l)` for every nonzero coefficient in the window.
    pub curve: Vec<(u64, f64)>,
    /// Running maximum of the curve.
    pub running_max: Vec<f64>,
}

impl RadiusEstimate {
    pub fn rho(&self) -> f64 {
        self.ln_rho.exp()
    }

    pub fn rho_mean(&self) -> f64 {
        self.ln_rho_mean.exp()
    }
}

/// Estimate from raw coefficients indexed by order.
pub fn radius_from_coefficients<T: Real>(phi: &[Complex<T>], window: (u64, u64)) -> Result<RadiusEstimate> {
    let (lo, hi) = window;
    if lo == 0 || lo > hi || hi as usize >= phi.len() {
        return Err(Error::Config(format!("radius window [{lo}, {hi}] outside the computed range")));
    }
    let curve: Vec<(u64, f64)> = (lo..=hi)
        .filter(|&l| !phi[l as usize].is_zero())
        .map(|l| (l, phi[l as usize].ln_abs().to_f64() / l as f64))
        .collect();
    if curve.len() < MIN_NONZERO {
        return Err(Error::TooFewCoefficients { found: curve.len(), needed: MIN_NONZERO });
    }
    let mut running_max = Vec::with_capacity(curve.len());
    let mut best = f64::NEG_INFINITY;
    for &(_, v) in &curve {
        best = best.max(v);
        running_max.push(best);
    }
    let mean = curve.iter().map(|(_, v)| v).sum::<f64>() / curve.len() as f64;
    Ok(RadiusEstimate { ln_rho: -best, ln_rho_mean: -mean, window, curve, running_max })
}

/// Tail-max estimate `rho = exp(-max ln|phi_l|/l)` over `window`.
pub fn radius_estimate<T: Real>(series: &LinearizationSeries<T>, window: (u64, u64)) -> Result<RadiusEstimate> {
    radius_from_coefficients(series.phi_all(), window)
}

/// The default window: the upper half of the computed range.
pub fn default_window(n_max: u64, kappa0: u64) -> (u64, u64) {
    ((n_max / 2).max(kappa0).max(1), n_max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_coefficients() {
        let r: f64 = 0.37;
        let phi: Vec<Complex<f64>> =
            (0..=60).map(|l| if l == 0 { Complex::new(0.0, 0.0) } else { Complex::new(r.powi(-l), 0.0) }).collect();
        let est = radius_from_coefficients(&phi, (10, 60)).unwrap();
        assert!((est.rho() - r).abs() < 1e-12);
        assert!((est.rho_mean() - r).abs() < 1e-12);
    }

    #[test]
    fn too_sparse() {
        let mut phi = vec![Complex::new(0.0, 0.0); 40];
        for l in [5usize, 10, 15] {
            phi[l] = Complex::new(1.0, 0.0);
        }
        assert!(matches!(
            radius_from_coefficients(&phi, (1, 39)),
            Err(Error::TooFewCoefficients { found: 3, needed: 10 })
        ));
    }
}
