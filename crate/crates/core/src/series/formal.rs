//! Truncated formal power series over [`Complex`]. Index `n` holds the `z^n` coefficient.

use crate::error::{Error, Result};
use crate::scalar::{Complex, Real};

/// `e^f` to the length of `f`, by `n g_n = sum_{k=1}^n k f_k g_{n-k}`.
pub fn exp_series<T: Real>(f: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
    if f.is_empty() {
        return Ok(Vec::new());
    }
    if !f[0].is_zero() {
        return Err(Error::NonzeroConstantTerm);
    }
    let prec = f[0].precision();
    let kf: Vec<Complex<T>> = f
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let mut c = c.clone();
            c.mul_i64(k as i64);
            c
        })
        .collect();
    let mut g = Vec::with_capacity(f.len());
    g.push(Complex::one(prec));
    for n in 1..f.len() {
        let mut acc = Complex::zero(prec);
        for k in 1..=n {
            if !kf[k].is_zero() {
                acc.mul_add_assign(&kf[k], &g[n - k]);
            }
        }
        acc.div_i64(n as i64);
        g.push(acc);
    }
    Ok(g)
}

/// Product truncated to `len` terms.
pub fn mul_series<T: Real>(a: &[Complex<T>], b: &[Complex<T>], len: usize) -> Vec<Complex<T>> {
    let prec = a.first().or(b.first()).map(|c| c.precision()).unwrap_or(53);
    let mut out = vec![Complex::zero(prec); len];
    for (i, ai) in a.iter().enumerate().take(len) {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate().take(len - i) {
            if !bj.is_zero() {
                out[i + j].mul_add_assign(ai, bj);
            }
        }
    }
    out
}

/// `a^k` truncated to the length of `a`, by binary powering.
pub fn pow_series<T: Real>(a: &[Complex<T>], mut k: u32) -> Vec<Complex<T>> {
    let len = a.len();
    let prec = a.first().map(|c| c.precision()).unwrap_or(53);
    let mut result = vec![Complex::zero(prec); len];
    if len > 0 {
        result[0] = Complex::one(prec);
    }
    let mut base = a.to_vec();
    while k > 0 {
        if k & 1 == 1 {
            result = mul_series(&result, &base, len);
        }
        k >>= 1;
        if k > 0 {
            base = mul_series(&base, &base, len);
        }
    }
    result
}

/// Coefficient-wise `f_n * w_n`.
pub fn hadamard<T: Real>(f: &[Complex<T>], w: &[Complex<T>]) -> Vec<Complex<T>> {
    f.iter().zip(w).map(|(a, b)| a.mul(b)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn exp_of_zero_is_one() {
        let g = exp_series(&vec![c(0.0, 0.0); 6]).unwrap();
        assert_eq!(g[0], c(1.0, 0.0));
        assert!(g[1..].iter().all(|x| x.is_zero()));
    }

    #[test]
    fn exp_of_linear_term() {
        let mut f = vec![c(0.0, 0.0); 10];
        f[1] = c(0.5, -1.5);
        let g = exp_series(&f).unwrap();
        let mut expect = c(1.0, 0.0);
        for (n, gn) in g.iter().enumerate() {
            if n > 0 {
                expect = expect.mul(&f[1]);
                expect.div_i64(n as i64);
            }
            assert!((gn.re - expect.re).abs() < 1e-14 && (gn.im - expect.im).abs() < 1e-14);
        }
    }

    #[test]
    fn nonzero_constant_rejected() {
        assert!(matches!(exp_series(&[c(1.0, 0.0)]), Err(Error::NonzeroConstantTerm)));
    }

    #[test]
    fn pow_matches_repeated_product() {
        let a: Vec<_> = (0..8).map(|k| c(k as f64 * 0.1, 1.0 / (k as f64 + 1.0))).collect();
        let p = pow_series(&a, 5);
        let mut q = vec![c(0.0, 0.0); 8];
        q[0] = c(1.0, 0.0);
        for _ in 0..5 {
            q = mul_series(&q, &a, 8);
        }
        for (x, y) in p.iter().zip(&q) {
            assert!((x.re - y.re).abs() < 1e-12 && (x.im - y.im).abs() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn exp_times_exp_neg_is_one(coeffs in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 30)) {
            let prec = 256;
            let mut f = vec![Complex::<rug::Float>::zero(prec)];
            for (re, im) in &coeffs {
                f.push(Complex::new(rug::Float::with_val(prec, *re), rug::Float::with_val(prec, *im)));
            }
            let neg: Vec<_> = f.iter().map(|x| Complex::new(-x.re.clone(), -x.im.clone())).collect();
            let prod = mul_series(&exp_series(&f).unwrap(), &exp_series(&neg).unwrap(), f.len());
            let tol = rug::Float::with_val(64, rug::Float::i_exp(1, -150));
            prop_assert!(rug::Float::with_val(prec, &prod[0].re - 1u32).abs() < tol);
            for x in &prod[1..] {
                prop_assert!(x.abs() < tol);
            }
        }
    }
}
