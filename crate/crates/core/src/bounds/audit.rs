//! Inequalities evaluated on computed coefficients: the coefficient lower bounds
//! under the argument condition, majorant domination, and the divisor sandwich.

use rug::float::Constant;
use rug::Float;
use serde::Serialize;

use crate::arith::{norm_dist, small_divisor, Frequency, Precision};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::series::{LinearizationSeries, MajorantSeries};

use super::constants::ConstantsBundle;
use super::davie::{davie_weight, DavieData};
use super::subsequence::{FastSubsequence, LowerBoundF};
use super::theorems::hypothesis_theta;
use super::{AuditRecord, AuditReport};

fn ln_fact(n: u64) -> f64 {
    (2..=n).map(|i| (i as f64).ln()).sum()
}

/// Audits, on every applicable index up to `n_max`:
/// - `coarse-lower`: `|phi_r| >= min(1, |a_min|/4)^{r/kappa_0}`;
/// - `power-lower:p=..`: `|phi_{pj}| >= (1/p) 4^{-p} |D_j phi_j|^p` for `j > kappa_0`;
/// - `large-divisor-lower`: the product bound at `d q_{n_{k+1}}` from the division chain;
/// - `f-lower`: `ln|D phi| / (d q) >= F / (d q) - C_prop` at `d q_{n_k}`.
///
/// All comparisons are in log form. Terms with `p_i = 0` contribute nothing to the
/// product bound.
pub fn coefficient_bound_audit<T: Real>(
    series: &LinearizationSeries<T>,
    subseq: Option<&FastSubsequence>,
    f: Option<&LowerBoundF>,
    constants: &ConstantsBundle,
) -> Result<AuditReport> {
    let poly = series.polynomial();
    hypothesis_theta(poly).map_err(Error::HypothesisViolated)?;
    let n = series.n_max();
    let k0 = poly.kappa0() as u64;
    let ln_min_ratio = (constants.ln_a_min - 4f64.ln()).min(0.0);
    let ln4 = 4f64.ln();
    let ln_phi = |l: u64| -> Option<f64> {
        let p = series.phi(l);
        (!p.is_zero()).then(|| p.ln_abs().to_f64())
    };
    let ln_d = |l: u64| series.divisors().divisor(l).abs().ln().to_f64();
    let mut report = AuditReport::default();

    for r in 1..=n {
        if let Some(lhs) = ln_phi(r) {
            report.records.push(AuditRecord::at_least("coarse-lower", r, lhs, r as f64 / k0 as f64 * ln_min_ratio));
        }
    }
    for j in k0 + 1..=n {
        let Some(base) = ln_phi(j).map(|v| v + ln_d(j)) else { continue };
        for p in 1..=n / j {
            let rhs = -(p as f64).ln() - p as f64 * ln4 + p as f64 * base;
            let lhs = ln_phi(p * j).unwrap_or(f64::NEG_INFINITY);
            report.records.push(AuditRecord::at_least(format!("power-lower:p={p}"), j, lhs, rhs));
        }
    }

    let (Some(s), Some(f)) = (subseq, f) else { return Ok(report) };
    let d = s.d;
    let at = |k: usize| s.q[k].to_u64().and_then(|q| q.checked_mul(d)).filter(|&l| l <= n);
    for k in 0..f.len().saturating_sub(1) {
        let Some(top) = at(k + 1) else { break };
        let Some(lhs) = ln_phi(top) else { continue };
        let mut rhs = -ln_d(top) + constants.ln_a_max - ln_fact(k as u64 + 2);
        let mut feasible = true;
        for (i, p) in f.quotients[k + 1].iter().enumerate() {
            if *p == 0 {
                continue;
            }
            let pf = p.to_f64();
            let l = at(i).expect("earlier subsequence indices are smaller");
            match ln_phi(l) {
                Some(lp) => rhs += pf * (ln_d(l) + lp - ln4) - pf.ln(),
                None => feasible = false,
            }
        }
        let r0 = f.remainders[k + 1].to_f64();
        rhs += r0 / k0 as f64 * ln_min_ratio;
        if !feasible {
            rhs = f64::NEG_INFINITY;
        }
        report.records.push(AuditRecord::at_least("large-divisor-lower", top, lhs, rhs));
    }
    for k in 0..f.len() {
        let Some(l) = at(k) else { break };
        let Some(lp) = ln_phi(l) else { continue };
        let lhs = (lp + ln_d(l)) / l as f64;
        let rhs = f.per_index(k) - constants.c_prop;
        report.records.push(AuditRecord::at_least("f-lower", l, lhs, rhs));
    }
    Ok(report)
}

/// `ln|phi_j| <= ln sigma_j + g(j)` for every nonzero `phi_j`, `j` up to the common range.
pub fn upper_bound_audit<T: Real, U: Real>(
    series: &LinearizationSeries<T>,
    majorant: &MajorantSeries<U>,
    davie: &DavieData,
) -> AuditReport {
    let poly = series.polynomial();
    let ln_a_max = poly.coefficient(poly.kappa_max()).map_or(0.0, |a| a.ln_abs().to_f64());
    let weight = davie_weight(davie, ln_a_max);
    let n = series.n_max().min(majorant.n_max()).min(davie.n);
    let mut report = AuditReport::default();
    for j in 1..=n {
        let p = series.phi(j);
        if p.is_zero() {
            continue;
        }
        let sigma = majorant.sigma(j);
        let rhs = if sigma.is_zero() { f64::NEG_INFINITY } else { sigma.ln().to_f64() + weight[j as usize] };
        report.records.push(AuditRecord::at_most("majorant-domination", j, p.ln_abs().to_f64(), rhs));
    }
    report
}

/// The sandwich `c_lo ||l alpha|| <= |D_l|^{1/2} <= c_hi ||l alpha||` for `l <= l_max` and the
/// convergent interval for `|D_{d q_k}|^{1/2}` (`k >= 1`, `q_{k+1} <= q_limit`), once with the
/// literal constants (`1, 3` and `1/2, 3`) and once with the sharp ones (`4, 2 pi` and `2, 2 pi`).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DivisorAudit {
    pub literal: AuditReport,
    pub corrected: AuditReport,
}

fn push_pair(report: &mut AuditReport, name: &str, index: u64, value: &Float, lo: &Float, hi: &Float) {
    let v = value.to_f64();
    report.records.push(AuditRecord::decided(
        format!("{name}-lower"),
        index,
        v,
        lo.to_f64(),
        Float::with_val(64, value - lo).to_f64(),
        value >= lo,
    ));
    report.records.push(AuditRecord::decided(
        format!("{name}-upper"),
        index,
        v,
        hi.to_f64(),
        Float::with_val(64, hi - value).to_f64(),
        value <= hi,
    ));
}

pub fn divisor_audit(freq: &Frequency, d: u64, l_max: u64, q_limit: u64, prec: Precision) -> Result<DivisorAudit> {
    let bits = prec.bits;
    let two_pi = Float::with_val(bits, Constant::Pi) * 2u32;
    let mut literal = AuditReport::default();
    let mut corrected = AuditReport::default();
    let sqrt_abs = |l: u64| -> Result<Float> { Ok(small_divisor(l, freq, prec)?.abs().sqrt()) };
    for l in 1..=l_max {
        let x = norm_dist(l, freq, prec)?;
        let s = sqrt_abs(l)?;
        push_pair(&mut literal, "sandwich", l, &s, &x, &Float::with_val(bits, &x * 3u32));
        push_pair(&mut corrected, "sandwich", l, &s, &Float::with_val(bits, &x * 4u32), &Float::with_val(bits, &x * &two_pi));
    }
    let scaled = freq.scaled(d)?;
    let mut depth = 16;
    let cf = loop {
        let cf = scaled.expand(depth)?;
        if cf.q()[cf.q().len() - 1] > q_limit {
            break cf;
        }
        depth *= 2;
    };
    let q = cf.q();
    for k in 1..q.len() - 1 {
        if q[k + 1] > q_limit {
            break;
        }
        let qk = q[k].to_u64().expect("bounded by q_limit");
        let qn = Float::with_val(bits, &q[k + 1]);
        let s = sqrt_abs(d * qk)?;
        let inv = |c: f64| Float::with_val(bits, c) / &qn;
        push_pair(&mut literal, "convergent", k as u64, &s, &inv(0.5), &inv(3.0));
        push_pair(&mut corrected, "convergent", k as u64, &s, &inv(2.0), &Float::with_val(bits, &two_pi / &qn));
    }
    Ok(DivisorAudit { literal, corrected })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_upper_constant_fails_and_sharp_one_holds() {
        let a = divisor_audit(&Frequency::golden(), 1, 50, 1000, Precision::new(128)).unwrap();
        assert!(a.corrected.passed());
        let (pass, total) = a.literal.count("sandwich-upper");
        assert_eq!(pass, 0);
        assert_eq!(total, 50);
        assert_eq!(a.literal.count("sandwich-lower").0, 50);
    }
}
