//! The subsequence of fast-growing denominators of `d alpha`, the divisor sum along
//! it, and the lower-bound function `F` built from euclidean division chains.

use rug::{Float, Integer};
use serde::Serialize;

use crate::arith::{small_divisor_big, ContinuedFraction, Frequency, Precision};
use crate::error::{Error, Result};
use crate::semigroup::NumericalSemigroup;

use super::brjuno::{fibonacci_constants, BrjunoSum};
use super::{div_int, ln_int, AuditRecord, AuditReport};

const F_BITS: u32 = 128;

/// Indices `n_0 < n_1 < ...` into the convergents of `d alpha`. `n_0` is the first
/// index with `q >= max(N_M + 2, 1 + kappa_max (2 + 1/d))`; every later index `n`
/// with `q_{n+1} >= q_n^2 + zeta q_n + eta` follows.
#[derive(Clone, Debug, PartialEq)]
pub struct FastSubsequence {
    pub indices: Vec<usize>,
    /// `q_{n_k}`.
    pub q: Vec<Integer>,
    /// `q_{n_k + 1}`.
    pub q_next: Vec<Integer>,
    pub zeta: f64,
    pub eta: f64,
    pub n_m: u64,
    pub kappa_max: u64,
    pub d: u64,
    /// Whether `n_0` itself satisfies the growth condition.
    pub start_is_fast: bool,
    /// Last convergent index scanned.
    pub scanned: usize,
    start_prev: Integer,
}

/// `d q' >= d q^2 + (kappa + 3 kappa d + 2d) q + (kappa + 2 kappa d)(kappa + 1)`, i.e.
/// `q' >= q^2 + zeta q + eta` cleared of the denominator `d`.
fn grows_fast(q: &Integer, q_next: &Integer, kappa: u64, d: u64) -> bool {
    let lhs = Integer::from(q_next * d);
    let mut rhs = Integer::from(q * q) * d;
    rhs += Integer::from(q * (kappa + 3 * kappa * d + 2 * d));
    rhs += Integer::from(kappa + 2 * kappa * d) * (kappa + 1);
    lhs >= rhs
}

/// `q >= max(N_M + 2, 1 + kappa (2 + 1/d))`.
fn above_start(q: &Integer, n_m: u64, kappa: u64, d: u64) -> bool {
    *q >= n_m + 2 && Integer::from(q * d) >= d + 2 * kappa * d + kappa
}

pub fn fast_subsequence(cf: &ContinuedFraction, sg: &NumericalSemigroup, kappa_max: u64) -> Result<FastSubsequence> {
    let (n_m, d) = (sg.n_m(), sg.d());
    let q = cf.q();
    let last = q.len().saturating_sub(1);
    let start = (0..last).find(|&n| above_start(&q[n], n_m, kappa_max, d)).ok_or(Error::NoQualifyingStart(last))?;
    let kf = kappa_max as f64;
    let df = d as f64;
    let mut out = FastSubsequence {
        indices: vec![start],
        q: vec![q[start].clone()],
        q_next: vec![q[start + 1].clone()],
        zeta: kf / df + 3.0 * kf + 2.0,
        eta: (kf / df + 2.0 * kf) * (kf + 1.0),
        n_m,
        kappa_max,
        d,
        start_is_fast: grows_fast(&q[start], &q[start + 1], kappa_max, d),
        scanned: last,
        start_prev: if start == 0 { Integer::new() } else { q[start - 1].clone() },
    };
    for n in start + 1..last {
        if grows_fast(&q[n], &q[n + 1], kappa_max, d) {
            out.indices.push(n);
            out.q.push(q[n].clone());
            out.q_next.push(q[n + 1].clone());
        }
    }
    Ok(out)
}

impl FastSubsequence {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// `max(N_M + 2, kappa_max)`, the base of the double-exponential growth.
    pub fn growth_base(&self) -> u64 {
        (self.n_m + 2).max(self.kappa_max)
    }

    /// Start condition, growth condition on `n_1, n_2, ...`,
    /// `q_{n_k} >= base^{2^k}` and `sum 1/q_{n_k} <= 1/(base - 1)`.
    pub fn audit(&self) -> AuditReport {
        let mut report = AuditReport::default();
        let start_ok = above_start(&self.q[0], self.n_m, self.kappa_max, self.d)
            && !above_start(&self.start_prev, self.n_m, self.kappa_max, self.d);
        let threshold = ((self.n_m + 2) as f64).max(1.0 + self.kappa_max as f64 * (2.0 + 1.0 / self.d as f64));
        report.records.push(AuditRecord::decided(
            "subsequence-start",
            self.indices[0] as u64,
            self.q[0].to_f64(),
            threshold,
            self.q[0].to_f64() - threshold,
            start_ok,
        ));
        for k in 1..self.len() {
            let ok = grows_fast(&self.q[k], &self.q_next[k], self.kappa_max, self.d);
            let rhs = self.q[k].to_f64().powi(2) + self.zeta * self.q[k].to_f64() + self.eta;
            report.records.push(AuditRecord::decided(
                "subsequence-growth",
                self.indices[k] as u64,
                ln_int(&self.q_next[k]),
                rhs.ln(),
                ln_int(&self.q_next[k]) - rhs.ln(),
                ok,
            ));
        }
        let base = self.growth_base();
        for k in 0..self.len() {
            let lhs = ln_int(&self.q[k]);
            let rhs = 2f64.powi(k as i32) * (base as f64).ln();
            // exact when the power is of manageable size
            let pass = if k < 24 { self.q[k] >= Integer::from(Integer::u_pow_u(base as u32, 1u32 << k)) } else { lhs >= rhs };
            report.records.push(AuditRecord::decided("double-exponential", k as u64, lhs, rhs, lhs - rhs, pass));
        }
        let sum: f64 = self.q.iter().map(|q| div_int(1.0, q)).sum();
        let bound = 1.0 / (base as f64 - 1.0);
        report.records.push(AuditRecord::at_most("subsequence-sum", self.len() as u64, sum, bound));
        report
    }
}

/// `|ln|D_{dq}||` at a convergent denominator `q` of `d alpha`; the guard is sized
/// from `q_next` since `||d q alpha|| >= 1/(2 q_next)`.
fn ln_divisor_at(freq: &Frequency, d: u64, q: &Integer, q_next: &Integer) -> Result<f64> {
    let l = Integer::from(q * d);
    let guard = q_next.significant_bits() + 16;
    let dv = small_divisor_big(&l, freq, Precision::with_guard(64, guard))?;
    Ok(dv.abs().ln().to_f64().abs())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Bracket {
    /// `sum_l |ln|D_{d q_{n_l}}|| / (2 q_{n_l})`.
    pub sum: f64,
    pub terms: Vec<f64>,
    /// `B - C2` and `B + C2'`, with `B` the partial Brjuno sum.
    pub lower: f64,
    pub upper: f64,
    pub c2: f64,
    pub c2_prime: f64,
    pub pass: bool,
}

/// `C2 = 2 C1 + C0 (ln 3 + ln(zeta + eta + 1))`.
pub(crate) fn c2(zeta: f64, eta: f64) -> f64 {
    let fib = fibonacci_constants();
    2.0 * fib.c1 + fib.c0 * (3f64.ln() + (zeta + eta + 1.0).ln())
}

/// `C2' = C0 ln 2`.
pub(crate) fn c2_prime() -> f64 {
    fibonacci_constants().c0 * std::f64::consts::LN_2
}

/// Evaluates the divisor sum along the subsequence and compares it with
/// `[B - C2, B + C2']` for the partial Brjuno sum of `d alpha`.
pub fn divisor_sum_bracket(freq: &Frequency, subseq: &FastSubsequence, brjuno: &BrjunoSum) -> Result<Bracket> {
    if subseq.is_empty() {
        return Err(Error::EmptySubsequence);
    }
    let mut terms = Vec::with_capacity(subseq.len());
    for (q, qn) in subseq.q.iter().zip(&subseq.q_next) {
        terms.push(div_int(ln_divisor_at(freq, subseq.d, q, qn)? / 2.0, q));
    }
    let sum = terms.iter().sum();
    let (c2, c2_prime) = (c2(subseq.zeta, subseq.eta), c2_prime());
    let lower = brjuno.partial - c2;
    let upper = brjuno.partial + c2_prime;
    Ok(Bracket { sum, terms, lower, upper, c2, c2_prime, pass: lower <= sum && sum <= upper })
}

/// `F(q_{n_0}) = 0` and `F(q_{n_k}) = sum_{i<k} p_i^k (|ln|D_{d q_{n_i}}|| + F(q_{n_i}))`,
/// where `d q_{n_k} - kappa_max` is divided successively by `d q_{n_{k-1}}, ..., d q_{n_0}`
/// leaving the remainder `r_0^k < d q_{n_0}`.
#[derive(Clone, Debug, PartialEq)]
pub struct LowerBoundF {
    pub values: Vec<Float>,
    /// `|ln|D_{d q_{n_k}}||`.
    pub ln_divisors: Vec<f64>,
    /// `quotients[k][i] = p_i^k` for `i < k`.
    pub quotients: Vec<Vec<Integer>>,
    pub remainders: Vec<Integer>,
    d: u64,
    kappa_max: u64,
    q: Vec<Integer>,
}

pub fn lower_bound_f(subseq: &FastSubsequence, freq: &Frequency) -> Result<LowerBoundF> {
    if subseq.is_empty() {
        return Err(Error::EmptySubsequence);
    }
    let d = subseq.d;
    let kappa = subseq.kappa_max;
    let mut ln_divisors = Vec::with_capacity(subseq.len());
    for (q, qn) in subseq.q.iter().zip(&subseq.q_next) {
        ln_divisors.push(ln_divisor_at(freq, d, q, qn)?);
    }
    let mut values: Vec<Float> = Vec::with_capacity(subseq.len());
    let mut quotients = Vec::with_capacity(subseq.len());
    let mut remainders = Vec::with_capacity(subseq.len());
    for k in 0..subseq.len() {
        let mut rest = Integer::from(&subseq.q[k] * d) - kappa;
        let mut p = vec![Integer::new(); k];
        let mut f = Float::with_val(F_BITS, 0);
        for i in (0..k).rev() {
            let (quot, r) = rest.div_rem_floor(Integer::from(&subseq.q[i] * d));
            let mut term = Float::with_val(F_BITS, &values[i]);
            term += ln_divisors[i];
            term *= &quot;
            f += term;
            p[i] = quot;
            rest = r;
        }
        values.push(f);
        quotients.push(p);
        remainders.push(rest);
    }
    Ok(LowerBoundF { values, ln_divisors, quotients, remainders, d, kappa_max: kappa, q: subseq.q.clone() })
}

impl LowerBoundF {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `F(q_{n_k}) / (d q_{n_k})`.
    pub fn per_index(&self, k: usize) -> f64 {
        let den = Float::with_val(F_BITS, Integer::from(&self.q[k] * self.d));
        (Float::with_val(F_BITS, &self.values[k]) / den).to_f64()
    }

    /// `F(q_{n_k}) / (q_{n_k} + kappa_max/d)`.
    pub fn normalized(&self, k: usize) -> f64 {
        let mut den = Float::with_val(F_BITS, &self.q[k]);
        den += Float::with_val(F_BITS, self.kappa_max) / self.d;
        (Float::with_val(F_BITS, &self.values[k]) / den).to_f64()
    }

    /// Division identity `sum_i p_i^k d q_{n_i} + r_0^k = d q_{n_k} - kappa_max` with
    /// `0 <= r_0^k < d q_{n_0}`, and the cap `p_i^k q_{n_i} <= q_{n_{i+1}}`, exactly.
    pub fn division_audit(&self) -> AuditReport {
        let mut report = AuditReport::default();
        let d = self.d;
        for k in 0..self.len() {
            let mut total = self.remainders[k].clone();
            for (i, p) in self.quotients[k].iter().enumerate() {
                total += Integer::from(p * &self.q[i]) * d;
            }
            let target = Integer::from(&self.q[k] * d) - self.kappa_max;
            let r = &self.remainders[k];
            let ok = total == target && *r >= 0 && *r < Integer::from(&self.q[0] * d);
            let gap = Integer::from(&total - &target).to_f64();
            report.records.push(AuditRecord::decided("reconstruction", k as u64, total.to_f64(), target.to_f64(), -gap.abs(), ok));
            for (i, p) in self.quotients[k].iter().enumerate() {
                let lhs = Integer::from(p * &self.q[i]);
                let ok = lhs <= self.q[i + 1];
                let margin = Integer::from(&self.q[i + 1] - &lhs).to_f64();
                report.records.push(AuditRecord::decided(
                    format!("quotient-cap:k={k}"),
                    i as u64,
                    p.to_f64(),
                    div_int(self.q[i + 1].to_f64(), &self.q[i]),
                    margin,
                    ok,
                ));
            }
        }
        report
    }

    /// Running maximum of `F/(q + kappa_max/d)` against `2B - C4`. The claim concerns a
    /// limit superior, so this is a finite-depth trend check, not a proof.
    pub fn trend(&self, two_b_minus_c4: f64) -> Vec<AuditRecord> {
        let mut best = f64::NEG_INFINITY;
        (0..self.len())
            .map(|k| {
                best = best.max(self.normalized(k));
                AuditRecord::at_least("f-trend", k as u64, best, two_b_minus_c4)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn semi_standard() -> NumericalSemigroup {
        NumericalSemigroup::build(&[1]).unwrap()
    }

    #[test]
    fn golden_has_no_fast_index_past_start() {
        let cf = Frequency::golden().expand(60).unwrap();
        let s = fast_subsequence(&cf, &semi_standard(), 1).unwrap();
        assert_eq!(s.len(), 1);
        // threshold max(3, 4) = 4 reached first by q = 5
        assert_eq!(s.q[0], 5);
        assert!(!s.start_is_fast);
        assert!(s.audit().passed());
    }

    #[test]
    fn doubling_rule_is_not_fast() {
        // q_{k+1} = q_k^2 + q_{k-1} falls short of q_k^2 + 6 q_k + 6
        let cf = Frequency::doubling(0).expand(8).unwrap();
        let s = fast_subsequence(&cf, &semi_standard(), 1).unwrap();
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn offset_rule_is_fast_everywhere() {
        let cf = Frequency::doubling(12).expand(8).unwrap();
        let s = fast_subsequence(&cf, &semi_standard(), 1).unwrap();
        assert_eq!(s.indices, vec![1, 2, 3, 4, 5, 6]);
        assert_eq!(s.q[0], 13);
        assert_eq!(s.q[1], 326);
        assert!(s.audit().passed(), "{:?}", s.audit().failures().collect::<Vec<_>>());
    }

    #[test]
    fn no_start_within_depth() {
        let cf = Frequency::golden().expand(3).unwrap();
        assert!(matches!(fast_subsequence(&cf, &semi_standard(), 1), Err(Error::NoQualifyingStart(_))));
    }

    #[test]
    fn f_chain_on_offset_rule() {
        let freq = Frequency::doubling(12);
        let cf = freq.expand(8).unwrap();
        let s = fast_subsequence(&cf, &semi_standard(), 1).unwrap();
        let f = lower_bound_f(&s, &freq).unwrap();
        assert!(f.values[0].is_zero());
        // 326 - 1 = 25 * 13 + 0
        assert_eq!(f.quotients[1], vec![Integer::from(25)]);
        assert_eq!(f.remainders[1], 0);
        assert!(f.division_audit().passed());
        for k in 1..f.len() {
            assert!(f.values[k] > 0);
        }
    }

    #[test]
    fn single_term_bracket() {
        let freq = Frequency::golden();
        let cf = freq.expand(60).unwrap();
        let s = fast_subsequence(&cf, &semi_standard(), 1).unwrap();
        let b = super::super::brjuno_sum(&cf, 50).unwrap();
        let br = divisor_sum_bracket(&freq, &s, &b).unwrap();
        // direct: D_5 = -4 sin^2(5 pi alpha)
        let alpha = freq.value(128).unwrap().to_f64();
        let direct = (4.0 * (5.0 * std::f64::consts::PI * alpha).sin().powi(2)).ln().abs() / 10.0;
        assert!((br.sum - direct).abs() < 1e-12);
        assert!(br.pass);
    }
}
