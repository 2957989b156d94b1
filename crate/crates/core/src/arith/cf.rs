//! Continued fractions, convergents and the homographic stream used to scale
//! growth-rule frequencies by an integer.

use rug::{Float, Integer};

use super::surd::{floor_div, QuadraticSurd};
use crate::error::{Error, Result};

/// Guard bits used by [`ContinuedFraction::real_value`] when the tail is unknown.
pub const REAL_VALUE_GUARD: u32 = 16;

/// What is known about the quotients past the stored depth.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tail {
    /// The stored quotients are the whole expansion.
    Terminated,
    /// Quotients `start..start+len` repeat forever.
    Periodic { start: usize, len: usize },
    /// Nothing is known past the stored depth.
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContinuedFraction {
    quotients: Vec<Integer>,
    p: Vec<Integer>,
    q: Vec<Integer>,
    tail: Tail,
}

/// Convergents of `[a_0; a_1, ...]` with seeds `p_{-1} = 1`, `q_{-1} = 0`.
pub fn convergents(quotients: &[Integer]) -> (Vec<Integer>, Vec<Integer>) {
    let mut p = Vec::with_capacity(quotients.len());
    let mut q = Vec::with_capacity(quotients.len());
    let (mut p1, mut q1) = (Integer::from(1), Integer::from(0));
    let (mut p2, mut q2) = (Integer::from(0), Integer::from(1));
    for a in quotients {
        let pn = Integer::from(a * &p1) + &p2;
        let qn = Integer::from(a * &q1) + &q2;
        p2 = std::mem::replace(&mut p1, pn.clone());
        q2 = std::mem::replace(&mut q1, qn.clone());
        p.push(pn);
        q.push(qn);
    }
    (p, q)
}

impl ContinuedFraction {
    /// Builds a CF from explicit quotients. `a_j >= 1` is required for `j >= 1`.
    pub fn from_quotients(quotients: Vec<Integer>, tail: Tail) -> Result<Self> {
        if quotients.is_empty() {
            return Err(Error::InvalidFrequency("empty quotient list".into()));
        }
        if let Some(bad) = quotients.iter().skip(1).position(|a| *a < 1) {
            return Err(Error::InvalidFrequency(format!(
                "partial quotient a_{} must be positive",
                bad + 1
            )));
        }
        if let Tail::Periodic { start, len } = tail {
            if len == 0 || start + len > quotients.len() {
                return Err(Error::InvalidFrequency("period outside stored quotients".into()));
            }
            if quotients[start] < 1 {
                return Err(Error::InvalidFrequency("periodic block must have positive quotients".into()));
            }
        }
        let (p, q) = convergents(&quotients);
        Ok(ContinuedFraction { quotients, p, q, tail })
    }

    pub fn quotients(&self) -> &[Integer] {
        &self.quotients
    }
    pub fn p(&self) -> &[Integer] {
        &self.p
    }
    pub fn q(&self) -> &[Integer] {
        &self.q
    }
    pub fn depth(&self) -> usize {
        self.quotients.len()
    }
    pub fn tail(&self) -> Tail {
        self.tail
    }
    pub fn is_terminated(&self) -> bool {
        self.tail == Tail::Terminated
    }

    /// Largest stored partial quotient past `a_0`, if any.
    pub fn max_quotient(&self) -> Option<&Integer> {
        self.quotients.iter().skip(1).max()
    }

    /// Exact quadratic surd for a CF with a known periodic tail.
    pub fn to_surd(&self) -> Option<QuadraticSurd> {
        match self.tail {
            Tail::Periodic { start, len } => {
                cf_to_surd(&self.quotients[..start], &self.quotients[start..start + len]).ok()
            }
            _ => None,
        }
    }

    /// Value of the CF to `prec` bits.
    ///
    /// Terminated and periodic expansions are evaluated exactly; otherwise the
    /// last convergent is used and its error `1/(q_{n-1} q_n)` must lie below
    /// `2^-(prec + REAL_VALUE_GUARD)`.
    pub fn real_value(&self, prec: u32) -> Result<Float> {
        let n = self.depth() - 1;
        match self.tail {
            Tail::Terminated => {
                let mut v = Float::with_val(prec, &self.p[n]);
                v /= &self.q[n];
                Ok(v)
            }
            Tail::Periodic { .. } => {
                let s = self.to_surd().ok_or_else(|| Error::InvalidFrequency("periodic block".into()))?;
                Ok(s.value(prec))
            }
            Tail::Unknown => {
                let needed = prec + REAL_VALUE_GUARD;
                let achieved = if n == 0 {
                    0
                } else {
                    let prod = Integer::from(&self.q[n - 1] * &self.q[n]);
                    prod.significant_bits() - 1
                };
                if achieved < needed {
                    return Err(Error::InsufficientDepth { depth: self.depth(), needed, achieved });
                }
                let mut v = Float::with_val(needed, &self.p[n]);
                v /= &self.q[n];
                Ok(Float::with_val(prec, v))
            }
        }
    }

    /// CSV dump with columns `k,a_k,p_k,q_k`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,a_k,p_k,q_k\n");
        for k in 0..self.depth() {
            out.push_str(&format!("{},{},{},{}\n", k, self.quotients[k], self.p[k], self.q[k]));
        }
        out
    }
}

/// Surd value of `[prefix; (period)]`. The period must be non-empty with positive quotients.
pub fn cf_to_surd(prefix: &[Integer], period: &[Integer]) -> Result<QuadraticSurd> {
    if period.is_empty() || period.iter().any(|b| *b < 1) {
        return Err(Error::InvalidFrequency("period must be non-empty and positive".into()));
    }
    // y = [b_1; ..., b_m, y]  =>  k_m y^2 + (k_{m-1} - h_m) y - h_{m-1} = 0
    let (h, k) = convergents(period);
    let m = period.len() - 1;
    let (hm, km) = (&h[m], &k[m]);
    let (hm1, km1) = if m == 0 { (Integer::from(1), Integer::from(0)) } else { (h[m - 1].clone(), k[m - 1].clone()) };
    let b = Integer::from(hm - &km1);
    let disc = Integer::from(&b * &b) + Integer::from(4) * Integer::from(km * &hm1);
    let y = QuadraticSurd::new(b, 1, disc, Integer::from(km * 2))?;
    if prefix.is_empty() {
        return Ok(y);
    }
    let (pp, qq) = convergents(prefix);
    let r = prefix.len() - 1;
    let (pr1, qr1) = if r == 0 { (Integer::from(1), Integer::from(0)) } else { (pp[r - 1].clone(), qq[r - 1].clone()) };
    y.mobius(&pp[r], &pr1, &qq[r], &qr1)
}

/// Quotients of `[0; q_0 + c, q_1 + c, ...]`: each new quotient is the previous
/// denominator plus `offset`.
#[derive(Clone, Debug)]
pub struct DoublingRule {
    offset: Integer,
    q1: Integer,
    q2: Integer,
    started: bool,
}

impl DoublingRule {
    pub fn new(offset: Integer) -> Self {
        DoublingRule { offset, q1: Integer::from(1), q2: Integer::from(0), started: false }
    }
}

impl Iterator for DoublingRule {
    type Item = Integer;
    fn next(&mut self) -> Option<Integer> {
        if !self.started {
            // a_0 = 0, q_0 = 1
            self.started = true;
            return Some(Integer::new());
        }
        let a = Integer::from(&self.q1 + &self.offset);
        let qn = Integer::from(&a * &self.q1) + &self.q2;
        self.q2 = std::mem::replace(&mut self.q1, qn);
        Some(a)
    }
}

/// Quotients of `k * x` from the (infinite, irrational) quotients of `x`,
/// by Gosper's homographic algorithm.
pub fn scale_quotients<I: Iterator<Item = Integer>>(input: I, k: &Integer, depth: usize) -> Result<Vec<Integer>> {
    // z = (a x + b) / (c x + e)
    let (mut a, mut b, mut c, mut e) = (k.clone(), Integer::new(), Integer::new(), Integer::from(1));
    let mut input = input.peekable();
    let mut out = Vec::with_capacity(depth);
    let mut ingested = false;
    while out.len() < depth {
        if ingested && c != 0 && Integer::from(&c + &e) != 0 && (c > 0) == (Integer::from(&c + &e) > 0) {
            let t0 = floor_div(&a, &c);
            let t1 = floor_div(&Integer::from(&a + &b), &Integer::from(&c + &e));
            if t0 == t1 {
                let na = &a - Integer::from(&t0 * &c);
                let nb = &b - Integer::from(&t0 * &e);
                a = std::mem::replace(&mut c, na);
                b = std::mem::replace(&mut e, nb);
                out.push(t0);
                continue;
            }
        }
        let p = input
            .next()
            .ok_or_else(|| Error::InvalidFrequency("homographic input ended early".into()))?;
        let na = Integer::from(&a * &p) + &b;
        let nc = Integer::from(&c * &p) + &e;
        b = std::mem::replace(&mut a, na);
        e = std::mem::replace(&mut c, nc);
        ingested = true;
    }
    Ok(out)
}

/// Euclid's algorithm on `num/den`.
pub fn rational_quotients(num: &Integer, den: &Integer) -> Result<Vec<Integer>> {
    if *den == 0 {
        return Err(Error::InvalidFrequency("zero denominator".into()));
    }
    let (mut n, mut m) = if *den > 0 { (num.clone(), den.clone()) } else { (-num.clone(), -den.clone()) };
    let mut out = Vec::new();
    while m != 0 {
        let (a, r) = n.div_rem_floor(m.clone());
        out.push(a);
        n = std::mem::replace(&mut m, r);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<Integer> {
        v.iter().map(|&x| Integer::from(x)).collect()
    }

    #[test]
    fn fibonacci_denominators() {
        let (_, q) = convergents(&ints(&[1, 1, 1, 1, 1, 1, 1]));
        assert_eq!(q, ints(&[1, 1, 2, 3, 5, 8, 13]));
    }

    #[test]
    fn silver_denominators() {
        let (_, q) = convergents(&ints(&[0, 2, 2, 2, 2]));
        assert_eq!(q, ints(&[1, 2, 5, 12, 29]));
    }

    #[test]
    fn single_quotient() {
        let cf = ContinuedFraction::from_quotients(ints(&[3]), Tail::Terminated).unwrap();
        assert_eq!(cf.p()[0], 3);
        assert_eq!(cf.q()[0], 1);
    }

    #[test]
    fn finite_value_is_exact() {
        let cf = ContinuedFraction::from_quotients(ints(&[0, 2]), Tail::Terminated).unwrap();
        assert_eq!(cf.real_value(200).unwrap(), 0.5);
    }

    #[test]
    fn periodic_golden_to_surd() {
        let mut q = vec![Integer::new()];
        q.extend(std::iter::repeat_n(Integer::from(1), 39));
        let cf = ContinuedFraction::from_quotients(q, Tail::Periodic { start: 1, len: 1 }).unwrap();
        let v = cf.real_value(128).unwrap();
        let s = QuadraticSurd::new(Integer::from(-1), 1, Integer::from(5), Integer::from(2)).unwrap();
        let diff = Float::with_val(256, &v - &s.value(256));
        assert!(diff.abs() < Float::with_val(64, Float::i_exp(1, -120)));
    }

    #[test]
    fn unknown_tail_needs_depth() {
        let cf = ContinuedFraction::from_quotients(ints(&[0, 1, 1]), Tail::Unknown).unwrap();
        assert!(matches!(cf.real_value(512), Err(Error::InsufficientDepth { .. })));
    }

    #[test]
    fn preperiodic_surd() {
        // [0; 1, 2, (3, 4)]
        let s = cf_to_surd(&ints(&[0, 1, 2]), &ints(&[3, 4])).unwrap();
        let (q, per) = s.expand(9);
        assert_eq!(q, ints(&[0, 1, 2, 3, 4, 3, 4, 3, 4]));
        assert_eq!(per, Some((3, 2)));
    }

    #[test]
    fn doubling_rule_denominators() {
        let a: Vec<Integer> = DoublingRule::new(Integer::new()).take(8).collect();
        let (_, q) = convergents(&a);
        assert_eq!(q, ints(&[1, 1, 2, 5, 27, 734, 538783, 290287121823]));
    }

    #[test]
    fn gosper_matches_surd_scaling() {
        // 2 * (sqrt5 - 1)/2 = [1; 4, 4, ...]
        let golden = std::iter::once(Integer::new()).chain(std::iter::repeat(Integer::from(1)));
        let out = scale_quotients(golden, &Integer::from(2), 8).unwrap();
        assert_eq!(out, ints(&[1, 4, 4, 4, 4, 4, 4, 4]));
        let silver = std::iter::once(Integer::from(1)).chain(std::iter::repeat(Integer::from(2)));
        let out = scale_quotients(silver, &Integer::from(3), 6).unwrap();
        let s =QuadraticSurd::new(0.into(), 1, 18.into(), 1.into()).unwrap();
        assert_eq!(out, s.expand(6).0);
    }

    #[test]
    fn euclid() {
        assert_eq!(rational_quotients(&Integer::from(1), &Integer::from(2)).unwrap(), ints(&[0, 2]));
        assert_eq!(rational_quotients(&Integer::from(-7), &Integer::from(3)).unwrap(), ints(&[-3, 1, 2]));
    }
}
