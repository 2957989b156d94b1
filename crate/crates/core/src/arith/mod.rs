//! Frequencies, continued fractions and small divisors.

pub mod cf;
pub mod divisor;
pub mod surd;

use std::fmt;

use rug::{Float, Integer};

pub use cf::{convergents, ContinuedFraction, Tail};
pub use divisor::{norm_dist, small_divisor, small_divisor_big, Precision, SmallDivisorTable};
pub use surd::QuadraticSurd;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FrequencySpec {
    Surd(QuadraticSurd),
    /// Explicit quotients; an empty `period` means the expansion is finite.
    Quotients { prefix: Vec<Integer>, period: Vec<Integer> },
    /// `k * [0; q_0 + c, q_1 + c, ...]`.
    Rule { offset: Integer, scale: Integer },
}

/// A rotation number `alpha`, with `lambda = exp(2 pi i alpha)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frequency {
    spec: FrequencySpec,
}

impl Frequency {
    pub fn new(spec: FrequencySpec) -> Result<Self> {
        if let FrequencySpec::Quotients { prefix, period } = &spec {
            if prefix.is_empty() && period.is_empty() {
                return Err(Error::InvalidFrequency("empty quotient list".into()));
            }
            if prefix.iter().chain(period).skip(1).any(|a| *a < 1) || period.iter().any(|a| *a < 1) {
                return Err(Error::InvalidFrequency("partial quotients past a_0 must be positive".into()));
            }
        }
        if let FrequencySpec::Rule { scale, .. } = &spec {
            if *scale < 1 {
                return Err(Error::InvalidFrequency("scale must be positive".into()));
            }
        }
        Ok(Frequency { spec })
    }

    pub fn surd(p: i64, s: i32, d: i64, q: i64) -> Result<Self> {
        Frequency::new(FrequencySpec::Surd(QuadraticSurd::new(p.into(), s, d.into(), q.into())?))
    }

    /// The golden rotation number `(sqrt 5 - 1)/2`.
    pub fn golden() -> Self {
        Frequency::surd(-1, 1, 5, 2).expect("valid surd")
    }

    pub fn doubling(offset: u64) -> Self {
        Frequency { spec: FrequencySpec::Rule { offset: offset.into(), scale: Integer::from(1) } }
    }

    /// Parses `surd:P,s,D,Q`, `cf:[a0;a1,...,(b1,...)]`, `rule:doubling` or `rule:doubling+C`.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        let bad = |msg: &str| Error::InvalidFrequency(format!("{msg}: `{text}`"));
        let (kind, body) = text.split_once(':').ok_or_else(|| bad("missing `kind:`"))?;
        match kind.trim() {
            "surd" => {
                let parts: Vec<&str> = body.split(',').map(str::trim).collect();
                if parts.len() != 4 {
                    return Err(bad("expected surd:P,s,D,Q"));
                }
                let int = |s: &str| s.parse::<Integer>().map_err(|_| bad("bad integer"));
                let s: i32 = parts[1].trim_start_matches('+').parse().map_err(|_| bad("bad sign"))?;
                let surd = QuadraticSurd::new(int(parts[0])?, s, int(parts[2])?, int(parts[3])?)?;
                Frequency::new(FrequencySpec::Surd(surd))
            }
            "cf" => {
                let inner = body
                    .trim()
                    .strip_prefix('[')
                    .and_then(|b| b.strip_suffix(']'))
                    .ok_or_else(|| bad("expected cf:[...]"))?;
                let (head, rest) = match inner.split_once(';') {
                    Some((h, r)) => (h, Some(r)),
                    None => (inner, None),
                };
                let int = |s: &str| s.trim().parse::<Integer>().map_err(|_| bad("bad quotient"));
                let mut prefix = vec![int(head)?];
                let mut period = Vec::new();
                if let Some(rest) = rest {
                    let (plain, per) = match rest.find('(') {
                        Some(i) => {
                            let p = rest[i + 1..]
                                .trim_end()
                                .strip_suffix(')')
                                .ok_or_else(|| bad("unclosed period"))?;
                            (&rest[..i], Some(p))
                        }
                        None => (rest, None),
                    };
                    for tok in plain.split(',').map(str::trim).filter(|t| !t.is_empty()) {
                        prefix.push(int(tok)?);
                    }
                    if let Some(per) = per {
                        for tok in per.split(',') {
                            period.push(int(tok)?);
                        }
                    }
                }
                Frequency::new(FrequencySpec::Quotients { prefix, period })
            }
            "rule" => {
                let body = body.trim();
                let offset = match body.strip_prefix("doubling") {
                    Some("") => Integer::new(),
                    Some(c) => c
                        .strip_prefix('+')
                        .and_then(|c| c.trim().parse::<Integer>().ok())
                        .filter(|c| *c >= 0)
                        .ok_or_else(|| bad("expected rule:doubling+C with C >= 0"))?,
                    None => return Err(bad("unknown rule")),
                };
                Frequency::new(FrequencySpec::Rule { offset, scale: Integer::from(1) })
            }
            _ => Err(bad("unknown frequency kind")),
        }
    }

    pub fn spec(&self) -> &FrequencySpec {
        &self.spec
    }

    pub fn is_rational(&self) -> bool {
        matches!(&self.spec, FrequencySpec::Quotients { period, .. } if period.is_empty())
    }

    /// `(num, den)` with `den > 0` for a finite expansion.
    pub fn rational_parts(&self) -> Option<(Integer, Integer)> {
        match &self.spec {
            FrequencySpec::Quotients { prefix, period } if period.is_empty() => {
                let (p, q) = convergents(prefix);
                Some((p.last()?.clone(), q.last()?.clone()))
            }
            _ => None,
        }
    }

    /// The exact surd, when the frequency is a quadratic irrational.
    pub fn as_surd(&self) -> Option<QuadraticSurd> {
        match &self.spec {
            FrequencySpec::Surd(s) => Some(s.clone()),
            FrequencySpec::Quotients { prefix, period } if !period.is_empty() => cf::cf_to_surd(prefix, period).ok(),
            _ => None,
        }
    }

    /// First `depth` partial quotients with convergents.
    pub fn expand(&self, depth: usize) -> Result<ContinuedFraction> {
        if depth == 0 {
            return Err(Error::InvalidFrequency("depth must be at least 1".into()));
        }
        match &self.spec {
            FrequencySpec::Surd(s) => {
                let (q, period) = s.expand(depth);
                let tail = match period {
                    Some((start, len)) => Tail::Periodic { start, len },
                    None => Tail::Unknown,
                };
                ContinuedFraction::from_quotients(q, tail)
            }
            FrequencySpec::Quotients { prefix, period } if period.is_empty() => {
                if depth >= prefix.len() {
                    ContinuedFraction::from_quotients(prefix.clone(), Tail::Terminated)
                } else {
                    ContinuedFraction::from_quotients(prefix[..depth].to_vec(), Tail::Unknown)
                }
            }
            FrequencySpec::Quotients { prefix, period } => {
                let q: Vec<Integer> = prefix.iter().chain(period.iter().cycle()).take(depth).cloned().collect();
                let tail = if depth >= prefix.len() + period.len() {
                    Tail::Periodic { start: prefix.len(), len: period.len() }
                } else {
                    Tail::Unknown
                };
                ContinuedFraction::from_quotients(q, tail)
            }
            FrequencySpec::Rule { offset, scale } => {
                let rule = cf::DoublingRule::new(offset.clone());
                let q = if *scale == 1 {
                    rule.take(depth).collect()
                } else {
                    cf::scale_quotients(rule, scale, depth)?
                };
                ContinuedFraction::from_quotients(q, Tail::Unknown)
            }
        }
    }

    /// `d * alpha`, computed exactly.
    pub fn scaled(&self, d: u64) -> Result<Frequency> {
        if d == 0 {
            return Err(Error::InvalidFrequency("scale must be positive".into()));
        }
        if d == 1 {
            return Ok(self.clone());
        }
        let k = Integer::from(d);
        let spec = match &self.spec {
            FrequencySpec::Rule { offset, scale } => {
                FrequencySpec::Rule { offset: offset.clone(), scale: Integer::from(scale * &k) }
            }
            FrequencySpec::Quotients { period, .. } if period.is_empty() => {
                let (num, den) = self.rational_parts().expect("finite expansion");
                let prefix = cf::rational_quotients(&(num * &k), &den)?;
                FrequencySpec::Quotients { prefix, period: Vec::new() }
            }
            _ => FrequencySpec::Surd(self.as_surd().expect("irrational quadratic").scaled(&k)?),
        };
        Frequency::new(spec)
    }

    /// `alpha` to `prec` bits (correct to within one unit in the last place).
    pub fn value(&self, prec: u32) -> Result<Float> {
        if let Some(s) = self.as_surd() {
            return Ok(s.value(prec));
        }
        if let Some((num, den)) = self.rational_parts() {
            let mut v = Float::with_val(prec, num);
            v /= den;
            return Ok(v);
        }
        let mut depth = 8;
        loop {
            match self.expand(depth)?.real_value(prec) {
                Err(Error::InsufficientDepth { .. }) => depth *= 2,
                other => return other,
            }
        }
    }
}

impl fmt::Display for Frequency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[Integer]| v.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(",");
        match &self.spec {
            FrequencySpec::Surd(s) => write!(f, "surd:{},1,{},{}", s.p(), s.d(), s.q()),
            FrequencySpec::Quotients { prefix, period } => {
                write!(f, "cf:[{}", prefix[0])?;
                let rest = join(&prefix[1..]);
                if !rest.is_empty() || !period.is_empty() {
                    write!(f, ";{rest}")?;
                }
                if !period.is_empty() {
                    if !rest.is_empty() {
                        write!(f, ",")?;
                    }
                    write!(f, "({})", join(period))?;
                }
                write!(f, "]")
            }
            FrequencySpec::Rule { offset, scale } => {
                if *scale != 1 {
                    write!(f, "{scale}*")?;
                }
                if *offset == 0 {
                    write!(f, "rule:doubling")
                } else {
                    write!(f, "rule:doubling+{offset}")
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<Integer> {
        v.iter().map(|&x| Integer::from(x)).collect()
    }

    #[test]
    fn parse_forms() {
        let g = Frequency::parse("surd:-1,1,5,2").unwrap();
        assert_eq!(g, Frequency::golden());
        let c = Frequency::parse("cf:[0;(1)]").unwrap();
        assert_eq!(c.expand(5).unwrap().quotients(), &ints(&[0, 1, 1, 1, 1])[..]);
        let r = Frequency::parse("cf:[0;2]").unwrap();
        assert!(r.is_rational());
        let p = Frequency::parse("cf:[0;1,2,(3,4)]").unwrap();
        assert_eq!(p.to_string(), "cf:[0;1,2,(3,4)]");
        assert_eq!(Frequency::parse("rule:doubling+12").unwrap(), Frequency::doubling(12));
        assert!(Frequency::parse("surd:1,1,4,2").is_err());
        assert!(Frequency::parse("cf:[0;0,1]").is_err());
        assert!(Frequency::parse("rule:halving").is_err());
        assert!(Frequency::parse("cf:[0;(0)]").is_err());
    }

    #[test]
    fn scaled_golden_by_two() {
        let s = Frequency::golden().scaled(2).unwrap();
        assert_eq!(s.expand(6).unwrap().quotients(), &ints(&[1, 4, 4, 4, 4, 4])[..]);
        assert_eq!(Frequency::golden().scaled(1).unwrap(), Frequency::golden());
    }

    #[test]
    fn scaled_silver_minus_one_by_three() {
        // 3 (sqrt2 - 1) = 3 sqrt2 - 3
        let a = Frequency::surd(-1, 1, 2, 1).unwrap();
        let s = a.scaled(3).unwrap();
        let cf = s.expand(12).unwrap();
        let v = s.value(200).unwrap();
        let exact = {
            let mut r = Float::with_val(200, 2);
            r.sqrt_mut();
            r *= 3;
            r -= 3;
            r
        };
        assert!(Float::with_val(200, &v - &exact).abs() < Float::with_val(64, Float::i_exp(1, -190)));
        // convergent error sandwich 1/(2 q_k q_{k+1}) <= |x - p_k/q_k| <= 1/(q_k q_{k+1})
        for k in 0..cf.depth() - 1 {
            let (p, q, q1) = (&cf.p()[k], &cf.q()[k], &cf.q()[k + 1]);
            let mut err = Float::with_val(400, p);
            err /= q;
            err -= &v;
            let err = err.abs();
            let prod = Float::with_val(400, Integer::from(q * q1));
            assert!(Float::with_val(400, &err * &prod) <= 1);
            assert!(Float::with_val(400, &err * &prod) * 2u32 >= 1);
        }
    }

    #[test]
    fn scaled_rule_agrees_with_float_expansion() {
        let r = Frequency::doubling(0);
        let v = r.value(2000).unwrap();
        let s = r.scaled(3).unwrap();
        let sv = s.value(2000).unwrap();
        let diff = Float::with_val(2000, &sv - Float::with_val(2000, &v * 3u32));
        assert!(diff.abs() < Float::with_val(64, Float::i_exp(1, -1900)));
    }

    #[test]
    fn rational_scaling() {
        let r = Frequency::parse("cf:[0;3]").unwrap().scaled(2).unwrap();
        assert_eq!(r.rational_parts(), Some((Integer::from(2), Integer::from(3))));
    }
}
