//! Exact quadratic surds `(P + sqrt(D)) / Q` with `Q | D - P^2`.

use std::collections::HashMap;
use std::fmt;

use rug::{Assign, Integer};

use crate::error::{Error, Result};

/// A real quadratic irrational in the normalized form `(P + sqrt(D)) / Q`.
///
/// The sign of the radical is folded into `P` and `Q`, and `Q` always
/// divides `D - P^2`, which keeps the expansion recurrence integral.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadraticSurd {
    p: Integer,
    d: Integer,
    q: Integer,
}

/// `floor(a / b)`.
pub(crate) fn floor_div(a: &Integer, b: &Integer) -> Integer {
    let (q, _) = <(Integer, Integer)>::from(a.div_rem_floor_ref(b));
    q
}

impl QuadraticSurd {
    /// Builds `(p + s sqrt(d)) / q` with `s = +1` or `-1`.
    pub fn new(p: Integer, s: i32, d: Integer, q: Integer) -> Result<Self> {
        if s != 1 && s != -1 {
            return Err(Error::InvalidFrequency(format!("radical sign must be +1 or -1, got {s}")));
        }
        if d <= 0 {
            return Err(Error::InvalidFrequency(format!("radicand must be positive, got {d}")));
        }
        if d.is_perfect_square() {
            return Err(Error::RationalFrequency(format!("sqrt({d}) is an integer")));
        }
        if q == 0 {
            return Err(Error::InvalidFrequency("denominator is zero".into()));
        }
        let (mut p, mut d, mut q) = if s == 1 { (p, d, q) } else { (-p, d, -q) };
        let rem = (&d - Integer::from(&p * &p)) % &q;
        if rem != 0 {
            let qa = Integer::from(q.abs_ref());
            p *= &qa;
            d *= Integer::from(&q * &q);
            q *= &qa;
        }
        let mut out = QuadraticSurd { p, d, q };
        out.reduce();
        Ok(out)
    }

    /// Builds `(p + r sqrt(d)) / q` for any nonzero integer `r`.
    pub fn from_parts(p: Integer, r: Integer, d: Integer, q: Integer) -> Result<Self> {
        if r == 0 {
            return Err(Error::RationalFrequency("radical coefficient is zero".into()));
        }
        let s = if r > 0 { 1 } else { -1 };
        let dd = Integer::from(&r * &r) * d;
        QuadraticSurd::new(p, s, dd, q)
    }

    fn reduce(&mut self) {
        let mut g = Integer::from(self.p.gcd_ref(&self.q));
        while g > 1 {
            let g2 = Integer::from(&g * &g);
            if self.d.is_divisible(&g2) {
                let num = &self.d - Integer::from(&self.p * &self.p);
                let gq = Integer::from(&g * &self.q);
                if num.is_divisible(&gq) {
                    self.p /= &g;
                    self.q /= &g;
                    self.d /= &g2;
                    g = Integer::from(self.p.gcd_ref(&self.q));
                    continue;
                }
            }
            break;
        }
    }

    pub fn p(&self) -> &Integer {
        &self.p
    }
    pub fn d(&self) -> &Integer {
        &self.d
    }
    pub fn q(&self) -> &Integer {
        &self.q
    }

    /// `floor(value)`, exact.
    pub fn floor(&self) -> Integer {
        let root = Integer::from(self.d.sqrt_ref());
        let num = Integer::from(&self.p + &root);
        if self.q > 0 {
            floor_div(&num, &self.q)
        } else {
            let qa = Integer::from(self.q.abs_ref());
            -floor_div(&num, &qa) - 1
        }
    }

    /// `k * value`, exact.
    pub fn scaled(&self, k: &Integer) -> Result<Self> {
        QuadraticSurd::from_parts(Integer::from(&self.p * k), k.clone(), self.d.clone(), self.q.clone())
    }

    /// `(a x + b) / (c x + e)` for integers with `a e - b c != 0`.
    pub fn mobius(&self, a: &Integer, b: &Integer, c: &Integer, e: &Integer) -> Result<Self> {
        // x = (u + sqrt D)/v ; numerator X + a sqrt D, denominator Y + c sqrt D
        let (u, v, dd) = (&self.p, &self.q, &self.d);
        let x = Integer::from(a * u) + Integer::from(b * v);
        let y = Integer::from(c * u) + Integer::from(e * v);
        let ac = Integer::from(a * c);
        let p = Integer::from(&x * &y) - ac * dd;
        let r = Integer::from(a * &y) - Integer::from(&x * c);
        let q = Integer::from(&y * &y) - Integer::from(c * c) * dd;
        if q == 0 {
            return Err(Error::InvalidFrequency("degenerate Mobius transform".into()));
        }
        QuadraticSurd::from_parts(p, r, dd.clone(), q)
    }

    /// Value rounded to `prec` bits.
    pub fn value(&self, prec: u32) -> rug::Float {
        let work = prec + 16;
        let mut v = rug::Float::with_val(work, &self.d);
        v.sqrt_mut();
        v += &self.p;
        v /= &self.q;
        rug::Float::with_val(prec, v)
    }

    /// Partial quotients of the continued fraction, with the periodic tail
    /// located once a state `(P, Q)` repeats.
    pub fn expand(&self, depth: usize) -> (Vec<Integer>, Option<(usize, usize)>) {
        let mut quotients = Vec::with_capacity(depth);
        let mut seen: HashMap<(Integer, Integer), usize> = HashMap::new();
        let mut period = None;
        let root = Integer::from(self.d.sqrt_ref());
        let mut p = self.p.clone();
        let mut q = self.q.clone();
        let mut tmp = Integer::new();
        for k in 0..depth {
            if period.is_none() {
                if let Some(&start) = seen.get(&(p.clone(), q.clone())) {
                    period = Some((start, k - start));
                } else {
                    seen.insert((p.clone(), q.clone()), k);
                }
            }
            tmp.assign(&p + &root);
            let a = if q > 0 {
                floor_div(&tmp, &q)
            } else {
                let qa = Integer::from(q.abs_ref());
                -floor_div(&tmp, &qa) - 1
            };
            // P' = aQ - P, Q' = (D - P'^2)/Q
            let np = Integer::from(&a * &q) - &p;
            let nq = (&self.d - Integer::from(&np * &np)) / &q;
            p = np;
            q = nq;
            quotients.push(a);
        }
        if period.is_none() && seen.contains_key(&(p.clone(), q.clone())) {
            let start = seen[&(p, q)];
            period = Some((start, depth - start));
        }
        (quotients, period)
    }
}

impl fmt::Display for QuadraticSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} + sqrt({}))/{}", self.p, self.d, self.q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn surd(p: i64, s: i32, d: i64, q: i64) -> QuadraticSurd {
        QuadraticSurd::new(p.into(), s, d.into(), q.into()).unwrap()
    }

    fn ints(v: &[i64]) -> Vec<Integer> {
        v.iter().map(|&x| Integer::from(x)).collect()
    }

    #[test]
    fn golden_and_sqrt2() {
        let (q, per) = surd(1, 1, 5, 2).expand(6);
        assert_eq!(q, ints(&[1, 1, 1, 1, 1, 1]));
        assert_eq!(per, Some((0, 1)));
        let (q, per) = surd(0, 1, 2, 1).expand(5);
        assert_eq!(q, ints(&[1, 2, 2, 2, 2]));
        assert_eq!(per, Some((1, 1)));
    }

    #[test]
    fn sqrt7_depth9() {
        let (q, _) = surd(0, 1, 7, 1).expand(9);
        assert_eq!(q, ints(&[2, 1, 1, 1, 4, 1, 1, 1, 4]));
    }

    #[test]
    fn negative_radical_normalizes() {
        // (1 - sqrt 5)/2 = -0.618..., floor -1, then the golden tail
        let s = surd(1, -1, 5, 2);
        assert_eq!(s.floor(), Integer::from(-1));
        let (q, _) = s.expand(4);
        assert_eq!(q, ints(&[-1, 2, 1, 1]));
    }

    #[test]
    fn non_divisible_denominator_is_rescaled() {
        // (1 + sqrt 3)/3 : 3 does not divide 3 - 1
        let s = surd(1, 1, 3, 3);
        let n = s.d() - Integer::from(s.p() * s.p());
        assert!(n.is_divisible(s.q()));
        assert!((s.value(64).to_f64() - (1.0 + 3f64.sqrt()) / 3.0).abs() < 1e-15);
    }

    #[test]
    fn perfect_square_rejected() {
        assert!(matches!(
            QuadraticSurd::new(1.into(), 1, 9.into(), 2.into()),
            Err(Error::RationalFrequency(_))
        ));
    }

    #[test]
    fn scaling_golden_by_two() {
        let g = surd(-1, 1, 5, 2);
        let s = g.scaled(&Integer::from(2)).unwrap();
        assert!((s.value(64).to_f64() - (5f64.sqrt() - 1.0)).abs() < 1e-15);
        let (q, _) = s.expand(5);
        assert_eq!(q, ints(&[1, 4, 4, 4, 4]));
    }

    #[test]
    fn mobius_matches_float() {
        let y = surd(0, 1, 2, 1);
        let m = y.mobius(&3.into(), &1.into(), &2.into(), &5.into()).unwrap();
        let yv = 2f64.sqrt();
        assert!((m.value(64).to_f64() - (3.0 * yv + 1.0) / (2.0 * yv + 5.0)).abs() < 1e-14);
    }
}
