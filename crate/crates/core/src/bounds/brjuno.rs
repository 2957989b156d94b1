//! `B(x) = sum_{k>=0} ln q_{k+1} / q_k` over the convergent denominators of `x`.

use rug::Integer;
use serde::Serialize;

use crate::arith::{ContinuedFraction, Tail};
use crate::error::{Error, Result};

use super::{div_int, ln_int};

/// `C0 = sum 1/f_k` and `C1 = ln 2 + sum ln f_k / f_k` over the Fibonacci numbers
/// `f_0 = f_1 = 1`, with the truncation error bound of the summation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FibonacciConstants {
    pub c0: f64,
    pub c1: f64,
    pub error: f64,
}

/// Sums stop once the remaining tail is certified below `1e-15`.
/// For `k >= 2`, `f_{k+1} >= 1.5 f_k`, so `sum_{j>k} 1/f_j <= 3/f_{k+1}`;
/// once `f_k >= 256` the log terms shrink by at least `0.75` per step.
pub fn fibonacci_constants() -> FibonacciConstants {
    let (mut a, mut b) = (1f64, 1f64);
    let mut c0 = 0.0;
    let mut s1 = 0.0;
    let mut k = 0;
    loop {
        c0 += 1.0 / a;
        s1 += a.ln() / a;
        let next = b;
        let tail0 = 3.0 / next;
        let tail1 = 4.0 * next.ln() / next;
        if k >= 2 && a >= 256.0 && tail0 < 1e-15 && tail1 < 1e-15 {
            return FibonacciConstants { c0, c1: std::f64::consts::LN_2 + s1, error: tail0.max(tail1) };
        }
        let t = a + b;
        a = b;
        b = t;
        k += 1;
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BrjunoSum {
    pub depth: usize,
    /// `sum_{k<depth} ln q_{k+1}/q_k`.
    pub partial: f64,
    /// Running partial sums, `partials[k]` covering terms `0..=k`.
    pub partials: Vec<f64>,
    /// Bound on the remaining terms when the partial quotients beyond `depth` are
    /// known to be bounded (periodic tails); `None` otherwise.
    pub tail_bound: Option<f64>,
}

impl BrjunoSum {
    /// `partial + tail_bound`, an upper bound on `B` when the tail is certified.
    pub fn upper(&self) -> Option<f64> {
        self.tail_bound.map(|t| self.partial + t)
    }
}

/// Largest partial quotient from index `from` on, when the expansion is eventually periodic.
fn tail_quotient_bound(cf: &ContinuedFraction, from: usize) -> Option<Integer> {
    let Tail::Periodic { start, len } = cf.tail() else {
        return None;
    };
    let a = cf.quotients();
    let period = a[start..start + len].iter();
    let stored = a.iter().skip(from);
    period.chain(stored).max().cloned()
}

/// Partial Brjuno sum of the number whose expansion is `cf`, with a geometric tail bound.
///
/// With every later partial quotient at most `A`, `q_{k+1} <= (A+1) q_k` and
/// `q_{K+j} >= f_j q_K`, so the tail from `K` is at most
/// `((c + ln q_K) C0 + C1 - ln 2) / q_K` with `c = ln(A+1)`.
pub fn brjuno_sum(cf: &ContinuedFraction, depth: usize) -> Result<BrjunoSum> {
    if cf.is_terminated() {
        return Err(Error::RationalFrequency("terminating continued fraction".into()));
    }
    if depth < 2 {
        return Err(Error::Config(format!("Brjuno depth {depth} < 2")));
    }
    let q = cf.q();
    if q.len() <= depth {
        return Err(Error::Config(format!("expansion has {} denominators, Brjuno depth {depth} needs {}", q.len(), depth + 1)));
    }
    let mut partials = Vec::with_capacity(depth);
    let mut acc = 0.0;
    for k in 0..depth {
        acc += div_int(ln_int(&q[k + 1]), &q[k]);
        partials.push(acc);
    }
    let tail_bound = tail_quotient_bound(cf, depth + 1).map(|a| {
        let fib = fibonacci_constants();
        let c = ln_int(&Integer::from(&a + 1u32));
        div_int((c + ln_int(&q[depth])) * fib.c0 + fib.c1 - std::f64::consts::LN_2, &q[depth])
    });
    Ok(BrjunoSum { depth, partial: acc, partials, tail_bound })
}
