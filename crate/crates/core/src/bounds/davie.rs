//! Davie's sets `A_k(n)` of indices with a divisor in the band
//! `[1/(6 q_{k+1}), 1/(6 q_k))`, and superadditive counting weights `g_k` over them.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rug::Integer;
use serde::Serialize;

use crate::arith::{ContinuedFraction, Frequency, Precision, SmallDivisorTable};
use crate::error::Result;
use crate::scalar::Real;
use crate::Mp;

/// One level `k`: the members of `A_k(n)` and the weight `g_k(0..=n)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DavieLevel {
    pub k: usize,
    /// `d q_k`.
    pub dq: u64,
    /// `d q_{k+1}`.
    pub dq_next: u64,
    pub members: Vec<u64>,
    #[serde(skip)]
    pub g: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DavieData {
    pub d: u64,
    pub n: u64,
    pub levels: Vec<DavieLevel>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct DavieCertificate {
    pub level: usize,
    pub n: u64,
    /// `g_k(m) <= (1 + 2 d q_k / E) m / (d q_k)` for every `m <= n`.
    pub cap_violations: u64,
    /// `m in A_k => g_k(m) >= g_k(m-1) + 1`.
    pub jump_violations: u64,
    pub superadditivity_violations: u64,
    pub pairs_checked: u64,
    /// Members `j_1 < j_2` with neither `d q_k | j_2 - j_1` nor `j_2 - j_1 >= d q_{k+1}/4`.
    pub gap_violations: u64,
    pub gap_pairs: u64,
    /// Members with neither `q_k | j/d` nor `j/d >= q_{k+1}/4`.
    pub member_violations: u64,
}

impl DavieCertificate {
    pub fn passed(&self) -> bool {
        self.cap_violations == 0
            && self.jump_violations == 0
            && self.superadditivity_violations == 0
            && self.gap_violations == 0
            && self.member_violations == 0
    }
}

/// Convergent denominators of `d alpha` far enough that some `d q_m > n`.
fn denominators(freq: &Frequency, d: u64, n: u64) -> Result<Vec<u64>> {
    let scaled = freq.scaled(d)?;
    let mut depth = 16;
    loop {
        let cf: ContinuedFraction = scaled.expand(depth)?;
        let q = cf.q();
        let last = &q[q.len() - 1];
        if Integer::from(last * d) > n {
            // denominators past the first exceeding n are never needed
            let cut = q.iter().position(|x| Integer::from(x * d) > n).unwrap_or(q.len() - 1);
            return Ok(q[..=cut].iter().map(|x| x.to_u64().unwrap_or(u64::MAX)).collect());
        }
        depth *= 2;
    }
}

/// Members of `A_k(n)`, deciding `1/(6 q_{k+1}) <= |D_j|^{1/2} < 1/(6 q_k)` in the table's precision.
fn band_members<T: Real>(table: &SmallDivisorTable<T>, d: u64, q: u64, q_next: u64, n: u64) -> Vec<u64> {
    let dq = d.saturating_mul(q);
    let mut out = Vec::new();
    let mut j = dq;
    while j <= n {
        let s = table.sqrt_abs(j).to_mp();
        let lo = Mp::with_val(s.prec(), &s * q_next) * 6u32;
        let hi = Mp::with_val(s.prec(), &s * q) * 6u32;
        if lo >= 1u32 && hi < 1u32 {
            out.push(j);
        }
        j += d;
    }
    out
}

/// Least `g >= 0` with `g(m) >= g(m-1) + [m in A]` and `g(m) >= g(s) + g(m-s)`.
/// Any function with the jump and superadditivity properties dominates it.
/// In the superadditive maximum only the first index of each value of `g` matters,
/// since `g` is non-decreasing.
fn minimal_weight(members: &[u64], n: u64) -> Vec<u32> {
    let n = n as usize;
    let mut in_a = vec![false; n + 1];
    for &m in members {
        in_a[m as usize] = true;
    }
    let mut g = vec![0u32; n + 1];
    let mut rises: Vec<usize> = Vec::new();
    for m in 1..=n {
        let mut v = g[m - 1] + u32::from(in_a[m]);
        for &s in &rises {
            v = v.max(g[s] + g[m - s]);
        }
        if v > g[m - 1] {
            rises.push(m);
        }
        g[m] = v;
    }
    g
}

impl DavieData {
    /// Every level `k` with `d q_k <= n`, divisors read from `table` (which must cover `n`).
    pub fn from_table<T: Real>(table: &SmallDivisorTable<T>, freq: &Frequency, d: u64, n: u64) -> Result<Self> {
        let q = denominators(freq, d, n)?;
        let mut levels = Vec::new();
        for k in 0..q.len() - 1 {
            if d.saturating_mul(q[k]) > n {
                break;
            }
            let members = band_members(table, d, q[k], q[k + 1], n);
            let g = minimal_weight(&members, n);
            levels.push(DavieLevel { k, dq: d * q[k], dq_next: d.saturating_mul(q[k + 1]), members, g });
        }
        Ok(DavieData { d, n, levels })
    }

    pub fn build(freq: &Frequency, d: u64, n: u64, prec: Precision) -> Result<Self> {
        let table = SmallDivisorTable::<Mp>::build(freq, n, prec)?;
        Self::from_table(&table, freq, d, n)
    }

    pub fn level(&self, k: usize) -> Option<&DavieLevel> {
        self.levels.iter().find(|l| l.k == k)
    }

    pub fn certify(&self, samples: u64, seed: u64) -> Vec<DavieCertificate> {
        self.levels.iter().map(|l| l.certify(self.d, samples, seed)).collect()
    }
}

impl DavieLevel {
    /// Checks the cap and jump properties for every `m <= n`, superadditivity on all
    /// pairs when there are at most `samples` of them and on `samples` random pairs
    /// otherwise, and the pairwise gap property of the members.
    pub fn certify(&self, d: u64, samples: u64, seed: u64) -> DavieCertificate {
        let n = self.g.len() as u64 - 1;
        let mut c = DavieCertificate { level: self.k, n, ..Default::default() };
        // 4E = max(4 d q_k, d q_{k+1}); cap: g dq 4E <= (4E + 8 dq) m
        let e4 = (4 * self.dq as u128).max(self.dq_next as u128);
        for m in 0..=n {
            let g = self.g[m as usize] as u128;
            if g * self.dq as u128 * e4 > (e4 + 8 * self.dq as u128) * m as u128 {
                c.cap_violations += 1;
            }
        }
        for &m in &self.members {
            if self.g[m as usize] < self.g[m as usize - 1] + 1 {
                c.jump_violations += 1;
            }
        }
        let pairs = (n + 1) * (n + 2) / 2;
        let mut check = |a: u64, b: u64| {
            c.pairs_checked += 1;
            if self.g[a as usize] + self.g[b as usize] > self.g[(a + b) as usize] {
                c.superadditivity_violations += 1;
            }
        };
        if pairs <= samples {
            for a in 0..=n {
                for b in 0..=n - a {
                    check(a, b);
                }
            }
        } else {
            let mut rng = StdRng::seed_from_u64(seed ^ self.k as u64);
            for _ in 0..samples {
                let total = rng.gen_range(0..=n);
                let a = rng.gen_range(0..=total);
                check(a, total - a);
            }
        }
        let q = self.dq / d;
        let q_next = self.dq_next / d;
        for (i, &a) in self.members.iter().enumerate() {
            let j = a / d;
            if !j.is_multiple_of(q) && 4 * j < q_next {
                c.member_violations += 1;
            }
            for &b in &self.members[i + 1..] {
                c.gap_pairs += 1;
                let diff = b - a;
                if diff % self.dq != 0 && 4 * diff < self.dq_next {
                    c.gap_violations += 1;
                }
            }
        }
        c
    }
}

/// `A_k(n)` for the frequency `alpha` and the convergents of `d alpha`; empty when `n < d q_k`.
pub fn davie_sets(freq: &Frequency, d: u64, k: usize, n: u64, prec: Precision) -> Result<Vec<u64>> {
    let q = denominators(freq, d, n.max(1))?;
    let (qk, qn) = if k + 1 < q.len() {
        (q[k], q[k + 1])
    } else {
        return Ok(Vec::new());
    };
    if d.saturating_mul(qk) > n {
        return Ok(Vec::new());
    }
    let table = SmallDivisorTable::<Mp>::build(freq, n, prec)?;
    Ok(band_members(&table, d, qk, qn, n))
}

/// `g_k(n)`, zero for levels beyond the data.
pub fn davie_g(davie: &DavieData, k: usize, n: u64) -> u32 {
    davie.level(k).map_or(0, |l| l.g[n as usize])
}

/// `g(j) = sum_l 2 g_l(j) ln q_{l+1} + delta j ln|a_max| + 36 j` for `j = 0..=n`,
/// `delta = [|a_max| > 1]`.
pub fn davie_weight(davie: &DavieData, ln_a_max: f64) -> Vec<f64> {
    let delta = if ln_a_max > 0.0 { ln_a_max } else { 0.0 };
    (0..=davie.n)
        .map(|j| {
            let mut w = (delta + 36.0) * j as f64;
            for l in &davie.levels {
                let ln_q = ((l.dq_next / davie.d) as f64).ln();
                w += 2.0 * l.g[j as usize] as f64 * ln_q;
            }
            w
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_below_first_index() {
        // golden: q_3 = 3
        let a = davie_sets(&Frequency::golden(), 1, 3, 2, Precision::new(128)).unwrap();
        assert!(a.is_empty());
    }

    #[test]
    fn golden_level_three_members() {
        let freq = Frequency::golden();
        let a = davie_sets(&freq, 1, 3, 200, Precision::new(128)).unwrap();
        // brute force in f64: q_3 = 3, q_4 = 5
        let alpha = freq.value(128).unwrap().to_f64();
        let want: Vec<u64> = (3..=200u64)
            .filter(|&j| {
                let s = 2.0 * (std::f64::consts::PI * j as f64 * alpha).sin().abs();
                (1.0 / 30.0..1.0 / 18.0).contains(&s)
            })
            .collect();
        assert_eq!(a, want);
        assert!(!a.is_empty());
    }

    #[test]
    fn minimal_weight_small_case() {
        // A = {3}: g = 0,0,0,1,1,1,2,...
        let g = minimal_weight(&[3], 9);
        assert_eq!(g, vec![0, 0, 0, 1, 1, 1, 2, 2, 2, 3]);
    }

    #[test]
    fn golden_certificate_exhaustive() {
        let data = DavieData::build(&Frequency::golden(), 1, 400, Precision::new(128)).unwrap();
        for c in data.certify(1 << 20, 7) {
            assert!(c.passed(), "{c:?}");
        }
    }
}
