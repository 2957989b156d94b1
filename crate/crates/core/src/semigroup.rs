//! The additive semigroup generated by the Fourier mode indices.

use crate::error::{Error, Result};

/// Generators are capped at this count.
pub const MAX_GENERATORS: usize = 32;

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Positive combinations `p_0 k_0 + ... + p_N k_N > 0` of the generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NumericalSemigroup {
    generators: Vec<u64>,
    d: u64,
    n_m: u64,
    member: Vec<bool>,
}

/// Result of the difference-closure audit.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ClosureReport {
    pub horizon: u64,
    pub pairs_checked: u64,
    pub counterexamples: Vec<(u64, u64)>,
}

impl ClosureReport {
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

/// `reach[m]` is true when `m` is a non-negative combination of `gens` (0 included).
fn reachable(gens: &[u64], upto: u64) -> Vec<bool> {
    let mut reach = vec![false; upto as usize + 1];
    reach[0] = true;
    for &g in gens {
        for m in g as usize..=upto as usize {
            if reach[m - g as usize] {
                reach[m] = true;
            }
        }
    }
    reach
}

impl NumericalSemigroup {
    pub fn build(generators: &[u64]) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::InvalidGenerators("empty generator set".into()));
        }
        if generators.len() > MAX_GENERATORS {
            return Err(Error::InvalidGenerators(format!("more than {MAX_GENERATORS} generators")));
        }
        if generators.contains(&0) {
            return Err(Error::InvalidGenerators("generators must be positive".into()));
        }
        let mut gens = generators.to_vec();
        gens.sort_unstable();
        if gens.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidGenerators("generators must be distinct".into()));
        }
        let d = gens.iter().fold(0, |acc, &g| gcd(acc, g));
        let (lo, hi) = (gens[0] / d, gens[gens.len() - 1] / d);
        // Schur: the Frobenius number of gens/d is below (lo - 1)(hi - 1)
        let frob_bound = d * (lo - 1) * (hi.saturating_sub(1)) + gens[gens.len() - 1];
        let horizon = (4 * hi * hi * d).max(frob_bound).max(2 * gens[gens.len() - 1]);
        let mut member = reachable(&gens, horizon);
        member[0] = false;
        // largest multiple of d (0 included) outside M
        let last_gap = (0..=horizon).rev().find(|&m| m % d == 0 && !member[m as usize]).unwrap_or(0);
        Ok(NumericalSemigroup { generators: gens, d, n_m: last_gap + d, member })
    }

    pub fn generators(&self) -> &[u64] {
        &self.generators
    }

    /// gcd of the generators.
    pub fn d(&self) -> u64 {
        self.d
    }

    /// Smallest multiple of `d` from which every multiple of `d` is a member.
    pub fn n_m(&self) -> u64 {
        self.n_m
    }

    pub fn horizon(&self) -> u64 {
        (self.member.len() - 1) as u64
    }

    pub fn contains(&self, m: u64) -> bool {
        match self.member.get(m as usize) {
            Some(&b) => b,
            None => m.is_multiple_of(self.d),
        }
    }

    /// The threshold produced by translating every gap of the first block
    /// `[k_0, k_0 + ... + k_N)` by whole blocks until it lands in M.
    pub fn translate_bound(&self) -> u64 {
        let s: u64 = self.generators.iter().sum();
        let k0 = self.generators[0];
        let mut worst = 0u64;
        for m in (k0..k0 + s).filter(|m| m % self.d == 0) {
            if !self.contains(m) {
                let p = (1..).find(|p| self.contains(m + p * s)).expect("eventually a member");
                worst = worst.max(p);
            }
        }
        if worst == 0 {
            k0
        } else {
            worst * s
        }
    }

    /// A decomposition `m = sum p_i k_i`, choosing `p_N` smallest first, then `p_{N-1}`, and so on.
    pub fn decompose(&self, m: u64) -> Result<Vec<u64>> {
        if m == 0 || !self.contains(m) {
            return Err(Error::NotMember(m));
        }
        let n = self.generators.len();
        // prefix[i] = reachability with the first i generators
        let prefix: Vec<Vec<bool>> = (0..=n).map(|i| reachable(&self.generators[..i], m)).collect();
        let mut coeffs = vec![0u64; n];
        let mut rest = m;
        for i in (0..n).rev() {
            let g = self.generators[i];
            let mut p = 0;
            while !prefix[i][(rest - p * g) as usize] {
                p += 1;
            }
            coeffs[i] = p;
            rest -= p * g;
        }
        debug_assert_eq!(rest, 0);
        Ok(coeffs)
    }

    /// Checks that `a - b >= N_M` implies `a - b` in M for members `b < a <= horizon`.
    pub fn difference_closure_check(&self, horizon: u64) -> ClosureReport {
        let members: Vec<u64> = (1..=horizon).filter(|&m| self.contains(m)).collect();
        let mut report = ClosureReport { horizon, ..Default::default() };
        for (j, &a) in members.iter().enumerate() {
            for &b in &members[..j] {
                let diff = a - b;
                if diff >= self.n_m {
                    report.pairs_checked += 1;
                    if !self.contains(diff) {
                        report.counterexamples.push((a, b));
                    }
                }
            }
        }
        report
    }

    /// CSV with columns `m,is_member` for `m = 0..=upto`.
    pub fn to_csv(&self, upto: u64) -> String {
        let mut out = String::from("m,is_member\n");
        for m in 0..=upto {
            out.push_str(&format!("{},{}\n", m, u8::from(self.contains(m))));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_five() {
        let s = NumericalSemigroup::build(&[5, 3]).unwrap();
        assert_eq!((s.d(), s.n_m()), (1, 8));
        assert!(!s.contains(7));
        assert!(s.contains(8));
        assert_eq!(s.decompose(8).unwrap(), vec![1, 1]);
        assert_eq!(s.decompose(3).unwrap(), vec![1, 0]);
        assert!(matches!(s.decompose(7), Err(Error::NotMember(7))));
        assert!(s.translate_bound() >= s.n_m());
    }

    #[test]
    fn four_six() {
        let s = NumericalSemigroup::build(&[4, 6]).unwrap();
        assert_eq!((s.d(), s.n_m()), (2, 4));
        assert!(!s.contains(5));
        assert!(!s.contains(2));
        assert!(s.contains(10_000_000));
    }

    #[test]
    fn unit_generator() {
        for k in [2, 7, 40] {
            let s = NumericalSemigroup::build(&[1, k]).unwrap();
            assert_eq!(s.n_m(), 1);
        }
    }

    #[test]
    fn closure_audits() {
        for gens in [&[3u64, 5][..], &[4, 6], &[2]] {
            let s = NumericalSemigroup::build(gens).unwrap();
            assert!(s.difference_closure_check(100).passed());
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(NumericalSemigroup::build(&[]).is_err());
        assert!(NumericalSemigroup::build(&[3, 3]).is_err());
        assert!(NumericalSemigroup::build(&[0, 2]).is_err());
    }

    #[test]
    fn csv_dump() {
        let s = NumericalSemigroup::build(&[2]).unwrap();
        assert_eq!(s.to_csv(3), "m,is_member\n0,0\n1,0\n2,1\n3,0\n");
    }
}
