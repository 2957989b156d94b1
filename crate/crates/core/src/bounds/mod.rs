//! Brjuno-side machinery: Brjuno sums, the fast subsequence and the function `F`,
//! Davie's sets and weights, the named constants, the two radius bounds, and
//! numerical audits of the coefficient inequalities.

mod audit;
mod brjuno;
mod constants;
mod davie;
mod subsequence;
mod theorems;

use serde::Serialize;

pub use audit::{coefficient_bound_audit, divisor_audit, upper_bound_audit, DivisorAudit};
pub use brjuno::{brjuno_sum, fibonacci_constants, BrjunoSum, FibonacciConstants};
pub use constants::{constants_bundle, ConstantsBundle};
pub use davie::{davie_g, davie_sets, davie_weight, DavieCertificate, DavieData, DavieLevel};
pub use subsequence::{divisor_sum_bracket, fast_subsequence, lower_bound_f, Bracket, FastSubsequence, LowerBoundF};
pub use theorems::{hypothesis_theta, theorem_bounds, TheoremBounds};

/// One evaluated inequality. `margin` is the signed slack, so `pass == (margin >= 0)`.
/// Most lemmas are compared in log form.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuditRecord {
    pub lemma: String,
    pub index: u64,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub pass: bool,
}

impl AuditRecord {
    /// Record for `lhs >= rhs`.
    pub fn at_least(lemma: impl Into<String>, index: u64, lhs: f64, rhs: f64) -> Self {
        let margin = lhs - rhs;
        AuditRecord { lemma: lemma.into(), index, lhs, rhs, margin, pass: lhs >= rhs }
    }

    /// Record for `lhs <= rhs`.
    pub fn at_most(lemma: impl Into<String>, index: u64, lhs: f64, rhs: f64) -> Self {
        let margin = rhs - lhs;
        AuditRecord { lemma: lemma.into(), index, lhs, rhs, margin, pass: lhs <= rhs }
    }

    /// Record whose verdict was decided exactly elsewhere (big integers, higher precision).
    pub fn decided(lemma: impl Into<String>, index: u64, lhs: f64, rhs: f64, margin: f64, pass: bool) -> Self {
        AuditRecord { lemma: lemma.into(), index, lhs, rhs, margin, pass }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct AuditReport {
    pub records: Vec<AuditRecord>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.records.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &AuditRecord> {
        self.records.iter().filter(|r| !r.pass)
    }

    /// Records whose lemma name starts with `prefix`.
    pub fn lemma<'a>(&'a self, prefix: &'a str) -> impl Iterator<Item = &'a AuditRecord> + 'a {
        self.records.iter().filter(move |r| r.lemma.starts_with(prefix))
    }

    pub fn count(&self, prefix: &str) -> (usize, usize) {
        let (mut pass, mut total) = (0, 0);
        for r in self.lemma(prefix) {
            total += 1;
            pass += usize::from(r.pass);
        }
        (pass, total)
    }

    pub fn extend(&mut self, other: AuditReport) {
        self.records.extend(other.records);
    }
}

/// `ln q` for a big integer.
pub(crate) fn ln_int(q: &rug::Integer) -> f64 {
    rug::Float::with_val(64, q).ln().to_f64()
}

/// `x / q` for a big integer, without overflow.
pub(crate) fn div_int(x: f64, q: &rug::Integer) -> f64 {
    (rug::Float::with_val(64, x) / rug::Float::with_val(64, q)).to_f64()
}
