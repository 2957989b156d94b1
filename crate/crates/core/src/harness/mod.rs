//! Experiment orchestration: configuration, single runs with audits, sweeps over
//! frequency families, artifacts and the series cache.

pub mod cache;
pub mod config;

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{ContinuedFraction, Frequency};
use crate::bounds::{
    brjuno_sum, coefficient_bound_audit, constants_bundle, divisor_audit, divisor_sum_bracket, fast_subsequence,
    hypothesis_theta, lower_bound_f, theorem_bounds, upper_bound_audit, AuditRecord, AuditReport, Bracket,
    BrjunoSum, ConstantsBundle, DavieCertificate, DavieData, TheoremBounds,
};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::series::{
    argument_audit, default_window, majorant_series, radius_estimate, residual_check, ArgumentReport,
    LinearizationSeries, RadiusEstimate, ResidualReport, TrigPolynomial,
};
use crate::Mp;

pub use config::{AuditToggles, CachePolicy, ExperimentConfig, ModeSpec, Number, PolynomialSpec, BUILTIN_SURDS};

/// Random superadditivity pairs per Davie level.
pub const DAVIE_SAMPLES: u64 = 100_000;
const DAVIE_SEED: u64 = 0x5eed;

/// Pass/total per lemma, every record, and the smallest margin.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub pass: bool,
    pub counts: BTreeMap<String, (usize, usize)>,
    pub min_margin: Option<f64>,
    pub records: Vec<AuditRecord>,
}

impl From<&AuditReport> for Summary {
    fn from(r: &AuditReport) -> Self {
        let mut counts: BTreeMap<String, (usize, usize)> = BTreeMap::new();
        for rec in &r.records {
            let key = rec.lemma.split(':').next().unwrap_or_default().to_string();
            let e = counts.entry(key).or_default();
            e.0 += usize::from(rec.pass);
            e.1 += 1;
        }
        let min_margin = r.records.iter().map(|x| x.margin).filter(|m| !m.is_nan()).reduce(f64::min);
        Summary { pass: r.passed(), counts, min_margin, records: r.records.clone() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SparsityReport {
    pub checked: u64,
    /// Nonzero coefficients at indices outside the semigroup.
    pub outside_nonzero: u64,
    /// Zero coefficients inside the semigroup (allowed, reported).
    pub inside_zero: u64,
    pub pass: bool,
}

pub fn sparsity_check<T: Real>(series: &LinearizationSeries<T>) -> SparsityReport {
    let sg = series.semigroup();
    let (mut outside, mut inside) = (0, 0);
    for l in 1..=series.n_max() {
        let zero = series.phi(l).is_zero();
        if !sg.contains(l) && !zero {
            outside += 1;
        }
        if sg.contains(l) && zero {
            inside += 1;
        }
    }
    SparsityReport { checked: series.n_max(), outside_nonzero: outside, inside_zero: inside, pass: outside == 0 }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualSection {
    pub threshold: f64,
    pub pass: bool,
    pub report: ResidualReport,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ArgumentSection {
    pub applicable: bool,
    pub violated_mode: Option<u32>,
    pub threshold: f64,
    pub pass: bool,
    pub report: Option<ArgumentReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SubsequenceSection {
    pub indices: Vec<usize>,
    pub denominators: Vec<String>,
    pub start_is_fast: bool,
    pub growth: Summary,
    pub bracket: Bracket,
    pub division: Summary,
    pub f_per_index: Vec<f64>,
    pub trend: Summary,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LemmaSection {
    /// Coefficient lower bounds; absent when the argument condition fails.
    pub coefficient: Option<Summary>,
    pub argument_condition: bool,
    pub majorant: Summary,
    pub davie: Vec<DavieCertificate>,
    pub subsequence: Option<SubsequenceSection>,
    pub subsequence_note: Option<String>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DivisorSection {
    /// Decided on the sharp constants; the literal ones are reported alongside.
    pub pass: bool,
    pub literal: BTreeMap<String, (usize, usize)>,
    pub corrected: Summary,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundsSection {
    pub ordered: bool,
    pub theorem: TheoremBounds,
    pub brjuno: BrjunoSum,
}

/// Everything a run computed; serialized as `audit.json` (bounds also as `bounds.json`).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub frequency: String,
    pub n_max: u64,
    pub precision: u32,
    pub radius: Option<RadiusEstimate>,
    pub radius_note: Option<String>,
    pub residual: Option<ResidualSection>,
    pub sparsity: Option<SparsityReport>,
    pub argument: Option<ArgumentSection>,
    pub lemmas: Option<LemmaSection>,
    pub divisors: Option<DivisorSection>,
    pub bounds: Option<BoundsSection>,
    #[serde(skip)]
    pub cache_hit: bool,
}

impl RunReport {
    /// `(passed, enabled)` over the audit sections that ran.
    pub fn audit_counts(&self) -> (usize, usize) {
        let flags = [
            self.residual.as_ref().map(|s| s.pass),
            self.sparsity.as_ref().map(|s| s.pass),
            self.argument.as_ref().map(|s| s.pass),
            self.lemmas.as_ref().map(|s| s.pass),
            self.divisors.as_ref().map(|s| s.pass),
            self.bounds.as_ref().map(|s| s.ordered),
        ];
        let ran: Vec<bool> = flags.into_iter().flatten().collect();
        (ran.iter().filter(|&&p| p).count(), ran.len())
    }

    pub fn passed(&self) -> bool {
        let (p, t) = self.audit_counts();
        p == t
    }
}

/// Expansion of `d alpha` deep enough that `d q_last > n`.
fn scaled_expansion(freq: &Frequency, d: u64, n: u64) -> Result<ContinuedFraction> {
    let scaled = freq.scaled(d)?;
    let mut depth = 16;
    loop {
        let cf = scaled.expand(depth)?;
        if rug::Integer::from(cf.q().last().expect("non-empty") * d) > n && cf.q().len() > 3 {
            return Ok(cf);
        }
        depth *= 2;
    }
}

/// Number of convergents of `d alpha` with `d q_k <= n`, at least 2.
fn horizon_depth(cf: &ContinuedFraction, d: u64, n: u64) -> usize {
    cf.q().iter().take_while(|q| rug::Integer::from(*q * d) <= n).count().max(2)
}

fn pow2(bits: u32) -> f64 {
    2f64.powi(-(bits as i32))
}

fn lemma_section(
    series: &LinearizationSeries<Mp>,
    cf: &ContinuedFraction,
    brjuno: &BrjunoSum,
    constants: &ConstantsBundle,
) -> Result<LemmaSection> {
    let poly = series.polynomial();
    let freq = series.frequency();
    let sg = series.semigroup();
    let n = series.n_max();
    let majorant = majorant_series::<Mp>(&poly.generators(), n, series.precision().bits)?;
    let davie = DavieData::from_table(series.divisors(), freq, sg.d(), n)?;
    let certificates = davie.certify(DAVIE_SAMPLES, DAVIE_SEED);
    let majorant_summary = Summary::from(&upper_bound_audit(series, &majorant, &davie));

    let (subseq, note) = match fast_subsequence(cf, sg, constants.kappa_max) {
        Ok(s) => (Some(s), None),
        Err(e @ Error::NoQualifyingStart(_)) => (None, Some(e.to_string())),
        Err(e) => return Err(e),
    };
    let f = subseq.as_ref().map(|s| lower_bound_f(s, freq)).transpose()?;
    let argument_condition = hypothesis_theta(poly).is_ok();
    let coefficient = if argument_condition {
        Some(Summary::from(&coefficient_bound_audit(series, subseq.as_ref(), f.as_ref(), constants)?))
    } else {
        None
    };
    let subsequence = match (&subseq, &f) {
        (Some(s), Some(f)) => {
            let growth = Summary::from(&s.audit());
            let bracket = divisor_sum_bracket(freq, s, brjuno)?;
            let division = Summary::from(&f.division_audit());
            let trend = Summary::from(&AuditReport { records: f.trend(2.0 * brjuno.partial - constants.c4) });
            let pass = growth.pass && bracket.pass && division.pass && trend.pass;
            Some(SubsequenceSection {
                indices: s.indices.clone(),
                denominators: s.q.iter().map(|q| q.to_string()).collect(),
                start_is_fast: s.start_is_fast,
                growth,
                bracket,
                division,
                f_per_index: (0..f.len()).map(|k| f.per_index(k)).collect(),
                trend,
                pass,
            })
        }
        _ => None,
    };
    let pass = coefficient.as_ref().is_none_or(|c| c.pass)
        && majorant_summary.pass
        && certificates.iter().all(|c| c.passed())
        && subsequence.as_ref().is_none_or(|s| s.pass);
    Ok(LemmaSection {
        coefficient,
        argument_condition,
        majorant: majorant_summary,
        davie: certificates,
        subsequence,
        subsequence_note: note,
        pass,
    })
}

/// Computes the series (through the cache) and every enabled audit, without writing artifacts.
pub fn evaluate(config: &ExperimentConfig, frequency: &Frequency) -> Result<RunReport> {
    let poly = config.validated_polynomial()?;
    let precision = config.precision();
    let bits = precision.bits;
    let cache_dir = config.cache_dir();
    let (series, cache_hit) = cache::load_or_compute(cache_dir.as_deref(), &poly, frequency, config.n_max, precision)?;
    evaluate_series(config, &series, cache_hit, &poly, bits)
}

fn evaluate_series(
    config: &ExperimentConfig,
    series: &LinearizationSeries<Mp>,
    cache_hit: bool,
    poly: &TrigPolynomial<Mp>,
    bits: u32,
) -> Result<RunReport> {
    let n = config.n_max;
    let frequency = series.frequency();
    let window = config.window.unwrap_or_else(|| default_window(n, poly.kappa0() as u64));
    let (radius, radius_note) = match radius_estimate(series, window) {
        Ok(r) => (Some(r), None),
        Err(e @ Error::TooFewCoefficients { .. }) => (None, Some(e.to_string())),
        Err(e) => return Err(e),
    };
    let audits = &config.audits;
    let residual = if audits.residual {
        let threshold = pow2(config.residual_bits.unwrap_or(bits / 2));
        let report = residual_check(series)?;
        Some(ResidualSection { threshold, pass: report.max() <= threshold, report })
    } else {
        None
    };
    let sparsity = audits.sparsity.then(|| sparsity_check(series));
    let argument = if audits.argument {
        let threshold = pow2(bits / 3);
        Some(match hypothesis_theta(poly) {
            Ok(theta) => {
                let report = argument_audit(series, &theta)?;
                ArgumentSection {
                    applicable: true,
                    violated_mode: None,
                    threshold,
                    pass: report.max_deviation() <= threshold,
                    report: Some(report),
                }
            }
            Err(k) => ArgumentSection { applicable: false, violated_mode: Some(k), threshold, pass: true, report: None },
        })
    } else {
        None
    };

    let sg = series.semigroup();
    let d = sg.d();
    let need_bounds = audits.bounds || audits.lemmas;
    let (cf, brjuno, constants) = if need_bounds {
        let cf = scaled_expansion(frequency, d, n)?;
        let depth = config.brjuno_depth.unwrap_or_else(|| horizon_depth(&cf, d, n));
        let cf = if cf.q().len() <= depth { frequency.scaled(d)?.expand(depth + 1)? } else { cf };
        let brjuno = brjuno_sum(&cf, depth)?;
        let majorant = majorant_series::<Mp>(&poly.generators(), n, bits)?;
        let constants = constants_bundle(poly, sg, majorant.ln_radius());
        (Some(cf), Some(brjuno), Some(constants))
    } else {
        (None, None, None)
    };
    let lemmas = match (audits.lemmas, &cf, &brjuno, &constants) {
        (true, Some(cf), Some(b), Some(c)) => Some(lemma_section(series, cf, b, c)?),
        _ => None,
    };
    let bounds = match (audits.bounds, brjuno, constants) {
        (true, Some(b), Some(c)) => {
            let theorem = theorem_bounds(poly, &b, &c);
            let ordered = theorem.ln_upper.is_none_or(|u| theorem.ln_lower <= u);
            Some(BoundsSection { ordered, theorem, brjuno: b })
        }
        _ => None,
    };
    let divisors = if audits.divisors {
        let a = divisor_audit(frequency, d, n, 1_000_000, series.precision())?;
        let literal = Summary::from(&a.literal).counts;
        let corrected = Summary::from(&a.corrected);
        Some(DivisorSection { pass: corrected.pass, literal, corrected })
    } else {
        None
    };
    Ok(RunReport {
        frequency: frequency.to_string(),
        n_max: n,
        precision: bits,
        radius,
        radius_note,
        residual,
        sparsity,
        argument,
        lemmas,
        divisors,
        bounds,
        cache_hit,
    })
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// `run`: series, radius and enabled audits for the configured frequency; writes
/// `coeffs.csv`, `audit.json` and (with bounds enabled) `bounds.json` under `out`.
pub fn run(config: &ExperimentConfig) -> Result<RunReport> {
    let frequency = config.single_frequency()?;
    let poly = config.validated_polynomial()?;
    let precision = config.precision();
    let cache_dir = config.cache_dir();
    let (series, hit) = cache::load_or_compute(cache_dir.as_deref(), &poly, &frequency, config.n_max, precision)?;
    let report = evaluate_series(config, &series, hit, &poly, precision.bits)?;
    fs::create_dir_all(&config.out)?;
    fs::write(config.out.join("coeffs.csv"), series.to_csv())?;
    write_json(&config.out.join("audit.json"), &report)?;
    if let Some(b) = &report.bounds {
        write_json(&config.out.join("bounds.json"), &b.theorem)?;
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub frequency: String,
    pub status: String,
    pub b_partial: Option<f64>,
    pub ln_rho: Option<f64>,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    /// `ln rho + (2/d) B`.
    pub error_value: Option<f64>,
    pub audits_passed: usize,
    pub audits_total: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub error_min: Option<f64>,
    pub error_max: Option<f64>,
    /// `max - min` of the finite error values.
    pub spread: Option<f64>,
}

impl SweepResult {
    pub fn to_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map_or(String::new(), |x| format!("{x:e}"));
        let quote = |s: &str| format!("\"{}\"", s.replace('"', "\"\""));
        let mut out = String::from("frequency,status,B_partial,ln_rho,lower,upper,error_value,audits_passed,audits_total\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                quote(&r.frequency),
                quote(&r.status),
                opt(r.b_partial),
                opt(r.ln_rho),
                opt(r.lower),
                opt(r.upper),
                opt(r.error_value),
                r.audits_passed,
                r.audits_total
            ));
        }
        out
    }
}

fn sweep_row(config: &ExperimentConfig, spec: &str) -> SweepRow {
    let mut row = SweepRow {
        frequency: spec.to_string(),
        status: "ok".into(),
        b_partial: None,
        ln_rho: None,
        lower: None,
        upper: None,
        error_value: None,
        audits_passed: 0,
        audits_total: 0,
    };
    let mut cfg = config.clone();
    cfg.audits.bounds = true;
    let report = config::parse_irrational(spec).and_then(|f| evaluate(&cfg, &f));
    match report {
        Ok(r) => {
            let (p, t) = r.audit_counts();
            row.audits_passed = p;
            row.audits_total = t;
            row.ln_rho = r.radius.as_ref().map(|e| e.ln_rho);
            if let Some(b) = &r.bounds {
                row.b_partial = Some(b.brjuno.partial);
                row.lower = Some(b.theorem.lower);
                row.upper = b.theorem.upper;
                let d = b.theorem.constants.d as f64;
                row.error_value = row.ln_rho.map(|l| l + 2.0 / d * b.brjuno.partial).filter(|v| v.is_finite());
            }
        }
        Err(e) => row.status = format!("error: {e}"),
    }
    row
}

/// Per-frequency rows over the configured family (the built-in surds by default),
/// in input order, written to `sweep.csv`.
pub fn sweep(config: &ExperimentConfig) -> Result<SweepResult> {
    let family = config.family();
    if family.len() < 2 {
        return Err(Error::Config(format!("a sweep needs at least 2 frequencies, got {}", family.len())));
    }
    config.validated_polynomial()?;
    let rows: Vec<SweepRow> = family.par_iter().map(|spec| sweep_row(config, spec)).collect();
    let errors: Vec<f64> = rows.iter().filter_map(|r| r.error_value).collect();
    let error_min = errors.iter().copied().reduce(f64::min);
    let error_max = errors.iter().copied().reduce(f64::max);
    let spread = error_min.zip(error_max).map(|(a, b)| b - a);
    let result = SweepResult { rows, error_min, error_max, spread };
    fs::create_dir_all(&config.out)?;
    fs::write(config.out.join("sweep.csv"), result.to_csv())?;
    Ok(result)
}
