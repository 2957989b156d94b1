//! JSON experiment configuration.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::arith::{Frequency, Precision};
use crate::error::{Error, Result};
use crate::scalar::{Complex, Real};
use crate::series::TrigPolynomial;
use crate::Mp;

/// A real given as a JSON number or as a decimal string (for more than 53 bits).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Number {
    Float(f64),
    Text(String),
}

impl Number {
    fn to_mp(&self, bits: u32) -> Result<Mp> {
        match self {
            Number::Float(v) => Ok(Mp::with_val(bits, *v)),
            Number::Text(s) => Mp::parse_prec(s, bits).ok_or_else(|| Error::Config(format!("not a number: {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModeSpec {
    Cartesian { k: u32, re: Number, im: Number },
    Polar { k: u32, abs: Number, arg: Number },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PolynomialSpec {
    /// `"semi-standard"` for `A(x) = e^{ix}`.
    Named(String),
    Modes { modes: Vec<ModeSpec> },
    /// `a_k = |a_k| e^{i(k theta + pi/2)}`.
    Phase { theta: Number, moduli: Vec<(u32, Number)> },
}

impl PolynomialSpec {
    pub fn build(&self, bits: u32) -> Result<TrigPolynomial<Mp>> {
        match self {
            PolynomialSpec::Named(name) if name == "semi-standard" => {
                TrigPolynomial::new(vec![(1, Complex::new(Mp::with_val(bits, 0), Mp::with_val(bits, 1)))])
            }
            PolynomialSpec::Named(name) => Err(Error::Config(format!("unknown polynomial {name:?}"))),
            PolynomialSpec::Modes { modes } => {
                let modes = modes
                    .iter()
                    .map(|m| match m {
                        ModeSpec::Cartesian { k, re, im } => Ok((*k, Complex::new(re.to_mp(bits)?, im.to_mp(bits)?))),
                        ModeSpec::Polar { k, abs, arg } => Ok((*k, Complex::from_polar(&abs.to_mp(bits)?, &arg.to_mp(bits)?))),
                    })
                    .collect::<Result<Vec<_>>>()?;
                TrigPolynomial::new(modes)
            }
            PolynomialSpec::Phase { theta, moduli } => {
                let moduli = moduli.iter().map(|(k, r)| Ok((*k, r.to_mp(bits)?))).collect::<Result<Vec<_>>>()?;
                TrigPolynomial::with_phase(&moduli, &theta.to_mp(bits)?)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AuditToggles {
    pub residual: bool,
    pub sparsity: bool,
    pub argument: bool,
    /// Coefficient lower bounds, majorant domination, Davie weights, subsequence and `F`.
    pub lemmas: bool,
    pub bounds: bool,
    /// Divisor sandwich and convergent interval.
    pub divisors: bool,
}

impl Default for AuditToggles {
    fn default() -> Self {
        AuditToggles { residual: true, sparsity: true, argument: true, lemmas: true, bounds: true, divisors: false }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CachePolicy {
    pub enabled: bool,
    /// Defaults to `<out>/cache`.
    pub dir: Option<PathBuf>,
}

impl Default for CachePolicy {
    fn default() -> Self {
        CachePolicy { enabled: true, dir: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub polynomial: PolynomialSpec,
    #[serde(default)]
    pub frequency: Option<String>,
    /// Sweep family; the built-in surds when absent.
    #[serde(default)]
    pub frequencies: Option<Vec<String>>,
    #[serde(default = "defaults::n_max")]
    pub n_max: u64,
    #[serde(default = "defaults::precision")]
    pub precision: u32,
    #[serde(default = "defaults::guard")]
    pub guard: u32,
    /// Radius window; the upper half of the computed range when absent.
    #[serde(default)]
    pub window: Option<(u64, u64)>,
    /// Convergents summed in the Brjuno sum; by default those with `d q_k <= n_max`.
    #[serde(default)]
    pub brjuno_depth: Option<usize>,
    /// Residual pass threshold `2^-residual_bits`; `precision/2` when absent.
    #[serde(default)]
    pub residual_bits: Option<u32>,
    #[serde(default)]
    pub audits: AuditToggles,
    #[serde(default = "defaults::out")]
    pub out: PathBuf,
    #[serde(default)]
    pub cache: CachePolicy,
}

mod defaults {
    use std::path::PathBuf;
    pub fn n_max() -> u64 {
        500
    }
    pub fn precision() -> u32 {
        256
    }
    pub fn guard() -> u32 {
        crate::arith::Precision::DEFAULT_GUARD
    }
    pub fn out() -> PathBuf {
        PathBuf::from("out")
    }
}

/// The built-in sweep family of quadratic surds in `(0, 1)`.
pub const BUILTIN_SURDS: [&str; 10] = [
    "surd:-1,1,5,2",
    "surd:-1,1,2,1",
    "surd:-1,1,3,1",
    "surd:-2,1,5,1",
    "surd:-2,1,6,1",
    "surd:-2,1,7,1",
    "surd:-3,1,10,1",
    "surd:-3,1,11,1",
    "surd:-3,1,13,2",
    "surd:-3,1,15,1",
];

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// A default configuration for `polynomial` at one frequency.
    pub fn new(polynomial: PolynomialSpec, frequency: &str) -> Self {
        ExperimentConfig {
            polynomial,
            frequency: Some(frequency.to_string()),
            frequencies: None,
            n_max: defaults::n_max(),
            precision: defaults::precision(),
            guard: defaults::guard(),
            window: None,
            brjuno_depth: None,
            residual_bits: None,
            audits: AuditToggles::default(),
            out: defaults::out(),
            cache: CachePolicy::default(),
        }
    }

    pub fn precision(&self) -> Precision {
        Precision::with_guard(self.precision, self.guard)
    }

    pub fn cache_dir(&self) -> Option<PathBuf> {
        self.cache.enabled.then(|| self.cache.dir.clone().unwrap_or_else(|| self.out.join("cache")))
    }

    /// Single frequency of a run; rational input is rejected here, before any computation.
    pub fn single_frequency(&self) -> Result<Frequency> {
        let text = self.frequency.as_deref().ok_or_else(|| Error::Config("no frequency given".into()))?;
        parse_irrational(text)
    }

    pub fn family(&self) -> Vec<String> {
        match &self.frequencies {
            Some(list) => list.clone(),
            None => BUILTIN_SURDS.iter().map(|s| s.to_string()).collect(),
        }
    }

    /// Polynomial at the configured precision, with the range checks of a run.
    pub fn validated_polynomial(&self) -> Result<TrigPolynomial<Mp>> {
        if self.precision < 53 {
            return Err(Error::Config(format!("precision {} < 53 bits", self.precision)));
        }
        let poly = self.polynomial.build(self.precision)?;
        let k0 = poly.kappa0() as u64;
        if self.n_max < k0 {
            return Err(Error::Config(format!("n_max {} below the smallest mode {k0}", self.n_max)));
        }
        if let Some((lo, hi)) = self.window {
            if lo < k0 || lo > hi || hi > self.n_max {
                return Err(Error::Config(format!("window [{lo}, {hi}] outside [{k0}, {}]", self.n_max)));
            }
        }
        Ok(poly)
    }
}

pub(crate) fn parse_irrational(text: &str) -> Result<Frequency> {
    let f = Frequency::parse(text)?;
    if f.is_rational() {
        return Err(Error::RationalFrequency(text.to_string()));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_polynomial_forms() {
        let c = ExperimentConfig::from_json(
            r#"{"polynomial": {"modes": [{"k": 1, "re": 0, "im": 1}, {"k": 3, "abs": "2.5", "arg": 0.25}]},
                "frequency": "surd:-1,1,5,2", "n_max": 40}"#,
        )
        .unwrap();
        let p = c.validated_polynomial().unwrap();
        assert_eq!(p.generators(), vec![1, 3]);
        assert!((p.coefficient(3).unwrap().abs().to_f64() - 2.5).abs() < 1e-60);

        let c = ExperimentConfig::from_json(
            r#"{"polynomial": {"theta": 0.3, "moduli": [[1, 1], [2, 1], [3, 2]]}, "frequency": "surd:-1,1,5,2"}"#,
        )
        .unwrap();
        assert!(c.validated_polynomial().unwrap().phase(&Mp::with_val(256, 1e-60)).is_ok());

        let c = ExperimentConfig::from_json(r#"{"polynomial": "semi-standard"}"#).unwrap();
        assert!(c.validated_polynomial().unwrap().is_monomial());
        assert_eq!(c.family().len(), 10);
    }

    #[test]
    fn window_outside_range() {
        let mut c = ExperimentConfig::new(PolynomialSpec::Named("semi-standard".into()), "surd:-1,1,5,2");
        c.window = Some((10, 600));
        assert!(matches!(c.validated_polynomial(), Err(Error::Config(_))));
    }

    #[test]
    fn rational_rejected() {
        let c = ExperimentConfig::new(PolynomialSpec::Named("semi-standard".into()), "cf:[0;2,3]");
        assert!(matches!(c.single_frequency(), Err(Error::RationalFrequency(_))));
    }

    #[test]
    fn unknown_field() {
        assert!(ExperimentConfig::from_json(r#"{"polynomial": "semi-standard", "nmax": 3}"#).is_err());
    }

    #[test]
    fn builtin_family_is_irrational_in_unit_interval() {
        for s in BUILTIN_SURDS {
            let f = parse_irrational(s).unwrap();
            let v = f.value(64).unwrap();
            assert!(v > 0 && v < 1, "{s}");
        }
    }
}
