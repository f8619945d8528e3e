//! Threshold classification of individual test results, plus the two
//! combiners: the serial-correlation archive override and the five-way
//! majority vote over the closed-form statistics.

use serde::{Deserialize, Serialize};

use crate::entropy::{MathTestResult, UNIFORM_MEAN};
use crate::error::{Error, Result};
use crate::nist::NistTestResult;
use crate::test_id::TestId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Encrypted,
    NotEncrypted,
}

impl Verdict {
    pub fn from_bool(encrypted: bool) -> Self {
        if encrypted {
            Verdict::Encrypted
        } else {
            Verdict::NotEncrypted
        }
    }

    pub fn is_encrypted(self) -> bool {
        self == Verdict::Encrypted
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Encrypted => "encrypted",
            Verdict::NotEncrypted => "not_encrypted",
        }
    }
}

impl std::str::FromStr for Verdict {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "encrypted" => Ok(Verdict::Encrypted),
            "not_encrypted" => Ok(Verdict::NotEncrypted),
            other => Err(Error::Parameter(format!("unknown label {other:?}"))),
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// How the Monte Carlo π deviation is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MonteCarloMode {
    /// `|estimate - π| <= max`
    #[default]
    Absolute,
    /// `|estimate - π| / π <= max`
    Relative,
}

/// Which way the KL threshold points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KlDirection {
    /// Encrypted when the divergence from uniform is below the threshold.
    #[default]
    Below,
    /// Encrypted when the divergence is above the threshold (the literal
    /// reading of the published threshold table).
    Above,
}

/// How multi-p-value NIST tests (Serial, Cusum) reach a single verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PValueRule {
    /// Every p-value must exceed the threshold.
    #[default]
    All,
    /// Only the first p-value is consulted.
    First,
    /// Any single p-value above the threshold suffices.
    Any,
}

/// Per-test decision thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdConfig {
    pub nist_p_min: f64,
    pub shannon_bits_min: f64,
    pub chi_square_p_min: f64,
    pub monte_carlo_abs_err_max: f64,
    pub mean_abs_dev_max: f64,
    pub serial_corr_abs_max: f64,
    pub kl_max: f64,
    pub monte_carlo_mode: MonteCarloMode,
    pub kl_direction: KlDirection,
    pub nist_p_rule: PValueRule,
}

impl Default for ThresholdConfig {
    fn default() -> Self {
        Self {
            nist_p_min: 0.01,
            shannon_bits_min: 7.95,
            chi_square_p_min: 0.01,
            monte_carlo_abs_err_max: 0.015,
            mean_abs_dev_max: 0.85,
            serial_corr_abs_max: 0.0011,
            kl_max: 0.01,
            monte_carlo_mode: MonteCarloMode::Absolute,
            kl_direction: KlDirection::Below,
            nist_p_rule: PValueRule::All,
        }
    }
}

impl ThresholdConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("nist_p_min", self.nist_p_min),
            ("shannon_bits_min", self.shannon_bits_min),
            ("chi_square_p_min", self.chi_square_p_min),
            ("monte_carlo_abs_err_max", self.monte_carlo_abs_err_max),
            ("mean_abs_dev_max", self.mean_abs_dev_max),
            ("serial_corr_abs_max", self.serial_corr_abs_max),
            ("kl_max", self.kl_max),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Parameter(format!("{name} must be positive, got {v}")));
            }
        }
        for (name, v) in [("nist_p_min", self.nist_p_min), ("chi_square_p_min", self.chi_square_p_min)] {
            if v >= 1.0 {
                return Err(Error::Parameter(format!("{name} must be below 1, got {v}")));
            }
        }
        Ok(())
    }
}

/// A test result of either family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TestResult {
    Math(MathTestResult),
    Nist(NistTestResult),
}

impl TestResult {
    pub fn test_id(&self) -> TestId {
        match self {
            TestResult::Math(r) => r.test_id,
            TestResult::Nist(r) => r.test_id,
        }
    }

    pub fn elapsed_seconds(&self) -> f64 {
        match self {
            TestResult::Math(r) => r.elapsed_seconds,
            TestResult::Nist(r) => r.elapsed_seconds,
        }
    }

    pub fn bytes_processed(&self) -> u64 {
        match self {
            TestResult::Math(r) => r.bytes_processed,
            TestResult::Nist(r) => r.bytes_processed,
        }
    }

    pub fn as_math(&self) -> Option<&MathTestResult> {
        match self {
            TestResult::Math(r) => Some(r),
            TestResult::Nist(_) => None,
        }
    }
}

impl From<MathTestResult> for TestResult {
    fn from(r: MathTestResult) -> Self {
        TestResult::Math(r)
    }
}

impl From<NistTestResult> for TestResult {
    fn from(r: NistTestResult) -> Self {
        TestResult::Nist(r)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decision {
    pub verdict: Verdict,
    pub contributing: Vec<(TestId, Verdict)>,
}

impl Decision {
    fn single(test: TestId, verdict: Verdict) -> Self {
        Self {
            verdict,
            contributing: vec![(test, verdict)],
        }
    }
}

fn math_verdict(r: &MathTestResult, cfg: &ThresholdConfig) -> bool {
    let s = r.statistic;
    match r.test_id {
        TestId::Shannon => s > cfg.shannon_bits_min,
        TestId::ChiSquare => r.auxiliary.is_some_and(|p| p > cfg.chi_square_p_min),
        TestId::MonteCarloPi => {
            let err = (s - std::f64::consts::PI).abs();
            match cfg.monte_carlo_mode {
                MonteCarloMode::Absolute => err <= cfg.monte_carlo_abs_err_max,
                MonteCarloMode::Relative => err / std::f64::consts::PI <= cfg.monte_carlo_abs_err_max,
            }
        }
        TestId::Mean => (s - UNIFORM_MEAN).abs() <= cfg.mean_abs_dev_max,
        TestId::SerialCorrelation => s.abs() < cfg.serial_corr_abs_max,
        TestId::KullbackLeibler => match cfg.kl_direction {
            KlDirection::Below => s < cfg.kl_max,
            KlDirection::Above => s > cfg.kl_max,
        },
        // NIST ids never appear in a MathTestResult built by this crate.
        _ => false,
    }
}

fn nist_verdict(r: &NistTestResult, cfg: &ThresholdConfig) -> bool {
    let above = |p: &crate::stat_math::ProbabilityValue| p.value() > cfg.nist_p_min;
    match cfg.nist_p_rule {
        PValueRule::All => !r.p_values.is_empty() && r.p_values.iter().all(above),
        PValueRule::First => r.p_values.first().is_some_and(above),
        PValueRule::Any => r.p_values.iter().any(above),
    }
}

pub fn classify_single(result: &TestResult, cfg: &ThresholdConfig) -> Decision {
    let encrypted = match result {
        TestResult::Math(r) => math_verdict(r, cfg),
        TestResult::Nist(r) => nist_verdict(r, cfg),
    };
    Decision::single(result.test_id(), Verdict::from_bool(encrypted))
}

/// Overturns an Encrypted verdict when the serial correlation magnitude
/// marks the file as an archive. NotEncrypted is never overturned.
pub fn classify_with_override(
    primary: &Decision,
    scc: &MathTestResult,
    cfg: &ThresholdConfig,
) -> Result<Decision> {
    if scc.test_id != TestId::SerialCorrelation {
        return Err(Error::Parameter(format!(
            "override needs a serial correlation result, got {}",
            scc.test_id
        )));
    }
    let archive = scc.statistic.abs() >= cfg.serial_corr_abs_max;
    let verdict = if primary.verdict.is_encrypted() && archive {
        Verdict::NotEncrypted
    } else {
        primary.verdict
    };
    let mut contributing = primary.contributing.clone();
    contributing.push((TestId::SerialCorrelation, Verdict::from_bool(!archive)));
    Ok(Decision { verdict, contributing })
}

/// The five statistics that take part in the majority vote.
pub const MAJORITY_TESTS: [TestId; 5] = [
    TestId::Shannon,
    TestId::ChiSquare,
    TestId::Mean,
    TestId::MonteCarloPi,
    TestId::SerialCorrelation,
];

/// Encrypted when at least three of the five statistics say so.
pub fn classify_majority(results: &[MathTestResult], cfg: &ThresholdConfig) -> Result<Decision> {
    if results.len() != MAJORITY_TESTS.len() {
        return Err(Error::Parameter(format!(
            "majority vote needs exactly 5 results, got {}",
            results.len()
        )));
    }
    let mut contributing = Vec::with_capacity(5);
    for test in MAJORITY_TESTS {
        let mut matching = results.iter().filter(|r| r.test_id == test);
        let r = matching
            .next()
            .ok_or_else(|| Error::Parameter(format!("majority vote is missing {test}")))?;
        if matching.next().is_some() {
            return Err(Error::Parameter(format!("majority vote has duplicate {test}")));
        }
        contributing.push((test, Verdict::from_bool(math_verdict(r, cfg))));
    }
    let votes = contributing.iter().filter(|(_, v)| v.is_encrypted()).count();
    Ok(Decision {
        verdict: Verdict::from_bool(votes >= 3),
        contributing,
    })
}
