//! Confusion counts, the four classification metrics, and throughput.

use std::ops::{Add, AddAssign};

use serde::{Deserialize, Serialize};

use crate::classifier::Verdict;
use crate::error::{Error, Result};
use crate::test_id::TestId;

/// Bytes per MB for throughput figures.
pub const MB: f64 = 1_048_576.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub tn: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl ConfusionCounts {
    pub fn total(&self) -> u64 {
        self.tp + self.tn + self.fp + self.fn_
    }

    /// Adds one `(predicted, actual)` observation.
    pub fn record(&mut self, predicted: Verdict, actual: Verdict) {
        match (predicted, actual) {
            (Verdict::Encrypted, Verdict::Encrypted) => self.tp += 1,
            (Verdict::NotEncrypted, Verdict::NotEncrypted) => self.tn += 1,
            (Verdict::Encrypted, Verdict::NotEncrypted) => self.fp += 1,
            (Verdict::NotEncrypted, Verdict::Encrypted) => self.fn_ += 1,
        }
    }

    pub fn merge(self, other: Self) -> Self {
        Self {
            tp: self.tp + other.tp,
            tn: self.tn + other.tn,
            fp: self.fp + other.fp,
            fn_: self.fn_ + other.fn_,
        }
    }
}

impl Add for ConfusionCounts {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        self.merge(rhs)
    }
}

impl AddAssign for ConfusionCounts {
    fn add_assign(&mut self, rhs: Self) {
        *self = self.merge(rhs);
    }
}

impl std::iter::Sum for ConfusionCounts {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::default(), Self::merge)
    }
}

/// Tallies `(predicted, actual)` pairs.
pub fn tally(decisions: &[(Verdict, Verdict)]) -> ConfusionCounts {
    let mut c = ConfusionCounts::default();
    for &(predicted, actual) in decisions {
        c.record(predicted, actual);
    }
    c
}

pub fn accuracy(c: &ConfusionCounts) -> Result<f64> {
    match c.total() {
        0 => Err(Error::EmptyCell),
        n => Ok((c.tp + c.tn) as f64 / n as f64),
    }
}

pub fn recall(c: &ConfusionCounts) -> Result<f64> {
    ratio(c.tp, c.tp + c.fn_, "recall")
}

pub fn precision(c: &ConfusionCounts) -> Result<f64> {
    ratio(c.tp, c.tp + c.fp, "precision")
}

pub fn f1(c: &ConfusionCounts) -> Result<f64> {
    f1_from(precision(c)?, recall(c)?)
}

/// Harmonic mean of precision and recall.
pub fn f1_from(precision: f64, recall: f64) -> Result<f64> {
    if precision + recall == 0.0 {
        return Err(Error::UndefinedMetric("f1"));
    }
    Ok(2.0 * precision * recall / (precision + recall))
}

fn ratio(num: u64, den: u64, name: &'static str) -> Result<f64> {
    if den == 0 {
        Err(Error::UndefinedMetric(name))
    } else {
        Ok(num as f64 / den as f64)
    }
}

/// All four metrics, each `None` when undefined.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MetricSet {
    pub accuracy: Option<f64>,
    pub recall: Option<f64>,
    pub precision: Option<f64>,
    pub f1: Option<f64>,
}

impl MetricSet {
    pub fn of(c: &ConfusionCounts) -> Self {
        Self {
            accuracy: accuracy(c).ok(),
            recall: recall(c).ok(),
            precision: precision(c).ok(),
            f1: f1(c).ok(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerformanceReport {
    pub test_id: Option<TestId>,
    pub bytes_processed: u64,
    pub elapsed_seconds: f64,
    pub throughput_mb_per_s: f64,
}

pub fn throughput(bytes: u64, elapsed_seconds: f64) -> Result<PerformanceReport> {
    if !(elapsed_seconds > 0.0) || !elapsed_seconds.is_finite() {
        return Err(Error::Parameter(format!(
            "elapsed time must be positive, got {elapsed_seconds}"
        )));
    }
    Ok(PerformanceReport {
        test_id: None,
        bytes_processed: bytes,
        elapsed_seconds,
        throughput_mb_per_s: bytes as f64 / (MB * elapsed_seconds),
    })
}
