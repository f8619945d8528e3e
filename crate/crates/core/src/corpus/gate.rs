//! Phase-one qualification: accurate on enough of the corpus, and fast
//! enough to be usable.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::runner::RunResult;
use crate::error::{Error, Result};
use crate::metrics::{accuracy, MB};
use crate::test_id::TestId;

/// What the coverage fraction is measured over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoverageMode {
    /// Fraction of type tags whose accuracy meets the bar.
    #[default]
    PerType,
    /// Fraction of files that belong to a type whose accuracy meets the bar.
    PerFile,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseGateCriteria {
    pub accuracy_min: f64,
    pub type_coverage_min: f64,
    pub throughput_min_mb_s: f64,
    pub coverage_mode: CoverageMode,
}

impl Default for PhaseGateCriteria {
    fn default() -> Self {
        Self {
            accuracy_min: 0.80,
            type_coverage_min: 0.85,
            throughput_min_mb_s: 1.0,
            coverage_mode: CoverageMode::PerType,
        }
    }
}

impl PhaseGateCriteria {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("accuracy_min", self.accuracy_min),
            ("type_coverage_min", self.type_coverage_min),
        ] {
            if !(v > 0.0 && v <= 1.0) {
                return Err(Error::Parameter(format!("{name} must be in (0, 1], got {v}")));
            }
        }
        if !(self.throughput_min_mb_s >= 0.0) || !self.throughput_min_mb_s.is_finite() {
            return Err(Error::Parameter(format!(
                "throughput_min_mb_s must be non-negative, got {}",
                self.throughput_min_mb_s
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GateReason {
    Qualified,
    Coverage,
    Throughput,
    CoverageAndThroughput,
}

impl GateReason {
    pub fn as_str(self) -> &'static str {
        match self {
            GateReason::Qualified => "qualified",
            GateReason::Coverage => "coverage",
            GateReason::Throughput => "throughput",
            GateReason::CoverageAndThroughput => "coverage_and_throughput",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateRow {
    pub test_id: TestId,
    pub qualified: bool,
    pub reason: GateReason,
    /// Types meeting `accuracy_min`, out of `types_total`.
    pub types_passing: usize,
    pub types_total: usize,
    pub coverage: f64,
    /// Aggregate bytes over aggregate seconds; `None` if nothing was scored.
    pub throughput_mb_s: Option<f64>,
    /// Per-type accuracy; absent where no file of the type was scored.
    pub type_accuracy: BTreeMap<String, Option<f64>>,
}

pub fn phase_gate(result: &RunResult, criteria: &PhaseGateCriteria) -> Result<Vec<GateRow>> {
    criteria.validate()?;
    if result.cells.is_empty() {
        return Err(Error::EmptyRun);
    }
    let mut files_per_type: BTreeMap<&str, usize> = BTreeMap::new();
    for e in &result.entries {
        *files_per_type.entry(&e.type_tag).or_default() += 1;
    }
    if files_per_type.len() < 2 {
        return Err(Error::Parameter(format!(
            "phase gate needs at least 2 type tags, got {}",
            files_per_type.len()
        )));
    }
    let total_files: usize = files_per_type.values().sum();

    let mut rows = Vec::with_capacity(result.tests.len());
    for &test in &result.tests {
        let mut type_accuracy = BTreeMap::new();
        let mut types_passing = 0;
        let mut files_passing = 0;
        for (&tag, &files) in &files_per_type {
            let acc = accuracy(&result.counts_where(test, |e| e.type_tag == tag)).ok();
            if acc.is_some_and(|a| a >= criteria.accuracy_min) {
                types_passing += 1;
                files_passing += files;
            }
            type_accuracy.insert(tag.to_owned(), acc);
        }
        let coverage = match criteria.coverage_mode {
            CoverageMode::PerType => types_passing as f64 / files_per_type.len() as f64,
            CoverageMode::PerFile => files_passing as f64 / total_files as f64,
        };

        let (mut bytes, mut secs) = (0u64, 0.0f64);
        for cell in result.cells.iter().filter(|c| c.test_id == test) {
            if let Some((r, _)) = cell.scored() {
                bytes += r.bytes_processed();
                secs += r.elapsed_seconds();
            }
        }
        let throughput_mb_s = (secs > 0.0).then(|| bytes as f64 / (MB * secs));

        let covered = coverage >= criteria.type_coverage_min;
        let fast = throughput_mb_s.is_some_and(|t| t >= criteria.throughput_min_mb_s);
        let reason = match (covered, fast) {
            (true, true) => GateReason::Qualified,
            (false, true) => GateReason::Coverage,
            (true, false) => GateReason::Throughput,
            (false, false) => GateReason::CoverageAndThroughput,
        };
        rows.push(GateRow {
            test_id: test,
            qualified: covered && fast,
            reason,
            types_passing,
            types_total: files_per_type.len(),
            coverage,
            throughput_mb_s,
            type_accuracy,
        });
    }
    Ok(rows)
}
