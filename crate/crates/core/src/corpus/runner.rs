//! Battery execution over a manifest.

use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::manifest::{CorpusEntry, CorpusManifest};
use crate::bytestream::{load_sample, ByteSample};
use crate::classifier::{classify_single, TestResult, ThresholdConfig, Verdict};
use crate::config::Settings;
use crate::entropy::run_math_test;
use crate::error::{Error, Result};
use crate::metrics::ConfusionCounts;
use crate::nist::{run_nist_test, NistParams};
use crate::test_id::TestId;

/// What happened to one (entry, test) pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CellOutcome {
    Scored { result: TestResult, decision: Verdict },
    Error { kind: String, message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    /// Index into [`RunResult::entries`].
    pub entry: usize,
    pub test_id: TestId,
    pub outcome: CellOutcome,
}

impl Cell {
    pub fn scored(&self) -> Option<(&TestResult, Verdict)> {
        match &self.outcome {
            CellOutcome::Scored { result, decision } => Some((result, *decision)),
            CellOutcome::Error { .. } => None,
        }
    }

    pub fn is_error(&self) -> bool {
        matches!(self.outcome, CellOutcome::Error { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub tool_version: String,
    /// Seed of the corpus the run was made over, when known.
    pub seed: Option<u64>,
    pub config_digest: String,
    /// Seconds since the Unix epoch. Wall clock.
    pub timestamp: u64,
    pub thresholds: ThresholdConfig,
    pub nist: NistParams,
    pub max_bytes: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub metadata: RunMetadata,
    pub tests: Vec<TestId>,
    pub entries: Vec<CorpusEntry>,
    /// Entry-major, then in `tests` order.
    pub cells: Vec<Cell>,
}

impl RunResult {
    pub fn error_count(&self) -> usize {
        self.cells.iter().filter(|c| c.is_error()).count()
    }

    pub fn entry(&self, cell: &Cell) -> &CorpusEntry {
        &self.entries[cell.entry]
    }

    /// Confusion counts over scored cells matching `test` and `filter`.
    pub fn counts_where(&self, test: TestId, filter: impl Fn(&CorpusEntry) -> bool) -> ConfusionCounts {
        let mut c = ConfusionCounts::default();
        for cell in self.cells.iter().filter(|c| c.test_id == test) {
            let entry = self.entry(cell);
            if let (Some((_, decision)), true) = (cell.scored(), filter(entry)) {
                c.record(decision, entry.label);
            }
        }
        c
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let json = serde_json::to_string_pretty(self).map_err(|e| Error::Serialization(e.to_string()))?;
        std::fs::write(path, json + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Serialization(format!("{}: {e}", path.display())))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatteryConfig {
    pub tests: Vec<TestId>,
    pub settings: Settings,
    pub workers: usize,
    pub max_bytes: Option<u64>,
    pub seed: Option<u64>,
}

impl BatteryConfig {
    pub fn new(tests: Vec<TestId>) -> Self {
        Self {
            tests,
            settings: Settings::default(),
            workers: 1,
            max_bytes: None,
            seed: None,
        }
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Io { .. } => "io",
        Error::EmptySample => "empty_sample",
        Error::InsufficientData { .. } => "insufficient_data",
        Error::DegenerateSequence(_) => "degenerate_sequence",
        Error::Domain(_) => "domain",
        Error::Parameter(_) => "parameter",
        _ => "other",
    }
}

fn error_outcome(e: &Error) -> CellOutcome {
    CellOutcome::Error {
        kind: error_kind(e).to_owned(),
        message: e.to_string(),
    }
}

fn score(test: TestId, sample: &ByteSample, cfg: &BatteryConfig) -> CellOutcome {
    let result: Result<TestResult> = if test.is_math() {
        run_math_test(test, sample).map(TestResult::from)
    } else {
        run_nist_test(test, sample, &cfg.settings.nist).map(TestResult::from)
    };
    match result {
        Ok(result) => {
            let decision = classify_single(&result, &cfg.settings.thresholds).verdict;
            CellOutcome::Scored { result, decision }
        }
        Err(e) => error_outcome(&e),
    }
}

/// Runs every requested test on every manifest entry.
///
/// Files are read once each; unreadable files yield one error cell per
/// test and the run carries on. Cell order does not depend on `workers`.
pub fn run_battery(manifest: &CorpusManifest, cfg: &BatteryConfig) -> Result<RunResult> {
    if cfg.tests.is_empty() {
        return Err(Error::Parameter("no tests requested".into()));
    }
    if cfg.workers == 0 {
        return Err(Error::Parameter("workers must be at least 1".into()));
    }
    cfg.settings.thresholds.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::Parameter(format!("cannot start worker pool: {e}")))?;

    let cells: Vec<Cell> = pool.install(|| {
        manifest
            .entries
            .par_iter()
            .enumerate()
            .flat_map_iter(|(idx, entry)| {
                let outcomes: Vec<CellOutcome> = match load_sample(manifest.resolve(entry), cfg.max_bytes) {
                    Ok(sample) => cfg.tests.iter().map(|&t| score(t, &sample, cfg)).collect(),
                    Err(e) => vec![error_outcome(&e); cfg.tests.len()],
                };
                cfg.tests
                    .iter()
                    .zip(outcomes)
                    .map(move |(&test_id, outcome)| Cell {
                        entry: idx,
                        test_id,
                        outcome,
                    })
            })
            .collect()
    });

    let timestamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    Ok(RunResult {
        metadata: RunMetadata {
            tool_version: env!("CARGO_PKG_VERSION").to_owned(),
            seed: cfg.seed,
            config_digest: cfg.settings.digest(),
            timestamp,
            thresholds: cfg.settings.thresholds,
            nist: cfg.settings.nist,
            max_bytes: cfg.max_bytes,
        },
        tests: cfg.tests.clone(),
        entries: manifest.entries.clone(),
        cells,
    })
}
