#![allow(dead_code)]

use filerand_core::corpus::{Cell, CellOutcome, CorpusEntry, RunMetadata, RunResult};
use filerand_core::{MathTestResult, NistParams, TestId, ThresholdConfig, Verdict};

/// A per-type tally spec: `(type tag, files, correctly classified)`.
pub type TypeSpec<'a> = (&'a str, usize, usize);

/// Builds a run with one test whose per-type accuracy is exactly
/// `correct / files`. Every scored cell reports `bytes` read in `secs`.
pub fn gate_fixture(test: TestId, types: &[TypeSpec<'_>], bytes: u64, secs: f64) -> RunResult {
    let mut entries = Vec::new();
    let mut cells = Vec::new();
    for &(tag, files, correct) in types {
        assert!(correct <= files);
        for i in 0..files {
            let label = Verdict::from_bool(i % 2 == 0);
            let decision = if i < correct {
                label
            } else {
                Verdict::from_bool(!label.is_encrypted())
            };
            cells.push(Cell {
                entry: entries.len(),
                test_id: test,
                outcome: CellOutcome::Scored {
                    result: MathTestResult {
                        test_id: test,
                        statistic: 0.0,
                        auxiliary: None,
                        elapsed_seconds: secs,
                        bytes_processed: bytes,
                        flags: vec![],
                    }
                    .into(),
                    decision,
                },
            });
            entries.push(CorpusEntry {
                path: format!("{tag}/{i}").into(),
                type_tag: tag.to_owned(),
                label,
            });
        }
    }
    RunResult {
        metadata: metadata(),
        tests: vec![test],
        entries,
        cells,
    }
}

pub fn metadata() -> RunMetadata {
    RunMetadata {
        tool_version: "test".into(),
        seed: None,
        config_digest: String::new(),
        timestamp: 0,
        thresholds: ThresholdConfig::default(),
        nist: NistParams::default(),
        max_bytes: None,
    }
}

/// Ten types of ten files each; the first `good` types are 90% accurate,
/// the rest 50%.
pub fn ten_types(good: usize) -> Vec<(String, usize, usize)> {
    (0..10)
        .map(|t| (format!("type{t}"), 10, if t < good { 9 } else { 5 }))
        .collect()
}

pub fn as_specs(v: &[(String, usize, usize)]) -> Vec<TypeSpec<'_>> {
    v.iter().map(|(t, f, c)| (t.as_str(), *f, *c)).collect()
}
