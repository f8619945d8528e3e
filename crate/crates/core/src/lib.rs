//! File randomness measures and encrypted-file classification.
//!
//! Six closed-form byte statistics ([`entropy`]), six NIST SP 800-22 tests
//! ([`nist`]), per-test threshold classification with two combiners
//! ([`classifier`]), confusion metrics ([`metrics`]) and labelled-corpus
//! evaluation ([`corpus`]).
//!
//! ```
//! use filerand_core::{classify_single, run_math_test, ByteSample, TestId, ThresholdConfig};
//!
//! let sample = ByteSample::from_bytes("mem", b"hello hello hello".to_vec());
//! let r = run_math_test(TestId::Shannon, &sample).unwrap();
//! let d = classify_single(&r.into(), &ThresholdConfig::default());
//! assert!(!d.verdict.is_encrypted());
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bytestream;
pub mod classifier;
pub mod config;
pub mod corpus;
pub mod entropy;
pub mod error;
pub mod metrics;
pub mod nist;
pub mod stat_math;
pub mod test_id;

pub use bytestream::{bits_msb_first, byte_histogram, load_sample, BitSequence, ByteSample, Histogram256};
pub use classifier::{
    classify_majority, classify_single, classify_with_override, Decision, KlDirection, MonteCarloMode,
    PValueRule, TestResult, ThresholdConfig, Verdict,
};
pub use config::Settings;
pub use entropy::{run_math_test, MathTestResult};
pub use error::{Error, Result};
pub use metrics::{accuracy, f1, precision, recall, tally, throughput, ConfusionCounts, MetricSet};
pub use nist::{run_nist_test, NistParams, NistTestResult};
pub use stat_math::ProbabilityValue;
pub use test_id::{Flag, TestId};
