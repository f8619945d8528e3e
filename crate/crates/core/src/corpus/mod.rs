//! Labelled corpora: manifests, synthetic generation, battery runs,
//! phase gating and reports.

pub mod gate;
pub mod huffman;
pub mod manifest;
pub mod report;
pub mod runner;
pub mod synth;

pub use gate::{phase_gate, CoverageMode, GateReason, GateRow, PhaseGateCriteria};
pub use manifest::{load_manifest, CorpusEntry, CorpusManifest};
pub use report::{emit_report, Granularity, ReportFormat, ReportOptions};
pub use runner::{run_battery, BatteryConfig, Cell, CellOutcome, RunMetadata, RunResult};
pub use synth::{synthesize_corpus, Category, SynthSpec};
