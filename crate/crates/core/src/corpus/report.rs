//! Rendering a [`RunResult`] as CSV, JSON or an aligned text table.
//!
//! Granularities:
//! - `per_file`: one row per (entry, test) with the raw statistic and p-values.
//! - `per_type`: accuracy matrix, one row per type tag, one column per test.
//! - `per_test`: confusion counts, accuracy, recall, precision, F1 and
//!   throughput per test.
//! - `combined`: the same metrics for the serial-correlation override on
//!   each primary statistic and for the majority vote.
//!
//! CSV numbers carry 6 decimal places; undefined metrics are empty cells in
//! CSV, `null` in JSON and `-` in text.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use super::gate::GateRow;
use super::runner::{CellOutcome, RunResult};
use crate::classifier::{classify_majority, classify_with_override, Decision, TestResult, MAJORITY_TESTS};
use crate::entropy::MathTestResult;
use crate::error::{Error, Result};
use crate::metrics::{ConfusionCounts, MetricSet, MB};
use crate::test_id::TestId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    #[default]
    Csv,
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Granularity {
    PerFile,
    PerType,
    #[default]
    PerTest,
    Combined,
}

macro_rules! str_enum {
    ($ty:ty, $what:literal { $($variant:path => $name:literal),+ $(,)? }) => {
        impl $ty {
            pub fn as_str(self) -> &'static str {
                match self { $($variant => $name),+ }
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $ty {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($name => Ok($variant),)+
                    other => Err(Error::Parameter(format!(
                        concat!("unknown ", $what, " {:?}; expected one of: ", $($name, " "),+), other
                    ))),
                }
            }
        }
    };
}

str_enum!(ReportFormat, "format" {
    ReportFormat::Csv => "csv",
    ReportFormat::Json => "json",
    ReportFormat::Text => "text",
});

str_enum!(Granularity, "granularity" {
    Granularity::PerFile => "per_file",
    Granularity::PerType => "per_type",
    Granularity::PerTest => "per_test",
    Granularity::Combined => "combined",
});

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReportOptions {
    pub format: ReportFormat,
    pub granularity: Granularity,
    /// Include elapsed time, throughput and the run timestamp.
    pub include_timing: bool,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self {
            format: ReportFormat::Csv,
            granularity: Granularity::PerTest,
            include_timing: true,
        }
    }
}

/// Column names plus rows of JSON scalars (or arrays, for p-values).
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn drop_columns(&mut self, names: &[&str]) {
        let keep: Vec<bool> = self.columns.iter().map(|c| !names.contains(&c.as_str())).collect();
        fn filter<T>(keep: &[bool], v: &mut Vec<T>) {
            let mut it = keep.iter();
            v.retain(|_| *it.next().unwrap());
        }
        filter(&keep, &mut self.columns);
        for row in &mut self.rows {
            filter(&keep, row);
        }
    }
}

fn real(v: Option<f64>) -> Value {
    v.and_then(|x| serde_json::Number::from_f64(x).map(Value::Number))
        .unwrap_or(Value::Null)
}

fn cell_text(v: &Value, null: &str) -> String {
    match v {
        Value::Null => null.to_owned(),
        Value::Number(n) if n.is_f64() => format!("{:.6}", n.as_f64().unwrap()),
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        Value::Bool(b) => b.to_string(),
        Value::Array(items) if items.is_empty() => null.to_owned(),
        Value::Array(items) => items.iter().map(|i| cell_text(i, null)).collect::<Vec<_>>().join(";"),
        Value::Object(_) => v.to_string(),
    }
}

const COUNT_COLUMNS: [&str; 4] = ["tp", "tn", "fp", "fn"];
const METRIC_COLUMNS: [&str; 4] = ["accuracy", "recall", "precision", "f1"];
const TIMING_COLUMNS: [&str; 2] = ["elapsed_seconds", "throughput_mb_s"];

fn push_metrics(row: &mut Vec<Value>, c: &ConfusionCounts) {
    let m = MetricSet::of(c);
    row.extend([c.tp, c.tn, c.fp, c.fn_].map(Value::from));
    row.extend([m.accuracy, m.recall, m.precision, m.f1].map(real));
}

pub fn per_file_table(result: &RunResult) -> Table {
    let mut t = Table::new(&[
        "path", "type_tag", "label", "test_id", "status", "statistic", "auxiliary", "p_values",
        "decision", "bytes_processed", "elapsed_seconds", "error",
    ]);
    for cell in &result.cells {
        let entry = result.entry(cell);
        let mut row = vec![
            Value::from(entry.path.display().to_string()),
            Value::from(entry.type_tag.clone()),
            Value::from(entry.label.as_str()),
            Value::from(cell.test_id.as_str()),
        ];
        match &cell.outcome {
            CellOutcome::Scored { result: r, decision } => {
                let (statistic, auxiliary, p_values) = match r {
                    TestResult::Math(m) => {
                        let ps = match m.test_id {
                            TestId::ChiSquare => m.auxiliary.into_iter().collect(),
                            _ => vec![],
                        };
                        (Some(m.statistic), m.auxiliary, ps)
                    }
                    TestResult::Nist(n) => (None, None, n.p_values.iter().map(|p| p.value()).collect()),
                };
                row.extend([
                    Value::from("scored"),
                    real(statistic),
                    real(auxiliary),
                    Value::Array(p_values.into_iter().map(|p| real(Some(p))).collect()),
                    Value::from(decision.as_str()),
                    Value::from(r.bytes_processed()),
                    real(Some(r.elapsed_seconds())),
                    Value::Null,
                ]);
            }
            CellOutcome::Error { kind, message } => {
                row.extend([
                    Value::from("error"),
                    Value::Null,
                    Value::Null,
                    Value::Array(vec![]),
                    Value::Null,
                    Value::Null,
                    Value::Null,
                    Value::from(format!("{kind}: {message}")),
                ]);
            }
        }
        t.rows.push(row);
    }
    t
}

pub fn per_type_table(result: &RunResult) -> Table {
    let mut columns = vec!["type_tag", "files"];
    columns.extend(result.tests.iter().map(|t| t.as_str()));
    let mut t = Table::new(&columns);
    let mut tags: Vec<&str> = result.entries.iter().map(|e| e.type_tag.as_str()).collect();
    tags.sort_unstable();
    tags.dedup();
    for tag in tags {
        let files = result.entries.iter().filter(|e| e.type_tag == tag).count();
        let mut row = vec![Value::from(tag), Value::from(files)];
        for &test in &result.tests {
            let c = result.counts_where(test, |e| e.type_tag == tag);
            row.push(real(MetricSet::of(&c).accuracy));
        }
        t.rows.push(row);
    }
    t
}

pub fn per_test_table(result: &RunResult) -> Table {
    let mut columns = vec!["test_id", "scored", "errors"];
    columns.extend(COUNT_COLUMNS);
    columns.extend(METRIC_COLUMNS);
    columns.push("bytes_processed");
    columns.extend(TIMING_COLUMNS);
    let mut t = Table::new(&columns);
    for &test in &result.tests {
        let cells = result.cells.iter().filter(|c| c.test_id == test);
        let (mut bytes, mut secs, mut errors) = (0u64, 0.0f64, 0usize);
        for cell in cells {
            match cell.scored() {
                Some((r, _)) => {
                    bytes += r.bytes_processed();
                    secs += r.elapsed_seconds();
                }
                None => errors += 1,
            }
        }
        let c = result.counts_where(test, |_| true);
        let mut row = vec![Value::from(test.as_str()), Value::from(c.total()), Value::from(errors)];
        push_metrics(&mut row, &c);
        row.push(Value::from(bytes));
        row.push(real((secs > 0.0).then_some(secs)));
        row.push(real((secs > 0.0).then(|| bytes as f64 / (MB * secs))));
        t.rows.push(row);
    }
    t
}

/// Per-entry combiner decisions, or `None` where an input is missing.
pub fn combined_decisions(result: &RunResult) -> Result<Vec<(String, Vec<Option<Decision>>)>> {
    let cfg = &result.metadata.thresholds;
    let has = |t| result.tests.contains(&t);
    let n = result.entries.len();
    let mut math: Vec<Vec<Option<&MathTestResult>>> = vec![vec![None; TestId::MATH.len()]; n];
    let mut single: Vec<Vec<Option<Decision>>> = vec![vec![None; TestId::MATH.len()]; n];
    for cell in &result.cells {
        if let Some((TestResult::Math(m), verdict)) = cell.scored() {
            let k = TestId::MATH.iter().position(|&t| t == m.test_id).expect("math id");
            math[cell.entry][k] = Some(m);
            single[cell.entry][k] = Some(Decision {
                verdict,
                contributing: vec![(m.test_id, verdict)],
            });
        }
    }
    let slot = |t: TestId| TestId::MATH.iter().position(|&x| x == t).unwrap();

    let mut out = Vec::new();
    if has(TestId::SerialCorrelation) {
        for primary in [TestId::Shannon, TestId::ChiSquare, TestId::Mean, TestId::MonteCarloPi] {
            if !has(primary) {
                continue;
            }
            let decisions = (0..n)
                .map(|i| {
                    let p = single[i][slot(primary)].as_ref()?;
                    let scc = math[i][slot(TestId::SerialCorrelation)]?;
                    classify_with_override(p, scc, cfg).ok()
                })
                .collect();
            out.push((format!("{primary}+serial_correlation"), decisions));
        }
    }
    if MAJORITY_TESTS.iter().all(|&t| has(t)) {
        let decisions = (0..n)
            .map(|i| {
                let five: Option<Vec<MathTestResult>> =
                    MAJORITY_TESTS.iter().map(|&t| math[i][slot(t)].cloned()).collect();
                classify_majority(&five?, cfg).ok()
            })
            .collect();
        out.push(("majority".to_owned(), decisions));
    }
    if out.is_empty() {
        return Err(Error::Parameter(
            "combined report needs serial_correlation with a primary statistic, or all five majority tests".into(),
        ));
    }
    Ok(out)
}

pub fn combined_table(result: &RunResult) -> Result<Table> {
    let mut columns = vec!["combiner", "scored", "errors"];
    columns.extend(COUNT_COLUMNS);
    columns.extend(METRIC_COLUMNS);
    let mut t = Table::new(&columns);
    for (name, decisions) in combined_decisions(result)? {
        let mut c = ConfusionCounts::default();
        let mut errors = 0usize;
        for (entry, d) in result.entries.iter().zip(&decisions) {
            match d {
                Some(d) => c.record(d.verdict, entry.label),
                None => errors += 1,
            }
        }
        let mut row = vec![Value::from(name), Value::from(c.total()), Value::from(errors)];
        push_metrics(&mut row, &c);
        t.rows.push(row);
    }
    Ok(t)
}

pub fn gate_table(rows: &[GateRow]) -> Table {
    let mut t = Table::new(&[
        "test_id", "qualified", "reason", "types_passing", "types_total", "coverage", "throughput_mb_s",
    ]);
    for r in rows {
        t.rows.push(vec![
            Value::from(r.test_id.as_str()),
            Value::from(r.qualified),
            Value::from(r.reason.as_str()),
            Value::from(r.types_passing),
            Value::from(r.types_total),
            real(Some(r.coverage)),
            real(r.throughput_mb_s),
        ]);
    }
    t
}

pub fn render_csv(t: &Table) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let ser = |e: csv::Error| Error::Serialization(e.to_string());
    w.write_record(&t.columns).map_err(ser)?;
    for row in &t.rows {
        w.write_record(row.iter().map(|v| cell_text(v, ""))).map_err(ser)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Serialization(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Serialization(e.to_string()))
}

pub fn render_text(t: &Table) -> String {
    let cells: Vec<Vec<String>> = t.rows.iter().map(|r| r.iter().map(|v| cell_text(v, "-")).collect()).collect();
    let widths: Vec<usize> = t
        .columns
        .iter()
        .enumerate()
        .map(|(i, c)| cells.iter().map(|r| r[i].len()).chain([c.len()]).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    let mut line = |fields: &[String]| {
        let joined: Vec<String> = fields
            .iter()
            .zip(&widths)
            .map(|(f, &w)| format!("{f:<w$}"))
            .collect();
        out.push_str(joined.join("  ").trim_end());
        out.push('\n');
    };
    line(&t.columns);
    for r in &cells {
        line(r);
    }
    out
}

fn json_document(result: &RunResult, t: &Table, opts: &ReportOptions) -> Result<String> {
    let mut meta = serde_json::to_value(&result.metadata).map_err(|e| Error::Serialization(e.to_string()))?;
    if !opts.include_timing {
        meta.as_object_mut().map(|m| m.remove("timestamp"));
    }
    let rows: Vec<Value> = t
        .rows
        .iter()
        .map(|r| Value::Object(t.columns.iter().cloned().zip(r.iter().cloned()).collect::<Map<_, _>>()))
        .collect();
    let doc = json!({
        "metadata": meta,
        "granularity": opts.granularity.as_str(),
        "tests": result.tests,
        "error_cells": result.error_count(),
        "rows": rows,
    });
    serde_json::to_string_pretty(&doc)
        .map(|s| s + "\n")
        .map_err(|e| Error::Serialization(e.to_string()))
}

pub fn report_table(result: &RunResult, granularity: Granularity) -> Result<Table> {
    Ok(match granularity {
        Granularity::PerFile => per_file_table(result),
        Granularity::PerType => per_type_table(result),
        Granularity::PerTest => per_test_table(result),
        Granularity::Combined => combined_table(result)?,
    })
}

pub fn emit_report(result: &RunResult, opts: &ReportOptions) -> Result<String> {
    if result.cells.is_empty() {
        return Err(Error::EmptyRun);
    }
    let mut t = report_table(result, opts.granularity)?;
    if !opts.include_timing {
        t.drop_columns(&TIMING_COLUMNS);
    }
    match opts.format {
        ReportFormat::Csv => render_csv(&t),
        ReportFormat::Text => Ok(render_text(&t)),
        ReportFormat::Json => json_document(result, &t, opts),
    }
}
