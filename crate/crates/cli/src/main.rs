//! `filerand`: file randomness analysis and corpus evaluation.
//!
//! Exit codes: 0 success, 1 usage or validation error, 2 I/O error,
//! 3 battery finished but some (file, test) cells failed.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgAction, Args, Parser, Subcommand};
use serde_json::json;

use filerand_core::classifier::MAJORITY_TESTS;
use filerand_core::config::{Settings, CONFIG_ENV};
use filerand_core::corpus::report::{gate_table, render_csv, render_text, Table};
use filerand_core::corpus::synth::MANIFEST_FILE;
use filerand_core::corpus::{
    emit_report, load_manifest, phase_gate, run_battery, synthesize_corpus, BatteryConfig, Category,
    Granularity, ReportFormat, ReportOptions, RunResult, SynthSpec,
};
use filerand_core::{
    classify_majority, classify_single, classify_with_override, load_sample, run_math_test, run_nist_test,
    Error, MathTestResult, TestId, TestResult,
};

#[derive(Parser, Debug)]
#[command(name = "filerand", version, about = "File randomness tests and encrypted-file classification")]
struct Cli {
    /// Configuration file with thresholds, phase-gate criteria and NIST
    /// parameters (`key = value` lines)
    #[arg(long, global = true, env = CONFIG_ENV, value_name = "PATH")]
    thresholds: Option<PathBuf>,

    /// More progress output on stderr (repeat for more, up to -vv)
    #[arg(short, long, global = true, action = ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run every test on one file and print statistics, p-values and verdicts
    Analyze(AnalyzeArgs),
    /// Write a deterministic synthetic corpus plus its manifest
    Synth(SynthArgs),
    /// Run the battery over a manifest and print a report
    Battery(BatteryArgs),
    /// Re-render a saved run without recomputing anything
    Report(ReportArgs),
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// Output format: csv, json or text
    #[arg(long, value_parser = parse_format, default_value = "text")]
    format: ReportFormat,
    /// Write the report here instead of stdout
    #[arg(short, long, value_name = "PATH")]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    path: PathBuf,
    /// Comma list of tests, or the groups all, math, nist
    #[arg(long, value_parser = parse_tests, default_value = "all")]
    tests: TestList,
    /// Read at most this many bytes from the start of the file
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..), value_name = "N")]
    max_bytes: Option<u64>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Debug)]
struct SynthArgs {
    /// Directory to write files and manifest.txt into
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
    /// Files per category
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u64).range(1..))]
    count: u64,
    /// File size in bytes
    #[arg(long, default_value_t = 65536, value_parser = clap::value_parser!(u64).range(1..))]
    size: u64,
    /// Comma list of TEXT, STRUCTURED, ENTROPY-CODED, PSEUDO-ENCRYPTED
    #[arg(long, value_parser = parse_categories, default_value = "TEXT,STRUCTURED,ENTROPY-CODED,PSEUDO-ENCRYPTED")]
    categories: CategoryList,
    /// Per-category override, e.g. `TEXT=10:4096,PSEUDO-ENCRYPTED=3:65536`
    /// (replaces --count/--size/--categories)
    #[arg(long, value_name = "CAT=COUNT:SIZE,...")]
    spec: Option<String>,
    /// Corpus seed; the same seed and sizes give byte-identical files
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct BatteryArgs {
    manifest: PathBuf,
    /// Comma list of tests, or the groups all, math, nist
    #[arg(long, value_parser = parse_tests, default_value = "all")]
    tests: TestList,
    /// Worker threads (default: logical CPU count)
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    workers: Option<u64>,
    /// Report granularity: per_file, per_type, per_test or combined
    #[arg(long, value_parser = parse_granularity, default_value = "per_test")]
    granularity: Granularity,
    /// Also print the phase-one qualification table
    #[arg(long)]
    phase_gate: bool,
    /// Read at most this many bytes from the start of each file
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..), value_name = "N")]
    max_bytes: Option<u64>,
    /// Corpus seed, recorded in the run metadata
    #[arg(long)]
    seed: Option<u64>,
    /// Save the full run as JSON for later `report` calls
    #[arg(long, value_name = "PATH")]
    save_run: Option<PathBuf>,
    /// Leave out elapsed time, throughput and the timestamp
    #[arg(long)]
    no_timing: bool,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Debug)]
struct ReportArgs {
    run: PathBuf,
    /// Report granularity: per_file, per_type, per_test or combined
    #[arg(long, value_parser = parse_granularity, default_value = "per_test")]
    granularity: Granularity,
    /// Leave out elapsed time, throughput and the timestamp
    #[arg(long)]
    no_timing: bool,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Clone, Debug)]
struct TestList(Vec<TestId>);

#[derive(Clone, Debug)]
struct CategoryList(Vec<Category>);

fn parse_tests(s: &str) -> Result<TestList, String> {
    TestId::parse_list(s).map(TestList).map_err(|e| e.to_string())
}

fn parse_categories(s: &str) -> Result<CategoryList, String> {
    s.split(',')
        .map(|c| c.trim().parse::<Category>().map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()
        .map(CategoryList)
}

fn parse_format(s: &str) -> Result<ReportFormat, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_granularity(s: &str) -> Result<Granularity, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Io { .. } | Error::EmptySample | Error::Serialization(_) => 2,
            _ => 1,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure {
        code: 2,
        message: format!("cannot write {}: {e}", path.display()),
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 1,
        message: message.into(),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("filerand: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let settings = match &cli.thresholds {
        Some(path) => Settings::load(path)?,
        None => Settings::default(),
    };
    let verbose = cli.verbose.min(2);
    match cli.command {
        Command::Analyze(a) => analyze(a, &settings),
        Command::Synth(a) => synth(a, verbose),
        Command::Battery(a) => battery(a, settings, verbose),
        Command::Report(a) => report(a),
    }
}

fn write_output(out: &OutputArgs, text: &str) -> Result<(), Failure> {
    match &out.output {
        Some(path) => std::fs::write(path, text).map_err(|e| io_failure(path, e)),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| io_failure(Path::new("<stdout>"), e))
        }
    }
}

fn render(table: &Table, format: ReportFormat, extra: serde_json::Value) -> Result<String, Failure> {
    Ok(match format {
        ReportFormat::Csv => render_csv(table)?,
        ReportFormat::Text => render_text(table),
        ReportFormat::Json => {
            let rows: Vec<serde_json::Value> = table
                .rows
                .iter()
                .map(|r| serde_json::Value::Object(table.columns.iter().cloned().zip(r.iter().cloned()).collect()))
                .collect();
            let mut doc = json!({ "rows": rows });
            if let (Some(d), Some(e)) = (doc.as_object_mut(), extra.as_object()) {
                d.extend(e.clone());
            }
            serde_json::to_string_pretty(&doc).expect("json values serialize") + "\n"
        }
    })
}

fn analyze(a: AnalyzeArgs, settings: &Settings) -> Result<u8, Failure> {
    let sample = load_sample(&a.path, a.max_bytes)?;
    let cfg = &settings.thresholds;
    let mut table = Table {
        columns: ["test_id", "statistic", "p_values", "verdict", "error"].map(String::from).to_vec(),
        rows: Vec::new(),
    };
    let mut math: Vec<MathTestResult> = Vec::new();
    let mut singles = Vec::new();
    for &test in &a.tests.0 {
        let result = if test.is_math() {
            run_math_test(test, &sample).map(TestResult::from)
        } else {
            run_nist_test(test, &sample, &settings.nist).map(TestResult::from)
        };
        let row = match result {
            Ok(r) => {
                let d = classify_single(&r, cfg);
                let (statistic, ps): (Option<f64>, Vec<f64>) = match &r {
                    TestResult::Math(m) => {
                        let ps = if m.test_id == TestId::ChiSquare { m.auxiliary.into_iter().collect() } else { vec![] };
                        (Some(m.statistic), ps)
                    }
                    TestResult::Nist(n) => (None, n.p_values.iter().map(|p| p.value()).collect()),
                };
                let row = vec![
                    json!(test.as_str()),
                    json!(statistic),
                    json!(ps),
                    json!(d.verdict.as_str()),
                    json!(null),
                ];
                if let TestResult::Math(m) = r {
                    math.push(m);
                }
                singles.push(d);
                row
            }
            Err(e) => vec![json!(test.as_str()), json!(null), json!([]), json!(null), json!(e.to_string())],
        };
        table.rows.push(row);
    }

    let find = |t: TestId| math.iter().find(|m| m.test_id == t);
    let mut combined = Vec::new();
    if let Some(scc) = find(TestId::SerialCorrelation) {
        for primary in [TestId::Shannon, TestId::ChiSquare, TestId::Mean, TestId::MonteCarloPi] {
            if let Some(d) = singles.iter().find(|d| d.contributing[0].0 == primary) {
                let o = classify_with_override(d, scc, cfg)?;
                combined.push((format!("{primary}+serial_correlation"), o.verdict));
            }
        }
    }
    let majority_inputs: Option<Vec<MathTestResult>> = MAJORITY_TESTS.iter().map(|&t| find(t).cloned()).collect();
    if let Some(inputs) = majority_inputs {
        combined.push(("majority".into(), classify_majority(&inputs, cfg)?.verdict));
    }

    let text = match a.out.format {
        ReportFormat::Text => {
            let mut s = format!("{} ({} bytes)\n\n", a.path.display(), sample.length_bytes());
            s += &render_text(&table);
            if !combined.is_empty() {
                s.push('\n');
                let width = combined.iter().map(|(n, _)| n.len()).max().unwrap_or(0);
                for (name, v) in &combined {
                    s += &format!("{name:<width$}  {v}\n");
                }
            }
            s
        }
        format => {
            let combined_rows: Vec<_> = combined
                .iter()
                .map(|(n, v)| json!({"combiner": n, "verdict": v.as_str()}))
                .collect();
            if format == ReportFormat::Csv {
                for (name, v) in &combined {
                    table.rows.push(vec![json!(name), json!(null), json!([]), json!(v.as_str()), json!(null)]);
                }
            }
            render(
                &table,
                format,
                json!({
                    "path": a.path.display().to_string(),
                    "bytes": sample.length_bytes(),
                    "combined": combined_rows,
                }),
            )?
        }
    };
    write_output(&a.out, &text)?;
    Ok(0)
}

fn parse_spec(text: &str) -> Result<SynthSpec, Failure> {
    let mut spec = SynthSpec::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let bad = || usage(format!("bad --spec item {item:?}; expected CATEGORY=COUNT:SIZE"));
        let (cat, rest) = item.split_once('=').ok_or_else(bad)?;
        let (count, size) = rest.split_once(':').ok_or_else(bad)?;
        let category: Category = cat.trim().parse()?;
        let count: usize = count.trim().parse().map_err(|_| bad())?;
        let size: usize = size.trim().parse().map_err(|_| bad())?;
        if count == 0 || size == 0 {
            return Err(usage(format!("{category}: count and size must be at least 1")));
        }
        spec.insert(category, (count, size));
    }
    if spec.is_empty() {
        return Err(usage("--spec is empty"));
    }
    Ok(spec)
}

fn synth(a: SynthArgs, verbose: u8) -> Result<u8, Failure> {
    let spec = match &a.spec {
        Some(text) => parse_spec(text)?,
        None => a
            .categories
            .0
            .iter()
            .map(|&c| (c, (a.count as usize, a.size as usize)))
            .collect(),
    };
    let manifest = synthesize_corpus(&spec, a.seed, &a.out)?;
    if verbose > 0 {
        for (c, (n, size)) in &spec {
            eprintln!("{c}: {n} files of {size} bytes");
        }
    }
    println!(
        "wrote {} files and {}",
        manifest.entries.len(),
        a.out.join(MANIFEST_FILE).display()
    );
    Ok(0)
}

fn battery(a: BatteryArgs, settings: Settings, verbose: u8) -> Result<u8, Failure> {
    let manifest = load_manifest(&a.manifest)?;
    let workers = match a.workers {
        Some(n) => n as usize,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    let cfg = BatteryConfig {
        tests: a.tests.0,
        settings,
        workers,
        max_bytes: a.max_bytes,
        seed: a.seed,
    };
    if verbose > 0 {
        eprintln!(
            "running {} tests over {} files with {workers} workers",
            cfg.tests.len(),
            manifest.entries.len()
        );
    }
    let result = run_battery(&manifest, &cfg)?;
    let errors = result.error_count();
    if verbose > 0 {
        eprintln!("{} cells scored, {errors} errors", result.cells.len() - errors);
    }
    if verbose > 1 {
        for cell in result.cells.iter().filter(|c| c.is_error()) {
            if let filerand_core::corpus::CellOutcome::Error { message, .. } = &cell.outcome {
                eprintln!("  {} {}: {message}", result.entry(cell).path.display(), cell.test_id);
            }
        }
    }
    if let Some(path) = &a.save_run {
        result.save(path)?;
    }
    let opts = ReportOptions {
        format: a.out.format,
        granularity: a.granularity,
        include_timing: !a.no_timing,
    };
    write_output(&a.out, &emit_report(&result, &opts)?)?;

    if a.phase_gate {
        let rows = phase_gate(&result, &settings.gate)?;
        let table = gate_table(&rows);
        let criteria = &settings.gate;
        let gate_text = render(
            &table,
            a.out.format,
            json!({ "phase_gate": criteria, "type_accuracy": rows.iter().map(|r| (r.test_id.as_str(), &r.type_accuracy)).collect::<std::collections::BTreeMap<_, _>>() }),
        )?;
        let mut stdout = std::io::stdout().lock();
        let header = if a.out.format == ReportFormat::Text { "\nphase gate\n" } else { "" };
        write!(stdout, "{header}{gate_text}").map_err(|e| io_failure(Path::new("<stdout>"), e))?;
    }
    Ok(if errors > 0 { 3 } else { 0 })
}

fn report(a: ReportArgs) -> Result<u8, Failure> {
    let result = RunResult::load(&a.run)?;
    let opts = ReportOptions {
        format: a.out.format,
        granularity: a.granularity,
        include_timing: !a.no_timing,
    };
    write_output(&a.out, &emit_report(&result, &opts)?)?;
    Ok(0)
}
