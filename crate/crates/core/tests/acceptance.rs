//! One PASS/FAIL/SKIP line per acceptance criterion, with the measured
//! runtime against its limit. Exits non-zero if any criterion fails.

mod common;

use std::path::Path;
use std::time::{Duration, Instant};

use filerand_core::bytestream::Histogram256;
use filerand_core::classifier::{classify_majority, classify_single, classify_with_override, Decision, MAJORITY_TESTS};
use filerand_core::corpus::synth::MANIFEST_FILE;
use filerand_core::corpus::{
    emit_report, load_manifest, phase_gate, run_battery, synthesize_corpus, BatteryConfig, Category,
    GateReason, Granularity, PhaseGateCriteria, ReportFormat, ReportOptions, RunResult, SynthSpec,
};
use filerand_core::entropy::{
    arithmetic_mean, chi_square_uniformity, kl_divergence_uniform, monte_carlo_pi, serial_correlation,
    shannon_entropy,
};
use filerand_core::metrics::{f1_from, throughput};
use filerand_core::nist::{block_frequency, cumulative_sums, frequency_monobit, runs, serial_test, LengthPolicy};
use filerand_core::{
    accuracy, f1, precision, recall, run_math_test, run_nist_test, tally, BitSequence, ByteSample,
    ConfusionCounts, Error, MathTestResult, NistParams, TestId, ThresholdConfig, Verdict,
};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

type Outcome = Result<String, String>;
/// Number, name, time limit in seconds, body.
type Criterion = (u32, &'static str, u64, Box<dyn Fn() -> Status>);

enum Status {
    Pass(String),
    Fail(String),
    Skip(String),
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn close(got: f64, want: f64, tol: f64, what: &str) -> Result<(), String> {
    check((got - want).abs() <= tol, || format!("{what}: got {got}, want {want} ± {tol}"))
}

fn sample(bytes: impl Into<Vec<u8>>) -> ByteSample {
    ByteSample::from_bytes("mem", bytes.into())
}

fn hist(bytes: &[u8]) -> Histogram256 {
    let mut counts = [0u64; 256];
    for &b in bytes {
        counts[b as usize] += 1;
    }
    Histogram256::from_counts(counts)
}

fn stat(r: filerand_core::Result<MathTestResult>) -> f64 {
    r.unwrap().statistic
}

fn criterion_1() -> Outcome {
    let cycle: Vec<u8> = (0..=255).collect();
    close(stat(shannon_entropy(&hist(&cycle))), 8.0, 1e-12, "H(uniform cycle)")?;
    close(stat(shannon_entropy(&hist(&[0; 1024]))), 0.0, 0.0, "H(constant)")?;
    close(stat(shannon_entropy(&hist(&[0, 0, 1, 1]))), 1.0, 1e-12, "H([0,0,1,1])")?;

    let chi = chi_square_uniformity(&hist(&cycle)).unwrap();
    close(chi.statistic, 0.0, 0.0, "chi2(cycle)")?;
    close(chi.auxiliary.unwrap(), 1.0, 1e-12, "p(cycle)")?;
    let chi = chi_square_uniformity(&hist(&[0; 256])).unwrap();
    close(chi.statistic, 65280.0, 1e-9, "chi2(256 zeros)")?;
    check(chi.auxiliary.unwrap() < 1e-300, || "p(256 zeros) not ~0".into())?;
    let twice: Vec<u8> = cycle.iter().chain(&cycle).copied().collect();
    close(stat(chi_square_uniformity(&hist(&twice))), 0.0, 0.0, "chi2(cycle x2)")?;

    let mc = monte_carlo_pi(&sample([0u8; 6])).unwrap();
    close(mc.statistic, 4.0, 0.0, "pi(origin)")?;
    close(mc.auxiliary.unwrap(), 4.0 - std::f64::consts::PI, 1e-15, "pi error(origin)")?;
    close(stat(monte_carlo_pi(&sample([0xFFu8; 6]))), 0.0, 0.0, "pi(corner)")?;
    let mut two = vec![0u8; 6];
    two.extend([0xFF; 6]);
    close(stat(monte_carlo_pi(&sample(two))), 2.0, 0.0, "pi(origin+corner)")?;

    close(stat(arithmetic_mean(&hist(&cycle))), 127.5, 0.0, "mean(cycle)")?;
    close(stat(arithmetic_mean(&hist(&[0; 10]))), 0.0, 0.0, "mean(zeros)")?;
    close(stat(arithmetic_mean(&hist(&[10, 20, 30]))), 20.0, 0.0, "mean([10,20,30])")?;

    check(
        matches!(serial_correlation(&sample([0x55u8; 1000])), Err(Error::DegenerateSequence(_))),
        || "constant input not degenerate".into(),
    )?;
    let alternating: Vec<u8> = (0..1000).map(|i| if i % 2 == 0 { 0 } else { 0xFF }).collect();
    close(stat(serial_correlation(&sample(alternating))), -1.0, 1e-12, "scc(alternating)")?;
    close(stat(serial_correlation(&sample([1u8, 2, 3, 4]))), -0.2, 1e-12, "scc([1,2,3,4])")?;

    close(stat(kl_divergence_uniform(&hist(&cycle))), 0.0, 1e-12, "KL(cycle)")?;
    close(stat(kl_divergence_uniform(&hist(&[7; 50]))), 8.0, 1e-12, "KL(constant)")?;
    close(stat(kl_divergence_uniform(&hist(&[0, 0, 1, 1]))), 7.0, 1e-12, "KL([0,0,1,1])")?;

    let mut rng = ChaCha20Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let mut counts = [0u64; 256];
        let support = rng.gen_range(1..=256);
        for c in counts.iter_mut().take(support) {
            *c = rng.gen_range(0..5000);
        }
        counts[0] += 1;
        let h = Histogram256::from_counts(counts);
        let d = stat(kl_divergence_uniform(&h));
        let e = stat(shannon_entropy(&h));
        worst = worst.max((d - (8.0 - e)).abs());
    }
    check(worst <= 1e-10, || format!("KL vs 8-H off by {worst:e}"))?;
    Ok(format!("all examples exact; max |D-(8-H)| = {worst:.1e} over 1000 histograms"))
}

fn criterion_2() -> Outcome {
    const R: LengthPolicy = LengthPolicy::Relaxed;
    let bits = |s: &str| BitSequence::parse(s).unwrap();
    let p = |r: filerand_core::Result<filerand_core::NistTestResult>, i: usize| r.unwrap().p_values[i].value();
    let tol = 1e-5;
    close(p(frequency_monobit(&bits("1011010101"), R), 0), 0.527089, tol, "monobit")?;
    close(p(block_frequency(&bits("0110011010"), 3, R), 0), 0.801252, tol, "block frequency")?;
    close(p(runs(&bits("1001101011"), R), 0), 0.147232, tol, "runs")?;
    let serial = serial_test(&bits("0011011101"), 3, R).unwrap();
    close(serial.p_values[0].value(), 0.808792, tol, "serial p1")?;
    close(serial.p_values[1].value(), 0.670320, tol, "serial p2")?;
    close(p(cumulative_sums(&bits("1011010111"), R), 0), 0.411659, tol, "cusum forward")?;
    Ok("6 worked values within 1e-5".into())
}

fn criterion_3() -> Outcome {
    const SEQUENCES: u64 = 500;
    const BYTES: usize = 1 << 17; // 1 Mbit
    let cfg = ThresholdConfig::default();
    let params = NistParams::default();
    let rejections: Vec<[u32; 6]> = (0..SEQUENCES)
        .into_par_iter()
        .map(|seed| {
            let mut rng = ChaCha20Rng::seed_from_u64(0x5eed_0000 + seed);
            let mut bytes = vec![0u8; BYTES];
            rng.fill_bytes(&mut bytes);
            let s = sample(bytes);
            TestId::NIST.map(|t| {
                let r = run_nist_test(t, &s, &params).expect("1 Mbit is long enough");
                u32::from(!classify_single(&r.into(), &cfg).verdict.is_encrypted())
            })
        })
        .collect();
    let mut summary = Vec::new();
    let mut failed = Vec::new();
    for (k, t) in TestId::NIST.iter().enumerate() {
        let rate = rejections.iter().map(|r| r[k]).sum::<u32>() as f64 / SEQUENCES as f64;
        summary.push(format!("{t}={rate:.3}"));
        if !(0.002..=0.03).contains(&rate) {
            failed.push(format!("{t} rejection rate {rate:.3} outside [0.002, 0.03]"));
        }
    }
    if failed.is_empty() {
        Ok(summary.join(" "))
    } else {
        Err(format!("{}; {}", failed.join("; "), summary.join(" ")))
    }
}

/// Straight-from-the-formula references, sharing no code with the library.
mod reference {
    pub fn shannon(b: &[u8]) -> f64 {
        let n = b.len() as f64;
        (0..256)
            .map(|v| b.iter().filter(|&&x| x as usize == v).count() as f64 / n)
            .filter(|&p| p > 0.0)
            .map(|p| -p * p.log2())
            .sum()
    }

    pub fn chi_square(b: &[u8]) -> f64 {
        let e = b.len() as f64 / 256.0;
        (0..256)
            .map(|v| {
                let o = b.iter().filter(|&&x| x as usize == v).count() as f64;
                (o - e).powi(2) / e
            })
            .sum()
    }

    pub fn monte_carlo(b: &[u8]) -> f64 {
        let r = 16777215.0f64;
        let (mut inside, mut total) = (0u32, 0u32);
        for g in b.chunks_exact(6) {
            let x = g[0] as f64 * 65536.0 + g[1] as f64 * 256.0 + g[2] as f64;
            let y = g[3] as f64 * 65536.0 + g[4] as f64 * 256.0 + g[5] as f64;
            total += 1;
            if x * x + y * y <= r * r {
                inside += 1;
            }
        }
        4.0 * inside as f64 / total as f64
    }

    pub fn mean(b: &[u8]) -> f64 {
        b.iter().map(|&x| x as f64).sum::<f64>() / b.len() as f64
    }

    pub fn serial_correlation(b: &[u8]) -> f64 {
        let n = b.len() as f64;
        let u: Vec<f64> = b.iter().map(|&x| x as f64).collect();
        let s: f64 = u.iter().sum();
        let s2: f64 = u.iter().map(|x| x * x).sum();
        let lag: f64 = (0..u.len()).map(|i| u[i] * u[(i + 1) % u.len()]).sum();
        (n * lag - s * s) / (n * s2 - s * s)
    }

    pub fn kl(b: &[u8]) -> f64 {
        let n = b.len() as f64;
        (0..256)
            .map(|v| b.iter().filter(|&&x| x as usize == v).count() as f64 / n)
            .filter(|&p| p > 0.0)
            .map(|p| p * (p * 256.0).log2())
            .sum()
    }
}

fn criterion_4() -> Outcome {
    let mut worst = (0.0f64, None);
    for seed in 0..100u64 {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let mut buf = vec![0u8; 4096];
        // mix uniform and skewed buffers so every statistic is far from 0
        if seed % 2 == 0 {
            rng.fill_bytes(&mut buf);
        } else {
            for b in buf.iter_mut() {
                *b = (rng.gen::<u8>() / 3).wrapping_add(rng.gen_range(0..40));
            }
        }
        let s = sample(buf.clone());
        let refs: [(TestId, f64); 6] = [
            (TestId::Shannon, reference::shannon(&buf)),
            (TestId::ChiSquare, reference::chi_square(&buf)),
            (TestId::MonteCarloPi, reference::monte_carlo(&buf)),
            (TestId::Mean, reference::mean(&buf)),
            (TestId::SerialCorrelation, reference::serial_correlation(&buf)),
            (TestId::KullbackLeibler, reference::kl(&buf)),
        ];
        for (t, want) in refs {
            let got = run_math_test(t, &s).unwrap().statistic;
            let rel = if want == 0.0 { got.abs() } else { ((got - want) / want).abs() };
            if rel > worst.0 {
                worst = (rel, Some(t));
            }
        }
    }
    let which = worst.1.map_or("none".to_owned(), |t| t.to_string());
    check(worst.0 <= 1e-9, || format!("{which} relative error {:e}", worst.0))?;
    Ok(format!("max relative error {:.1e} (worst: {which}) over 100 buffers x 6 statistics", worst.0))
}

fn workers() -> usize {
    std::thread::available_parallelism().map_or(4, |n| n.get())
}

fn battery(dir: &Path, tests: &[TestId], workers: usize) -> RunResult {
    let manifest = load_manifest(dir.join(MANIFEST_FILE)).unwrap();
    let mut cfg = BatteryConfig::new(tests.to_vec());
    cfg.workers = workers;
    run_battery(&manifest, &cfg).unwrap()
}

fn criterion_5() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let spec: SynthSpec = [
        (Category::PseudoEncrypted, (500, 65536)),
        (Category::EntropyCoded, (500, 65536)),
        (Category::Text, (500, 65536)),
    ]
    .into();
    synthesize_corpus(&spec, 5, dir.path()).map_err(|e| e.to_string())?;
    let r = battery(dir.path(), &[TestId::Shannon, TestId::ChiSquare], workers());
    check(r.error_count() == 0, || format!("{} error cells", r.error_count()))?;

    let of = |test, tag: &'static str| r.counts_where(test, move |e| e.type_tag == tag);
    let pe = of(TestId::Shannon, "PSEUDO-ENCRYPTED");
    let tpr = pe.tp as f64 / (pe.tp + pe.fn_) as f64;
    let text = of(TestId::Shannon, "TEXT");
    let tnr = text.tn as f64 / (text.tn + text.fp) as f64;
    let split = |test| {
        let c = r.counts_where(test, |e| e.type_tag == "PSEUDO-ENCRYPTED" || e.type_tag == "ENTROPY-CODED");
        accuracy(&c).unwrap()
    };
    let (shannon, chi) = (split(TestId::Shannon), split(TestId::ChiSquare));
    let detail = format!("shannon TPR={tpr:.3} TNR(text)={tnr:.3}; split accuracy chi={chi:.3} shannon={shannon:.3}");
    check(tpr >= 0.99, || format!("TPR too low: {detail}"))?;
    check(tnr == 1.0, || format!("TNR below 1: {detail}"))?;
    check(chi > shannon, || format!("chi-square does not beat shannon: {detail}"))?;
    Ok(detail)
}

fn math(test_id: TestId, statistic: f64, auxiliary: Option<f64>) -> MathTestResult {
    MathTestResult {
        test_id,
        statistic,
        auxiliary,
        elapsed_seconds: 1e-6,
        bytes_processed: 1,
        flags: vec![],
    }
}

fn criterion_6() -> Outcome {
    let cfg = ThresholdConfig::default();
    for mask in 0u32..32 {
        let results: Vec<MathTestResult> = MAJORITY_TESTS
            .iter()
            .enumerate()
            .map(|(i, &t)| {
                let enc = mask >> i & 1 == 1;
                match t {
                    TestId::Shannon => math(t, if enc { 7.99 } else { 6.0 }, None),
                    TestId::ChiSquare => math(t, 250.0, Some(if enc { 0.5 } else { 0.001 })),
                    TestId::Mean => math(t, if enc { 127.4 } else { 90.0 }, None),
                    TestId::MonteCarloPi => math(t, if enc { 3.145 } else { 3.3 }, None),
                    _ => math(t, if enc { 0.0002 } else { 0.3 }, None),
                }
            })
            .collect();
        // each input classifies as intended on its own
        for (i, r) in results.iter().enumerate() {
            let v = classify_single(&r.clone().into(), &cfg).verdict;
            check(v.is_encrypted() == (mask >> i & 1 == 1), || format!("fixture {i} wrong for {mask:05b}"))?;
        }
        let d = classify_majority(&results, &cfg).map_err(|e| e.to_string())?;
        check(d.verdict.is_encrypted() == (mask.count_ones() >= 3), || {
            format!("majority wrong for {mask:05b}")
        })?;
    }

    let mut rng = ChaCha20Rng::seed_from_u64(6);
    for batch in 0..10_000 {
        let size = rng.gen_range(1..20);
        let mut primary_pos = 0;
        let mut combined_pos = 0;
        for _ in 0..size {
            let primary = Decision {
                verdict: Verdict::from_bool(rng.gen()),
                contributing: vec![],
            };
            let c: f64 = if rng.gen() { rng.gen_range(-0.003..0.003) } else { rng.gen_range(-1.0..1.0) };
            let d = classify_with_override(&primary, &math(TestId::SerialCorrelation, c, None), &cfg)
                .map_err(|e| e.to_string())?;
            check(!d.verdict.is_encrypted() || primary.verdict.is_encrypted(), || {
                format!("batch {batch}: override produced a new Encrypted")
            })?;
            primary_pos += primary.verdict.is_encrypted() as u32;
            combined_pos += d.verdict.is_encrypted() as u32;
        }
        check(combined_pos <= primary_pos, || format!("batch {batch}: positives grew"))?;
    }
    Ok("32/32 majority cases; 10000 override batches subset-preserving".into())
}

fn criterion_7() -> Outcome {
    let c = |tp, tn, fp, fn_| ConfusionCounts { tp, tn, fp, fn_ };
    use Verdict::{Encrypted as E, NotEncrypted as N};
    check(tally(&[(E, E), (N, N)]) == c(1, 1, 0, 0), || "tally [(E,E),(N,N)]".into())?;
    check(tally(&[(E, N)]).fp == 1 && tally(&[(N, E)]).fn_ == 1, || "tally fp/fn".into())?;
    close(accuracy(&c(1, 1, 1, 1)).unwrap(), 0.5, 1e-15, "accuracy symmetric")?;
    close(accuracy(&c(9, 9, 1, 1)).unwrap(), 0.9, 1e-15, "accuracy 9/9/1/1")?;
    close(accuracy(&c(0, 0, 1, 1)).unwrap(), 0.0, 0.0, "accuracy all wrong")?;
    check(matches!(accuracy(&c(0, 0, 0, 0)), Err(Error::EmptyCell)), || "empty accuracy".into())?;
    close(recall(&c(1, 0, 0, 0)).unwrap(), 1.0, 0.0, "recall")?;
    check(matches!(precision(&c(0, 3, 0, 2)), Err(Error::UndefinedMetric(_))), || "precision undefined".into())?;
    close(precision(&c(3, 0, 1, 0)).unwrap(), 0.75, 1e-15, "precision")?;
    close(f1(&c(3, 10, 1, 2)).unwrap(), 2.0 / 3.0, 1e-15, "f1")?;
    close(throughput(10 << 20, 2.0).unwrap().throughput_mb_per_s, 5.0, 1e-12, "throughput")?;

    let rows: [(&str, f64, f64, f64); 11] = [
        ("BlockFrequency", 0.71, 0.86, 0.78),
        ("Frequency", 0.77, 0.78, 0.77),
        ("Sums", 0.75, 0.91, 0.82),
        ("Longest Runs", 0.78, 0.77, 0.78),
        ("Runs", 0.76, 0.89, 0.82),
        ("Sp-800 Serial", 0.73, 0.97, 0.83),
        ("Shannon", 0.86, 0.50, 0.63),
        ("Chi-Square", 0.74, 0.86, 0.79),
        ("Mean", 0.77, 0.70, 0.73),
        ("Monte Carlo", 0.58, 0.64, 0.61),
        ("Serial Byte", 0.23, 0.91, 0.37),
    ];
    let mut worst = 0.0f64;
    for (name, r, p, printed) in rows {
        let f = f1_from(p, r).unwrap();
        worst = worst.max((f - printed).abs());
        close(f, printed, 0.01, name)?;
    }
    Ok(format!("fixtures exact; 11 published F1 rows within {worst:.4}"))
}

fn criterion_8() -> Outcome {
    let a = tempfile::tempdir().map_err(|e| e.to_string())?;
    let b = tempfile::tempdir().map_err(|e| e.to_string())?;
    let spec: SynthSpec = Category::ALL.into_iter().map(|c| (c, (25, 65536))).collect();
    synthesize_corpus(&spec, 8, a.path()).map_err(|e| e.to_string())?;
    synthesize_corpus(&spec, 8, b.path()).map_err(|e| e.to_string())?;
    let one = battery(a.path(), &TestId::ALL, 1);
    let eight = battery(a.path(), &TestId::ALL, 8);
    let again = battery(b.path(), &TestId::ALL, 8);
    let mut compared = 0;
    for g in [Granularity::PerFile, Granularity::PerType, Granularity::PerTest, Granularity::Combined] {
        for f in [ReportFormat::Csv, ReportFormat::Json, ReportFormat::Text] {
            let opts = ReportOptions {
                format: f,
                granularity: g,
                include_timing: false,
            };
            let r1 = emit_report(&one, &opts).map_err(|e| e.to_string())?;
            check(r1 == emit_report(&eight, &opts).unwrap(), || format!("workers 1 vs 8 differ: {g} {f}"))?;
            check(r1 == emit_report(&again, &opts).unwrap(), || format!("re-run differs: {g} {f}"))?;
            compared += 1;
        }
    }
    let manifest = load_manifest(a.path().join(MANIFEST_FILE)).unwrap();
    for e in &manifest.entries {
        let x = std::fs::read(a.path().join(&e.path)).unwrap();
        let y = std::fs::read(b.path().join(&e.path)).unwrap();
        check(x == y, || format!("{} differs between syntheses", e.path.display()))?;
    }
    Ok(format!("{compared} reports identical across workers and re-runs; 100 files byte-identical"))
}

fn criterion_9() -> Outcome {
    use common::{as_specs, gate_fixture, ten_types};
    let criteria = PhaseGateCriteria::default();
    let row = |run: &RunResult| {
        let rows = phase_gate(run, &criteria).unwrap();
        (rows[0].qualified, rows[0].reason)
    };
    let mb = 1u64 << 20;
    let nine = gate_fixture(TestId::Shannon, &as_specs(&ten_types(9)), mb, 0.01);
    check(row(&nine) == (true, GateReason::Qualified), || "9/10 types should qualify".into())?;
    let eight = gate_fixture(TestId::Shannon, &as_specs(&ten_types(8)), mb, 0.01);
    check(row(&eight) == (false, GateReason::Coverage), || "8/10 types should fail on coverage".into())?;
    let slow = gate_fixture(TestId::Shannon, &as_specs(&ten_types(10)), mb, 2.0);
    check(row(&slow) == (false, GateReason::Throughput), || "slow test should fail on throughput".into())?;
    let boundary: Vec<(String, usize, usize)> =
        (0..20).map(|t| (format!("t{t}"), 5, if t < 17 { 4 } else { 3 })).collect();
    let at = gate_fixture(TestId::Shannon, &as_specs(&boundary), mb, 1.0);
    check(row(&at) == (true, GateReason::Qualified), || "accuracy 0.80 on 0.85 of types at 1 MB/s should qualify".into())?;
    let below: Vec<(String, usize, usize)> =
        (0..20).map(|t| (format!("t{t}"), 5, if t < 16 { 4 } else { 3 })).collect();
    let under = gate_fixture(TestId::Shannon, &as_specs(&below), mb, 1.0);
    check(row(&under) == (false, GateReason::Coverage), || "accuracy 0.80 on 0.80 of types should fail".into())?;
    Ok("qualify/disqualify at 0.80/0.85 and the throughput floor".into())
}

fn criterion_10() -> Result<Status, String> {
    let Ok(path) = std::env::var("FILERAND_NAPIERONE_MANIFEST") else {
        return Ok(Status::Skip("FILERAND_NAPIERONE_MANIFEST not set".into()));
    };
    let manifest = load_manifest(&path).map_err(|e| e.to_string())?;
    let mut cfg = BatteryConfig::new(vec![TestId::Serial, TestId::Shannon]);
    cfg.workers = workers();
    let r = run_battery(&manifest, &cfg).map_err(|e| e.to_string())?;
    let acc = |t| accuracy(&r.counts_where(t, |_| true)).unwrap_or(f64::NAN);
    let (serial, shannon) = (acc(TestId::Serial), acc(TestId::Shannon));
    let detail = format!("serial={serial:.3} shannon={shannon:.3} over {} files", manifest.entries.len());
    if (serial - 0.93).abs() <= 0.03 && (shannon - 0.75).abs() <= 0.03 {
        Ok(Status::Pass(detail))
    } else {
        Ok(Status::Fail(detail))
    }
}

fn main() {
    let plain = |f: fn() -> Outcome| {
        move || match f() {
            Ok(d) => Status::Pass(d),
            Err(d) => Status::Fail(d),
        }
    };
    let criteria: Vec<Criterion> = vec![
        (1, "math-test conformance", 5, Box::new(plain(criterion_1))),
        (2, "NIST conformance", 1, Box::new(plain(criterion_2))),
        (3, "NIST rejection rate at alpha=0.01", 120, Box::new(plain(criterion_3))),
        (4, "oracle equivalence", 10, Box::new(plain(criterion_4))),
        (5, "desk-scale classification", 180, Box::new(plain(criterion_5))),
        (6, "combiner properties", 5, Box::new(plain(criterion_6))),
        (7, "metrics fixtures", 1, Box::new(plain(criterion_7))),
        (8, "pipeline determinism", 180, Box::new(plain(criterion_8))),
        (9, "phase-gate fixture", 1, Box::new(plain(criterion_9))),
        (
            10,
            "full-corpus reproduction",
            u64::MAX,
            Box::new(|| criterion_10().unwrap_or_else(Status::Fail)),
        ),
    ];
    let mut failures = 0;
    for (n, name, limit, run) in criteria {
        let started = Instant::now();
        let status = std::panic::catch_unwind(std::panic::AssertUnwindSafe(run))
            .unwrap_or_else(|_| Status::Fail("panicked".into()));
        let took = started.elapsed();
        let limit_text = if limit == u64::MAX { "none".to_owned() } else { format!("{limit}s") };
        let status = match status {
            Status::Pass(d) if took > Duration::from_secs(limit) => {
                Status::Fail(format!("over time limit; {d}"))
            }
            s => s,
        };
        let (word, detail) = match status {
            Status::Pass(d) => ("PASS", d),
            Status::Fail(d) => {
                failures += 1;
                ("FAIL", d)
            }
            Status::Skip(d) => ("SKIP", d),
        };
        println!(
            "criterion {n:>2} {word} [{:.2}s / limit {limit_text}] {name}: {detail}",
            took.as_secs_f64()
        );
    }
    if failures > 0 {
        eprintln!("{failures} criteria failed");
        std::process::exit(1);
    }
}
