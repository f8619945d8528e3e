//! Closed-form byte statistics: Shannon entropy, chi-square uniformity,
//! Monte Carlo π, arithmetic mean, serial correlation and KL divergence.
//!
//! Monte Carlo π and the serial correlation coefficient follow the
//! conventions of Walker's `ent` utility.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::bytestream::{ByteSample, Histogram256};
use crate::error::{Error, Result};
use crate::stat_math::chi_square_survival;
use crate::test_id::{Flag, TestId};

/// Below this many bytes the expected chi-square bin count drops under 5.
pub const CHI_SQUARE_MIN_RELIABLE: u64 = 256 * 5;

/// Mean of uniformly distributed bytes.
pub const UNIFORM_MEAN: f64 = 127.5;

const MONTE_CARLO_GROUP: usize = 6;
const MONTE_CARLO_RADIUS: u64 = (1 << 24) - 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MathTestResult {
    pub test_id: TestId,
    /// Bits/byte for Shannon, χ² for ChiSquare, π estimate for MonteCarloPi,
    /// byte value for Mean, coefficient for SerialCorrelation, bits for KL.
    pub statistic: f64,
    /// Chi-square p-value, or absolute π error for MonteCarloPi.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub auxiliary: Option<f64>,
    pub elapsed_seconds: f64,
    pub bytes_processed: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<Flag>,
}

impl MathTestResult {
    fn new(test_id: TestId, statistic: f64, bytes: u64, started: Instant) -> Self {
        Self {
            test_id,
            statistic,
            auxiliary: None,
            elapsed_seconds: elapsed_since(started),
            bytes_processed: bytes,
            flags: Vec::new(),
        }
    }
}

pub(crate) fn elapsed_since(started: Instant) -> f64 {
    started.elapsed().as_secs_f64().max(1e-9)
}

fn probabilities(hist: &Histogram256) -> impl Iterator<Item = f64> + '_ {
    let total = hist.total() as f64;
    hist.counts()
        .iter()
        .filter(|&&c| c > 0)
        .map(move |&c| c as f64 / total)
}

pub fn shannon_entropy(hist: &Histogram256) -> Result<MathTestResult> {
    let started = Instant::now();
    hist.require_non_empty()?;
    let h: f64 = -probabilities(hist).map(|p| p * p.log2()).sum::<f64>();
    // -0.0 for single-symbol inputs
    let h = h.max(0.0);
    Ok(MathTestResult::new(TestId::Shannon, h, hist.total(), started))
}

pub fn chi_square_uniformity(hist: &Histogram256) -> Result<MathTestResult> {
    let started = Instant::now();
    hist.require_non_empty()?;
    let expected = hist.total() as f64 / 256.0;
    let stat: f64 = hist
        .counts()
        .iter()
        .map(|&o| {
            let d = o as f64 - expected;
            d * d / expected
        })
        .sum();
    let p = chi_square_survival(stat, 255)?;
    let mut r = MathTestResult::new(TestId::ChiSquare, stat, hist.total(), started);
    r.auxiliary = Some(p.value());
    if hist.total() < CHI_SQUARE_MIN_RELIABLE {
        r.flags.push(Flag::LowSampleCount);
    }
    if p.underflowed() {
        r.flags.push(Flag::Underflow);
    }
    Ok(r)
}

/// Each 6-byte group is a point: two big-endian 24-bit coordinates. Trailing
/// bytes that do not fill a group are ignored.
pub fn monte_carlo_pi(sample: &ByteSample) -> Result<MathTestResult> {
    let started = Instant::now();
    let bytes = sample.bytes();
    if bytes.len() < MONTE_CARLO_GROUP {
        return Err(Error::bytes_needed(MONTE_CARLO_GROUP, bytes.len()));
    }
    let radius_sq = MONTE_CARLO_RADIUS * MONTE_CARLO_RADIUS;
    let mut points = 0u64;
    let mut inside = 0u64;
    for group in bytes.chunks_exact(MONTE_CARLO_GROUP) {
        let x = u64::from_be_bytes([0, 0, 0, 0, 0, group[0], group[1], group[2]]);
        let y = u64::from_be_bytes([0, 0, 0, 0, 0, group[3], group[4], group[5]]);
        points += 1;
        if x * x + y * y <= radius_sq {
            inside += 1;
        }
    }
    let estimate = 4.0 * inside as f64 / points as f64;
    let mut r = MathTestResult::new(TestId::MonteCarloPi, estimate, bytes.len() as u64, started);
    r.auxiliary = Some((estimate - std::f64::consts::PI).abs());
    Ok(r)
}

pub fn arithmetic_mean(hist: &Histogram256) -> Result<MathTestResult> {
    let started = Instant::now();
    hist.require_non_empty()?;
    let sum: u128 = hist
        .counts()
        .iter()
        .enumerate()
        .map(|(v, &c)| v as u128 * c as u128)
        .sum();
    let mean = sum as f64 / hist.total() as f64;
    Ok(MathTestResult::new(TestId::Mean, mean, hist.total(), started))
}

/// Circular lag-1 correlation, including the `U[n-1]·U[0]` wraparound term.
/// Sums are accumulated exactly in integers.
pub fn serial_correlation(sample: &ByteSample) -> Result<MathTestResult> {
    let started = Instant::now();
    let bytes = sample.bytes();
    if bytes.len() < 2 {
        return Err(Error::bytes_needed(2, bytes.len()));
    }
    let n = bytes.len() as i128;
    let mut sum = 0i128;
    let mut sum_sq = 0i128;
    let mut sum_lag = 0i128;
    for (i, &u) in bytes.iter().enumerate() {
        let u = i128::from(u);
        let next = i128::from(bytes[(i + 1) % bytes.len()]);
        sum += u;
        sum_sq += u * u;
        sum_lag += u * next;
    }
    let numerator = n * sum_lag - sum * sum;
    let denominator = n * sum_sq - sum * sum;
    if denominator == 0 {
        return Err(Error::DegenerateSequence("constant byte sequence has zero variance"));
    }
    let c = (numerator as f64 / denominator as f64).clamp(-1.0, 1.0);
    Ok(MathTestResult::new(
        TestId::SerialCorrelation,
        c,
        bytes.len() as u64,
        started,
    ))
}

/// `D(p ‖ uniform)` in bits, `p` the empirical byte distribution.
pub fn kl_divergence_uniform(hist: &Histogram256) -> Result<MathTestResult> {
    let started = Instant::now();
    hist.require_non_empty()?;
    let q = 1.0 / 256.0;
    let d: f64 = probabilities(hist).map(|p| p * (p / q).log2()).sum();
    Ok(MathTestResult::new(
        TestId::KullbackLeibler,
        d.max(0.0),
        hist.total(),
        started,
    ))
}

/// Runs one closed-form test on a sample, building the histogram as needed.
pub fn run_math_test(test: TestId, sample: &ByteSample) -> Result<MathTestResult> {
    let started = Instant::now();
    sample.require_non_empty()?;
    let hist = || crate::bytestream::histogram_of(sample.bytes());
    let mut r = match test {
        TestId::Shannon => shannon_entropy(&hist())?,
        TestId::ChiSquare => chi_square_uniformity(&hist())?,
        TestId::MonteCarloPi => monte_carlo_pi(sample)?,
        TestId::Mean => arithmetic_mean(&hist())?,
        TestId::SerialCorrelation => serial_correlation(sample)?,
        TestId::KullbackLeibler => kl_divergence_uniform(&hist())?,
        other => return Err(Error::Parameter(format!("{other} is not a byte statistic"))),
    };
    r.elapsed_seconds = elapsed_since(started);
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bytestream::byte_histogram;
    use proptest::prelude::*;

    fn sample(bytes: Vec<u8>) -> ByteSample {
        ByteSample::from_bytes("mem", bytes)
    }

    fn hist(bytes: &[u8]) -> Histogram256 {
        byte_histogram(&sample(bytes.to_vec())).unwrap()
    }

    fn cycle() -> Vec<u8> {
        (0..=255).collect()
    }

    #[test]
    fn shannon_examples() {
        assert_eq!(shannon_entropy(&hist(&[0; 1024])).unwrap().statistic, 0.0);
        assert!((shannon_entropy(&hist(&cycle())).unwrap().statistic - 8.0).abs() < 1e-12);
        assert!((shannon_entropy(&hist(&[0, 0, 1, 1])).unwrap().statistic - 1.0).abs() < 1e-12);
        let empty = Histogram256::from_counts([0; 256]);
        assert!(matches!(shannon_entropy(&empty), Err(Error::EmptySample)));
    }

    #[test]
    fn chi_square_examples() {
        let r = chi_square_uniformity(&hist(&cycle())).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.auxiliary, Some(1.0));
        assert!(r.flags.contains(&Flag::LowSampleCount));

        // E_i = 1: 255 bins contribute 1 each, bin 0 contributes 255^2.
        let r = chi_square_uniformity(&hist(&[0; 256])).unwrap();
        assert_eq!(r.statistic, 65280.0);
        assert!(r.auxiliary.unwrap() < 1e-300);

        let twice: Vec<u8> = cycle().into_iter().chain(cycle()).collect();
        let r = chi_square_uniformity(&hist(&twice)).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.auxiliary, Some(1.0));

        let big: Vec<u8> = (0..1280u32).map(|i| i as u8).collect();
        assert!(!chi_square_uniformity(&hist(&big))
            .unwrap()
            .flags
            .contains(&Flag::LowSampleCount));
    }

    #[test]
    fn monte_carlo_examples() {
        let r = monte_carlo_pi(&sample(vec![0; 6])).unwrap();
        assert_eq!(r.statistic, 4.0);
        assert!((r.auxiliary.unwrap() - (4.0 - std::f64::consts::PI)).abs() < 1e-15);

        assert_eq!(monte_carlo_pi(&sample(vec![0xFF; 6])).unwrap().statistic, 0.0);

        let mut two = vec![0u8; 6];
        two.extend([0xFF; 6]);
        assert_eq!(monte_carlo_pi(&sample(two.clone())).unwrap().statistic, 2.0);
        // trailing partial group ignored
        two.extend([0xAB; 5]);
        assert_eq!(monte_carlo_pi(&sample(two)).unwrap().statistic, 2.0);

        assert!(matches!(
            monte_carlo_pi(&sample(vec![0; 5])),
            Err(Error::InsufficientData { needed: 6, got: 5, .. })
        ));
    }

    #[test]
    fn monte_carlo_radius_is_inclusive() {
        // (R, 0) lies exactly on the circle.
        let on_circle = vec![0xFF, 0xFF, 0xFF, 0, 0, 0];
        assert_eq!(monte_carlo_pi(&sample(on_circle)).unwrap().statistic, 4.0);
    }

    #[test]
    fn mean_examples() {
        assert_eq!(arithmetic_mean(&hist(&cycle())).unwrap().statistic, 127.5);
        assert_eq!(arithmetic_mean(&hist(&[0; 10])).unwrap().statistic, 0.0);
        assert_eq!(arithmetic_mean(&hist(&[10, 20, 30])).unwrap().statistic, 20.0);
    }

    #[test]
    fn serial_correlation_examples() {
        assert!(matches!(
            serial_correlation(&sample(vec![0x55; 1000])),
            Err(Error::DegenerateSequence(_))
        ));
        let alt: Vec<u8> = (0..64).map(|i| if i % 2 == 0 { 0x00 } else { 0xFF }).collect();
        assert!((serial_correlation(&sample(alt)).unwrap().statistic + 1.0).abs() < 1e-12);
        // n=4: num = 4*(2+6+12+4) - 10^2 = -4, den = 4*30 - 100 = 20.
        let r = serial_correlation(&sample(vec![1, 2, 3, 4])).unwrap();
        assert!((r.statistic + 0.2).abs() < 1e-15);
        assert!(matches!(
            serial_correlation(&sample(vec![7])),
            Err(Error::InsufficientData { .. })
        ));
    }

    #[test]
    fn kl_examples() {
        assert!(kl_divergence_uniform(&hist(&cycle())).unwrap().statistic.abs() < 1e-12);
        assert!((kl_divergence_uniform(&hist(&[9; 100])).unwrap().statistic - 8.0).abs() < 1e-12);
        assert!((kl_divergence_uniform(&hist(&[0, 0, 1, 1])).unwrap().statistic - 7.0).abs() < 1e-12);
    }

    #[test]
    fn order_sensitive_tests_detect_permutation() {
        let sorted: Vec<u8> = (0..600u32).map(|i| (i / 3) as u8).collect();
        let mut shuffled = sorted.clone();
        // deterministic interleave
        shuffled.sort_by_key(|&b| (b.wrapping_mul(73), b));
        let a = serial_correlation(&sample(sorted.clone())).unwrap().statistic;
        let b = serial_correlation(&sample(shuffled.clone())).unwrap().statistic;
        assert_ne!(a, b);
        let a = monte_carlo_pi(&sample(sorted)).unwrap().statistic;
        let b = monte_carlo_pi(&sample(shuffled)).unwrap().statistic;
        assert_ne!(a, b);
    }

    #[test]
    fn run_math_test_rejects_nist_ids() {
        let s = sample(cycle());
        assert!(run_math_test(TestId::Runs, &s).is_err());
        assert_eq!(run_math_test(TestId::Mean, &s).unwrap().statistic, 127.5);
    }

    proptest! {
        #[test]
        fn histogram_tests_are_permutation_invariant(
            bytes in proptest::collection::vec(any::<u8>(), 2..512),
            rot in 0usize..512,
        ) {
            let mut permuted = bytes.clone();
            permuted.reverse();
            let k = rot % permuted.len();
            permuted.rotate_left(k);
            let (h1, h2) = (hist(&bytes), hist(&permuted));
            prop_assert_eq!(shannon_entropy(&h1).unwrap().statistic, shannon_entropy(&h2).unwrap().statistic);
            prop_assert_eq!(chi_square_uniformity(&h1).unwrap().statistic, chi_square_uniformity(&h2).unwrap().statistic);
            prop_assert_eq!(arithmetic_mean(&h1).unwrap().statistic, arithmetic_mean(&h2).unwrap().statistic);
            prop_assert_eq!(kl_divergence_uniform(&h1).unwrap().statistic, kl_divergence_uniform(&h2).unwrap().statistic);
        }

        #[test]
        fn kl_equals_eight_minus_entropy(counts in proptest::collection::vec(0u64..1000, 256)) {
            let mut arr = [0u64; 256];
            arr.copy_from_slice(&counts);
            arr[0] += 1;
            let h = Histogram256::from_counts(arr);
            let d = kl_divergence_uniform(&h).unwrap().statistic;
            let e = shannon_entropy(&h).unwrap().statistic;
            prop_assert!((d - (8.0 - e)).abs() < 1e-10);
        }

        #[test]
        fn statistics_stay_in_bounds(bytes in proptest::collection::vec(any::<u8>(), 6..4096)) {
            let s = sample(bytes.clone());
            let h = hist(&bytes);
            let e = shannon_entropy(&h).unwrap().statistic;
            prop_assert!((0.0..=8.0).contains(&e));
            let d = kl_divergence_uniform(&h).unwrap().statistic;
            prop_assert!((0.0..=8.0).contains(&d));
            let m = arithmetic_mean(&h).unwrap().statistic;
            prop_assert!((0.0..=255.0).contains(&m));
            let pi = monte_carlo_pi(&s).unwrap().statistic;
            prop_assert!((0.0..=4.0).contains(&pi));
            if let Ok(c) = serial_correlation(&s) {
                prop_assert!((-1.0..=1.0).contains(&c.statistic));
            }
        }
    }
}
