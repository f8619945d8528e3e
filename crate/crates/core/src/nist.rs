//! The six SP 800-22 tests used for file classification: Frequency, Block
//! Frequency, Runs, Longest Run of Ones, Serial and Cumulative Sums.
//!
//! All tests consume a [`BitSequence`] (MSB-first). With
//! [`LengthPolicy::Enforce`] the SP 800-22 minimum input lengths apply;
//! [`LengthPolicy::Relaxed`] lifts them so the short worked examples from the
//! standard can be checked.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::bytestream::{bits_msb_first, BitSequence, ByteSample};
use crate::entropy::elapsed_since;
use crate::error::{Error, Result};
use crate::stat_math::{erfc, normal_cdf, regularized_gamma_q, ProbabilityValue};
use crate::test_id::{Flag, TestId};

pub const MIN_BITS: usize = 100;
pub const LONGEST_RUN_MIN_BITS: usize = 128;
pub const BLOCK_FREQUENCY_MIN_M: usize = 20;
pub const DEFAULT_BLOCK_FREQUENCY_M: usize = 128;
pub const MAX_SERIAL_M: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LengthPolicy {
    #[default]
    Enforce,
    Relaxed,
}

impl LengthPolicy {
    fn require(self, needed: usize, got: usize) -> Result<()> {
        match self {
            LengthPolicy::Enforce if got < needed => Err(Error::bits_needed(needed, got)),
            _ if got == 0 => Err(Error::EmptySample),
            _ => Ok(()),
        }
    }
}

/// Tunable parameters of the parameterised tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NistParams {
    pub block_frequency_m: usize,
    /// `None` picks [`default_serial_m`] from the input length.
    pub serial_m: Option<usize>,
}

impl Default for NistParams {
    fn default() -> Self {
        Self {
            block_frequency_m: DEFAULT_BLOCK_FREQUENCY_M,
            serial_m: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NistTestResult {
    pub test_id: TestId,
    /// One value, except Serial (`[p1, p2]`) and CumulativeSums
    /// (`[forward, backward]`).
    pub p_values: Vec<ProbabilityValue>,
    pub parameters: BTreeMap<String, u64>,
    pub elapsed_seconds: f64,
    pub bytes_processed: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<Flag>,
}

impl NistTestResult {
    fn new(test_id: TestId, p_values: Vec<ProbabilityValue>, bits: &BitSequence, started: Instant) -> Self {
        let flags = if p_values.iter().any(|p| p.underflowed()) {
            vec![Flag::Underflow]
        } else {
            Vec::new()
        };
        Self {
            test_id,
            p_values,
            parameters: BTreeMap::new(),
            elapsed_seconds: elapsed_since(started),
            bytes_processed: bits.len().div_ceil(8) as u64,
            flags,
        }
    }

    fn with_param(mut self, name: &str, value: usize) -> Self {
        self.parameters.insert(name.to_owned(), value as u64);
        self
    }

    pub fn min_p(&self) -> f64 {
        self.p_values
            .iter()
            .map(|p| p.value())
            .fold(f64::INFINITY, f64::min)
    }
}

/// SP 800-22 test 2.1.
pub fn frequency_monobit(bits: &BitSequence, policy: LengthPolicy) -> Result<NistTestResult> {
    let started = Instant::now();
    let n = bits.len();
    policy.require(MIN_BITS, n)?;
    let ones = bits.count_ones() as f64;
    let s = 2.0 * ones - n as f64;
    let s_obs = s.abs() / (n as f64).sqrt();
    let p = ProbabilityValue::new(erfc(s_obs / std::f64::consts::SQRT_2)?)?;
    Ok(NistTestResult::new(TestId::Frequency, vec![p], bits, started).with_param("n", n))
}

/// SP 800-22 test 2.2. Trailing bits that do not fill a block are discarded.
pub fn block_frequency(bits: &BitSequence, m: usize, policy: LengthPolicy) -> Result<NistTestResult> {
    let started = Instant::now();
    let n = bits.len();
    policy.require(MIN_BITS, n)?;
    if m == 0 || (policy == LengthPolicy::Enforce && m < BLOCK_FREQUENCY_MIN_M) {
        return Err(Error::Parameter(format!(
            "block frequency M must be >= {BLOCK_FREQUENCY_MIN_M}, got {m}"
        )));
    }
    let blocks = n / m;
    if blocks == 0 {
        return Err(Error::bits_needed(m, n));
    }
    let mut chi_sq = 0.0;
    for j in 0..blocks {
        let ones = (j * m..(j + 1) * m).filter(|&i| bits.get(i) == 1).count();
        let d = ones as f64 / m as f64 - 0.5;
        chi_sq += d * d;
    }
    chi_sq *= 4.0 * m as f64;
    let p = regularized_gamma_q(blocks as f64 / 2.0, chi_sq / 2.0)?;
    Ok(NistTestResult::new(TestId::BlockFrequency, vec![p], bits, started)
        .with_param("M", m)
        .with_param("N", blocks))
}

/// SP 800-22 test 2.3. A failed proportion prerequisite yields `p = 0` and
/// [`Flag::PrerequisiteFailed`] rather than an error.
pub fn runs(bits: &BitSequence, policy: LengthPolicy) -> Result<NistTestResult> {
    let started = Instant::now();
    let n = bits.len();
    policy.require(MIN_BITS, n)?;
    let nf = n as f64;
    let pi = bits.count_ones() as f64 / nf;
    let tau = 2.0 / nf.sqrt();
    if (pi - 0.5).abs() >= tau {
        let mut r = NistTestResult::new(TestId::Runs, vec![ProbabilityValue::ZERO], bits, started)
            .with_param("n", n);
        r.flags = vec![Flag::PrerequisiteFailed];
        return Ok(r);
    }
    let mut runs = 1usize;
    let mut prev = bits.get(0);
    for i in 1..n {
        let b = bits.get(i);
        if b != prev {
            runs += 1;
            prev = b;
        }
    }
    let spread = pi * (1.0 - pi);
    let arg = (runs as f64 - 2.0 * nf * spread).abs() / (2.0 * (2.0 * nf).sqrt() * spread);
    let p = ProbabilityValue::new(erfc(arg)?)?;
    Ok(NistTestResult::new(TestId::Runs, vec![p], bits, started)
        .with_param("n", n)
        .with_param("V", runs))
}

struct LongestRunTable {
    block: usize,
    /// Longest-run value mapped to the lowest category.
    low: usize,
    probabilities: &'static [f64],
}

const LONGEST_RUN_8: LongestRunTable = LongestRunTable {
    block: 8,
    low: 1,
    probabilities: &[0.2148, 0.3672, 0.2305, 0.1875],
};
const LONGEST_RUN_128: LongestRunTable = LongestRunTable {
    block: 128,
    low: 4,
    probabilities: &[0.1174, 0.2430, 0.2493, 0.1752, 0.1027, 0.1124],
};
const LONGEST_RUN_10000: LongestRunTable = LongestRunTable {
    block: 10_000,
    low: 10,
    probabilities: &[0.0882, 0.2092, 0.2483, 0.1933, 0.1208, 0.0675, 0.0727],
};

fn longest_run_table(n: usize) -> &'static LongestRunTable {
    if n < 6272 {
        &LONGEST_RUN_8
    } else if n < 750_000 {
        &LONGEST_RUN_128
    } else {
        &LONGEST_RUN_10000
    }
}

/// SP 800-22 test 2.4. Block size and category table follow the input length.
pub fn longest_run_of_ones(bits: &BitSequence, _policy: LengthPolicy) -> Result<NistTestResult> {
    let started = Instant::now();
    let n = bits.len();
    // The smallest category table needs 128 bits regardless of policy.
    if n < LONGEST_RUN_MIN_BITS {
        return Err(Error::bits_needed(LONGEST_RUN_MIN_BITS, n));
    }
    let table = longest_run_table(n);
    let categories = table.probabilities.len();
    let blocks = n / table.block;
    let mut observed = vec![0u64; categories];
    for j in 0..blocks {
        let (mut run, mut longest) = (0usize, 0usize);
        for i in j * table.block..(j + 1) * table.block {
            if bits.get(i) == 1 {
                run += 1;
                longest = longest.max(run);
            } else {
                run = 0;
            }
        }
        let category = longest.saturating_sub(table.low).min(categories - 1);
        observed[category] += 1;
    }
    let nb = blocks as f64;
    let chi_sq: f64 = observed
        .iter()
        .zip(table.probabilities)
        .map(|(&v, &pi)| {
            let e = nb * pi;
            (v as f64 - e).powi(2) / e
        })
        .sum();
    let k = categories - 1;
    let p = regularized_gamma_q(k as f64 / 2.0, chi_sq / 2.0)?;
    Ok(NistTestResult::new(TestId::LongestRuns, vec![p], bits, started)
        .with_param("M", table.block)
        .with_param("K", k)
        .with_param("N", blocks))
}

/// Serial-test block length used when none is configured.
pub fn default_serial_m(n_bits: usize) -> usize {
    if n_bits >= 1 << 20 {
        MAX_SERIAL_M
    } else {
        let log2 = usize::BITS as usize - 1 - n_bits.max(1).leading_zeros() as usize;
        log2.saturating_sub(2).clamp(2, MAX_SERIAL_M)
    }
}

/// `ψ²_k` for k = m, m-1, m-2 from one circular pass of m-bit windows.
fn psi_squared(bits: &BitSequence, m: usize) -> [f64; 3] {
    let n = bits.len();
    let mask = (1usize << m) - 1;
    let mut counts = vec![0u64; 1 << m];
    let mut window = 0usize;
    for i in 0..m - 1 {
        window = (window << 1) | bits.get(i % n) as usize;
    }
    for i in 0..n {
        window = ((window << 1) | bits.get((i + m - 1) % n) as usize) & mask;
        counts[window] += 1;
    }
    let mut out = [0.0; 3];
    for (slot, k) in [m, m - 1, m - 2].into_iter().enumerate() {
        if k == 0 {
            continue;
        }
        let fold = m - k;
        let mut sub = vec![0u64; 1 << k];
        for (pattern, &c) in counts.iter().enumerate() {
            sub[pattern >> fold] += c;
        }
        let sum_sq: u128 = sub.iter().map(|&c| u128::from(c) * u128::from(c)).sum();
        out[slot] = (1u64 << k) as f64 / n as f64 * sum_sq as f64 - n as f64;
    }
    out
}

/// SP 800-22 test 2.11. Returns `[p1, p2]`.
pub fn serial_test(bits: &BitSequence, m: usize, policy: LengthPolicy) -> Result<NistTestResult> {
    let started = Instant::now();
    let n = bits.len();
    policy.require(MIN_BITS, n)?;
    if !(2..=24).contains(&m) {
        return Err(Error::Parameter(format!("serial m must be in [2, 24], got {m}")));
    }
    if policy == LengthPolicy::Enforce {
        let limit = (usize::BITS - 1 - n.leading_zeros()) as usize - 2;
        if m > limit {
            return Err(Error::Parameter(format!(
                "serial m={m} exceeds floor(log2 n) - 2 = {limit} for n={n}"
            )));
        }
    }
    let [psi_m, psi_m1, psi_m2] = psi_squared(bits, m);
    let del1 = (psi_m - psi_m1).max(0.0);
    let del2 = (psi_m - 2.0 * psi_m1 + psi_m2).max(0.0);
    let p1 = regularized_gamma_q(2f64.powi(m as i32 - 2), del1 / 2.0)?;
    let p2 = regularized_gamma_q(2f64.powi(m as i32 - 3), del2 / 2.0)?;
    Ok(NistTestResult::new(TestId::Serial, vec![p1, p2], bits, started).with_param("m", m))
}

fn cusum_p_value(n: usize, z: usize) -> Result<ProbabilityValue> {
    if z == 0 {
        // Only reachable for empty input; no excursion at all.
        return Ok(ProbabilityValue::ONE);
    }
    let (n_i, z_i) = (n as i64, z as i64);
    let root_n = (n as f64).sqrt();
    let zf = z as f64;
    let ratio = n_i / z_i;
    // Integer division truncating toward zero, as in the reference code.
    let mut sum1 = 0.0;
    for k in (-ratio + 1) / 4..=(ratio - 1) / 4 {
        let k = k as f64;
        sum1 += normal_cdf((4.0 * k + 1.0) * zf / root_n)? - normal_cdf((4.0 * k - 1.0) * zf / root_n)?;
    }
    let mut sum2 = 0.0;
    for k in (-ratio - 3) / 4..=(ratio - 1) / 4 {
        let k = k as f64;
        sum2 += normal_cdf((4.0 * k + 3.0) * zf / root_n)? - normal_cdf((4.0 * k + 1.0) * zf / root_n)?;
    }
    ProbabilityValue::new(1.0 - sum1 + sum2)
}

/// SP 800-22 test 2.13. Returns `[forward, backward]`.
pub fn cumulative_sums(bits: &BitSequence, policy: LengthPolicy) -> Result<NistTestResult> {
    let started = Instant::now();
    let n = bits.len();
    policy.require(MIN_BITS, n)?;
    let step = |b: u8| if b == 1 { 1i64 } else { -1 };
    let (mut s, mut forward) = (0i64, 0i64);
    for i in 0..n {
        s += step(bits.get(i));
        forward = forward.max(s.abs());
    }
    let (mut s, mut backward) = (0i64, 0i64);
    for i in (0..n).rev() {
        s += step(bits.get(i));
        backward = backward.max(s.abs());
    }
    let p_forward = cusum_p_value(n, forward as usize)?;
    let p_backward = cusum_p_value(n, backward as usize)?;
    let mut r = NistTestResult::new(
        TestId::CumulativeSums,
        vec![p_forward, p_backward],
        bits,
        started,
    );
    r.parameters.insert("z_forward".into(), forward as u64);
    r.parameters.insert("z_backward".into(), backward as u64);
    Ok(r)
}

/// Runs one NIST test on the MSB-first bits of `sample`.
pub fn run_nist_test(test: TestId, sample: &ByteSample, params: &NistParams) -> Result<NistTestResult> {
    let started = Instant::now();
    let bits = bits_msb_first(sample)?;
    let policy = LengthPolicy::Enforce;
    let mut r = match test {
        TestId::Frequency => frequency_monobit(&bits, policy)?,
        TestId::BlockFrequency => block_frequency(&bits, params.block_frequency_m, policy)?,
        TestId::Runs => runs(&bits, policy)?,
        TestId::LongestRuns => longest_run_of_ones(&bits, policy)?,
        TestId::Serial => {
            let m = params.serial_m.unwrap_or_else(|| default_serial_m(bits.len()));
            serial_test(&bits, m, policy)?
        }
        TestId::CumulativeSums => cumulative_sums(&bits, policy)?,
        other => return Err(Error::Parameter(format!("{other} is not a NIST test"))),
    };
    r.elapsed_seconds = elapsed_since(started);
    r.bytes_processed = sample.length_bytes() as u64;
    Ok(r)
}
