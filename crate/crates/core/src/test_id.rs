use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Every randomness test the battery knows how to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestId {
    Shannon,
    ChiSquare,
    MonteCarloPi,
    Mean,
    SerialCorrelation,
    KullbackLeibler,
    Frequency,
    BlockFrequency,
    Runs,
    LongestRuns,
    Serial,
    CumulativeSums,
}

impl TestId {
    pub const MATH: [TestId; 6] = [
        TestId::Shannon,
        TestId::ChiSquare,
        TestId::MonteCarloPi,
        TestId::Mean,
        TestId::SerialCorrelation,
        TestId::KullbackLeibler,
    ];

    pub const NIST: [TestId; 6] = [
        TestId::Frequency,
        TestId::BlockFrequency,
        TestId::Runs,
        TestId::LongestRuns,
        TestId::Serial,
        TestId::CumulativeSums,
    ];

    /// NIST tests first, then the closed-form statistics.
    pub const ALL: [TestId; 12] = [
        TestId::BlockFrequency,
        TestId::Frequency,
        TestId::CumulativeSums,
        TestId::LongestRuns,
        TestId::Runs,
        TestId::Serial,
        TestId::Shannon,
        TestId::ChiSquare,
        TestId::Mean,
        TestId::MonteCarloPi,
        TestId::SerialCorrelation,
        TestId::KullbackLeibler,
    ];

    pub fn is_math(self) -> bool {
        Self::MATH.contains(&self)
    }

    pub fn is_nist(self) -> bool {
        !self.is_math()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            TestId::Shannon => "shannon",
            TestId::ChiSquare => "chi_square",
            TestId::MonteCarloPi => "monte_carlo_pi",
            TestId::Mean => "mean",
            TestId::SerialCorrelation => "serial_correlation",
            TestId::KullbackLeibler => "kullback_leibler",
            TestId::Frequency => "frequency",
            TestId::BlockFrequency => "block_frequency",
            TestId::Runs => "runs",
            TestId::LongestRuns => "longest_runs",
            TestId::Serial => "serial",
            TestId::CumulativeSums => "cumulative_sums",
        }
    }

    /// Parses a comma-separated list. `all`, `math` and `nist` expand to
    /// their groups; duplicates are dropped, first occurrence wins.
    pub fn parse_list(text: &str) -> Result<Vec<TestId>, Error> {
        let mut out: Vec<TestId> = Vec::new();
        for token in text.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let group: Vec<TestId> = match token {
                "all" => Self::ALL.to_vec(),
                "math" => Self::MATH.to_vec(),
                "nist" => Self::NIST.to_vec(),
                other => vec![other.parse()?],
            };
            for id in group {
                if !out.contains(&id) {
                    out.push(id);
                }
            }
        }
        if out.is_empty() {
            return Err(Error::Parameter("empty test list".into()));
        }
        Ok(out)
    }
}

impl fmt::Display for TestId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TestId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .iter()
            .copied()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::Parameter(format!("unknown test {s:?}")))
    }
}

/// Side information attached to a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flag {
    /// Expected count per chi-square bin is below 5.
    LowSampleCount,
    /// The runs test proportion prerequisite failed; p is reported as 0.
    PrerequisiteFailed,
    /// A p-value fell below the underflow floor and was clamped to 0.
    Underflow,
}
