//! Plain-text `key = value` configuration.
//!
//! One setting per line; `#` starts a comment; blank lines are ignored.
//! Unknown and repeated keys are rejected with the offending line number.
//!
//! ```text
//! # thresholds
//! shannon_bits_min = 7.95
//! kl_direction = below        # below | above
//! nist_p_rule = all           # all | first | any
//! # phase gate
//! accuracy_min = 0.80
//! coverage_mode = per_type    # per_type | per_file
//! # NIST parameters
//! serial_m = auto             # auto | integer
//! ```

use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::classifier::{KlDirection, MonteCarloMode, PValueRule, ThresholdConfig};
use crate::corpus::gate::{CoverageMode, PhaseGateCriteria};
use crate::error::{Error, Result};
use crate::nist::NistParams;

/// Environment variable naming the default configuration file.
pub const CONFIG_ENV: &str = "FILERAND_CONFIG";

struct Entry<'a> {
    line: usize,
    key: &'a str,
    value: &'a str,
}

fn entries<'a>(text: &'a str, source: &str) -> Result<Vec<Entry<'a>>> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| Error::Validation {
            source_name: source.to_owned(),
            line,
            message: format!("expected `key = value`, found {content:?}"),
        })?;
        let (key, value) = (key.trim(), value.trim());
        if !seen.insert(key) {
            return Err(Error::Validation {
                source_name: source.to_owned(),
                line,
                message: format!("duplicate key {key:?}"),
            });
        }
        out.push(Entry { line, key, value });
    }
    Ok(out)
}

fn bad_value(source: &str, e: &Entry<'_>, expected: &str) -> Error {
    Error::Validation {
        source_name: source.to_owned(),
        line: e.line,
        message: format!("{}: expected {expected}, found {:?}", e.key, e.value),
    }
}

fn real(source: &str, e: &Entry<'_>) -> Result<f64> {
    e.value
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| bad_value(source, e, "a number"))
}

/// Applies a threshold key. Returns `Ok(false)` if the key is not a
/// threshold setting.
fn apply_threshold(cfg: &mut ThresholdConfig, source: &str, e: &Entry<'_>) -> Result<bool> {
    match e.key {
        "nist_p_min" => cfg.nist_p_min = real(source, e)?,
        "shannon_bits_min" => cfg.shannon_bits_min = real(source, e)?,
        "chi_square_p_min" => cfg.chi_square_p_min = real(source, e)?,
        "monte_carlo_abs_err_max" => cfg.monte_carlo_abs_err_max = real(source, e)?,
        "mean_abs_dev_max" => cfg.mean_abs_dev_max = real(source, e)?,
        "serial_corr_abs_max" => cfg.serial_corr_abs_max = real(source, e)?,
        "kl_max" => cfg.kl_max = real(source, e)?,
        "monte_carlo_mode" => {
            cfg.monte_carlo_mode = match e.value {
                "absolute" => MonteCarloMode::Absolute,
                "relative" => MonteCarloMode::Relative,
                _ => return Err(bad_value(source, e, "absolute | relative")),
            }
        }
        "kl_direction" => {
            cfg.kl_direction = match e.value {
                "below" => KlDirection::Below,
                "above" => KlDirection::Above,
                _ => return Err(bad_value(source, e, "below | above")),
            }
        }
        "nist_p_rule" => {
            cfg.nist_p_rule = match e.value {
                "all" => PValueRule::All,
                "first" => PValueRule::First,
                "any" => PValueRule::Any,
                _ => return Err(bad_value(source, e, "all | first | any")),
            }
        }
        _ => return Ok(false),
    }
    Ok(true)
}

fn apply_gate(gate: &mut PhaseGateCriteria, source: &str, e: &Entry<'_>) -> Result<bool> {
    match e.key {
        "accuracy_min" => gate.accuracy_min = real(source, e)?,
        "type_coverage_min" => gate.type_coverage_min = real(source, e)?,
        "throughput_min_mb_s" => gate.throughput_min_mb_s = real(source, e)?,
        "coverage_mode" => {
            gate.coverage_mode = match e.value {
                "per_type" => CoverageMode::PerType,
                "per_file" => CoverageMode::PerFile,
                _ => return Err(bad_value(source, e, "per_type | per_file")),
            }
        }
        _ => return Ok(false),
    }
    Ok(true)
}

fn apply_nist(nist: &mut NistParams, source: &str, e: &Entry<'_>) -> Result<bool> {
    match e.key {
        "block_frequency_m" => {
            nist.block_frequency_m = e
                .value
                .parse()
                .ok()
                .filter(|&m: &usize| m > 0)
                .ok_or_else(|| bad_value(source, e, "a positive integer"))?
        }
        "serial_m" => {
            nist.serial_m = match e.value {
                "auto" => None,
                v => Some(
                    v.parse()
                        .ok()
                        .filter(|&m: &usize| m >= 2)
                        .ok_or_else(|| bad_value(source, e, "auto or an integer >= 2"))?,
                ),
            }
        }
        _ => return Ok(false),
    }
    Ok(true)
}

fn unknown(source: &str, e: &Entry<'_>) -> Error {
    Error::Validation {
        source_name: source.to_owned(),
        line: e.line,
        message: format!("unknown key {:?}", e.key),
    }
}

impl ThresholdConfig {
    /// Parses a file containing only threshold keys.
    pub fn parse(text: &str, source: &str) -> Result<Self> {
        let mut cfg = ThresholdConfig::default();
        for e in entries(text, source)? {
            if !apply_threshold(&mut cfg, source, &e)? {
                return Err(unknown(source, &e));
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Everything a battery run can be configured with.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Settings {
    pub thresholds: ThresholdConfig,
    pub gate: PhaseGateCriteria,
    pub nist: NistParams,
}

impl Settings {
    pub fn parse(text: &str, source: &str) -> Result<Self> {
        let mut s = Settings::default();
        for e in entries(text, source)? {
            let known = apply_threshold(&mut s.thresholds, source, &e)?
                || apply_gate(&mut s.gate, source, &e)?
                || apply_nist(&mut s.nist, source, &e)?;
            if !known {
                return Err(unknown(source, &e));
            }
        }
        s.thresholds.validate()?;
        s.gate.validate()?;
        Ok(s)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Canonical `key = value` rendering; parsing it yields `self` again.
    pub fn to_kv_string(&self) -> String {
        let t = &self.thresholds;
        let g = &self.gate;
        let enum_name = |v: &dyn erased::Named| v.name();
        let mut out = String::new();
        let mut push = |k: &str, v: String| out.push_str(&format!("{k} = {v}\n"));
        push("nist_p_min", t.nist_p_min.to_string());
        push("shannon_bits_min", t.shannon_bits_min.to_string());
        push("chi_square_p_min", t.chi_square_p_min.to_string());
        push("monte_carlo_abs_err_max", t.monte_carlo_abs_err_max.to_string());
        push("mean_abs_dev_max", t.mean_abs_dev_max.to_string());
        push("serial_corr_abs_max", t.serial_corr_abs_max.to_string());
        push("kl_max", t.kl_max.to_string());
        push("monte_carlo_mode", enum_name(&t.monte_carlo_mode).into());
        push("kl_direction", enum_name(&t.kl_direction).into());
        push("nist_p_rule", enum_name(&t.nist_p_rule).into());
        push("accuracy_min", g.accuracy_min.to_string());
        push("type_coverage_min", g.type_coverage_min.to_string());
        push("throughput_min_mb_s", g.throughput_min_mb_s.to_string());
        push("coverage_mode", enum_name(&g.coverage_mode).into());
        push("block_frequency_m", self.nist.block_frequency_m.to_string());
        push(
            "serial_m",
            self.nist.serial_m.map_or_else(|| "auto".into(), |m| m.to_string()),
        );
        out
    }

    /// SHA-256 of the canonical rendering, hex encoded.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.to_kv_string().as_bytes()))
    }
}

mod erased {
    use super::*;

    pub trait Named {
        fn name(&self) -> &'static str;
    }

    impl Named for MonteCarloMode {
        fn name(&self) -> &'static str {
            match self {
                MonteCarloMode::Absolute => "absolute",
                MonteCarloMode::Relative => "relative",
            }
        }
    }

    impl Named for KlDirection {
        fn name(&self) -> &'static str {
            match self {
                KlDirection::Below => "below",
                KlDirection::Above => "above",
            }
        }
    }

    impl Named for PValueRule {
        fn name(&self) -> &'static str {
            match self {
                PValueRule::All => "all",
                PValueRule::First => "first",
                PValueRule::Any => "any",
            }
        }
    }

    impl Named for CoverageMode {
        fn name(&self) -> &'static str {
            match self {
                CoverageMode::PerType => "per_type",
                CoverageMode::PerFile => "per_file",
            }
        }
    }
}
