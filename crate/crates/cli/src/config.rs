//! `key = value` configuration for the `fer` subcommand.
//!
//! ```text
//! # Example 1 waterfall
//! interleaver   = qpp 256 159 64
//! ebn0          = 0.0:0.2:1.4
//! seed          = 7
//! iterations    = 8
//! target_errors = 100
//! max_frames    = 100000
//! decoder       = log-map      # optional, or max-log-map
//! noiseless     = false        # optional, true forces Eb/N0 = inf
//! ```
//!
//! `ebn0` accepts `start:step:stop` (inclusive), a comma-separated list, or
//! `inf`.

use std::collections::BTreeMap;

use anyhow::{anyhow, bail, Context, Result};
use qpp_core::turbo::DecoderKind;
use serde::Serialize;

use crate::source::Source;

pub const REQUIRED_KEYS: [&str; 6] = ["interleaver", "ebn0", "seed", "iterations", "target_errors", "max_frames"];
const OPTIONAL_KEYS: [&str; 2] = ["decoder", "noiseless"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FerConfig {
    pub interleaver: Source,
    pub ebn0_db: Vec<f64>,
    pub seed: u64,
    pub iterations: usize,
    pub target_errors: u64,
    pub max_frames: u64,
    pub decoder: DecoderKind,
    pub noiseless: bool,
}

/// Raised when required keys are absent; carries every missing key.
#[derive(Debug)]
pub struct MissingKeys(pub Vec<&'static str>);

impl std::fmt::Display for MissingKeys {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "missing config keys: {}", self.0.join(", "))
    }
}

impl std::error::Error for MissingKeys {}

fn parse_pairs(text: &str) -> Result<BTreeMap<String, String>> {
    let mut pairs = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("line {}: expected key = value, got {line:?}", i + 1))?;
        let key = k.trim().to_owned();
        if !REQUIRED_KEYS.contains(&key.as_str()) && !OPTIONAL_KEYS.contains(&key.as_str()) {
            bail!("line {}: unknown key {key:?}", i + 1);
        }
        if pairs.insert(key.clone(), v.trim().to_owned()).is_some() {
            bail!("line {}: duplicate key {key:?}", i + 1);
        }
    }
    Ok(pairs)
}

fn parse_num(text: &str) -> Result<f64> {
    match text.trim() {
        "inf" | "+inf" => Ok(f64::INFINITY),
        t => {
            let x: f64 = t.parse().with_context(|| format!("malformed Eb/N0 value {t:?}"))?;
            if !x.is_finite() {
                bail!("malformed Eb/N0 value {t:?}");
            }
            Ok(x)
        }
    }
}

/// Grid values are snapped to 1e-9 dB so that `0:0.2:1` yields 0.6, not
/// 0.6000000000000001.
fn snap(x: f64) -> f64 {
    if x.is_finite() {
        (x * 1e9).round() / 1e9
    } else {
        x
    }
}

pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    let grid = match parts.as_slice() {
        [start, step, stop] => {
            let (a, h, b) = (parse_num(start)?, parse_num(step)?, parse_num(stop)?);
            if !(a.is_finite() && h.is_finite() && b.is_finite()) || h <= 0.0 || b < a {
                bail!("Eb/N0 range {text:?} needs finite start <= stop and a positive step");
            }
            let count = ((b - a) / h + 1e-9).floor() as usize + 1;
            (0..count).map(|i| snap(a + i as f64 * h)).collect()
        }
        [list] => list
            .split(',')
            .map(|t| parse_num(t).map(snap))
            .collect::<Result<Vec<_>>>()?,
        _ => bail!("malformed Eb/N0 grid {text:?}"),
    };
    if grid.is_empty() {
        bail!("empty Eb/N0 grid");
    }
    Ok(grid)
}

fn parse_bool(text: &str) -> Result<bool> {
    match text {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => bail!("malformed boolean {text:?}"),
    }
}

impl FerConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let pairs = parse_pairs(text)?;
        let missing: Vec<&'static str> = REQUIRED_KEYS
            .iter()
            .copied()
            .filter(|k| !pairs.contains_key(*k))
            .collect();
        if !missing.is_empty() {
            return Err(MissingKeys(missing).into());
        }
        let get = |k: &str| pairs[k].as_str();
        let noiseless = pairs.get("noiseless").map(|v| parse_bool(v)).transpose()?.unwrap_or(false);
        let mut ebn0_db = parse_grid(get("ebn0"))?;
        if noiseless {
            ebn0_db = vec![f64::INFINITY];
        }
        Ok(Self {
            interleaver: Source::parse_str(get("interleaver"))?,
            ebn0_db,
            seed: get("seed").parse().context("malformed seed")?,
            iterations: get("iterations").parse().context("malformed iterations")?,
            target_errors: get("target_errors").parse().context("malformed target_errors")?,
            max_frames: get("max_frames").parse().context("malformed max_frames")?,
            decoder: pairs
                .get("decoder")
                .map(|v| v.parse::<DecoderKind>())
                .transpose()
                .map_err(|e| anyhow!("{e}"))?
                .unwrap_or(DecoderKind::LogMap),
            noiseless,
        })
    }
}
