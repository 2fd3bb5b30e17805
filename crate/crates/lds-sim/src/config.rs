//! Run configuration as a flat key=value file.
//!
//! `#` starts a comment, blank lines are skipped, keys may appear once.
//! Required keys: `matrix`, `detector`, `channel`, `snr_db`. Everything else
//! has a default. See docs/config.md for the full key reference.

use crate::channel::ChannelKind;
use crate::sweep::{DetectorKind, MatrixSource, SimConfig};
use std::collections::HashMap;
use std::fmt;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConfigError {
    Io(String),
    Syntax { line: usize, detail: String },
    UnknownKey { line: usize, key: String },
    DuplicateKey { line: usize, key: String },
    MissingKey { key: &'static str },
    Value { key: &'static str, detail: String },
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Io(detail) => write!(f, "cannot read config: {detail}"),
            ConfigError::Syntax { line, detail } => {
                write!(f, "config line {line}: {detail}")
            }
            ConfigError::UnknownKey { line, key } => {
                write!(f, "config line {line}: unknown key '{key}'")
            }
            ConfigError::DuplicateKey { line, key } => {
                write!(f, "config line {line}: key '{key}' given twice")
            }
            ConfigError::MissingKey { key } => {
                write!(f, "config is missing required key '{key}'")
            }
            ConfigError::Value { key, detail } => {
                write!(f, "config key '{key}': {detail}")
            }
        }
    }
}

impl std::error::Error for ConfigError {}

const KNOWN_KEYS: [&str; 12] = [
    "matrix",
    "amplitudes",
    "channel",
    "detector",
    "snr_db",
    "seed",
    "max_trials",
    "min_bit_errors",
    "pda_max_iters",
    "pda_damping",
    "modulation",
    "execution",
];

fn parse_matrix(value: &str) -> Result<MatrixSource, ConfigError> {
    let bad = |detail: String| ConfigError::Value {
        key: "matrix",
        detail,
    };
    let (kind, arg) = value
        .split_once(':')
        .ok_or_else(|| bad(format!("'{value}' is not of the form order:Q, file:PATH or identity:K")))?;
    match kind {
        "order" => arg
            .parse::<u64>()
            .map(MatrixSource::Order)
            .map_err(|_| bad(format!("'{arg}' is not a valid order"))),
        "identity" => arg
            .parse::<usize>()
            .map(MatrixSource::Identity)
            .map_err(|_| bad(format!("'{arg}' is not a valid user count"))),
        "file" if !arg.is_empty() => Ok(MatrixSource::File(PathBuf::from(arg))),
        "file" => Err(bad("file path is empty".into())),
        other => Err(bad(format!(
            "unknown matrix kind '{other}' (expected order, file or identity)"
        ))),
    }
}

fn parse_float_list(key: &'static str, value: &str) -> Result<Vec<f64>, ConfigError> {
    value
        .split(',')
        .map(str::trim)
        .map(|tok| {
            tok.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| ConfigError::Value {
                    key,
                    detail: format!("'{tok}' is not a finite number"),
                })
        })
        .collect()
}

fn parse_scalar<T: std::str::FromStr>(key: &'static str, value: &str) -> Result<T, ConfigError> {
    value.parse::<T>().map_err(|_| ConfigError::Value {
        key,
        detail: format!("'{value}' is not valid"),
    })
}

/// Parses config text into a runnable sweep description.
pub fn parse_config(text: &str) -> Result<SimConfig, ConfigError> {
    let mut entries: HashMap<&str, (usize, &str)> = HashMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| ConfigError::Syntax {
            line,
            detail: format!("'{content}' is not a key=value pair"),
        })?;
        let key = key.trim();
        let value = value.trim();
        if !KNOWN_KEYS.contains(&key) {
            return Err(ConfigError::UnknownKey {
                line,
                key: key.to_string(),
            });
        }
        if entries.insert(key, (line, value)).is_some() {
            return Err(ConfigError::DuplicateKey {
                line,
                key: key.to_string(),
            });
        }
    }
    let mut value_of = |key: &'static str| entries.remove(key).map(|(_, v)| v);
    fn require<'a>(key: &'static str, v: Option<&'a str>) -> Result<&'a str, ConfigError> {
        v.ok_or(ConfigError::MissingKey { key })
    }

    let matrix = parse_matrix(require("matrix", value_of("matrix"))?)?;
    let detector: DetectorKind = {
        let v = require("detector", value_of("detector"))?;
        v.parse().map_err(|detail| ConfigError::Value {
            key: "detector",
            detail,
        })?
    };
    let channel: ChannelKind = {
        let v = require("channel", value_of("channel"))?;
        v.parse().map_err(|detail| ConfigError::Value {
            key: "channel",
            detail,
        })?
    };
    let snr_db = parse_float_list("snr_db", require("snr_db", value_of("snr_db"))?)?;

    let mut cfg = SimConfig::new(matrix, detector, channel, snr_db);
    if let Some(v) = value_of("amplitudes") {
        let amps = parse_float_list("amplitudes", v)?;
        if let Some(bad) = amps.iter().find(|&&d| d <= 0.0) {
            return Err(ConfigError::Value {
                key: "amplitudes",
                detail: format!("amplitude {bad} is not positive"),
            });
        }
        cfg.amplitudes = Some(amps);
    }
    if let Some(v) = value_of("seed") {
        cfg.seed = parse_scalar("seed", v)?;
    }
    if let Some(v) = value_of("max_trials") {
        cfg.max_trials = parse_scalar("max_trials", v)?;
    }
    if let Some(v) = value_of("min_bit_errors") {
        cfg.min_bit_errors = parse_scalar("min_bit_errors", v)?;
    }
    if let Some(v) = value_of("pda_max_iters") {
        cfg.pda_max_iters = parse_scalar("pda_max_iters", v)?;
    }
    if let Some(v) = value_of("pda_damping") {
        let damping: f64 = parse_scalar("pda_damping", v)?;
        if !(0.0..1.0).contains(&damping) {
            return Err(ConfigError::Value {
                key: "pda_damping",
                detail: format!("{damping} is outside [0, 1)"),
            });
        }
        cfg.pda_damping = damping;
    }
    if let Some(v) = value_of("modulation") {
        if v != "4qam" {
            return Err(ConfigError::Value {
                key: "modulation",
                detail: format!("'{v}' is not supported; only 4qam is implemented"),
            });
        }
    }
    if let Some(v) = value_of("execution") {
        cfg.execution = v.parse().map_err(|detail| ConfigError::Value {
            key: "execution",
            detail,
        })?;
    }
    Ok(cfg)
}

/// parse_config over a file path.
pub fn parse_config_file(path: &Path) -> Result<SimConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::Io(format!("{}: {e}", path.display())))?;
    parse_config(&text)
}
