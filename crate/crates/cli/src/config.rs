//! Flat TOML run configuration. Every key is optional; command-line flags
//! take precedence over values read from the file.

use std::path::{Path, PathBuf};

use serde::Deserialize;

/// A real number that may also be written as `"inf"`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Real {
    Num(f64),
    Text(String),
}

/// Either `"auto"` or an explicit integer.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum AutoOr {
    Int(u64),
    Text(String),
}

/// One or more SNR points.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Points {
    One(f64),
    Many(Vec<f64>),
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub code: Option<PathBuf>,
    pub decoder: Option<String>,
    pub snr: Option<Points>,
    pub frames: Option<u64>,
    pub min_frames: Option<u64>,
    pub max_frames: Option<u64>,
    pub min_frame_errors: Option<u64>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub lambda_max_ratio: Option<Real>,
    pub eta: Option<AutoOr>,
    pub m_max: Option<Real>,
    pub bias: Option<String>,
    pub bias_frames: Option<u64>,
    pub bias_estimator: Option<String>,
    pub list_size: Option<usize>,
    pub t_max: Option<usize>,
    pub alpha: Option<f64>,
    pub flip_order_max: Option<usize>,
    pub all_zero: Option<bool>,
    pub bin_width: Option<f64>,
    pub bins: Option<usize>,
    pub tail: Option<f64>,
    pub node_limit: Option<u64>,
}

impl FileConfig {
    /// Reads a config file. A relative `code` path is taken relative to the
    /// file's directory.
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        let mut cfg: Self =
            toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        if let (Some(code), Some(dir)) = (&cfg.code, path.parent()) {
            if code.is_relative() {
                cfg.code = Some(dir.join(code));
            }
        }
        Ok(cfg)
    }
}

/// Parses a real that may be `inf`.
pub fn parse_real(s: &str) -> Result<f64, String> {
    match s.trim() {
        "inf" | "+inf" | "infinity" => Ok(f64::INFINITY),
        t => t
            .parse()
            .map_err(|_| format!("expected a number or \"inf\", got {s:?}")),
    }
}

impl Real {
    pub fn value(&self) -> Result<f64, String> {
        match self {
            Real::Num(x) => Ok(*x),
            Real::Text(s) => parse_real(s),
        }
    }
}

/// `None` for auto.
pub fn parse_auto(s: &str) -> Result<Option<u64>, String> {
    match s.trim() {
        "auto" => Ok(None),
        t => t
            .parse()
            .map(Some)
            .map_err(|_| format!("expected \"auto\" or an integer, got {s:?}")),
    }
}

impl AutoOr {
    pub fn value(&self) -> Result<Option<u64>, String> {
        match self {
            AutoOr::Int(x) => Ok(Some(*x)),
            AutoOr::Text(s) => parse_auto(s),
        }
    }
}

impl Points {
    pub fn into_vec(self) -> Vec<f64> {
        match self {
            Points::One(x) => vec![x],
            Points::Many(v) => v,
        }
    }
}

/// How the search bias is obtained.
#[derive(Debug, Clone, PartialEq)]
pub enum BiasSource {
    Zero,
    /// Estimated per SNR point, cached in the output directory.
    Auto,
    File(PathBuf),
}

pub fn parse_bias(s: &str) -> Result<BiasSource, String> {
    match s.trim() {
        "zero" => Ok(BiasSource::Zero),
        "auto" => Ok(BiasSource::Auto),
        t => match t.strip_prefix("profile:") {
            Some(p) if !p.is_empty() => Ok(BiasSource::File(PathBuf::from(p))),
            _ => Err(format!(
                "bias must be \"zero\", \"auto\" or \"profile:<path>\", got {s:?}"
            )),
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Estimator {
    FirstError,
    BitChannel,
}

pub fn parse_estimator(s: &str) -> Result<Estimator, String> {
    match s.trim() {
        "first-error" => Ok(Estimator::FirstError),
        "bit-channel" => Ok(Estimator::BitChannel),
        _ => Err(format!(
            "bias estimator must be \"first-error\" or \"bit-channel\", got {s:?}"
        )),
    }
}
