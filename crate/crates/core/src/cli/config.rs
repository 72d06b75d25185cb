//! Run configuration: a TOML file with `[medium]`, `[confinement]`, `[modes]`,
//! `[rotation]`, `[oracle]`, `[output]` and `[crossings]` sections.
//!
//! ```toml
//! [medium]
//! beta = [0.05, 0.1, 0.2]   # a single number is accepted too
//! mass = 1.0
//!
//! [confinement]
//! r0 = 1.0
//!
//! [modes]
//! n_max = 3
//! l_min = 0
//! l_max = 2
//! k = [0.0, 1.0]
//!
//! [rotation]
//! omega = [0.0, 0.3]
//! omega_range = [-10.0, 10.0]
//!
//! [oracle]
//! bc = "both"
//!
//! [output]
//! format = "csv"
//! path = "-"
//! method = "exact"
//! ```

use serde::Deserialize;
use std::path::{Path, PathBuf};
use thiserror::Error;

pub const MAX_N: u32 = 64;
pub const MAX_ABS_L: i32 = 64;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("config error at `{field}`: {message}")]
    Invalid { field: String, message: String },
    #[error("missing option: {0}")]
    Missing(String),
}

fn invalid(field: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field: field.to_string(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Jsonl,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodChoice {
    Exact,
    Asymptotic,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BcChoice {
    Even,
    Odd,
    Both,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(f64),
    Many(Vec<f64>),
}

impl OneOrMany {
    fn into_vec(self) -> Vec<f64> {
        match self {
            OneOrMany::One(x) => vec![x],
            OneOrMany::Many(v) => v,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    medium: RawMedium,
    confinement: RawConfinement,
    modes: RawModes,
    #[serde(default)]
    rotation: RawRotation,
    #[serde(default)]
    oracle: RawOracle,
    #[serde(default)]
    output: RawOutput,
    #[serde(default)]
    crossings: RawCrossings,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMedium {
    beta: OneOrMany,
    #[serde(default = "one")]
    mass: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfinement {
    r0: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModes {
    n_max: i64,
    #[serde(default)]
    l_min: i64,
    #[serde(default)]
    l_max: i64,
    #[serde(default = "zero_k")]
    k: OneOrMany,
}

fn zero_k() -> OneOrMany {
    OneOrMany::One(0.0)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRotation {
    #[serde(default = "zero_k")]
    omega: OneOrMany,
    omega_range: Option<(f64, f64)>,
}

impl Default for RawRotation {
    fn default() -> Self {
        Self {
            omega: zero_k(),
            omega_range: None,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOracle {
    #[serde(default = "even")]
    bc: BcChoice,
    beta_points: Option<Vec<f64>>,
}

fn even() -> BcChoice {
    BcChoice::Even
}

impl Default for RawOracle {
    fn default() -> Self {
        Self {
            bc: BcChoice::Even,
            beta_points: None,
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    format: Option<OutputFormat>,
    path: Option<String>,
    method: Option<MethodChoice>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCrossings {
    #[serde(default)]
    pairs: Vec<RawPair>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPair {
    a: (i64, i64, f64),
    b: (i64, i64, f64),
}

/// (n, l, k) of one level.
pub type ModeTriple = (u32, i32, f64);

/// Validated configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub betas: Vec<f64>,
    pub mass: f64,
    pub r0: f64,
    pub n_max: u32,
    pub l_min: i32,
    pub l_max: i32,
    pub ks: Vec<f64>,
    pub omegas: Vec<f64>,
    pub omega_range: Option<(f64, f64)>,
    pub bc: BcChoice,
    pub oracle_betas: Vec<f64>,
    pub format: OutputFormat,
    pub path: String,
    pub method: MethodChoice,
    pub pairs: Vec<(ModeTriple, ModeTriple)>,
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml(&text)
    }

    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        validate(raw)
    }

    pub fn ls(&self) -> impl Iterator<Item = i32> {
        self.l_min..=self.l_max
    }
}

fn axis(field: &str, values: Vec<f64>) -> Result<Vec<f64>, ConfigError> {
    if values.is_empty() {
        return Err(invalid(field, "axis is empty"));
    }
    if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
        return Err(invalid(field, format!("values must be finite, got {bad}")));
    }
    let mut v = values;
    v.sort_by(f64::total_cmp);
    v.dedup();
    Ok(v)
}

fn check_betas(field: &str, betas: &[f64], r0: f64) -> Result<(), ConfigError> {
    for &b in betas {
        if !(0.0..1.0).contains(&b) {
            return Err(invalid(
                field,
                format!("beta must satisfy 0 <= beta < 1, got {b}"),
            ));
        }
        if b >= r0 {
            return Err(invalid(
                field,
                format!("beta = {b} must be smaller than confinement.r0 = {r0}"),
            ));
        }
    }
    Ok(())
}

fn check_l(field: &str, l: i64) -> Result<i32, ConfigError> {
    if l.abs() > MAX_ABS_L as i64 {
        return Err(invalid(
            field,
            format!("|l| must be <= {MAX_ABS_L}, got {l}"),
        ));
    }
    Ok(l as i32)
}

fn check_n(field: &str, n: i64) -> Result<u32, ConfigError> {
    if n < 1 || n > MAX_N as i64 {
        return Err(invalid(field, format!("must lie in 1..={MAX_N}, got {n}")));
    }
    Ok(n as u32)
}

fn validate(raw: RawConfig) -> Result<RunConfig, ConfigError> {
    let r0 = raw.confinement.r0;
    if !r0.is_finite() || r0 <= 0.0 {
        return Err(invalid(
            "confinement.r0",
            format!("must be positive, got {r0}"),
        ));
    }
    let mass = raw.medium.mass;
    if !mass.is_finite() || mass <= 0.0 {
        return Err(invalid(
            "medium.mass",
            format!("must be positive, got {mass}"),
        ));
    }
    let betas = axis("medium.beta", raw.medium.beta.into_vec())?;
    check_betas("medium.beta", &betas, r0)?;

    let n_max = check_n("modes.n_max", raw.modes.n_max)?;
    let l_min = check_l("modes.l_min", raw.modes.l_min)?;
    let l_max = check_l("modes.l_max", raw.modes.l_max)?;
    if l_min > l_max {
        return Err(invalid(
            "modes.l_max",
            format!("l_max = {l_max} is below l_min = {l_min}"),
        ));
    }
    let ks = axis("modes.k", raw.modes.k.into_vec())?;

    let omegas = axis("rotation.omega", raw.rotation.omega.into_vec())?;
    if let Some((lo, hi)) = raw.rotation.omega_range {
        if !lo.is_finite() || !hi.is_finite() || lo > hi {
            return Err(invalid(
                "rotation.omega_range",
                format!("need finite lo <= hi, got [{lo}, {hi}]"),
            ));
        }
    }

    let oracle_betas = match raw.oracle.beta_points {
        Some(points) => {
            let v = axis("oracle.beta_points", points)?;
            check_betas("oracle.beta_points", &v, r0)?;
            v
        }
        None => betas.clone(),
    };

    let mut pairs = Vec::with_capacity(raw.crossings.pairs.len());
    for (i, p) in raw.crossings.pairs.iter().enumerate() {
        let triple = |side: &str, (n, l, k): (i64, i64, f64)| -> Result<ModeTriple, ConfigError> {
            let field = format!("crossings.pairs[{i}].{side}");
            let n = check_n(&field, n)?;
            let l = check_l(&field, l)?;
            if !k.is_finite() {
                return Err(invalid(&field, format!("k must be finite, got {k}")));
            }
            Ok((n, l, k))
        };
        pairs.push((triple("a", p.a)?, triple("b", p.b)?));
    }

    Ok(RunConfig {
        betas,
        mass,
        r0,
        n_max,
        l_min,
        l_max,
        ks,
        omegas,
        omega_range: raw.rotation.omega_range,
        bc: raw.oracle.bc,
        oracle_betas,
        format: raw.output.format.unwrap_or(OutputFormat::Csv),
        path: raw.output.path.unwrap_or_else(|| "-".to_string()),
        method: raw.output.method.unwrap_or(MethodChoice::Exact),
        pairs,
    })
}
