use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use nilperc::verify::DEFAULT_MASTER_SEED;
use nilperc::{CouplingError, GroupError, HaarError, MetricError, PercolationError};

/// Exit status and message of a failed run.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    ResourceCap(String),
    Failed(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Failed(_) => 1,
            CliError::Usage(_) => 2,
            CliError::ResourceCap(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::ResourceCap(m) => write!(f, "resource cap: {m}"),
            CliError::Failed(m) => write!(f, "{m}"),
        }
    }
}

/// Exit code of a library error: 2 for bad input, 3 for a resource cap,
/// 1 otherwise.
pub trait ExitClass: std::fmt::Display {
    fn exit_code(&self) -> u8;
}

impl ExitClass for GroupError {
    fn exit_code(&self) -> u8 {
        match self {
            GroupError::InvalidSpec(_) | GroupError::DimensionMismatch { .. } | GroupError::NonPositiveScale(_) => 2,
            _ => 1,
        }
    }
}

impl ExitClass for MetricError {
    fn exit_code(&self) -> u8 {
        match self {
            MetricError::Group(e) => e.exit_code(),
            MetricError::ResourceCap { .. } => 3,
            MetricError::InvalidParameters(_)
            | MetricError::NoGenerators
            | MetricError::NotTransversal(_)
            | MetricError::TableTooSmall { .. } => 2,
            _ => 1,
        }
    }
}

impl ExitClass for HaarError {
    fn exit_code(&self) -> u8 {
        match self {
            HaarError::Group(e) => e.exit_code(),
            HaarError::Metric(e) => e.exit_code(),
            HaarError::EnumerationCap { .. } => 3,
            HaarError::BadRegion(_) | HaarError::BadScale(_) => 2,
        }
    }
}

impl ExitClass for PercolationError {
    fn exit_code(&self) -> u8 {
        match self {
            PercolationError::Group(e) => e.exit_code(),
            PercolationError::Metric(e) => e.exit_code(),
            PercolationError::Haar(e) => e.exit_code(),
            PercolationError::WindowTooLarge(_) => 3,
            PercolationError::LambdaTooLarge { .. }
            | PercolationError::BadWindow(_)
            | PercolationError::InsufficientSeeds { .. }
            | PercolationError::InvalidParameters(_) => 2,
            _ => 1,
        }
    }
}

impl ExitClass for CouplingError {
    fn exit_code(&self) -> u8 {
        match self {
            CouplingError::Group(e) => e.exit_code(),
            CouplingError::Metric(e) => e.exit_code(),
            CouplingError::InvalidQuotient(_)
            | CouplingError::InvalidParameters(_)
            | CouplingError::NotTransversal(_)
            | CouplingError::InsufficientSeeds { .. } => 2,
            CouplingError::DistanceBound { .. } => 1,
        }
    }
}

pub fn fail<E: ExitClass>(e: E) -> CliError {
    let m = e.to_string();
    match e.exit_code() {
        2 => CliError::Usage(m),
        3 => CliError::ResourceCap(m),
        _ => CliError::Failed(m),
    }
}

#[derive(Args, Debug, Serialize, Default)]
pub struct GlobalFlags {
    /// JSON object whose keys provide defaults for any flag (snake_case names)
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Master seed; per-job seeds derive from it and the job index
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Cap on enumerated points or window vertices
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cap: Option<usize>,
    /// Directory for data files
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
    /// Worker threads; results do not depend on it
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub jobs: Option<usize>,
}

#[derive(Debug, Deserialize)]
pub struct Global {
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_cap")]
    pub cap: usize,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    #[serde(default)]
    pub jobs: Option<usize>,
}

fn default_seed() -> u64 {
    DEFAULT_MASTER_SEED
}

fn default_cap() -> usize {
    20_000_000
}

fn default_out_dir() -> PathBuf {
    PathBuf::from(".")
}

pub fn load_file(path: Option<&Path>) -> Result<Value, CliError> {
    let Some(path) = path else { return Ok(Value::Object(Map::new())) };
    let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let v: Value =
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("bad config {}: {e}", path.display())))?;
    if !v.is_object() {
        return Err(CliError::Usage("config file must hold a JSON object".into()));
    }
    Ok(v)
}

/// Overlays the flags that were given onto the file's keys and deserializes
/// the result.
pub fn resolve<T: DeserializeOwned>(file: &Value, flags: &impl Serialize) -> Result<T, CliError> {
    let mut merged = file.as_object().cloned().unwrap_or_default();
    if let Value::Object(f) = serde_json::to_value(flags).map_err(|e| CliError::Usage(e.to_string()))? {
        merged.extend(f);
    }
    serde_json::from_value(Value::Object(merged)).map_err(|e| CliError::Usage(e.to_string()))
}

/// First 16 hex digits of the SHA-256 of the command name, master seed and
/// resolved parameters.
pub fn config_hash(command: &str, seed: u64, params: &impl Serialize) -> String {
    let body = serde_json::to_string(params).expect("parameters serialize");
    let digest = Sha256::digest(format!("{command}\n{seed}\n{body}").as_bytes());
    digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

pub struct Output {
    pub dir: PathBuf,
    pub stem: String,
}

impl Output {
    pub fn new(g: &Global, command: &str, params: &impl Serialize) -> Output {
        Output { dir: g.out_dir.clone(), stem: format!("{command}-{}", config_hash(command, g.seed, params)) }
    }

    pub fn path(&self, ext: &str) -> PathBuf {
        self.dir.join(format!("{}.{ext}", self.stem))
    }

    /// Writes one whole file; an explicit `out` replaces the hashed name.
    pub fn write(&self, out: Option<&Path>, ext: &str, contents: &str) -> Result<PathBuf, CliError> {
        let path = match out {
            Some(p) => p.to_path_buf(),
            None => self.path(ext),
        };
        if let Some(parent) = path.parent() {
            if !parent.as_os_str().is_empty() {
                fs::create_dir_all(parent).map_err(|e| CliError::Failed(format!("{}: {e}", parent.display())))?;
            }
        }
        fs::write(&path, contents).map_err(|e| CliError::Failed(format!("{}: {e}", path.display())))?;
        Ok(path)
    }
}

/// Serializes an object record with its `schema_version`.
pub fn record(mut v: Value) -> String {
    if let Value::Object(m) = &mut v {
        m.insert("schema_version".into(), Value::from("1"));
    }
    serde_json::to_string(&v).expect("record serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[derive(Serialize)]
    struct Flags {
        #[serde(skip_serializing_if = "Option::is_none")]
        a: Option<u32>,
        #[serde(skip_serializing_if = "Option::is_none")]
        b: Option<u32>,
    }

    #[derive(Deserialize, Debug, PartialEq)]
    struct Params {
        a: u32,
        #[serde(default)]
        b: u32,
    }

    #[test]
    fn flags_override_file() {
        let file = json!({ "a": 1, "b": 2, "other": true });
        let p: Params = resolve(&file, &Flags { a: Some(5), b: None }).unwrap();
        assert_eq!(p, Params { a: 5, b: 2 });
        let p: Params = resolve(&json!({}), &Flags { a: Some(1), b: None }).unwrap();
        assert_eq!(p.b, 0);
        assert!(resolve::<Params>(&json!({}), &Flags { a: None, b: None }).is_err());
    }

    #[test]
    fn hash_depends_on_every_input() {
        let h = config_hash("ball", 1, &json!({ "r": 3 }));
        assert_eq!(h.len(), 16);
        assert_eq!(h, config_hash("ball", 1, &json!({ "r": 3 })));
        assert_ne!(h, config_hash("ball", 2, &json!({ "r": 3 })));
        assert_ne!(h, config_hash("growth", 1, &json!({ "r": 3 })));
        assert_ne!(h, config_hash("ball", 1, &json!({ "r": 4 })));
    }

    #[test]
    fn records_carry_schema_version() {
        let v: Value = serde_json::from_str(&record(json!({ "x": 1 }))).unwrap();
        assert_eq!(v, json!({ "schema_version": "1", "x": 1 }));
    }

    #[test]
    fn error_classes() {
        let cap = PercolationError::Metric(MetricError::ResourceCap { cap: 5 });
        assert_eq!(fail(cap).code(), 3);
        assert_eq!(fail(HaarError::BadRegion("x".into())).code(), 2);
        assert_eq!(fail(PercolationError::BracketFailure { upper: 4.0 }).code(), 1);
    }
}
