use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const VERSION: &str = env!("GEOWALK_VERSION");

/// Resolved settings of a run, after defaults are applied.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub burn_in: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thin: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chains: Option<usize>,
}

/// Record of one run. `args` holds the exact arguments and is what
/// `geowalk replay` re-executes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polytope: Option<PathBuf>,
    pub config: ConfigEcho,
    pub outputs: Vec<PathBuf>,
    pub version: String,
    /// Absent when timing is disabled, so manifests are reproducible.
    pub wall_time_s: Option<f64>,
    pub args: serde_json::Value,
}

impl RunManifest {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::input(&path.display().to_string(), e))?;
        serde_json::from_str(&text).map_err(|e| CliError::input("manifest", e))
    }

    pub fn write(&self, path: &Path) -> CliResult<()> {
        hessian_walk::io::write_json(path, self).map_err(|e| CliError::input("writing manifest", e))
    }
}

/// Absolute form of an input path, so a manifest replays from any
/// working directory.
pub fn absolute(path: &Path) -> PathBuf {
    std::fs::canonicalize(path).unwrap_or_else(|_| path.to_path_buf())
}

/// `dir/samples.csv` → `dir/samples_chain3.csv`.
pub fn suffixed(path: &Path, index: usize) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    let name = match path.extension().and_then(|e| e.to_str()) {
        Some(ext) => format!("{stem}_chain{index}.{ext}"),
        None => format!("{stem}_chain{index}"),
    };
    path.with_file_name(name)
}

/// Same file name under `dir`.
pub fn relocate(path: &Path, dir: &Path) -> PathBuf {
    dir.join(path.file_name().unwrap_or(path.as_os_str()))
}

/// `samples.csv` with `tag = "stats.json"` → `samples.stats.json`.
pub fn sibling(path: &Path, tag: &str) -> PathBuf {
    path.with_extension(tag)
}
