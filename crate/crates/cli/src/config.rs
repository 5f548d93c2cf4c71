//! Optional key-value configuration file. Flags always win over file
//! values; the `RANKSHIFT_OUT` environment variable supplies a default
//! output directory when neither a flag nor the file names one.

use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Deserialize;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub server: Option<String>,
    pub out_dir: Option<PathBuf>,
    pub workers: Option<usize>,
    pub cutoff_min: Option<usize>,
    pub cutoff_max: Option<usize>,
    pub cutoff_count: Option<usize>,
    pub collapse_runs: Option<bool>,
    pub contractions: Option<PathBuf>,
    pub bins: Option<usize>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> anyhow::Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let raw = std::fs::read_to_string(path)
            .with_context(|| format!("reading config file {}", path.display()))?;
        toml::from_str(&raw).with_context(|| format!("parsing config file {}", path.display()))
    }

    /// flag > file > environment variable.
    pub fn resolve_out_dir(&self, flag: Option<PathBuf>) -> Option<PathBuf> {
        flag.or_else(|| self.out_dir.clone())
            .or_else(|| std::env::var_os("RANKSHIFT_OUT").map(PathBuf::from))
    }
}
