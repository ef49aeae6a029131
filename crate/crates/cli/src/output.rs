use std::path::Path;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

/// Bad flags or values; exits with status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(msg: String) -> anyhow::Error {
    UsageError(msg).into()
}

/// Twelve significant digits, locale independent.
pub fn num(x: f64) -> String {
    format!("{x:.11e}")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialCount {
    pub point: usize,
    pub decoded: usize,
    pub failures: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    /// Arguments after the program name.
    pub command_line: Vec<String>,
    pub spec: serde_json::Value,
    pub seed: Option<u64>,
    pub version: String,
    pub wall_time_s: f64,
    pub outputs: Vec<String>,
    pub trials: Vec<TrialCount>,
}

impl Manifest {
    pub fn path_for(out: &Path) -> std::path::PathBuf {
        let mut p = out.as_os_str().to_owned();
        p.push(".manifest.json");
        p.into()
    }

    pub fn load(path: &Path) -> Result<Manifest> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| usage(format!("bad manifest {}: {e}", path.display())))
    }

    pub fn write(&self, out: &Path) -> Result<()> {
        let path = Manifest::path_for(out);
        let body = serde_json::to_string_pretty(self)?;
        std::fs::write(&path, body + "\n").with_context(|| format!("writing {}", path.display()))
    }
}
