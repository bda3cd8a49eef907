//! Run manifests: every command records what it produced and from which
//! seeds, so no artifact exists without one.

use serde::Serialize;
use std::path::{Path, PathBuf};

#[derive(Debug, Serialize)]
pub struct StageTime {
    pub stage: String,
    pub seconds: f64,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config_hash: String,
    pub code_version: String,
    /// (seed, stream) pairs actually consumed, one per chain.
    pub seeds: Vec<(u64, u64)>,
    pub files: Vec<String>,
    pub wall_times: Vec<StageTime>,
}

impl RunManifest {
    pub fn new(command: &str, config_hash: &str) -> RunManifest {
        RunManifest {
            command: command.to_string(),
            config_hash: config_hash.to_string(),
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            seeds: Vec::new(),
            files: Vec::new(),
            wall_times: Vec::new(),
        }
    }

    pub fn add_file(&mut self, root: &Path, path: &Path) {
        let rel = path.strip_prefix(root).unwrap_or(path);
        self.files.push(rel.display().to_string());
    }

    pub fn add_time(&mut self, stage: &str, seconds: f64) {
        self.wall_times.push(StageTime { stage: stage.to_string(), seconds });
    }

    pub fn write(&self, root: &Path) -> std::io::Result<PathBuf> {
        let path = root.join(format!("manifest_{}.json", self.command));
        let json = serde_json::to_string_pretty(self).expect("manifest serializes");
        std::fs::write(&path, json + "\n")?;
        Ok(path)
    }
}
