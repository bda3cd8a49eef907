//! Experiment configuration: TOML file plus command-line overrides, with a
//! stable hash that tags every artifact the run emits.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fmt;
use std::path::PathBuf;

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupTag {
    U1,
    Su2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ActionTag {
    Wilson,
    Villain,
}

fn default_chains() -> u32 {
    1
}
fn default_alpha() -> Vec<f64> {
    vec![0.4]
}
fn default_q() -> Vec<f64> {
    vec![3.0]
}
fn default_beta() -> Vec<f64> {
    vec![2.0]
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub group: GroupTag,
    pub action: ActionTag,
    pub n0: u32,
    pub n1: u32,
    pub seed: u64,
    #[serde(default = "default_chains")]
    pub chains: u32,
    pub samples: usize,
    /// Burn-in sweeps per chain; defaults to the library's 10·2^{2N}.
    #[serde(default)]
    pub burnin: Option<u64>,
    /// Sweeps between samples; defaults to the library's 2^{2N}.
    #[serde(default)]
    pub thin: Option<u64>,
    #[serde(default)]
    pub proposal_sigma: Option<f64>,
    #[serde(default)]
    pub truncation: Option<u32>,
    #[serde(default = "default_alpha")]
    pub alpha: Vec<f64>,
    #[serde(default = "default_q")]
    pub q: Vec<f64>,
    #[serde(default = "default_beta")]
    pub beta: Vec<f64>,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn load(path: &std::path::Path) -> Result<ExperimentConfig, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        let cfg: ExperimentConfig = toml::from_str(&text)
            .map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.n0 > self.n1 {
            return Err(ConfigError(format!("n0 = {} exceeds n1 = {}", self.n0, self.n1)));
        }
        if self.n1 > 12 {
            return Err(ConfigError(format!("n1 = {} is out of range (max 12)", self.n1)));
        }
        for &a in &self.alpha {
            if !(a > 0.0 && a <= 1.0) {
                return Err(ConfigError(format!("alpha = {a} outside (0, 1]")));
            }
        }
        for &q in &self.q {
            if q < 1.0 {
                return Err(ConfigError(format!("q = {q} below 1")));
            }
        }
        for &b in &self.beta {
            if b < 2.0 {
                return Err(ConfigError(format!("beta = {b} below 2")));
            }
        }
        if let Some(t) = self.truncation {
            if t == 0 {
                return Err(ConfigError("truncation must be at least 1".into()));
            }
        }
        if matches!(self.group, GroupTag::Su2) && matches!(self.action, ActionTag::Wilson) {
            // Supported combination; nothing extra to check.
        }
        Ok(())
    }

    /// Hash of the canonical re-serialization, so equivalent files (comment
    /// or key-order differences) agree and any override changes it.
    pub fn hash(&self) -> String {
        let canon = toml::to_string(self).expect("config serializes");
        let mut h = Sha256::new();
        h.update(canon.as_bytes());
        let digest = h.finalize();
        let mut out = String::with_capacity(16);
        for b in &digest[..8] {
            out.push_str(&format!("{b:02x}"));
        }
        out
    }

    /// Output root: --output flag, then the config file, then LATGAUGE_OUT,
    /// then ./latgauge-out.
    pub fn output_root(&self, flag: Option<&std::path::Path>) -> PathBuf {
        if let Some(p) = flag {
            return p.to_path_buf();
        }
        if let Some(p) = &self.output {
            return p.clone();
        }
        if let Ok(p) = std::env::var("LATGAUGE_OUT") {
            return PathBuf::from(p);
        }
        PathBuf::from("latgauge-out")
    }
}
