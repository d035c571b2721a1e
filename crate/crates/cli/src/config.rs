//! Declarative pipeline configuration (TOML) with CLI-flag overrides.
//!
//! ```toml
//! [paths]
//! training_corpus = "data/train.jsonl"
//! unseen_corpus = "data/unseen.jsonl"
//! key = "fixtures/keys/focused.key"
//! inventory = "fixtures/inventory/default.inv"   # optional; built-in default otherwise
//! output_dir = "out"
//!
//! [build]
//! train_sizes = [25214, 20000, 10000]
//! seen_n = 500
//! unseen_n = 200
//! replicas = 3
//! seed = 42
//!
//! [eval]
//! endpoint = "http://localhost:8080/v1/chat"
//! model = "my-model"
//! parallelism = 8
//! ```

use std::path::{Path, PathBuf};

use proplang_core::record::DEFAULT_SYSTEM_PROMPT;
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub paths: Paths,
    #[serde(default)]
    pub build: BuildConfig,
    #[serde(default)]
    pub eval: EvalConfig,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Paths {
    pub training_corpus: PathBuf,
    pub unseen_corpus: PathBuf,
    pub key: PathBuf,
    #[serde(default)]
    pub inventory: Option<PathBuf>,
    pub output_dir: PathBuf,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BuildConfig {
    pub train_sizes: Vec<usize>,
    pub seen_n: usize,
    pub unseen_n: usize,
    pub replicas: u32,
    pub seed: u64,
    pub disjoint: bool,
    pub system_prompt: String,
}

impl Default for BuildConfig {
    fn default() -> Self {
        BuildConfig {
            train_sizes: vec![25_214, 20_000, 10_000],
            seen_n: 500,
            unseen_n: 200,
            replicas: 3,
            seed: 42,
            disjoint: false,
            system_prompt: DEFAULT_SYSTEM_PROMPT.to_string(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    pub endpoint: Option<String>,
    pub model: Option<String>,
    pub parallelism: usize,
    pub max_retries: u32,
    pub backoff_ms: u64,
    /// Environment variable holding the API credential for real endpoints.
    pub api_key_env: String,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            endpoint: None,
            model: None,
            parallelism: 8,
            max_retries: 3,
            backoff_ms: 250,
            api_key_env: "PROPLANG_API_KEY".to_string(),
        }
    }
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = crate::read_to_string(path)?;
        let config: PipelineConfig = toml::from_str(&text)
            .map_err(|e| CliError::data(format!("config {}: {e}", path.display())))?;
        config.check_sizes()?;
        Ok(config)
    }

    fn check_sizes(&self) -> Result<(), CliError> {
        if self.build.train_sizes.contains(&0)
            || self.build.seen_n == 0
            || self.build.unseen_n == 0
            || self.build.replicas == 0
        {
            return Err(CliError::data("config: sizes and replicas must be positive"));
        }
        Ok(())
    }

    /// Ensure every referenced input file exists.
    pub fn check_paths(&self) -> Result<(), CliError> {
        for (label, path) in [
            ("training_corpus", &self.paths.training_corpus),
            ("unseen_corpus", &self.paths.unseen_corpus),
            ("key", &self.paths.key),
        ] {
            if !path.exists() {
                return Err(CliError::io(
                    format!("config path `{label}` = {}", path.display()),
                    std::io::Error::new(std::io::ErrorKind::NotFound, "no such file"),
                ));
            }
        }
        if let Some(inv) = &self.paths.inventory {
            if !inv.exists() {
                return Err(CliError::io(
                    format!("config path `inventory` = {}", inv.display()),
                    std::io::Error::new(std::io::ErrorKind::NotFound, "no such file"),
                ));
            }
        }
        Ok(())
    }
}
