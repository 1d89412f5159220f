//! Optional TOML file supplying defaults that command-line flags override.

use std::path::{Path, PathBuf};

use anyhow::Context;
use cohesion_core::stats::BrownForsytheVariant;
use cohesion_core::unitize::TailPolicy;
use cohesion_service::DiscardScope;
use serde::Deserialize;

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
    pub unitize: UnitizeSection,
    pub simulate: SimulateSection,
    pub analyze: AnalyzeSection,
    pub serve: ServeSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct UnitizeSection {
    pub window: Option<f64>,
    pub tail: Option<TailPolicy>,
    pub max_turn: Option<f64>,
    pub est_threshold: Option<u32>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateSection {
    pub raters: Option<usize>,
    pub noise_sd: Option<f64>,
    pub unit_sd: Option<f64>,
    pub coverage: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalyzeSection {
    pub alpha: Option<f64>,
    pub decimals: Option<u32>,
    pub variant: Option<BrownForsytheVariant>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ServeSection {
    pub bundle: Option<PathBuf>,
    pub store: Option<PathBuf>,
    pub bind: Option<String>,
    pub discard_scope: Option<String>,
    pub balanced: Option<bool>,
}

/// Rejected configuration content; maps to the usage exit code.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct ConfigError(pub String);

impl FileConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).map_err(|e| ConfigError(format!("{}: {e}", path.display())).into())
    }

    pub fn discard_scope(&self) -> anyhow::Result<Option<DiscardScope>> {
        self.serve
            .discard_scope
            .as_deref()
            .map(|s| s.parse().map_err(|e: String| ConfigError(format!("serve.discard_scope: {e}")).into()))
            .transpose()
    }
}
