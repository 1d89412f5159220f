use std::net::SocketAddr;
use std::path::PathBuf;

use crate::events::DiscardScope;
use crate::study::StudyOptions;
use crate::ServiceError;

pub const DEFAULT_BIND: &str = "127.0.0.1:8080";
pub const DEFAULT_STORE: &str = "study-events.jsonl";

#[derive(Debug, Clone, PartialEq)]
pub struct ServiceConfig {
    pub bundle: PathBuf,
    pub store: PathBuf,
    pub bind: SocketAddr,
    /// Exports are refused when unset.
    pub admin_token: Option<String>,
    pub options: StudyOptions,
}

impl ServiceConfig {
    pub fn new(bundle: impl Into<PathBuf>) -> Self {
        ServiceConfig {
            bundle: bundle.into(),
            store: PathBuf::from(DEFAULT_STORE),
            bind: DEFAULT_BIND.parse().expect("valid default address"),
            admin_token: None,
            options: StudyOptions::default(),
        }
    }

    /// Overrides fields from `COHESION_BUNDLE`, `COHESION_STORE`, `COHESION_BIND`,
    /// `COHESION_ADMIN_TOKEN`, `COHESION_DISCARD_SCOPE` and `COHESION_SEED`.
    pub fn apply_env(mut self) -> Result<Self, ServiceError> {
        self.apply_vars(|k| std::env::var(k).ok())?;
        Ok(self)
    }

    pub fn apply_vars(&mut self, var: impl Fn(&str) -> Option<String>) -> Result<(), ServiceError> {
        if let Some(v) = var("COHESION_BUNDLE") {
            self.bundle = v.into();
        }
        if let Some(v) = var("COHESION_STORE") {
            self.store = v.into();
        }
        if let Some(v) = var("COHESION_BIND") {
            self.bind = v
                .parse()
                .map_err(|e| ServiceError::Config(format!("COHESION_BIND={v:?}: {e}")))?;
        }
        if let Some(v) = var("COHESION_ADMIN_TOKEN").filter(|v| !v.is_empty()) {
            self.admin_token = Some(v);
        }
        if let Some(v) = var("COHESION_DISCARD_SCOPE") {
            self.options.discard_scope = v
                .parse::<DiscardScope>()
                .map_err(|e| ServiceError::Config(format!("COHESION_DISCARD_SCOPE: {e}")))?;
        }
        if let Some(v) = var("COHESION_SEED") {
            let seed = v
                .parse()
                .map_err(|e| ServiceError::Config(format!("COHESION_SEED={v:?}: {e}")))?;
            self.options.master_seed = Some(seed);
        }
        Ok(())
    }
}
