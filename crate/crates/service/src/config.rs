use std::path::{Path, PathBuf};

use geckograph::layout::LayoutOptions;
use serde::{Deserialize, Serialize};

use crate::ServiceError;

pub const DEFAULT_BIND: &str = "127.0.0.1:8080";

/// Service configuration, read from JSON. Every field is optional.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ApiConfig {
    pub bind: String,
    /// Level file; the built-in set when absent.
    pub levels: Option<PathBuf>,
    /// Append-only JSONL event log, replayed on startup.
    pub log: Option<PathBuf>,
    /// Show renderings on every level instead of alternating by group.
    pub always_on_gecko: bool,
    /// Allowed browser origins; `"*"` allows any.
    pub cors_origins: Vec<String>,
    pub layout: LayoutOptions,
    /// Palette override: a JSON array of hex colors.
    pub palette: Option<PathBuf>,
}

impl Default for ApiConfig {
    fn default() -> Self {
        ApiConfig {
            bind: DEFAULT_BIND.into(),
            levels: None,
            log: None,
            always_on_gecko: false,
            cors_origins: Vec::new(),
            layout: LayoutOptions::default(),
            palette: None,
        }
    }
}

impl ApiConfig {
    pub fn from_json(text: &str) -> Result<Self, ServiceError> {
        serde_json::from_str(text).map_err(|e| ServiceError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, ServiceError> {
        let text = std::fs::read_to_string(path).map_err(|e| ServiceError::Io(path.to_path_buf(), e.to_string()))?;
        Self::from_json(&text)
    }

    /// Applies `GECKO_BIND` and `GECKO_LEVELS` when set.
    pub fn with_env_overrides(self) -> Self {
        self.with_overrides(std::env::var("GECKO_BIND").ok(), std::env::var_os("GECKO_LEVELS").map(PathBuf::from))
    }

    pub fn with_overrides(mut self, bind: Option<String>, levels: Option<PathBuf>) -> Self {
        if let Some(b) = bind {
            self.bind = b;
        }
        if let Some(l) = levels {
            self.levels = Some(l);
        }
        self
    }
}
