use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, StudyConfig};

/// Written next to study results. Its `experiment` array is the fully
/// resolved configuration, so the manifest can be fed back to
/// `lrvar study --config manifest.json` to reproduce the run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub tool_version: String,
    pub config_path: String,
    pub created_utc: String,
    pub master_seed: u64,
    pub outputs: Vec<String>,
    pub cell_errors: Vec<String>,
    #[serde(rename = "experiment")]
    pub experiments: Vec<ExperimentConfig>,
}

impl RunManifest {
    pub fn new(config_path: String, config: &StudyConfig, master_seed: u64) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").into(),
            tool_version: env!("CARGO_PKG_VERSION").into(),
            config_path,
            created_utc: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            master_seed,
            outputs: Vec::new(),
            cell_errors: Vec::new(),
            experiments: config.experiments.clone(),
        }
    }
}
