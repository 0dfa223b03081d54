//! Run manifests: everything needed to repeat a run exactly.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sqstream::experiments::ExperimentConfig;
use sqstream::{AlphaLevel, Init, StepSchedule};

use crate::error::{io_err, Result};
use crate::output::write_json;
use crate::returns::Sampling;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum RunSpec {
    Experiment {
        preset: Option<String>,
        config: ExperimentConfig,
        /// Recorded for reference only; results do not depend on it.
        threads: Option<usize>,
    },
    Estimate {
        input: PathBuf,
        column: String,
        sampling: Sampling,
        alpha: AlphaLevel,
        schedule: StepSchedule,
        level: f64,
        init: Init,
        loss_convention: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub run: RunSpec,
    pub outputs: Vec<PathBuf>,
}

impl RunManifest {
    pub fn new(run: RunSpec, outputs: Vec<PathBuf>) -> Self {
        Self {
            tool_version: TOOL_VERSION.to_string(),
            run,
            outputs,
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_json(path, self)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(io_err(path))?;
        Ok(serde_json::from_str(&text)?)
    }
}
