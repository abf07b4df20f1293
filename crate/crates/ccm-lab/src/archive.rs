//! Run archives: a directory holding the config, checkpoints, CSV tables and
//! a JSON summary.
//!
//! ```text
//! <dir>/config.toml
//! <dir>/summary.json
//! <dir>/checkpoints/ckpt_00000.bin …
//! <dir>/*.csv
//! <dir>/plots/*.csv            (emit_plots)
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use ccm::hardy::HardyField;
use serde::{Deserialize, Serialize};

use crate::checkpoint::{self, Checkpoint};
use crate::config::{ExperimentConfig, Tag, FORMAT_VERSION};
use crate::error::{LabError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunVerdict {
    /// ran to completion
    Complete,
    /// a run stopped at a resolution or norm ceiling, or a property failed
    Limited,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub format_version: u32,
    pub experiment: Tag,
    pub verdict: RunVerdict,
    /// last time at which the solver's own checks held
    pub trusted_horizon: Option<f64>,
    pub metrics: BTreeMap<String, f64>,
    pub notes: Vec<String>,
}

impl Summary {
    pub fn new(experiment: Tag) -> Self {
        Summary {
            format_version: FORMAT_VERSION,
            experiment,
            verdict: RunVerdict::Complete,
            trusted_horizon: None,
            metrics: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    pub fn set(&mut self, key: impl Into<String>, value: f64) {
        self.metrics.insert(key.into(), value);
    }

    pub fn flag(&mut self, key: impl Into<String>, value: bool) {
        self.set(key, if value { 1.0 } else { 0.0 });
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.metrics.get(key).copied()
    }

    pub fn limit(&mut self, note: impl Into<String>) {
        self.verdict = RunVerdict::Limited;
        self.notes.push(note.into());
    }
}

#[derive(Clone, Debug)]
pub struct RunArchive {
    pub root: PathBuf,
    pub config: ExperimentConfig,
    pub summary: Summary,
}

impl RunArchive {
    /// Creates the directory tree and stores the config.
    pub fn create(root: &Path, config: &ExperimentConfig) -> Result<Self> {
        let ck = root.join("checkpoints");
        std::fs::create_dir_all(&ck).map_err(|e| LabError::io(&ck, e))?;
        config.save(&root.join("config.toml"))?;
        Ok(RunArchive { root: root.to_path_buf(), config: config.clone(), summary: Summary::new(config.experiment) })
    }

    pub fn open(root: &Path) -> Result<Self> {
        let config = ExperimentConfig::load(&root.join("config.toml"))?;
        let path = root.join("summary.json");
        let summary = match std::fs::read_to_string(&path) {
            Ok(text) => serde_json::from_str(&text)?,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Summary::new(config.experiment),
            Err(e) => return Err(LabError::io(&path, e)),
        };
        Ok(RunArchive { root: root.to_path_buf(), config, summary })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn checkpoint_dir(&self) -> PathBuf {
        self.root.join("checkpoints")
    }

    pub fn write_summary(&self) -> Result<()> {
        let path = self.path("summary.json");
        let text = serde_json::to_string_pretty(&self.summary)?;
        std::fs::write(&path, text).map_err(|e| LabError::io(&path, e))
    }

    /// Writes checkpoints numbered from `first`.
    pub fn write_checkpoints(&self, first: usize, states: &[(f64, HardyField<f64>)]) -> Result<()> {
        for (i, (t, u)) in states.iter().enumerate() {
            let path = self.checkpoint_dir().join(format!("ckpt_{:05}.bin", first + i));
            checkpoint::write(&path, *t, u)?;
        }
        Ok(())
    }

    pub fn checkpoint_paths(&self) -> Result<Vec<PathBuf>> {
        let dir = self.checkpoint_dir();
        let mut out: Vec<PathBuf> = match std::fs::read_dir(&dir) {
            Ok(rd) => rd
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "bin"))
                .collect(),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Vec::new(),
            Err(e) => return Err(LabError::io(&dir, e)),
        };
        out.sort();
        Ok(out)
    }

    pub fn checkpoints(&self) -> Result<Vec<Checkpoint>> {
        self.checkpoint_paths()?.iter().map(|p| checkpoint::read(p)).collect()
    }

    pub fn last_checkpoint(&self) -> Result<Option<Checkpoint>> {
        match self.checkpoint_paths()?.last() {
            Some(p) => Ok(Some(checkpoint::read(p)?)),
            None => Ok(None),
        }
    }
}
