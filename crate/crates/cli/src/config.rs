//! Experiment configuration file (TOML).
//!
//! Every section is optional and falls back to the defaults below; unknown
//! keys are rejected. Command-line flags are applied on top of the file.

use std::path::{Path, PathBuf};

use puppyflow_core::classify::{ClassifyConfig, CorpusSpec, FeatureBinning};
use puppyflow_core::flow::{Correction, DotStyle};
use puppyflow_core::sim::BodyParams;
use puppyflow_core::tracking::{TargetMotion, TrackingConfig};
use puppyflow_core::{Discretization, TeConfig};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Root seed; every random stream is a named substream of it.
    pub seed: u64,
    /// Where `reproduce-box1` writes. Not part of the config hash: moving
    /// the output must not change its content.
    #[serde(skip_serializing)]
    pub out_dir: PathBuf,
    pub sim: SimSection,
    pub te: TeSection,
    pub classify: ClassifySection,
    pub tracking: TrackingSection,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed: 0,
            out_dir: PathBuf::from("out"),
            sim: SimSection::default(),
            te: TeSection::default(),
            classify: ClassifySection::default(),
            tracking: TrackingSection::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimSection {
    pub gait: String,
    pub ground: String,
    pub duration_s: f64,
    pub dt: f64,
    pub body: BodyParams,
}

impl Default for SimSection {
    fn default() -> Self {
        SimSection { gait: "babble".into(), ground: "foil".into(), duration_s: 60.0, dt: 0.02, body: BodyParams::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TeSection {
    pub bins: u32,
    pub history_k: usize,
    pub lag: usize,
    pub discretization: Discretization,
    /// Flows kept in a graph.
    pub top_k: usize,
    /// Exclusion preset: "none" or "panel-CD".
    pub exclude: String,
    /// Circular-shift surrogates per pair; 0 skips significance testing.
    pub surrogates: usize,
    pub correction: Correction,
    pub min_penwidth: f64,
    pub max_penwidth: f64,
}

impl Default for TeSection {
    fn default() -> Self {
        let te = TeConfig::default();
        let dot = DotStyle::default();
        TeSection {
            bins: te.bins,
            history_k: te.history_k,
            lag: te.lag,
            discretization: te.discretization,
            top_k: 12,
            exclude: "none".into(),
            surrogates: 100,
            correction: Correction::default(),
            min_penwidth: dot.min_penwidth,
            max_penwidth: dot.max_penwidth,
        }
    }
}

impl TeSection {
    pub fn te_config(&self) -> TeConfig {
        TeConfig { bins: self.bins, history_k: self.history_k, lag: self.lag, discretization: self.discretization }
    }

    pub fn dot_style(&self) -> DotStyle {
        DotStyle { min_penwidth: self.min_penwidth, max_penwidth: self.max_penwidth }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifySection {
    pub bins: u32,
    pub epoch_len: usize,
    pub folds: usize,
    pub history: Vec<usize>,
    pub binning: FeatureBinning,
    /// Generated-corpus plan, used when no corpus directory is given.
    pub gaits: Vec<String>,
    pub grounds: Vec<String>,
    pub episodes_per_cell: usize,
    pub duration_s: f64,
}

impl Default for ClassifySection {
    fn default() -> Self {
        let c = ClassifyConfig::default();
        let spec = CorpusSpec::default();
        ClassifySection {
            bins: c.bins,
            epoch_len: c.epoch_len,
            folds: c.folds,
            history: c.history_lengths,
            binning: c.binning,
            gaits: spec.gaits,
            grounds: spec.grounds,
            episodes_per_cell: spec.episodes_per_cell,
            duration_s: spec.duration_s,
        }
    }
}

impl ClassifySection {
    /// Fold seed is a named substream of the root seed.
    pub fn classify_config(&self, root_seed: u64) -> ClassifyConfig {
        ClassifyConfig {
            bins: self.bins,
            epoch_len: self.epoch_len,
            folds: self.folds,
            fold_seed: puppyflow_core::seeds::substream(root_seed, "classify/folds"),
            history_lengths: self.history.clone(),
            binning: self.binning,
        }
    }

    pub fn corpus_spec(&self) -> CorpusSpec {
        CorpusSpec {
            gaits: self.gaits.clone(),
            grounds: self.grounds.clone(),
            episodes_per_cell: self.episodes_per_cell,
            duration_s: self.duration_s,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrackingSection {
    pub steps: usize,
    pub motion: TargetMotion,
    pub gain: f64,
    pub bins: u32,
    /// Paired runs in the demo.
    pub seeds: usize,
}

impl Default for TrackingSection {
    fn default() -> Self {
        let t = TrackingConfig::default();
        TrackingSection { steps: t.steps, motion: t.motion, gain: t.gain, bins: t.bins, seeds: 20 }
    }
}

impl TrackingSection {
    pub fn base(&self) -> TrackingConfig {
        TrackingConfig { steps: self.steps, motion: self.motion, gain: self.gain, bins: self.bins, ..TrackingConfig::default() }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Data(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Short SHA-256 of the effective configuration.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("config serializes");
        let digest = Sha256::digest(&canonical);
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}
