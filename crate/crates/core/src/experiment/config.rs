use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::controller::{ControllerConfig, Method};
use crate::planner::PlannerConfig;
use crate::swarm::SwarmParams;
use crate::{Error, Result};

/// Where the initial swarm comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Layout {
    /// 5x5 lattice at spacing 0.5 with labelled targets A-E.
    Grid5x5,
    /// TOML layout file, see [`crate::experiment::scenario::load_layout`].
    File(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TargetLabel {
    A,
    B,
    C,
    D,
    E,
}

impl TargetLabel {
    pub const ALL: [TargetLabel; 5] = [
        TargetLabel::A,
        TargetLabel::B,
        TargetLabel::C,
        TargetLabel::D,
        TargetLabel::E,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TargetLabel::A => "A",
            TargetLabel::B => "B",
            TargetLabel::C => "C",
            TargetLabel::D => "D",
            TargetLabel::E => "E",
        }
    }
}

impl fmt::Display for TargetLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TargetLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A" => Ok(TargetLabel::A),
            "B" => Ok(TargetLabel::B),
            "C" => Ok(TargetLabel::C),
            "D" => Ok(TargetLabel::D),
            "E" => Ok(TargetLabel::E),
            other => Err(Error::Config(format!("unknown target label `{other}`"))),
        }
    }
}

/// Target sheep: a layout label or an explicit zero-based index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Target {
    Label(TargetLabel),
    Id(usize),
}

impl FromStr for Target {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.parse::<usize>() {
            Ok(id) => Ok(Target::Id(id)),
            Err(_) => s.parse().map(Target::Label),
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Label(l) => write!(f, "{l}"),
            Target::Id(i) => write!(f, "{i}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub params: SwarmParams,
    pub layout: Layout,
    pub target: Target,
    pub method: Method,
    pub trials: usize,
    pub base_seed: u64,
    pub step_budget: u64,
    pub planner: PlannerConfig,
    pub reselect_used_pinning: bool,
    pub output_dir: PathBuf,
    /// Trial indices that get a trajectory SVG.
    pub snapshot_trials: Vec<usize>,
    /// Worker threads for the trial pool; 0 uses one per core.
    pub workers: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            params: SwarmParams::default(),
            layout: Layout::Grid5x5,
            target: Target::Label(TargetLabel::A),
            method: Method::Proposed,
            trials: 50,
            base_seed: 0,
            step_budget: 5000,
            planner: PlannerConfig::default(),
            reselect_used_pinning: true,
            output_dir: PathBuf::from("out"),
            snapshot_trials: vec![0],
            workers: 0,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    /// Reads a TOML config. Relative layout paths resolve against the config's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut config = Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })?;
        if let Layout::File(file) = &config.layout {
            if file.is_relative() {
                if let Some(dir) = path.parent() {
                    config.layout = Layout::File(dir.join(file));
                }
            }
        }
        Ok(config)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config is always representable as TOML")
    }

    pub fn validate(&self) -> Result<()> {
        let wrap = |e: Error| Error::Config(e.to_string());
        self.params.validate().map_err(wrap)?;
        self.planner.validate().map_err(wrap)?;
        if self.params.k_s3 <= 0.0 {
            return Err(Error::Config("params.k_s3 must be positive".into()));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.step_budget == 0 {
            return Err(Error::Config("step_budget must be positive".into()));
        }
        Ok(())
    }

    pub fn controller(&self) -> ControllerConfig {
        ControllerConfig {
            planner: self.planner,
            step_budget: self.step_budget,
            reselect_used_pinning: self.reselect_used_pinning,
            record_trace: true,
        }
    }
}
