use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Threshold,
    Q,
    Qf,
    Spread,
    Lift,
    Couple,
    Generate,
    ChainCheck,
}

impl Task {
    pub fn as_str(self) -> &'static str {
        match self {
            Task::Threshold => "threshold",
            Task::Q => "q",
            Task::Qf => "qf",
            Task::Spread => "spread",
            Task::Lift => "lift",
            Task::Couple => "couple",
            Task::Generate => "generate",
            Task::ChainCheck => "chain-check",
        }
    }

    pub fn is_stochastic(self) -> bool {
        matches!(self, Task::Couple | Task::ChainCheck)
    }
}

/// One experiment. Fields a task does not use are ignored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub task: Task,
    /// Hypergraph text file.
    #[serde(default)]
    pub input: Option<PathBuf>,
    /// `KIND:ARGS`, e.g. `hamilton:5` or `random:8,6,4,17`.
    #[serde(default)]
    pub generator: Option<String>,
    #[serde(default)]
    pub p: Vec<f64>,
    #[serde(default)]
    pub k: Option<u32>,
    #[serde(default)]
    pub r: Option<usize>,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub samples: Option<u64>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub kappa: Option<f64>,
    /// `q,r1,...,rλ`.
    #[serde(default)]
    pub spiro: Option<String>,
    #[serde(default)]
    pub depth: Option<usize>,
    #[serde(default)]
    pub exact: bool,
    /// Number of random families for `chain-check`.
    #[serde(default)]
    pub count: Option<usize>,
}

impl ExperimentConfig {
    pub fn new(task: Task) -> Self {
        Self {
            task,
            input: None,
            generator: None,
            p: Vec::new(),
            k: None,
            r: None,
            tol: None,
            samples: None,
            seed: None,
            kappa: None,
            spiro: None,
            depth: None,
            exact: false,
            count: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Input(format!("bad config: {e}")))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if let Some(tol) = self.tol {
            if !(tol > 0.0 && tol < 0.5) {
                return Err(CliError::Input(format!("tol = {tol} must lie in (0, 1/2)")));
            }
        }
        if self.task.is_stochastic() && self.seed.is_none() {
            return Err(CliError::Input(format!("task {} needs a seed", self.task.as_str())));
        }
        if self.input.is_some() && self.generator.is_some() {
            return Err(CliError::Input("give either an input file or a generator, not both".into()));
        }
        if let Some(bad) = self.p.iter().find(|p| !(**p > 0.0 && **p <= 1.0)) {
            return Err(CliError::Input(format!("p = {bad} must lie in (0, 1]")));
        }
        Ok(())
    }
}

/// Parses `q,r1,...,rλ`.
pub fn parse_profile(text: &str) -> Result<(f64, Vec<usize>), CliError> {
    let bad = || CliError::Input(format!("profile {text:?} must read q,r1,...,rλ"));
    let mut parts = text.split(',').map(str::trim);
    let q: f64 = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
    let radii = parts.map(|r| r.parse::<usize>().map_err(|_| bad())).collect::<Result<Vec<_>, _>>()?;
    if radii.len() < 2 {
        return Err(bad());
    }
    Ok((q, radii))
}
