//! JSON run configuration and the built-in diverge scenarios.

use serde::{Deserialize, Serialize};

use crate::diagram::FluxFunction;
use crate::error::{Error, Result};
use crate::sim::{InitialProfile, NetworkScenario, NodeKind, SolverKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverChoice {
    Kinetic,
    Lwr,
    Both,
}

impl SolverChoice {
    pub fn solvers(self) -> Vec<SolverKind> {
        match self {
            SolverChoice::Kinetic => vec![SolverKind::Kinetic],
            SolverChoice::Lwr => vec![SolverKind::Lwr],
            SolverChoice::Both => vec![SolverKind::Kinetic, SolverKind::Lwr],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum DiagramConfig {
    #[default]
    Lwr,
    Table { samples: Vec<(f64, f64)> },
}

impl DiagramConfig {
    pub fn build(&self) -> Result<FluxFunction> {
        match self {
            DiagramConfig::Lwr => Ok(FluxFunction::lwr()),
            DiagramConfig::Table { samples } => FluxFunction::table(samples),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialConfig {
    pub rho1: InitialProfile,
    pub rho2: InitialProfile,
    pub rho3: InitialProfile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default)]
    pub snapshot_times: Vec<f64>,
    #[serde(default)]
    pub directory: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default = "default_solver")]
    pub solver: SolverChoice,
    pub node: NodeKind,
    #[serde(default)]
    pub diagram: DiagramConfig,
    #[serde(default = "default_eps")]
    pub eps: f64,
    #[serde(default = "default_cells")]
    pub cells: usize,
    #[serde(default = "default_t_end")]
    pub t_end: f64,
    #[serde(default = "default_cfl")]
    pub cfl: f64,
    pub initial: InitialConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

fn default_solver() -> SolverChoice {
    SolverChoice::Both
}
fn default_eps() -> f64 {
    1e-3
}
fn default_cells() -> usize {
    1000
}
fn default_t_end() -> f64 {
    0.9
}
/// Keeps the splitting step at `eps / 20` on 1000 cells.
fn default_cfl() -> f64 {
    0.05
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }

    pub fn builtin(name: &str) -> Option<Self> {
        let (node, rho) = match name {
            "diverge-ex1" => (NodeKind::NoPref, [0.7, 0.2, 0.1]),
            "diverge-ex2" => (NodeKind::NoPref, [0.2, 0.4, 0.6]),
            "diverge-ex3" => (NodeKind::NoPref, [0.6, 0.1, 0.95]),
            "pref-ex1" => (NodeKind::EqualPref, [0.8, 0.1, 0.3]),
            "pref-ex2" => (NodeKind::EqualPref, [0.6, 0.9, 0.0]),
            _ => return None,
        };
        Some(Self {
            solver: SolverChoice::Both,
            node,
            diagram: DiagramConfig::Lwr,
            eps: default_eps(),
            cells: default_cells(),
            t_end: default_t_end(),
            cfl: default_cfl(),
            initial: InitialConfig {
                rho1: InitialProfile::Constant(rho[0]),
                rho2: InitialProfile::Constant(rho[1]),
                rho3: InitialProfile::Constant(rho[2]),
            },
            output: OutputConfig::default(),
        })
    }

    pub fn scenario(&self, name: &str) -> Result<NetworkScenario> {
        let scn = NetworkScenario {
            name: name.to_string(),
            diagram: self.diagram.build()?,
            node: self.node,
            eps: self.eps,
            cells: self.cells,
            length: 1.0,
            t_end: self.t_end,
            cfl: self.cfl,
            initial: [
                self.initial.rho1.clone(),
                self.initial.rho2.clone(),
                self.initial.rho3.clone(),
            ],
            snapshot_times: self.output.snapshot_times.clone(),
        };
        scn.validate()?;
        Ok(scn)
    }
}

pub const BUILTINS: [&str; 5] = ["diverge-ex1", "diverge-ex2", "diverge-ex3", "pref-ex1", "pref-ex2"];

/// A built-in scenario as a ready-to-run network description.
pub fn builtin_scenario(name: &str) -> Option<NetworkScenario> {
    ScenarioConfig::builtin(name).and_then(|c| c.scenario(name).ok())
}
