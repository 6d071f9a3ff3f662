//! Finite-volume solvers on the three-edge diverge.
//!
//! Edge 1 feeds the node at its right end, edges 2 and 3 leave it at their
//! left end. The far ends use zero-order extrapolation.

mod kinetic;
mod lwr;

use serde::{Deserialize, Serialize};

use crate::diagram::FluxFunction;
use crate::error::{Error, Result};
use crate::kinetic::{equilibrium_z, KinState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Kinetic,
    Lwr,
}

impl SolverKind {
    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Kinetic => "kinetic",
            SolverKind::Lwr => "lwr",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    NoPref,
    EqualPref,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EdgeRole {
    /// Feeds the node at its right end.
    Incoming,
    /// Leaves the node at its left end.
    Outgoing,
}

/// Initial density on one edge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InitialProfile {
    Constant(f64),
    /// `(x_start, rho)` pieces in increasing `x_start`, the first at 0.
    Piecewise(Vec<(f64, f64)>),
}

impl InitialProfile {
    pub fn at(&self, x: f64) -> f64 {
        match self {
            InitialProfile::Constant(r) => *r,
            InitialProfile::Piecewise(pieces) => pieces
                .iter()
                .take_while(|p| p.0 <= x)
                .last()
                .or(pieces.first())
                .map_or(0.0, |p| p.1),
        }
    }

    pub fn validate(&self, name: &str) -> Result<()> {
        let bad = |m: String| Err(Error::Config(format!("{name}: {m}")));
        match self {
            InitialProfile::Constant(r) if !(0.0..=1.0).contains(r) => bad(format!("density {r} outside [0, 1]")),
            InitialProfile::Constant(_) => Ok(()),
            InitialProfile::Piecewise(p) if p.is_empty() => bad("empty piecewise profile".into()),
            InitialProfile::Piecewise(p) => {
                if p.iter().any(|s| !(0.0..=1.0).contains(&s.1)) {
                    return bad("density outside [0, 1]".into());
                }
                if p.windows(2).any(|w| w[1].0 <= w[0].0) {
                    return bad("piece starts must increase".into());
                }
                Ok(())
            }
        }
    }
}

/// Everything needed to run either solver on the diverge.
#[derive(Debug, Clone)]
pub struct NetworkScenario {
    pub name: String,
    pub diagram: FluxFunction,
    pub node: NodeKind,
    pub eps: f64,
    pub cells: usize,
    pub length: f64,
    pub t_end: f64,
    pub cfl: f64,
    pub initial: [InitialProfile; 3],
    /// Output times besides `t_end`.
    pub snapshot_times: Vec<f64>,
}

impl NetworkScenario {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !(self.eps > 0.0) {
            return bad(format!("eps: must be positive, got {}", self.eps));
        }
        if self.cells < 2 {
            return bad(format!("cells: need at least 2, got {}", self.cells));
        }
        if !(self.length > 0.0) {
            return bad(format!("length: must be positive, got {}", self.length));
        }
        if !(self.t_end > 0.0) {
            return bad(format!("t_end: must be positive, got {}", self.t_end));
        }
        if !(self.cfl > 0.0 && self.cfl < 1.0) {
            return bad(format!("cfl: must lie in (0, 1), got {}", self.cfl));
        }
        for (k, p) in self.initial.iter().enumerate() {
            p.validate(&format!("initial.rho{}", k + 1))?;
        }
        if let Some(t) = self.snapshot_times.iter().find(|t| !(0.0..=self.t_end).contains(*t)) {
            return bad(format!("output.snapshot_times: {t} outside [0, t_end]"));
        }
        Ok(())
    }

    /// Sorted, deduplicated output times ending at `t_end`.
    pub fn output_times(&self) -> Vec<f64> {
        let mut times = self.snapshot_times.clone();
        times.push(self.t_end);
        times.sort_by(f64::total_cmp);
        times.dedup();
        times
    }
}

#[derive(Debug, Clone)]
pub struct Edge {
    pub id: usize,
    pub role: EdgeRole,
    pub length: f64,
    pub rho: Vec<f64>,
    /// Kinetic invariant `Z` per cell; empty for LWR.
    pub z: Vec<f64>,
}

impl Edge {
    pub fn dx(&self) -> f64 {
        self.length / self.rho.len() as f64
    }

    pub fn centers(&self) -> Vec<f64> {
        let dx = self.dx();
        (0..self.rho.len()).map(|k| (k as f64 + 0.5) * dx).collect()
    }

    /// Index of the cell touching the node.
    pub fn node_cell(&self) -> usize {
        match self.role {
            EdgeRole::Incoming => self.rho.len() - 1,
            EdgeRole::Outgoing => 0,
        }
    }
}

/// Fluxes through the network boundaries during one step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepReport {
    pub inflow: f64,
    pub outflow: f64,
    pub node_fluxes: [f64; 3],
}

/// Node-side state at an instant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NodeState {
    pub fluxes: [f64; 3],
    /// Density of the cell touching the node.
    pub cell_rho: [f64; 3],
    /// Kinetic density at the node interface itself.
    pub interface_rho: Option<[f64; 3]>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgeSnapshot {
    pub id: usize,
    pub x: Vec<f64>,
    pub rho: Vec<f64>,
    pub q: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Snapshot {
    pub time: f64,
    pub edges: Vec<EdgeSnapshot>,
    pub node: NodeState,
}

#[derive(Debug, Clone)]
pub struct Network {
    pub solver: SolverKind,
    pub node: NodeKind,
    pub diagram: FluxFunction,
    pub eps: f64,
    pub edges: [Edge; 3],
    pub time: f64,
    /// Cells whose state was nudged back into the invariant region.
    pub clamp_hits: usize,
    /// Steps where `lambda_1` needed the `Z` clamp.
    pub speed_clamps: usize,
}

/// Relative roundoff tolerated before an invariant-region breach is an error.
pub const REGION_TOL: f64 = 1e-12;

impl Network {
    pub fn new(scn: &NetworkScenario, solver: SolverKind) -> Result<Self> {
        scn.validate()?;
        let roles = [EdgeRole::Incoming, EdgeRole::Outgoing, EdgeRole::Outgoing];
        let edges = [0, 1, 2].map(|k| {
            let dx = scn.length / scn.cells as f64;
            let rho: Vec<f64> = (0..scn.cells)
                .map(|i| scn.initial[k].at((i as f64 + 0.5) * dx))
                .collect();
            let z = match solver {
                SolverKind::Kinetic => rho.iter().map(|&r| equilibrium_z(r, &scn.diagram)).collect(),
                SolverKind::Lwr => Vec::new(),
            };
            Edge {
                id: k + 1,
                role: roles[k],
                length: scn.length,
                rho,
                z,
            }
        });
        Ok(Self {
            solver,
            node: scn.node,
            diagram: scn.diagram.clone(),
            eps: scn.eps,
            edges,
            time: 0.0,
            clamp_hits: 0,
            speed_clamps: 0,
        })
    }

    pub fn dx(&self) -> f64 {
        self.edges.iter().map(Edge::dx).fold(f64::INFINITY, f64::min)
    }

    pub fn mass(&self) -> f64 {
        self.edges
            .iter()
            .map(|e| e.dx() * e.rho.iter().sum::<f64>())
            .sum()
    }

    /// Largest stable step at the given CFL number.
    pub fn stable_dt(&mut self, cfl: f64) -> f64 {
        let speed = match self.solver {
            SolverKind::Kinetic => self.kinetic_max_speed(),
            SolverKind::Lwr => self.lwr_max_speed(),
        };
        cfl * self.dx() / speed
    }

    pub fn step(&mut self, dt: f64) -> Result<StepReport> {
        let report = match self.solver {
            SolverKind::Kinetic => self.kinetic_step(dt)?,
            SolverKind::Lwr => self.lwr_step(dt)?,
        };
        self.time += dt;
        Ok(report)
    }

    pub fn node_state(&self) -> Result<NodeState> {
        match self.solver {
            SolverKind::Kinetic => self.kinetic_node_state(),
            SolverKind::Lwr => self.lwr_node_state(),
        }
    }

    pub fn snapshot(&self) -> Result<Snapshot> {
        let edges = self
            .edges
            .iter()
            .map(|e| {
                let q = match self.solver {
                    SolverKind::Kinetic => e
                        .rho
                        .iter()
                        .zip(&e.z)
                        .map(|(&r, &z)| KinState::from_rho_z(r, z).q)
                        .collect(),
                    SolverKind::Lwr => e.rho.iter().map(|&r| self.diagram.flux(r)).collect(),
                };
                EdgeSnapshot {
                    id: e.id,
                    x: e.centers(),
                    rho: e.rho.clone(),
                    q,
                }
            })
            .collect();
        Ok(Snapshot {
            time: self.time,
            edges,
            node: self.node_state()?,
        })
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub scenario: String,
    pub solver: SolverKind,
    pub snapshots: Vec<Snapshot>,
    pub steps: usize,
    pub clamp_hits: usize,
    pub speed_clamps: usize,
}

impl RunOutput {
    pub fn last(&self) -> &Snapshot {
        self.snapshots.last().expect("a run always ends with a snapshot")
    }
}

/// Run to `t_end`, calling `observe` after every step with the network, the
/// step report and the step size.
pub fn run_observed(
    scn: &NetworkScenario,
    solver: SolverKind,
    mut observe: impl FnMut(&Network, &StepReport, f64),
) -> Result<RunOutput> {
    let mut net = Network::new(scn, solver)?;
    let mut snapshots = Vec::new();
    let mut steps = 0;
    for target in scn.output_times() {
        while net.time < target {
            let dt = net.stable_dt(scn.cfl);
            let (dt, last) = if net.time + dt >= target {
                (target - net.time, true)
            } else {
                (dt, false)
            };
            let report = net.step(dt)?;
            if last {
                net.time = target;
            }
            steps += 1;
            observe(&net, &report, dt);
        }
        snapshots.push(net.snapshot()?);
    }
    Ok(RunOutput {
        scenario: scn.name.clone(),
        solver,
        snapshots,
        steps,
        clamp_hits: net.clamp_hits,
        speed_clamps: net.speed_clamps,
    })
}

pub fn run(scn: &NetworkScenario, solver: SolverKind) -> Result<RunOutput> {
    run_observed(scn, solver, |_, _, _| {})
}
