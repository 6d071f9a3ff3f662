use crate::error::Result;
use crate::junction::macroscopic::{equalpref_unchecked, nopref_unchecked};
use crate::lwr::godunov_flux;
use crate::sim::{EdgeRole, Network, NodeKind, NodeState, StepReport};

/// Lower bound on the LWR wave speed used for the time step.
const MIN_SPEED: f64 = 1e-3;

impl Network {
    pub(super) fn lwr_max_speed(&self) -> f64 {
        let f = &self.diagram;
        self.edges
            .iter()
            .flat_map(|e| e.rho.iter())
            .map(|&r| f.slope(r).abs())
            .fold(MIN_SPEED, f64::max)
    }

    fn lwr_node_fluxes(&self) -> [f64; 3] {
        let f = &self.diagram;
        let [e1, e2, e3] = &self.edges;
        let c1 = f.demand(e1.rho[e1.rho.len() - 1]);
        let c2 = f.supply(e2.rho[0]);
        let c3 = f.supply(e3.rho[0]);
        match self.node {
            NodeKind::NoPref => nopref_unchecked(c1, c2, c3),
            NodeKind::EqualPref => equalpref_unchecked(c1, c2, c3),
        }
    }

    pub(super) fn lwr_node_state(&self) -> Result<NodeState> {
        Ok(NodeState {
            fluxes: self.lwr_node_fluxes(),
            cell_rho: self.edges.each_ref().map(|e| e.rho[e.node_cell()]),
            interface_rho: None,
        })
    }

    pub(super) fn lwr_step(&mut self, dt: f64) -> Result<StepReport> {
        let node_fluxes = self.lwr_node_fluxes();
        let f = &self.diagram;
        let mut inflow = 0.0;
        let mut outflow = 0.0;
        for (k, e) in self.edges.iter_mut().enumerate() {
            let n = e.rho.len();
            let nu = dt / e.dx();
            let mut flux = Vec::with_capacity(n + 1);
            let (left, right) = match e.role {
                EdgeRole::Incoming => (godunov_flux(e.rho[0], e.rho[0], f), node_fluxes[k]),
                EdgeRole::Outgoing => (node_fluxes[k], godunov_flux(e.rho[n - 1], e.rho[n - 1], f)),
            };
            flux.push(left);
            flux.extend((1..n).map(|i| godunov_flux(e.rho[i - 1], e.rho[i], f)));
            flux.push(right);
            match e.role {
                EdgeRole::Incoming => inflow += left,
                EdgeRole::Outgoing => outflow += right,
            }
            for i in 0..n {
                e.rho[i] = (e.rho[i] - nu * (flux[i + 1] - flux[i])).clamp(0.0, 1.0);
            }
        }
        Ok(StepReport {
            inflow,
            outflow,
            node_fluxes,
        })
    }
}
