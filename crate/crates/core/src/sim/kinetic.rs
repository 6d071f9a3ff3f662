use crate::error::{Error, Result};
use crate::junction::{couple_equalpref, couple_nopref, NodeSolution, NodeTraces};
use crate::kinetic::{interface_flux, lambda1, relax_z, w_of};
use crate::sim::{Edge, EdgeRole, Network, NodeKind, NodeState, StepReport, REGION_TOL};

impl Network {
    pub(super) fn kinetic_max_speed(&mut self) -> f64 {
        let mut speed: f64 = 1.0;
        let mut clamped = false;
        for e in &self.edges {
            for &z in &e.z {
                let (l, c) = lambda1(z);
                speed = speed.max(l.abs());
                clamped |= c;
            }
        }
        if clamped {
            self.speed_clamps += 1;
        }
        speed
    }

    fn relax_all(&mut self, dt: f64) {
        let (eps, f) = (self.eps, &self.diagram);
        for e in &mut self.edges {
            for (z, &r) in e.z.iter_mut().zip(&e.rho) {
                *z = relax_z(r, *z, dt, eps, f);
            }
        }
    }

    fn kinetic_traces(&self) -> NodeTraces {
        let [e1, e2, e3] = &self.edges;
        let w_first = |e: &Edge| w_of(e.rho[0], e.z[0]).clamp(0.0, 1.0);
        NodeTraces {
            z1: e1.z[e1.rho.len() - 1].clamp(0.0, 1.0),
            w2: w_first(e2),
            w3: w_first(e3),
        }
    }

    fn kinetic_node(&self) -> Result<(NodeTraces, NodeSolution)> {
        let t = self.kinetic_traces();
        let s = match self.node {
            NodeKind::NoPref => couple_nopref(t)?,
            NodeKind::EqualPref => couple_equalpref(t)?,
        };
        Ok((t, s))
    }

    pub(super) fn kinetic_node_state(&self) -> Result<NodeState> {
        let (t, s) = self.kinetic_node()?;
        let states = s.states(&t);
        Ok(NodeState {
            fluxes: s.fluxes(&t),
            cell_rho: self.edges.each_ref().map(|e| e.rho[e.node_cell()]),
            interface_rho: Some(states.map(|p| p.0)),
        })
    }

    pub(super) fn kinetic_step(&mut self, dt: f64) -> Result<StepReport> {
        self.relax_all(0.5 * dt);
        let (t, s) = self.kinetic_node()?;
        let node_fluxes = s.fluxes(&t);
        // (q, Z) through the node side of each edge
        let node_side = [(node_fluxes[0], t.z1), (node_fluxes[1], s.z2), (node_fluxes[2], s.z3)];

        let mut inflow = 0.0;
        let mut outflow = 0.0;
        for (k, e) in self.edges.iter_mut().enumerate() {
            let n = e.rho.len();
            let nu = dt / e.dx();
            let w: Vec<f64> = e.rho.iter().zip(&e.z).map(|(&r, &z)| w_of(r, z)).collect();
            let mut fq = Vec::with_capacity(n + 1);
            let mut fz = Vec::with_capacity(n + 1);
            let far_left = interface_flux(e.z[0], w[0]);
            let far_right = interface_flux(e.z[n - 1], w[n - 1]);
            let (left, right) = match e.role {
                EdgeRole::Incoming => (far_left, node_side[k]),
                EdgeRole::Outgoing => (node_side[k], far_right),
            };
            fq.push(left.0);
            fz.push(left.1);
            for (&z_left, &w_right) in e.z.iter().zip(&w[1..]) {
                let (a, b) = interface_flux(z_left, w_right);
                fq.push(a);
                fz.push(b);
            }
            fq.push(right.0);
            fz.push(right.1);
            match e.role {
                EdgeRole::Incoming => inflow += left.0,
                EdgeRole::Outgoing => outflow += right.0,
            }
            for i in 0..n {
                e.rho[i] -= nu * (fq[i + 1] - fq[i]);
                e.z[i] -= nu * (fz[i + 1] - fz[i]);
            }
        }
        self.enforce_region()?;
        self.relax_all(0.5 * dt);
        Ok(StepReport {
            inflow,
            outflow,
            node_fluxes,
        })
    }

    /// Check `0 <= Z <= rho <= 1`, absorbing roundoff-sized excursions.
    fn enforce_region(&mut self) -> Result<()> {
        let mut hits = 0;
        for e in &mut self.edges {
            for i in 0..e.rho.len() {
                let (r, z) = (e.rho[i], e.z[i]);
                let inside = 0.0 <= z && z <= r && r <= 1.0;
                if inside {
                    continue;
                }
                let slack = -REGION_TOL..=1.0 + REGION_TOL;
                if !(slack.contains(&r) && slack.contains(&z) && z <= r + REGION_TOL) {
                    return Err(Error::InvariantViolation {
                        edge: e.id,
                        cell: i,
                        rho: r,
                        z,
                    });
                }
                let r = r.clamp(0.0, 1.0);
                e.rho[i] = r;
                e.z[i] = z.clamp(0.0, r);
                hits += 1;
            }
        }
        self.clamp_hits += hits;
        Ok(())
    }
}
