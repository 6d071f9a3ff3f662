//! Distances between two solutions on the same grid.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::sim::{EdgeRole, EdgeSnapshot};

/// Default fraction of each edge left out next to the node.
pub const JUNCTION_EXCLUSION: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EdgeDistance {
    pub edge: usize,
    pub l1: f64,
    pub linf: f64,
}

/// L1 and max distance of the densities, skipping the `exclude` fraction of
/// the edge nearest the node.
pub fn edge_distance(
    a: &EdgeSnapshot,
    b: &EdgeSnapshot,
    role: EdgeRole,
    length: f64,
    exclude: f64,
) -> Result<EdgeDistance> {
    if a.x.len() != b.x.len() {
        return Err(Error::Config(format!(
            "edge {}: grids differ ({} vs {} cells)",
            a.id,
            a.x.len(),
            b.x.len()
        )));
    }
    if !(0.0..1.0).contains(&exclude) {
        return Err(Error::Config(format!("exclusion fraction {exclude} outside [0, 1)")));
    }
    let dx = length / a.x.len() as f64;
    let keep = |x: f64| match role {
        EdgeRole::Incoming => x <= length * (1.0 - exclude),
        EdgeRole::Outgoing => x >= length * exclude,
    };
    let (mut l1, mut linf) = (0.0, 0.0f64);
    for ((&x, &ra), &rb) in a.x.iter().zip(&a.rho).zip(&b.rho) {
        if keep(x) {
            let d = (ra - rb).abs();
            l1 += d * dx;
            linf = linf.max(d);
        }
    }
    Ok(EdgeDistance { edge: a.id, l1, linf })
}

/// Per-edge distances for the three diverge edges (edge 1 incoming).
pub fn network_distance(a: &[EdgeSnapshot], b: &[EdgeSnapshot], exclude: f64) -> Result<Vec<EdgeDistance>> {
    let roles = [EdgeRole::Incoming, EdgeRole::Outgoing, EdgeRole::Outgoing];
    a.iter()
        .zip(b)
        .zip(roles)
        .map(|((ea, eb), role)| edge_distance(ea, eb, role, 1.0, exclude))
        .collect()
}
