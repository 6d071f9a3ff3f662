//! Scalar conservation law `rho_t + F(rho)_x = 0`.

use serde::Serialize;

use crate::diagram::FluxFunction;
use crate::error::{check_density, Result};
use crate::interval::{Interval, IntervalSet};

/// Membership tolerance for half-Riemann sets.
pub const HALF_RIEMANN_TOL: f64 = 1e-10;

/// Which end of an edge the boundary sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Side {
    /// Boundary at the left end; used for edges leaving the node.
    Left,
    /// Boundary at the right end; used for the edge feeding the node.
    Right,
}

/// `min(demand(rho_l), supply(rho_r))`.
pub fn godunov_flux(rho_l: f64, rho_r: f64, f: &FluxFunction) -> f64 {
    f.demand(rho_l).min(f.supply(rho_r))
}

pub fn godunov_flux_checked(rho_l: f64, rho_r: f64, f: &FluxFunction) -> Result<f64> {
    check_density(rho_l)?;
    check_density(rho_r)?;
    Ok(godunov_flux(rho_l, rho_r, f))
}

/// Boundary states `rho_k` whose Riemann problem against the interior state
/// `rho_b` sends every wave into the edge.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HalfRiemannSet {
    pub side: Side,
    pub rho_b: f64,
    pub set: IntervalSet,
}

impl HalfRiemannSet {
    pub fn contains(&self, rho_k: f64) -> bool {
        self.set.contains_approx(rho_k, HALF_RIEMANN_TOL)
    }

    pub fn contains_tol(&self, rho_k: f64, tol: f64) -> bool {
        self.set.contains_approx(rho_k, tol)
    }
}

pub fn half_riemann_set(side: Side, rho_b: f64, f: &FluxFunction) -> Result<HalfRiemannSet> {
    check_density(rho_b)?;
    let rs = f.rho_star();
    let pieces = match side {
        Side::Left if rho_b <= rs => vec![Interval::closed(0.0, rs)],
        Side::Left => vec![Interval::closed(0.0, f.tau(rho_b)?), Interval::point(rho_b)],
        Side::Right if rho_b >= rs => vec![Interval::closed(rs, 1.0)],
        Side::Right => vec![Interval::point(rho_b), Interval::closed(f.tau(rho_b)?, 1.0)],
    };
    Ok(HalfRiemannSet {
        side,
        rho_b,
        set: IntervalSet::new(pieces),
    })
}

/// Element of the half-Riemann set carrying flux `c`. A flux equal to
/// `F(rho_b)` keeps the far-field state.
pub fn junction_state(side: Side, rho_b: f64, c: f64, f: &FluxFunction) -> f64 {
    if (f.flux(rho_b) - c).abs() <= 1e-12 {
        return rho_b;
    }
    match side {
        Side::Left => f.rho_minus(c),
        Side::Right => f.rho_plus(c),
    }
}
