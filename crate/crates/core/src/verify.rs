//! Grid sweeps comparing the node formulations against each other.

use rayon::prelude::*;
use serde::Serialize;

use crate::diagram::FluxFunction;
use crate::junction::{macro_diverge_nopref, macro_nopref_cases, theorem1_resolve};
use crate::layer::{match_node_oracle, OracleConfig};

/// Densities closer than this to a case boundary are left out of the oracle sweep.
pub const TIE_MARGIN: f64 = 1e-3;

#[derive(Debug, Clone, Serialize)]
pub struct Mismatch {
    pub input: [f64; 3],
    pub expected: [f64; 3],
    pub got: [f64; 3],
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub checked: usize,
    pub mismatches: Vec<Mismatch>,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

fn grid(n: usize, top: f64) -> Vec<f64> {
    (0..n)
        .map(|k| if k + 1 == n { top } else { top * (k as f64 / (n - 1) as f64) })
        .collect()
}

fn triples(axis: &[f64]) -> Vec<[f64; 3]> {
    let mut out = Vec::with_capacity(axis.len().pow(3));
    for &a in axis {
        for &b in axis {
            for &c in axis {
                out.push([a, b, c]);
            }
        }
    }
    out
}

/// Unified no-preference formula against the four-case table, bit for bit,
/// on an `n^3` grid of capacities.
pub fn unified_vs_cases(n: usize, sigma: f64) -> SweepReport {
    let inputs = triples(&grid(n, sigma));
    let mismatches: Vec<Mismatch> = inputs
        .par_iter()
        .filter_map(|&[c1, c2, c3]| {
            let got = macro_diverge_nopref(c1, c2, c3, sigma).ok()?;
            let expected = macro_nopref_cases(c1, c2, c3);
            (got != expected).then_some(Mismatch {
                input: [c1, c2, c3],
                expected,
                got,
            })
        })
        .collect();
    SweepReport {
        checked: inputs.len(),
        mismatches,
    }
}

/// Case-by-case resolution against the unified formula fed with demand and
/// supplies, bit for bit, on an `n^3` grid of far-field densities.
pub fn theorem_vs_unified(n: usize, f: &FluxFunction) -> SweepReport {
    let inputs = triples(&grid(n, 1.0));
    let mismatches: Vec<Mismatch> = inputs
        .par_iter()
        .filter_map(|&rho_b| {
            let got = theorem1_resolve(rho_b, f).ok()?.fluxes;
            let expected = macro_diverge_nopref(
                f.demand(rho_b[0]),
                f.supply(rho_b[1]),
                f.supply(rho_b[2]),
                f.sigma(),
            )
            .ok()?;
            (got != expected).then_some(Mismatch {
                input: rho_b,
                expected,
                got,
            })
        })
        .collect();
    SweepReport {
        checked: inputs.len(),
        mismatches,
    }
}

/// True when `rho_b` sits within `TIE_MARGIN` of a case boundary.
pub fn near_tie(rho_b: [f64; 3], f: &FluxFunction) -> bool {
    let m = TIE_MARGIN;
    if rho_b.iter().any(|r| (r - f.rho_star()).abs() < m) {
        return true;
    }
    let c1 = f.demand(rho_b[0]);
    let c2 = f.supply(rho_b[1]);
    let c3 = f.supply(rho_b[2]);
    (c2 + c3 - c1).abs() < m || (c1 - 2.0 * c2).abs() < m || (c1 - 2.0 * c3).abs() < m || c2 < m || c3 < m
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleCheck {
    pub rho_b: [f64; 3],
    pub theorem: [f64; 3],
    pub oracle: Option<[f64; 3]>,
    pub alternatives: Vec<[f64; 3]>,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleSweep {
    pub grid_n: u64,
    pub skipped: usize,
    pub checks: Vec<OracleCheck>,
}

impl OracleSweep {
    pub fn failures(&self) -> impl Iterator<Item = &OracleCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn passed(&self) -> bool {
        self.failures().next().is_none()
    }
}

/// Oracle against the closed form on a `k^3` density grid, skipping ties.
/// Fluxes must agree to two lattice steps.
pub fn oracle_sweep(k: usize, cfg: OracleConfig, f: &FluxFunction) -> OracleSweep {
    let all = triples(&grid(k, 1.0));
    let inputs: Vec<[f64; 3]> = all.iter().copied().filter(|&r| !near_tie(r, f)).collect();
    let tol = 2.0 * f.sigma() / cfg.grid_n as f64;
    let checks = inputs
        .par_iter()
        .map(|&rho_b| {
            let theorem = theorem1_resolve(rho_b, f).expect("densities in range").fluxes;
            match match_node_oracle(rho_b, f, cfg) {
                Ok(o) => {
                    let fluxes = o.resolution.fluxes;
                    let close = (0..3).all(|i| (fluxes[i] - theorem[i]).abs() <= tol);
                    OracleCheck {
                        rho_b,
                        theorem,
                        oracle: Some(fluxes),
                        passed: close && !o.is_ambiguous(),
                        alternatives: o.alternatives,
                    }
                }
                Err(_) => OracleCheck {
                    rho_b,
                    theorem,
                    oracle: None,
                    alternatives: Vec::new(),
                    passed: false,
                },
            }
        })
        .collect();
    OracleSweep {
        grid_n: cfg.grid_n,
        skipped: all.len() - inputs.len(),
        checks,
    }
}
