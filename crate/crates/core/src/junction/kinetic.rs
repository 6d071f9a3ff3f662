//! Coupling conditions for the kinetic model at a 1-to-2 diverge.
//!
//! Inputs are the incoming traces: `Z` of road 1 and `w` of roads 2 and 3.
//! Outputs are the missing invariants `w^1`, `Z^2`, `Z^3`.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NodeTraces {
    pub z1: f64,
    pub w2: f64,
    pub w3: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum NoPrefCase {
    I,
    II,
    III,
    IV,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EqualPrefCase {
    I,
    II,
    III,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CouplingCase {
    NoPref(NoPrefCase),
    EqualPref(EqualPrefCase),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NodeSolution {
    pub w1: f64,
    pub z2: f64,
    pub z3: f64,
    pub case: CouplingCase,
}

impl NodeTraces {
    fn validate(&self) -> Result<()> {
        for (name, value) in [("z1", self.z1), ("w2", self.w2), ("w3", self.w3)] {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::NodeInput { name, value });
            }
        }
        Ok(())
    }
}

impl NodeSolution {
    /// Node fluxes `(q^1, q^2, q^3)`.
    pub fn fluxes(&self, t: &NodeTraces) -> [f64; 3] {
        [
            t.z1 * (1.0 - self.w1),
            self.z2 * (1.0 - t.w2),
            self.z3 * (1.0 - t.w3),
        ]
    }

    /// Reconstructed `(rho, q)` on each road at the node.
    pub fn states(&self, t: &NodeTraces) -> [(f64, f64); 3] {
        let q = self.fluxes(t);
        [
            (self.w1 + q[0], q[0]),
            (t.w2 + q[1], q[1]),
            (t.w3 + q[2], q[2]),
        ]
    }
}

/// `Z^i` from `(1 - w^i) Z^i = rhs`, zero when `w^i = 1`.
fn solve_z(rhs: f64, w: f64) -> f64 {
    if w >= 1.0 {
        0.0
    } else {
        (rhs / (1.0 - w)).clamp(0.0, 1.0)
    }
}

/// Flux-maximising coupling without a driver preference.
pub fn couple_nopref(t: NodeTraces) -> Result<NodeSolution> {
    t.validate()?;
    let NodeTraces { z1: z, w2, w3 } = t;
    let d = w2 - w3;
    let (w1, z2, z3, case) = if z * (1.0 - w3) >= d && z * (1.0 - w2) >= -d && w2 + w3 >= z {
        let w1 = 1.0 - (2.0 - w2 - w3) / (2.0 - z);
        let z2 = solve_z((z * (1.0 - w3) - d) / (2.0 - z), w2);
        let z3 = solve_z((z * (1.0 - w2) + d) / (2.0 - z), w3);
        (w1, z2, z3, NoPrefCase::I)
    } else if w2 + w3 <= z {
        let z2 = solve_z(0.5 * (z - d), w2);
        let z3 = solve_z(0.5 * (z + d), w3);
        (0.0, z2, z3, NoPrefCase::II)
    } else if z * (1.0 - w3) <= d && w2 >= w3 {
        (w3, 0.0, z, NoPrefCase::III)
    } else {
        (w2, z, 0.0, NoPrefCase::IV)
    };
    Ok(NodeSolution {
        w1: w1.clamp(0.0, 1.0),
        z2,
        z3,
        case: CouplingCase::NoPref(case),
    })
}

/// Coupling with half of road 1 turning onto each outgoing road.
pub fn couple_equalpref(t: NodeTraces) -> Result<NodeSolution> {
    t.validate()?;
    let NodeTraces { z1: z, w2, w3 } = t;
    let half = 0.5 * z;
    let (one_minus_w1, case) = if w3 >= half && w2 <= w3 {
        ((1.0 - w3) / (1.0 - half), EqualPrefCase::III)
    } else if w2 >= half && w2 >= w3 {
        ((1.0 - w2) / (1.0 - half), EqualPrefCase::II)
    } else {
        (1.0, EqualPrefCase::I)
    };
    let one_minus_w1 = one_minus_w1.clamp(0.0, 1.0);
    Ok(NodeSolution {
        w1: 1.0 - one_minus_w1,
        z2: solve_z(one_minus_w1 * half, w2),
        z3: solve_z(one_minus_w1 * half, w3),
        case: CouplingCase::EqualPref(case),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nopref_case_one() {
        let t = NodeTraces { z1: 0.5, w2: 0.3, w3: 0.3 };
        let s = couple_nopref(t).unwrap();
        assert_eq!(s.case, CouplingCase::NoPref(NoPrefCase::I));
        assert!((s.w1 - (1.0 - 1.4 / 1.5)).abs() < 1e-15);
        let q = s.fluxes(&t);
        assert!((q[0] - q[1] - q[2]).abs() < 1e-15);
    }

    #[test]
    fn equalpref_free_branch() {
        let t = NodeTraces { z1: 0.6, w2: 0.1, w3: 0.2 };
        let s = couple_equalpref(t).unwrap();
        assert_eq!(s.case, CouplingCase::EqualPref(EqualPrefCase::I));
        assert_eq!(s.w1, 0.0);
        let q = s.fluxes(&t);
        assert!((q[1] - 0.3).abs() < 1e-15 && (q[2] - 0.3).abs() < 1e-15);
    }

    #[test]
    fn rejects_out_of_range() {
        let t = NodeTraces { z1: 1.2, w2: 0.0, w3: 0.0 };
        assert!(matches!(couple_nopref(t), Err(Error::NodeInput { name: "z1", .. })));
        assert!(couple_equalpref(t).is_err());
    }
}
