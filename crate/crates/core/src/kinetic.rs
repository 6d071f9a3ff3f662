//! Two-velocity kinetic model.
//!
//! Populations move with speeds 0 and 1; `rho = f0 + f1` and `q = f1`.
//! In Riemann invariants `w = rho - q` is carried by the speed-1 family and
//! `Z = q / (1 - w)` by the `lambda_1` family.

use serde::Serialize;

use crate::diagram::FluxFunction;
use crate::error::{Error, Result};

/// Roundoff slack when validating states.
pub const STATE_TOL: f64 = 1e-12;
/// Upper clamp on `Z` when forming `lambda_1`.
pub const Z_CLAMP: f64 = 1.0 - 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KinState {
    pub rho: f64,
    pub q: f64,
}

/// Riemann invariants of a kinetic state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CharPair {
    pub z: f64,
    pub w: f64,
}

impl KinState {
    /// Checked constructor: `0 <= q <= rho <= 1`.
    pub fn new(rho: f64, q: f64) -> Result<Self> {
        let ok = q >= -STATE_TOL && q <= rho + STATE_TOL && (-STATE_TOL..=1.0 + STATE_TOL).contains(&rho);
        if !ok || !rho.is_finite() || !q.is_finite() {
            return Err(Error::InvalidState { rho, q });
        }
        let rho = rho.clamp(0.0, 1.0);
        Ok(Self {
            rho,
            q: q.clamp(0.0, rho),
        })
    }

    /// State with density `rho` and invariant `z`; `z = 1` forces `w = 0`.
    pub fn from_rho_z(rho: f64, z: f64) -> Self {
        if z >= 1.0 {
            return Self { rho, q: rho };
        }
        let w = (rho - z) / (1.0 - z);
        Self { rho, q: rho - w }
    }

    pub fn f0(&self) -> f64 {
        self.rho - self.q
    }

    pub fn f1(&self) -> f64 {
        self.q
    }

    pub fn w(&self) -> f64 {
        self.rho - self.q
    }

    pub fn z(&self) -> f64 {
        z_of(self.q, self.w())
    }

    pub fn characteristic(&self) -> CharPair {
        CharPair {
            z: self.z(),
            w: self.w(),
        }
    }

    /// `(lambda_1, lambda_2) = (-q / (1 - rho), 1)`.
    pub fn eigenvalues(&self) -> Result<(f64, f64)> {
        if self.rho >= 1.0 {
            if self.q > 0.0 {
                return Err(Error::UnboundedSpeed(self.q));
            }
            return Ok((0.0, 1.0));
        }
        Ok((-self.q / (1.0 - self.rho), 1.0))
    }
}

impl CharPair {
    pub fn to_state(&self) -> KinState {
        let q = self.z * (1.0 - self.w);
        KinState { rho: self.w + q, q }
    }
}

/// `Z = q / (1 - w)` with `Z = 0` at `w = 1`.
pub fn z_of(q: f64, w: f64) -> f64 {
    if w >= 1.0 {
        0.0
    } else {
        q / (1.0 - w)
    }
}

/// `w = (rho - Z) / (1 - Z)` for a cell stored as `(rho, Z)`.
pub fn w_of(rho: f64, z: f64) -> f64 {
    if z >= 1.0 {
        0.0
    } else {
        (rho - z) / (1.0 - z)
    }
}

/// `lambda_1 = -Z / (1 - Z)`, with `Z` clamped below 1. The flag reports clamping.
pub fn lambda1(z: f64) -> (f64, bool) {
    let clamped = z > Z_CLAMP;
    let z = z.clamp(0.0, Z_CLAMP);
    (-z / (1.0 - z), clamped)
}

/// Equilibrium invariant `F / (1 - rho + F)`, zero at `rho = 1`.
pub fn equilibrium_z(rho: f64, f: &FluxFunction) -> f64 {
    let flux = f.flux(rho);
    let den = 1.0 - rho + flux;
    if den <= 0.0 {
        0.0
    } else {
        flux / den
    }
}

/// Transport flux across an interface: `(q, Z q-flux)` from `Z_L` and `w_R`.
pub fn interface_flux(left_z: f64, right_w: f64) -> (f64, f64) {
    (left_z * (1.0 - right_w), left_z)
}

/// Exact solution of the relaxation ODE for `Z` over `dt`; `rho` is unchanged.
pub fn relax_z(rho: f64, z: f64, dt: f64, eps: f64, f: &FluxFunction) -> f64 {
    if rho >= 1.0 {
        return 0.0;
    }
    let flux = f.flux(rho);
    let rate = 1.0 + flux / (1.0 - rho);
    let z_eq = equilibrium_z(rho, f);
    z_eq + (z - z_eq) * (-rate * dt / eps).exp()
}

pub fn relax_exact(state: KinState, dt: f64, eps: f64, f: &FluxFunction) -> Result<KinState> {
    if !(eps > 0.0) {
        return Err(Error::Config(format!("relaxation time eps={eps} must be positive")));
    }
    let z = relax_z(state.rho, state.z(), dt, eps, f);
    Ok(KinState::from_rho_z(state.rho, z))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relaxation_from_rest() {
        let f = FluxFunction::lwr();
        let s = KinState::new(0.5, 0.0).unwrap();
        let r = relax_exact(s, 0.1, 0.1, &f).unwrap();
        assert!((r.z() - (1.0 - (-1.5f64).exp()) / 3.0).abs() < 1e-15, "{}", r.z());
        assert_eq!(r.rho, 0.5);
    }

    #[test]
    fn invariants_round_trip() {
        let s = KinState::new(0.6, 0.2).unwrap();
        let back = s.characteristic().to_state();
        assert!((back.rho - 0.6).abs() < 1e-15 && (back.q - 0.2).abs() < 1e-15);
        let t = KinState::from_rho_z(0.6, s.z());
        assert!((t.q - 0.2).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_states() {
        assert!(KinState::new(0.3, 0.4).is_err());
        assert!(KinState::new(1.2, 0.0).is_err());
        assert!(matches!(
            KinState::new(1.0, 0.5).unwrap().eigenvalues(),
            Err(Error::UnboundedSpeed(_))
        ));
        let f = FluxFunction::lwr();
        assert!(relax_exact(KinState::new(0.5, 0.1).unwrap(), 0.1, 0.0, &f).is_err());
    }

    #[test]
    fn equilibrium_matches_flux() {
        let f = FluxFunction::lwr();
        for rho in [0.0, 0.2, 0.5, 0.9] {
            let s = KinState::from_rho_z(rho, equilibrium_z(rho, &f));
            assert!((s.q - f.flux(rho)).abs() < 1e-14);
        }
        assert_eq!(equilibrium_z(1.0, &f), 0.0);
    }
}
