//! Closed-form resolution of the diverge from the far-field densities.
//!
//! Road 1 is of the first kind when `rho_b >= rho_star` (every flux up to
//! `sigma` is reachable); roads 2 and 3 when `rho_b <= rho_star`.

use crate::diagram::FluxFunction;
use crate::error::{check_density, Result};
use crate::junction::{
    macro_diverge_equalpref, LayerPattern, NodeResolution, ResolutionLabel, Stability, Trace,
};
use crate::lwr::{junction_state, Side};

use Stability::{Stable as S, Unstable as U};

const SUU: [Stability; 3] = [S, U, U];
const SUS: [Stability; 3] = [S, U, S];
const SSU: [Stability; 3] = [S, S, U];
const USS: [Stability; 3] = [U, S, S];

pub fn theorem1_resolve(rho_b: [f64; 3], f: &FluxFunction) -> Result<NodeResolution> {
    for r in rho_b {
        check_density(r)?;
    }
    let rs = f.rho_star();
    let s = f.sigma();
    let [f1, f2, f3] = rho_b.map(|r| f.flux(r));
    let kind = (rho_b[0] >= rs, rho_b[1] <= rs, rho_b[2] <= rs);

    let (case, subcase, pattern, fluxes) = match kind {
        (true, true, true) => (1, 1, SUU, [s, 0.5 * s, 0.5 * s]),
        (true, true, false) => {
            if 2.0 * f3 <= s {
                (2, 1, SUS, [s, s - f3, f3])
            } else {
                (2, 2, SUU, [s, 0.5 * s, 0.5 * s])
            }
        }
        (true, false, true) => {
            if 2.0 * f2 <= s {
                (3, 1, SSU, [s, f2, s - f2])
            } else {
                (3, 2, SUU, [s, 0.5 * s, 0.5 * s])
            }
        }
        (false, true, true) => (4, 1, SUU, [f1, 0.5 * f1, 0.5 * f1]),
        (true, false, false) => {
            if f2 + f3 <= s {
                (5, 1, USS, [f2 + f3, f2, f3])
            } else if 2.0 * f2 >= s && 2.0 * f3 >= s {
                (5, 2, SUU, [s, 0.5 * s, 0.5 * s])
            } else if 2.0 * f3 <= s {
                (5, 3, SUS, [s, s - f3, f3])
            } else {
                (5, 4, SSU, [s, f2, s - f2])
            }
        }
        (false, true, false) => {
            if f1 <= 2.0 * f3 {
                (6, 1, SUU, [f1, 0.5 * f1, 0.5 * f1])
            } else {
                (6, 2, SUS, [f1, f1 - f3, f3])
            }
        }
        (false, false, true) => {
            if f1 <= 2.0 * f2 {
                (7, 1, SUU, [f1, 0.5 * f1, 0.5 * f1])
            } else {
                (7, 2, SSU, [f1, f2, f1 - f2])
            }
        }
        (false, false, false) => {
            if f2 + f3 <= f1 {
                (8, 1, USS, [f2 + f3, f2, f3])
            } else if f1 <= 2.0 * f2.min(f3) {
                (8, 2, SUU, [f1, 0.5 * f1, 0.5 * f1])
            } else if 2.0 * f3 <= f1 {
                (8, 3, SUS, [f1, f1 - f3, f3])
            } else {
                (8, 4, SSU, [f1, f2, f1 - f2])
            }
        }
    };

    Ok(NodeResolution {
        fluxes,
        traces: traces(pattern, fluxes, f).map(Some),
        rho_k: junction_states(pattern, fluxes, f),
        label: ResolutionLabel::Theorem {
            case,
            subcase,
            layers: LayerPattern(pattern),
        },
    })
}

/// `rho_0` on each road implied by the layer pattern.
fn traces(pattern: [Stability; 3], c: [f64; 3], f: &FluxFunction) -> [Trace; 3] {
    let unique = |value| Trace { value, unique: true };
    let loose = |value| Trace { value, unique: false };
    if pattern[0] == U {
        let r = f.rho_plus(c[0]);
        let road = |ci: f64| if ci == 0.0 { loose(r) } else { unique(r) };
        return [unique(r), road(c[1]), road(c[2])];
    }
    let r = f.rho_minus(c[1].max(c[2]));
    let r1 = unique(r.max(c[0]));
    match pattern {
        SUS if c[2] == 0.0 => [r1, unique(r), loose(r)],
        SSU if c[1] == 0.0 => [r1, loose(r), unique(r)],
        _ => [r1, unique(r), unique(r)],
    }
}

/// LWR state next to the node for each layer tag.
pub(crate) fn junction_states(pattern: [Stability; 3], c: [f64; 3], f: &FluxFunction) -> [f64; 3] {
    let road1 = match pattern[0] {
        S => f.rho_minus(c[0]),
        U => f.rho_plus(c[0]),
    };
    let out = |tag, ci| match tag {
        U => f.rho_minus(ci),
        S => f.rho_plus(ci),
    };
    [road1, out(pattern[1], c[1]), out(pattern[2], c[2])]
}

/// Fluxes and LWR junction states for the equal-preference node.
pub fn equalpref_resolve(rho_b: [f64; 3], f: &FluxFunction) -> Result<NodeResolution> {
    for r in rho_b {
        check_density(r)?;
    }
    let fluxes = macro_diverge_equalpref(
        f.demand(rho_b[0]),
        f.supply(rho_b[1]),
        f.supply(rho_b[2]),
        f.sigma(),
    )?;
    Ok(NodeResolution {
        fluxes,
        traces: [None; 3],
        rho_k: [
            junction_state(Side::Right, rho_b[0], fluxes[0], f),
            junction_state(Side::Left, rho_b[1], fluxes[1], f),
            junction_state(Side::Left, rho_b[2], fluxes[2], f),
        ],
        label: ResolutionLabel::EqualPref,
    })
}
