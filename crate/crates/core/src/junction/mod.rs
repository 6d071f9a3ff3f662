//! Coupling conditions at the diverging node.
//!
//! Road 1 feeds the node at its right end; roads 2 and 3 leave it at their left end.

pub mod kinetic;
pub mod macroscopic;
pub mod theorem;

use std::fmt;

use serde::Serialize;

pub use kinetic::{
    couple_equalpref, couple_nopref, CouplingCase, EqualPrefCase, NoPrefCase, NodeSolution, NodeTraces,
};
pub use macroscopic::{macro_diverge_equalpref, macro_diverge_nopref, macro_nopref_cases};
pub use theorem::{equalpref_resolve, theorem1_resolve};

/// Stability of the boundary layer on one road.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Stability {
    Stable,
    Unstable,
}

impl Stability {
    pub fn letter(self) -> char {
        match self {
            Stability::Stable => 'S',
            Stability::Unstable => 'U',
        }
    }
}

/// Layer stability on roads 1, 2, 3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct LayerPattern(pub [Stability; 3]);

impl LayerPattern {
    pub const ALL: [LayerPattern; 8] = {
        use Stability::{Stable as S, Unstable as U};
        [
            LayerPattern([S, S, S]),
            LayerPattern([S, S, U]),
            LayerPattern([S, U, S]),
            LayerPattern([S, U, U]),
            LayerPattern([U, S, S]),
            LayerPattern([U, S, U]),
            LayerPattern([U, U, S]),
            LayerPattern([U, U, U]),
        ]
    };

    pub fn parse(s: &str) -> Option<Self> {
        let tags: Vec<Stability> = s
            .chars()
            .map(|c| match c {
                'S' => Some(Stability::Stable),
                'U' => Some(Stability::Unstable),
                _ => None,
            })
            .collect::<Option<_>>()?;
        Some(Self(tags.try_into().ok()?))
    }
}

impl fmt::Display for LayerPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in self.0 {
            write!(f, "{}", s.letter())?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum ResolutionLabel {
    /// Case from the Riemann-problem type on each road, with its subcase.
    Theorem { case: u8, subcase: u8, layers: LayerPattern },
    /// Found by enumerating layers and coupling cases.
    Oracle { layers: LayerPattern, coupling: NoPrefCase },
    EqualPref,
}

impl fmt::Display for ResolutionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ResolutionLabel::Theorem { case, subcase, layers } => write!(f, "case {case}.{subcase} {layers}"),
            ResolutionLabel::Oracle { layers, coupling } => write!(f, "oracle {layers} coupling {coupling:?}"),
            ResolutionLabel::EqualPref => write!(f, "equal preference"),
        }
    }
}

/// Density at the node on the kinetic side of the layer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Trace {
    pub value: f64,
    /// False when any density above `value` is equally admissible.
    pub unique: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NodeResolution {
    /// `(C^1, C^2, C^3)`.
    pub fluxes: [f64; 3],
    /// `rho_0` on each road.
    pub traces: [Option<Trace>; 3],
    /// LWR state next to the node on each road.
    pub rho_k: [f64; 3],
    pub label: ResolutionLabel,
}
