//! Stationary boundary layers of the kinetic model.
//!
//! At flux `C` the layer density solves `rho' = +/-(1 - rho)(F(rho) - C) / C`
//! in the stretched variable `y`, connecting the kinetic trace `rho_0` at the
//! node to the LWR state `rho_K` far from it.

mod classify;
mod ode;
pub mod oracle;

pub use classify::{classify, LayerClassification, LayerRow};
pub use ode::{integrate_layer, layer_rhs, LayerOutcome, LayerTrajectory, DEFAULT_Y_MAX};
pub use oracle::{match_node_oracle, OracleConfig, OracleResolution};
