//! Kinetic two-velocity traffic model, its LWR relaxation limit, and the
//! boundary-layer analysis of a 1-to-2 diverging junction.

pub mod diagram;
pub mod error;
pub mod interval;
pub mod junction;
pub mod kinetic;
pub mod layer;
pub mod lwr;
pub mod metrics;
pub mod output;
pub mod scenario;
pub mod sim;
pub mod verify;

pub use diagram::FluxFunction;
pub use error::{Error, Result};
