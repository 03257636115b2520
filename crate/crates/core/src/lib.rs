//! Pseudo-spectral simulator for two-dimensional Ericksen–Leslie nematic
//! liquid crystal flow on a periodic box, with diagnostics that audit the
//! energy dissipation structure and detect energy concentration.

pub mod diagnostics;
pub mod error;
pub mod fields;
pub mod initial;
pub mod io;
pub mod kernels;
pub mod params;
pub mod registry;
pub mod scheme;
pub mod solver;

pub use error::{Error, Result};
pub use fields::{Field, TorusGrid};
pub use params::{LeslieCoefficients, ValidationReport};
pub use solver::{FlowState, Solver, SolverConfig};
