//! Periodic grids, sampled fields, and spectral differential operators.

mod field;
mod grid;
pub mod spectral;

pub use field::Field;
pub use grid::TorusGrid;
pub use spectral::{
    dealias, divergence, gradient, integrate, inverse_laplacian, laplacian, leray_project, partial, tensor_divergence,
};
