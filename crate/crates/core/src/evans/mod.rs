//! One-dimensional Evans functions for the boundary layer, the limiting
//! shock and the constant layer.

pub mod bases;
pub mod functions;
pub mod index;
pub mod system;

use serde::{Deserialize, Serialize};

pub use bases::{bases_at, limiting_bases, transport, BasisKind, LimitingBases};
pub use functions::{
    beta_factor, evans_boundary, evans_boundary_multi, evans_constant, evans_constant_dual, evans_shock,
    factorization_check, EvansValue, FactorizationRow,
};
pub use index::{stability_index, transverse_mode, winding_number, zero_count, Contour, IndexGrid, StabilityIndex, WindingResult};
pub use system::{boundary_kernel, build_system, checked_boundary_kernel, BoundaryType, EvansSystem, DIM};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvansOptions {
    /// Half-length of the computational line; defaults to twelve decay
    /// lengths on each side.
    pub length: Option<f64>,
    pub rtol: f64,
    pub atol: f64,
    pub max_step: f64,
    pub max_steps: usize,
    pub boundary: BoundaryType,
}

impl Default for EvansOptions {
    fn default() -> Self {
        EvansOptions {
            length: None,
            rtol: 1e-9,
            atol: 1e-11,
            max_step: 0.25,
            max_steps: 2_000_000,
            boundary: BoundaryType::DirichletInflow,
        }
    }
}
