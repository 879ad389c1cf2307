//! Spectral stability of ideal-gas Navier-Stokes boundary layers in the
//! standing-shock limit.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod evans;
pub mod gas_model;
pub mod io;
pub mod linalg;
pub mod lopatinski;
pub mod ode;
pub mod profile;
pub mod transition;

pub use error::{Error, Result};
