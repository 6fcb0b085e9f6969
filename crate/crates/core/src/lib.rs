//! p-form lattice gauge theory on hypercubic lattices, Yang–Baxter and
//! tetrahedron residuals, and Lie algebra helpers.

pub mod error;
pub mod holonomy;
pub mod lattice;
pub mod liealg;
pub mod multitensor;
pub mod rational;
pub mod seed;
pub mod simplex;

pub use error::{CoreError, Result};
