//! Hypercubic-lattice 1-form and 2-form gauge theory.

pub mod abelian;
pub mod geometry;
pub mod links;
pub mod mc;
pub mod plaquettes;
pub mod surface;

pub use geometry::{LatticeGeometry, LinkId};
pub use links::{GaugeGroup, LatticePath, LinkData, LinkField, Step};
pub use plaquettes::{Amplitude, PlaquetteField};
pub use surface::{wilson_surface, SurfacePatch, WilsonSurface};
pub use abelian::{wrap_angle, AbelianPlaquetteAngles};
pub use mc::{mc_metropolis_abelian, McConfig, McResult};
