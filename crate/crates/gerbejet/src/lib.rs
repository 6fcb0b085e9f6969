//! Exact polynomial calculus on the jet coordinates `(x, s)`: symmetry
//! generators, covariant derivatives, curvatures, the special gauge and
//! the homogeneous flatness reduction.

pub mod connection;
pub mod curvature;
pub mod error;
pub mod generator;
pub mod io;
pub mod module;
pub mod poly;
pub mod random;
pub mod reduction;
pub mod special;
pub mod verify;

pub use connection::{cov_deriv_s, cov_deriv_x, covariance_residual, transform_connection, Direction, GerbeConnection};
pub use error::{JetError, Result};
pub use generator::{apply_generator, bracket, homomorphism_residual, Generator};
pub use module::{ModuleKind, ModuleRep, RatMatrix};
pub use poly::{JetPoly, JetSpace, DEFAULT_CAP};
pub use verify::{verify_identity, verify_suite, verify_suite_named, IdentityResult, Status, VerifyConfig, IDENTITIES};
