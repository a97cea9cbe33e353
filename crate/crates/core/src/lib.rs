//! Core library for building and analyzing finite-dimensional probabilistic
//! models over polytopic state spaces: exact polyhedral cone computations,
//! abstract state spaces and their tensor composites, and verification and
//! synthesis of teleportation protocols, including entanglement swapping.
//!
//! All geometry is generic over a [`scalar::Scalar`] backend: exact big
//! rationals or `f64` with a zero-test tolerance.

pub mod composite;
pub mod cone;
pub mod error;
pub mod io;
pub mod linalg;
pub mod lp;
pub mod scalar;
pub mod space;
pub mod swap;
pub mod symmetry;
pub mod teleport;

pub use error::{Error, Result};
pub use scalar::{Approx, Backend, Scalar, Sign};

/// The exact rational scalar.
pub type Rational = num_rational::BigRational;
