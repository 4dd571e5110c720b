//! Numerical realization of the Lie-Rinehart observable algebra of a quantum
//! particle on low-dimensional manifolds.
//!
//! The crate builds the Schroedinger representation on a grid (functions,
//! momenta `T_v`, resolvents, flow unitaries), checks the defining operator
//! relations as convergent residuals, and constructs the twisted
//! representations labelled by unitary representations of the fundamental
//! group together with their spectra.

pub mod cli;
pub mod error;
pub mod field;
pub mod flows;
pub mod homotopy;
pub mod linalg;
pub mod manifold;
pub mod operators;
pub mod probes;
pub mod representations;
pub mod spectra;
pub mod stencil;
pub mod transport;

pub use error::{Error, Result};
