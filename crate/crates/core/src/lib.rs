//! Constant-width deformations of the unit disk and the Dirichlet spectrum.
//!
//! The crate builds bodies of constant width 2 from odd Fourier data of the
//! support function, predicts eigenvalues to second order in the deformation
//! size, certifies the signs that decide whether the disk is a local
//! minimizer of each λ_κ, and checks the predictions against an independent
//! eigensolver.

pub mod bessel;
pub mod certify;
pub mod disk_spectrum;
pub mod error;
pub mod io;
pub mod oracle_solver;
pub mod perturbation;
pub mod published;
pub mod width_body;

pub use error::{Error, Result};
