//! Spectral analysis of the non-local Neumann dispersal operator
//! 𝓛v(x) = ∫_Ω J(x−y)(v(y) − v(x)) dy
//! on finite unions of axis-aligned boxes: the continuous spectrum band of
//! the multiplication part, discrete eigenvalues and eigenfunctions via a
//! constrained Galerkin projection, and sufficient geometric conditions
//! guaranteeing a spectral gap above the band.

pub mod band;
pub mod cli;
pub mod domain;
pub mod error;
pub mod galerkin;
pub mod gap;
pub mod kernel;
pub mod linalg;
pub mod quadrature;

pub use error::{Error, Result};
