//! Parallel Schwarz iteration for the Laplace Dirichlet problem on unions of overlapping
//! disks, and numerical analysis of the two-disk Dirichlet-to-Dirichlet operator.

pub mod cli;
pub mod config;
pub mod disk_harmonic;
pub mod dtd;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod manufactured;
pub mod quadrature;
pub mod schwarz;
pub mod spectral;
pub mod strip;
pub mod verify;

pub use error::{Error, Result, Warning};
