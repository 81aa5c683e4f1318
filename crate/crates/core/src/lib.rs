//! Essential closures, boundary values of Herglotz and Carathéodory
//! functions, and Weyl–Titchmarsh data for Jacobi, CMV and Schrödinger
//! operators with periodic-plus-finite-patch coefficients.

pub mod boundary;
pub mod cmv;
pub mod error;
pub mod grid;
pub mod harness;
pub mod interval_sets;
pub mod jacobi;
pub mod linalg;
pub mod schrodinger;
pub mod spectral;

pub use error::{Error, Result};
