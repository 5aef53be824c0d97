//! Restricted root systems, Einstein-operator spectral bounds and radial
//! heat kernels on noncompact symmetric spaces.

pub mod catalog;
pub mod error;
pub mod geo;
pub mod heat;
pub mod lie;
pub mod linalg;
pub mod roots;
pub mod spectra;
pub mod verify;

pub use error::{Error, Result};
