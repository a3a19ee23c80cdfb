//! Graph lifts, shift lifts and their spectra.

pub mod error;
pub mod expansion;
pub mod experiments;
pub mod graph;
pub mod io;
pub mod lift;
pub mod matrix;
pub mod par;
pub mod rng;
pub mod shift;
pub mod spectral;
pub mod toolkit;

pub use error::{Error, Result};
