//! Frequency-domain analysis of image datasets.
//!
//! Radial spectral densities, class-wise ADCS maps, spectral whitening,
//! synthetic shortcut corruption and learning-priority traces of gradient
//! maps, with `.npy`/PGM/PNG I/O and a `spectool` command-line front end.

pub mod adcs;
pub mod cli;
pub mod error;
pub mod image;
pub mod io;
pub mod priority;
pub mod shortcuts;
pub mod spectral;
pub mod svg;
pub mod synthetic;
pub mod whitening;

pub use error::{Error, FormatError, Result};
pub use image::ImageBuffer;
