//! Sampling of complex Hermitian Wigner matrices and the spectral, minor,
//! eigenvector and resolvent statistics used to study them.
//!
//! Conventions: indices are 0-based; `log` is the natural logarithm; the
//! matrix entries carry the `N^{-1/2}` normalization so the spectrum fills
//! `[-2, 2]`.

pub mod ensemble;
pub mod error;
pub mod expr;
pub mod greens;
mod linalg;
pub mod localization;
pub mod matrix;
pub mod minor;
pub mod quad;
pub mod rng;
pub mod spectral;

pub use ensemble::{builtin_law, builtin_laws, sample_complex_vector, sample_real, sample_wigner, EntryLaw, LawSpec};
pub use error::{Error, Result};
pub use matrix::{ComplexMatrix, HermitianMatrix};
pub use rng::SeedSpec;
pub use spectral::{eigh, eigvalsh, GridSpec, SpectralData, SpectralPoint, Spectrum};

pub use num_complex::Complex64;
