//! Geometry of matrix-valued power spectral densities.
//!
//! The crate implements prediction-based divergence measures between matrix
//! spectra, the Riemannian metrics they induce, closed-form geodesics and
//! geodesic distances, and the spectral-factorization machinery (scalar
//! cepstral and multivariate Wilson iteration) behind them.
//!
//! Organization:
//!
//! * [`hermitian`] - Hermitian/SPD primitives and the affine-invariant
//!   geometry of a single positive definite matrix.
//! * [`psd`] - spectra on a uniform frequency grid, quadrature, polynomial
//!   constructors, interpolation paths.
//! * [`factor`] - canonical left spectral factors, prediction-error
//!   variances, predictors, innovation spectra.
//! * [`divergence`] - the six divergence measures.
//! * [`geometry`] - metrics g1/g2, geodesics, quadratic-expansion checks.
//! * [`examples`] - the two bundled example spectra.
//! * [`io`] - text file formats, CSV, SVG emission.
//! * [`cli`] - the implementations behind the `specgeo` binary.
//! * [`random`] - seeded generators for self-tests and property checks.

pub mod cli;
pub mod divergence;
pub mod error;
pub mod examples;
pub mod factor;
mod fft;
pub mod geometry;
pub mod hermitian;
pub mod io;
pub mod psd;
pub mod random;

pub use error::{Error, Result};
pub use hermitian::{
    geometric_mean, spd_distance, spd_geodesic, symmetrize, CMat, HermitianMatrix, SpdMatrix,
};
pub use psd::{FrequencyGrid, MatrixPsd, PerturbationField};
