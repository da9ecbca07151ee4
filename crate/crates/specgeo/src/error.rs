//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by the library.
///
/// Input and validation problems (bad shapes, malformed files, spectra
/// outside the positive cone) are distinguished from numerical failures
/// (iterations that did not converge, internal cross-checks that broke)
/// so that the CLI can map them to different exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("frequency grids differ ({left} vs {right} points)")]
    GridMismatch { left: usize, right: usize },

    #[error("grid size {n} is not a power of two >= 4")]
    InvalidGridSize { n: usize },

    #[error("expected {expected} grid samples, got {found}")]
    SampleCount { expected: usize, found: usize },

    #[error("matrix is not Hermitian: relative asymmetry {asymmetry:.3e} exceeds {tolerance:.1e}")]
    NotHermitian { asymmetry: f64, tolerance: f64 },

    #[error("matrix is not positive definite: eigenvalue {eigenvalue:.6e} at or below floor {floor:.6e}")]
    NotPositiveDefinite { eigenvalue: f64, floor: f64 },

    #[error("grid sample {index} is not positive definite: eigenvalue {eigenvalue:.6e} at or below floor {floor:.6e}")]
    SampleNotPositiveDefinite {
        index: usize,
        eigenvalue: f64,
        floor: f64,
    },

    #[error("{function} is undefined here: eigenvalue {eigenvalue:.6e} at or below floor {floor:.6e}")]
    MatrixFunctionDomain {
        function: &'static str,
        eigenvalue: f64,
        floor: f64,
    },

    #[error("eigensolver did not converge within {iterations} iterations")]
    EigenConvergence { iterations: usize },

    #[error("spectrum unbounded on grid: min |a| over the refined grid is {min_abs:.3e}")]
    SpectrumUnbounded { min_abs: f64 },

    #[error("the zero polynomial has no roots")]
    ZeroPolynomial,

    #[error("polynomial must have degree >= 1 for root finding")]
    ConstantPolynomial,

    #[error("spectral factor sample {index} is singular")]
    SingularFactorSample { index: usize },

    #[error("spectral factorization did not converge: residual {residual:.3e} after {iterations} iterations")]
    FactorizationDiverged { iterations: usize, residual: f64 },

    #[error("{what}: the two evaluation routes disagree ({a:.15e} vs {b:.15e}, tolerance {tolerance:.1e})")]
    CrossCheckFailed {
        what: &'static str,
        a: f64,
        b: f64,
        tolerance: f64,
    },

    #[error("{measure} came out negative ({value:.3e}), below the numerical zero floor")]
    NegativeDivergence { measure: &'static str, value: f64 },

    #[error("perturbed spectrum leaves the positive cone at epsilon={epsilon}: {failures} offending grid points")]
    InadmissiblePerturbation { epsilon: f64, failures: usize },

    #[error("{failures} selftest check(s) failed")]
    SelftestFailed { failures: usize },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Format {
        path: String,
        line: usize,
        message: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for errors caused by bad inputs (files, shapes, content),
    /// false for numerical failures during computation.
    pub fn is_input_error(&self) -> bool {
        !matches!(
            self,
            Error::EigenConvergence { .. }
                | Error::FactorizationDiverged { .. }
                | Error::CrossCheckFailed { .. }
                | Error::NegativeDivergence { .. }
                | Error::SingularFactorSample { .. }
                | Error::SelftestFailed { .. }
        )
    }
}
