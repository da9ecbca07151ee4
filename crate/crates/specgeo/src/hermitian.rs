//! Hermitian/SPD matrix primitives and the affine-invariant geometry of
//! positive definite matrices.
//!
//! Everything here goes through the Hermitian eigendecomposition: the target
//! dimensions are small (m <= 16), and one mechanism gives sqrt, log, exp and
//! fractional powers uniformly. The affine-invariant metric
//! g_M(D) = tr(M^-1 D M^-1 D) has the closed-form geodesic
//!
//!   M_tau = M0^{1/2} (M0^{-1/2} M1 M0^{-1/2})^tau M0^{1/2}
//!
//! with distance ||log(M0^{-1/2} M1 M0^{-1/2})||_F; the parameter tau is not
//! restricted to [0,1] (the space is geodesically complete, so extrapolation
//! stays inside the cone).

use nalgebra::linalg::SymmetricEigen;
use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense complex matrix, the working representation throughout the crate.
pub type CMat = DMatrix<Complex64>;

/// Relative asymmetry above which an allegedly Hermitian input is rejected
/// instead of silently repaired; repairs that large are almost always caller
/// bugs.
pub const ASYMMETRY_TOLERANCE: f64 = 1e-8;

/// Default relative eigenvalue floor for positive definiteness checks.
pub const DEFAULT_EIG_FLOOR_REL: f64 = 1e-12;

/// Absolute eigenvalue floor; below this the geometry is meaningless.
pub const ABSOLUTE_EIG_FLOOR: f64 = 1e-300;

const EIG_MAX_ITERATIONS: usize = 5000;

pub(crate) fn eig_floor(rel: f64, max_abs_eigenvalue: f64) -> f64 {
    (rel * max_abs_eigenvalue).max(ABSOLUTE_EIG_FLOOR)
}

/// Force exact Hermitian symmetry: real diagonal, conjugate-mirrored
/// off-diagonal entries (each pair replaced by its Hermitian average).
pub(crate) fn hermitize_mut(a: &mut CMat) {
    let m = a.nrows();
    for i in 0..m {
        a[(i, i)] = Complex64::new(a[(i, i)].re, 0.0);
        for j in (i + 1)..m {
            let avg = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
            a[(i, j)] = avg;
            a[(j, i)] = avg.conj();
        }
    }
}

/// An m x m complex matrix with entries[i][j] == conj(entries[j][i]) exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    data: CMat,
}

/// A Hermitian matrix whose eigenvalues all exceed the positive-definiteness
/// floor (relative to the largest eigenvalue magnitude).
#[derive(Debug, Clone, PartialEq)]
pub struct SpdMatrix {
    base: HermitianMatrix,
}

/// Eigendecomposition of a Hermitian matrix: A = V diag(lambda) V*.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Real eigenvalues in ascending order.
    pub eigenvalues: Vec<f64>,
    /// Unitary matrix whose columns are the matching eigenvectors.
    pub eigenvectors: CMat,
}

/// Hermitian part (A + A*)/2 of a square matrix.
pub fn symmetrize(a: &CMat) -> Result<HermitianMatrix> {
    if a.nrows() != a.ncols() {
        return Err(Error::NonSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    let mut data = a.clone();
    hermitize_mut(&mut data);
    Ok(HermitianMatrix { data })
}

impl HermitianMatrix {
    /// Validate that `a` is Hermitian up to [`ASYMMETRY_TOLERANCE`] and store
    /// the exactly symmetrized result.
    pub fn try_new(a: CMat) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(Error::NonSquare {
                rows: a.nrows(),
                cols: a.ncols(),
            });
        }
        let scale = a.norm().max(f64::MIN_POSITIVE);
        let asymmetry = (&a - a.adjoint()).norm() / (2.0 * scale);
        if asymmetry > ASYMMETRY_TOLERANCE {
            return Err(Error::NotHermitian {
                asymmetry,
                tolerance: ASYMMETRY_TOLERANCE,
            });
        }
        let mut data = a;
        hermitize_mut(&mut data);
        Ok(HermitianMatrix { data })
    }

    /// Wrap a matrix that is Hermitian by construction (still symmetrized
    /// exactly to wash out roundoff).
    pub(crate) fn from_exact(mut data: CMat) -> Self {
        hermitize_mut(&mut data);
        HermitianMatrix { data }
    }

    pub fn identity(m: usize) -> Self {
        HermitianMatrix {
            data: CMat::identity(m, m),
        }
    }

    pub fn zeros(m: usize) -> Self {
        HermitianMatrix {
            data: CMat::zeros(m, m),
        }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let m = diag.len();
        let mut data = CMat::zeros(m, m);
        for (i, &d) in diag.iter().enumerate() {
            data[(i, i)] = Complex64::new(d, 0.0);
        }
        HermitianMatrix { data }
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.data
    }

    pub fn into_matrix(self) -> CMat {
        self.data
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.norm()
    }

    /// Real trace (the imaginary part is zero by the type invariant).
    pub fn trace(&self) -> f64 {
        self.data.trace().re
    }

    pub fn scale(&self, c: f64) -> HermitianMatrix {
        HermitianMatrix {
            data: self.data.scale(c),
        }
    }

    pub fn add(&self, other: &HermitianMatrix) -> HermitianMatrix {
        HermitianMatrix {
            data: &self.data + &other.data,
        }
    }

    pub fn sub(&self, other: &HermitianMatrix) -> HermitianMatrix {
        HermitianMatrix {
            data: &self.data - &other.data,
        }
    }

    /// Eigendecomposition with eigenvalues sorted ascending; closed forms for
    /// m <= 2, iterative tridiagonal solver above.
    pub fn eig(&self) -> Result<HermitianEigen> {
        let m = self.dim();
        match m {
            0 => Ok(HermitianEigen {
                eigenvalues: Vec::new(),
                eigenvectors: CMat::zeros(0, 0),
            }),
            1 => Ok(HermitianEigen {
                eigenvalues: vec![self.data[(0, 0)].re],
                eigenvectors: CMat::identity(1, 1),
            }),
            2 => Ok(eig2(&self.data)),
            _ => {
                let se = SymmetricEigen::try_new(self.data.clone(), f64::EPSILON, EIG_MAX_ITERATIONS)
                    .ok_or(Error::EigenConvergence {
                        iterations: EIG_MAX_ITERATIONS,
                    })?;
                let mut order: Vec<usize> = (0..m).collect();
                order.sort_by(|&i, &j| se.eigenvalues[i].total_cmp(&se.eigenvalues[j]));
                let eigenvalues: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
                let mut eigenvectors = CMat::zeros(m, m);
                for (dst, &src) in order.iter().enumerate() {
                    eigenvectors.set_column(dst, &se.eigenvectors.column(src));
                }
                Ok(HermitianEigen {
                    eigenvalues,
                    eigenvectors,
                })
            }
        }
    }

    /// Matrix exponential; always lands in the positive definite cone.
    pub fn exp(&self) -> Result<SpdMatrix> {
        let eig = self.eig()?;
        let out = eig.apply(f64::exp);
        Ok(SpdMatrix {
            base: HermitianMatrix::from_exact(out),
        })
    }

    /// Hermitian square root; requires eigenvalues above the floor.
    pub fn sqrt(&self) -> Result<SpdMatrix> {
        self.positive_map("sqrt", f64::sqrt)
    }

    /// Principal (real-eigenvalue) logarithm; requires eigenvalues above the
    /// floor.
    pub fn log(&self) -> Result<HermitianMatrix> {
        let eig = self.checked_positive_eig("log")?;
        Ok(HermitianMatrix::from_exact(eig.apply(f64::ln)))
    }

    /// Fractional power lambda^tau on the eigenvalues; requires eigenvalues
    /// above the floor.
    pub fn powf(&self, tau: f64) -> Result<SpdMatrix> {
        self.positive_map("pow", move |x| x.powf(tau))
    }

    fn positive_map(&self, function: &'static str, f: impl Fn(f64) -> f64) -> Result<SpdMatrix> {
        let eig = self.checked_positive_eig(function)?;
        Ok(SpdMatrix {
            base: HermitianMatrix::from_exact(eig.apply(f)),
        })
    }

    fn checked_positive_eig(&self, function: &'static str) -> Result<HermitianEigen> {
        let eig = self.eig()?;
        let max_abs = eig
            .eigenvalues
            .iter()
            .fold(0.0f64, |acc, &l| acc.max(l.abs()));
        let floor = eig_floor(DEFAULT_EIG_FLOOR_REL, max_abs);
        for &l in &eig.eigenvalues {
            if l <= floor {
                return Err(Error::MatrixFunctionDomain {
                    function,
                    eigenvalue: l,
                    floor,
                });
            }
        }
        Ok(eig)
    }
}

impl HermitianEigen {
    /// Assemble V diag(f(lambda)) V*, exactly symmetrized.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> CMat {
        let m = self.eigenvalues.len();
        let mut scaled = self.eigenvectors.clone();
        for (j, &l) in self.eigenvalues.iter().enumerate() {
            let fl = f(l);
            for i in 0..m {
                scaled[(i, j)] *= fl;
            }
        }
        let mut out = scaled * self.eigenvectors.adjoint();
        hermitize_mut(&mut out);
        out
    }
}

/// Closed-form eigendecomposition of a 2x2 Hermitian matrix.
fn eig2(a: &CMat) -> HermitianEigen {
    let p = a[(0, 0)].re;
    let q = a[(1, 1)].re;
    let b = a[(0, 1)];
    let half_trace = 0.5 * (p + q);
    let delta = 0.5 * (p - q);
    let r = delta.hypot(b.norm());
    let lo = half_trace - r;
    let hi = half_trace + r;

    let mut v = CMat::identity(2, 2);
    if r > 0.0 {
        // Pick the algebraic form whose pivot (delta +- r) cannot cancel.
        let (hi_col, lo_col) = if delta >= 0.0 {
            let t = delta + r;
            (
                [Complex64::new(t, 0.0), b.conj()],
                [-b, Complex64::new(t, 0.0)],
            )
        } else {
            let t = r - delta;
            (
                [b, Complex64::new(t, 0.0)],
                [Complex64::new(-t, 0.0), b.conj()],
            )
        };
        let norm_hi = (hi_col[0].norm_sqr() + hi_col[1].norm_sqr()).sqrt();
        let norm_lo = (lo_col[0].norm_sqr() + lo_col[1].norm_sqr()).sqrt();
        if norm_hi > 0.0 && norm_lo > 0.0 {
            v[(0, 0)] = lo_col[0] / norm_lo;
            v[(1, 0)] = lo_col[1] / norm_lo;
            v[(0, 1)] = hi_col[0] / norm_hi;
            v[(1, 1)] = hi_col[1] / norm_hi;
        }
    }
    HermitianEigen {
        eigenvalues: vec![lo, hi],
        eigenvectors: v,
    }
}

impl SpdMatrix {
    /// Validate positive definiteness with the default eigenvalue floor.
    pub fn try_new(base: HermitianMatrix) -> Result<Self> {
        Self::try_new_with_floor(base, DEFAULT_EIG_FLOOR_REL)
    }

    /// Validate with a caller-chosen relative floor.
    pub fn try_new_with_floor(base: HermitianMatrix, rel_floor: f64) -> Result<Self> {
        let eig = base.eig()?;
        let max_abs = eig
            .eigenvalues
            .iter()
            .fold(0.0f64, |acc, &l| acc.max(l.abs()));
        let floor = eig_floor(rel_floor, max_abs);
        let min = eig.eigenvalues.first().copied().unwrap_or(0.0);
        if min <= floor {
            return Err(Error::NotPositiveDefinite {
                eigenvalue: min,
                floor,
            });
        }
        Ok(SpdMatrix { base })
    }

    /// Symmetrize-check and validate a raw complex matrix in one step.
    pub fn from_matrix(a: CMat) -> Result<Self> {
        SpdMatrix::try_new(HermitianMatrix::try_new(a)?)
    }

    pub fn identity(m: usize) -> Self {
        SpdMatrix {
            base: HermitianMatrix::identity(m),
        }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Result<Self> {
        SpdMatrix::try_new(HermitianMatrix::from_real_diagonal(diag))
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn hermitian(&self) -> &HermitianMatrix {
        &self.base
    }

    pub fn into_hermitian(self) -> HermitianMatrix {
        self.base
    }

    pub fn matrix(&self) -> &CMat {
        self.base.matrix()
    }

    pub fn eig(&self) -> Result<HermitianEigen> {
        self.base.eig()
    }

    pub fn sqrt(&self) -> Result<SpdMatrix> {
        self.base.sqrt()
    }

    pub fn inv_sqrt(&self) -> Result<SpdMatrix> {
        self.base.powf(-0.5)
    }

    pub fn inverse(&self) -> Result<SpdMatrix> {
        self.base.powf(-1.0)
    }

    pub fn log(&self) -> Result<HermitianMatrix> {
        self.base.log()
    }

    pub fn powf(&self, tau: f64) -> Result<SpdMatrix> {
        self.base.powf(tau)
    }

    pub fn det(&self) -> Result<f64> {
        Ok(self.eig()?.eigenvalues.iter().product())
    }

    pub fn log_det(&self) -> Result<f64> {
        Ok(self.eig()?.eigenvalues.iter().map(|l| l.ln()).sum())
    }
}

/// Congruence M0^{-1/2} M1 M0^{-1/2}, the whitened form both the geodesic and
/// the distance are built from.
fn whitened(m0: &SpdMatrix, m1: &SpdMatrix) -> Result<SpdMatrix> {
    if m0.dim() != m1.dim() {
        return Err(Error::DimensionMismatch {
            expected: m0.dim(),
            found: m1.dim(),
        });
    }
    let w = m0.inv_sqrt()?;
    let b = w.matrix() * m1.matrix() * w.matrix();
    SpdMatrix::try_new(HermitianMatrix::from_exact(b))
}

/// Geodesic point M0 #_tau M1 of the affine-invariant metric. Any real tau is
/// accepted; values outside [0,1] extrapolate along the same geodesic.
pub fn spd_geodesic(m0: &SpdMatrix, m1: &SpdMatrix, tau: f64) -> Result<SpdMatrix> {
    let b = whitened(m0, m1)?;
    let b_tau = b.powf(tau)?;
    let e = m0.sqrt()?;
    let out = e.matrix() * b_tau.matrix() * e.matrix();
    SpdMatrix::try_new(HermitianMatrix::from_exact(out))
}

/// Geodesic distance ||log(M0^{-1/2} M1 M0^{-1/2})||_F.
pub fn spd_distance(m0: &SpdMatrix, m1: &SpdMatrix) -> Result<f64> {
    let b = whitened(m0, m1)?;
    let eig = b.eig()?;
    Ok(eig
        .eigenvalues
        .iter()
        .map(|l| l.ln().powi(2))
        .sum::<f64>()
        .sqrt())
}

/// Geometric mean M0 # M1, the geodesic midpoint.
pub fn geometric_mean(m0: &SpdMatrix, m1: &SpdMatrix) -> Result<SpdMatrix> {
    spd_geodesic(m0, m1, 0.5)
}
