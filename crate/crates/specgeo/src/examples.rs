//! The two bundled example spectra used by the `example` subcommand: a pair
//! of scalar all-pole spectra and a pair of structured 2x2 matrix spectra
//! built on top of them.
//!
//! Both scalar polynomials are products of three conjugate-pole quadratics.
//! NOTE on the quadratic form: each factor is the full pole-pair quadratic
//!
//!   z^2 - 2 r cos(omega) z + r^2,
//!
//! i.e. the middle coefficient multiplies z. Shorthand renderings of these
//! polynomials sometimes drop that z; the root loci below (conjugate pairs at
//! radius r and angles +-omega, all strictly inside the unit circle) are the
//! authoritative definition.
//!
//! Pole layout:
//!   a0: (r, omega) = (0.98, pi/5), (0.85, pi/3), (0.90, 2 pi/3)
//!   a1: (r, omega) = (0.98, 2 pi/15), (0.75, 7 pi/30), (0.90, 5 pi/8)

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::Result;
use crate::hermitian::{hermitize_mut, CMat};
use crate::psd::{ar_psd, ComplexPolynomial, FrequencyGrid, MatrixPsd};

/// Pole parameters (radius, angle) of the first example polynomial.
pub const A0_POLES: [(f64, f64); 3] = [(0.98, PI / 5.0), (0.85, PI / 3.0), (0.90, 2.0 * PI / 3.0)];

/// Pole parameters (radius, angle) of the second example polynomial.
pub const A1_POLES: [(f64, f64); 3] = [
    (0.98, 2.0 * PI / 15.0),
    (0.75, 7.0 * PI / 30.0),
    (0.90, 5.0 * PI / 8.0),
];

fn polynomial_from_poles(poles: &[(f64, f64)]) -> ComplexPolynomial {
    poles
        .iter()
        .map(|&(r, w)| ComplexPolynomial::conjugate_pole_pair(r, w))
        .reduce(|a, b| a.mul(&b))
        .expect("pole list is nonempty")
}

/// The two degree-six example polynomials.
pub fn scalar_polynomials() -> (ComplexPolynomial, ComplexPolynomial) {
    (
        polynomial_from_poles(&A0_POLES),
        polynomial_from_poles(&A1_POLES),
    )
}

/// The scalar example pair f_i = 1/|a_i|^2 on the given grid.
pub fn scalar_pair(grid: FrequencyGrid) -> Result<(MatrixPsd, MatrixPsd)> {
    let (a0, a1) = scalar_polynomials();
    Ok((ar_psd(&a0, grid)?, ar_psd(&a1, grid)?))
}

/// The structured 2x2 example pair:
///
///   f0 = L0 diag(1/|a0|^2, 1) L0*,  L0 = [[1, 0], [0.1 e^{i theta}, 1]]
///   f1 = L1 diag(1, 1/|a1|^2) L1*,  L1 = [[1, 0.1 e^{i theta}], [0, 1]]
///
/// modelling an energy source migrating from one channel to the other.
pub fn matrix_pair(grid: FrequencyGrid) -> Result<(MatrixPsd, MatrixPsd)> {
    let (a0, a1) = scalar_polynomials();
    let mut samples0 = Vec::with_capacity(grid.len());
    let mut samples1 = Vec::with_capacity(grid.len());
    for k in 0..grid.len() {
        let theta = grid.theta(k);
        let z = Complex64::new(0.0, theta).exp();
        let h0 = 1.0 / a0.eval(z).norm_sqr();
        let h1 = 1.0 / a1.eval(z).norm_sqr();
        let coupling = Complex64::new(0.0, theta).exp() * 0.1;

        let mut l0 = CMat::identity(2, 2);
        l0[(1, 0)] = coupling;
        let mut d0 = CMat::identity(2, 2);
        d0[(0, 0)] = Complex64::new(h0, 0.0);
        let mut f0 = &l0 * d0 * l0.adjoint();
        hermitize_mut(&mut f0);
        samples0.push(f0);

        let mut l1 = CMat::identity(2, 2);
        l1[(0, 1)] = coupling;
        let mut d1 = CMat::identity(2, 2);
        d1[(1, 1)] = Complex64::new(h1, 0.0);
        let mut f1 = &l1 * d1 * l1.adjoint();
        hermitize_mut(&mut f1);
        samples1.push(f1);
    }
    Ok((
        MatrixPsd::try_new(grid, samples0, "matrix example f0")?,
        MatrixPsd::try_new(grid, samples1, "matrix example f1")?,
    ))
}
