//! Seeded random test inputs: SPD matrices, smooth matrix spectra built from
//! outer matrix polynomials, and smooth Hermitian perturbation fields.
//!
//! Everything takes the RNG by argument so callers control determinism; the
//! `selftest` subcommand and the test suites use ChaCha streams with fixed
//! seeds.

use num_complex::Complex64;
use rand::Rng;

use crate::error::Result;
use crate::hermitian::{hermitize_mut, CMat, HermitianMatrix, SpdMatrix};
use crate::psd::{FrequencyGrid, MatrixPsd, PerturbationField};

fn random_complex(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

pub fn random_complex_matrix(m: usize, rng: &mut impl Rng) -> CMat {
    CMat::from_fn(m, m, |_, _| random_complex(rng))
}

pub fn random_hermitian(m: usize, scale: f64, rng: &mut impl Rng) -> HermitianMatrix {
    let mut a = random_complex_matrix(m, rng);
    a = (&a + a.adjoint()).scale(0.5 * scale);
    hermitize_mut(&mut a);
    HermitianMatrix::from_exact(a)
}

/// Haar-like random unitary from the QR factorization of a random matrix.
pub fn random_unitary(m: usize, rng: &mut impl Rng) -> CMat {
    let a = random_complex_matrix(m, rng);
    a.qr().q()
}

/// Random well-conditioned SPD matrix Q diag(e^u) Q* with u uniform in
/// [-log_spread, log_spread].
pub fn random_spd(m: usize, log_spread: f64, rng: &mut impl Rng) -> SpdMatrix {
    let q = random_unitary(m, rng);
    let mut d = CMat::zeros(m, m);
    for i in 0..m {
        d[(i, i)] = Complex64::new(rng.random_range(-log_spread..log_spread).exp(), 0.0);
    }
    let mut a = &q * d * q.adjoint();
    hermitize_mut(&mut a);
    SpdMatrix::try_new(HermitianMatrix::from_exact(a))
        .expect("construction is positive definite by design")
}

/// Random invertible matrix (singular values bounded away from zero).
pub fn random_invertible(m: usize, rng: &mut impl Rng) -> CMat {
    let q0 = random_unitary(m, rng);
    let q1 = random_unitary(m, rng);
    let mut d = CMat::zeros(m, m);
    for i in 0..m {
        d[(i, i)] = Complex64::new(rng.random_range(0.4..2.5), 0.0);
    }
    q0 * d * q1
}

/// Matrix polynomial g(z) = G_0 + G_1 z + ... + G_d z^d.
#[derive(Debug, Clone)]
pub struct MatrixPolynomial {
    pub coeffs: Vec<CMat>,
}

impl MatrixPolynomial {
    pub fn dim(&self) -> usize {
        self.coeffs[0].nrows()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, z: Complex64) -> CMat {
        let m = self.dim();
        let mut acc = CMat::zeros(m, m);
        for c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    /// Samples of g on the grid.
    pub fn samples(&self, grid: FrequencyGrid) -> Vec<CMat> {
        (0..grid.len())
            .map(|k| self.eval(Complex64::new(0.0, grid.theta(k)).exp()))
            .collect()
    }

    /// The moving-average spectrum g g* on the grid; positive definite as
    /// long as det g has no zeros on the circle.
    pub fn psd(&self, grid: FrequencyGrid) -> Result<MatrixPsd> {
        let samples: Vec<CMat> = self
            .samples(grid)
            .into_iter()
            .map(|g| {
                let mut f = &g * g.adjoint();
                hermitize_mut(&mut f);
                f
            })
            .collect();
        MatrixPsd::try_new(grid, samples, "moving-average spectrum g g*")
    }

    /// Upper bound on the spectral radius of the block companion matrix of
    /// z^d + G_0^{-1} G_1 z^{d-1} ... read off the zeros of det g: the zeros
    /// lie at the reciprocals of the companion eigenvalues, so a radius below
    /// one certifies that g is outer.
    pub fn companion_radius_bound(&self) -> f64 {
        let m = self.dim();
        let d = self.degree();
        if d == 0 {
            return 0.0;
        }
        let g0_inv = self.coeffs[0]
            .clone()
            .try_inverse()
            .expect("leading block must be invertible");
        let n = m * d;
        let mut companion = CMat::zeros(n, n);
        for t in 1..=d {
            let block = -(&g0_inv * &self.coeffs[t]);
            for i in 0..m {
                for j in 0..m {
                    companion[(i, (t - 1) * m + j)] = block[(i, j)];
                }
            }
        }
        for i in m..n {
            companion[(i, i - m)] = Complex64::new(1.0, 0.0);
        }
        // ||A^64||_F^{1/64} >= rho(A), tight enough for a safety margin.
        let mut power = companion.clone();
        for _ in 0..6 {
            power = &power * &power;
        }
        power.norm().powf(1.0 / 64.0)
    }
}

/// Random outer matrix polynomial I + C_1 z + C_2 z^2 whose companion
/// spectral radius is strictly below `max_radius`; squaring it (g g*) yields
/// a smooth, strictly positive definite spectrum.
pub fn random_outer_polynomial(
    m: usize,
    degree: usize,
    max_radius: f64,
    rng: &mut impl Rng,
) -> MatrixPolynomial {
    let mut coeffs = vec![CMat::identity(m, m)];
    for _ in 0..degree {
        coeffs.push(random_complex_matrix(m, rng).scale(0.35 / m as f64));
    }
    let mut poly = MatrixPolynomial { coeffs };
    for _ in 0..16 {
        let radius = poly.companion_radius_bound();
        if radius < max_radius {
            break;
        }
        // Substituting z -> alpha z scales the companion eigenvalues by
        // alpha; shrink towards the target with a margin.
        let alpha = 0.9 * max_radius / radius;
        for (t, c) in poly.coeffs.iter_mut().enumerate() {
            *c *= Complex64::new(alpha.powi(t as i32), 0.0);
        }
    }
    poly
}

/// Random smooth matrix spectrum g g* with g = I + C_1 z + C_2 z^2 outer;
/// returns the polynomial too so callers can resample on other grids.
pub fn random_smooth_psd(
    m: usize,
    grid: FrequencyGrid,
    max_radius: f64,
    rng: &mut impl Rng,
) -> Result<(MatrixPsd, MatrixPolynomial)> {
    let poly = random_outer_polynomial(m, 2, max_radius, rng);
    let f = poly.psd(grid)?;
    Ok((f, poly))
}

/// Smooth random Hermitian tangent direction, built in whitened coordinates:
///
///   Delta(theta) = f^{1/2} (alpha I + S(theta)) f^{1/2}
///
/// with a low-order trigonometric Hermitian field S bounded by
/// ||S|| <= 0.3 alpha. The whitened perturbation then stays pointwise
/// positive with eigenvalues in [0.7 alpha, 1.3 alpha], so f + eps Delta is
/// admissible for every eps in [0, 1/(1.3 alpha)) and the cubic remainder of
/// the divergence expansions is bounded away from zero, which the ladder
/// checks rely on.
pub fn random_perturbation(
    f: &MatrixPsd,
    relative_scale: f64,
    rng: &mut impl Rng,
) -> PerturbationField {
    let m = f.dim();
    let grid = f.grid();
    let alpha = relative_scale;
    // Harmonic amplitudes: a guaranteed first harmonic plus smaller higher
    // ones, with the total bounded by 0.3 alpha.
    let mut harmonics: Vec<CMat> = Vec::new();
    let mut budget = 0.3 * alpha;
    for t in 1..=3usize {
        let raw = random_complex_matrix(m, rng);
        let unit = raw.clone().scale(1.0 / raw.norm().max(1e-12));
        let amplitude = if t == 1 {
            rng.random_range(0.4..0.6) * budget
        } else {
            rng.random_range(0.0..0.5) * budget
        };
        budget -= amplitude;
        // Each harmonic contributes (C e^{i t theta} + adjoint)/2, whose norm
        // is at most the coefficient norm.
        harmonics.push(unit.scale(amplitude));
    }
    let values: Vec<HermitianMatrix> = (0..grid.len())
        .map(|k| {
            let theta = grid.theta(k);
            let mut whitened = CMat::identity(m, m).scale(alpha);
            for (idx, coeff) in harmonics.iter().enumerate() {
                let t = idx + 1;
                let phase = Complex64::new(0.0, t as f64 * theta).exp();
                let term = coeff * phase;
                whitened += &(&term + term.adjoint()).scale(0.5);
            }
            let sqrt_f = f
                .value(k)
                .sqrt()
                .expect("spectrum values are positive definite");
            let mut out = sqrt_f.matrix() * whitened * sqrt_f.matrix();
            hermitize_mut(&mut out);
            HermitianMatrix::from_exact(out)
        })
        .collect();
    PerturbationField::from_hermitian(grid, values).expect("grid length matches by construction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn outer_polynomial_radius_is_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for m in [1usize, 2, 4] {
            let poly = random_outer_polynomial(m, 2, 0.9, &mut rng);
            assert!(poly.companion_radius_bound() < 0.9);
        }
    }

    #[test]
    fn smooth_psd_is_valid_on_both_grids() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let grid = FrequencyGrid::new(64).unwrap();
        let (f, poly) = random_smooth_psd(2, grid, 0.9, &mut rng).unwrap();
        assert_eq!(f.dim(), 2);
        let refined = poly.psd(grid.doubled()).unwrap();
        assert_eq!(refined.grid().len(), 128);
    }

    #[test]
    fn perturbed_spectrum_stays_positive_for_small_eps() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let grid = FrequencyGrid::new(64).unwrap();
        let (f, _) = random_smooth_psd(2, grid, 0.9, &mut rng).unwrap();
        let delta = random_perturbation(&f, 0.5, &mut rng);
        for eps in [0.1, 0.05, 0.025, 0.0125] {
            assert!(f.perturbed(&delta, eps).unwrap().is_admissible());
        }
    }
}
