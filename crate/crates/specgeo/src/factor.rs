//! Canonical left spectral factorization f = f+ f+*, the prediction-error
//! variance Omega, optimal predictors, and cross-variances.
//!
//! Two routes produce the factor on the grid:
//!
//! * scalar spectra use the cepstral construction: with c the lag
//!   coefficients of log f, the factor is exp of the causal half of c (lag 0
//!   and the Nyquist lag at half weight). On the grid this reproduces
//!   |f+|^2 = f to machine precision.
//! * matrix spectra use Wilson's Newton iteration
//!   psi_{n+1} = psi_n P+(psi_n^{-1} f psi_n^{-*} + I), where P+ keeps causal
//!   lags, halving lag 0 and the Nyquist lag. The iteration is quadratically
//!   convergent; a final constant unitary from the polar decomposition of the
//!   lag-0 coefficient pins the canonical gauge f+(0) = Omega^{1/2}
//!   (Hermitian positive definite).
//!
//! Both factors live on the same grid as the input, so all downstream
//! identities (predictor, cross-variances, Szego-Kolmogorov) close to the
//! accuracy of the factorization itself. Spectra with sharp near-singular
//! features need a finer grid; `cepstrum_decay_ratio` quantifies when the
//! default grid is too coarse.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::GridFft;
use crate::hermitian::{hermitize_mut, CMat, HermitianMatrix, SpdMatrix};
use crate::psd::{check_same_grid, FrequencyGrid, MatrixPsd};

/// Residual at which the Wilson iteration stops.
pub const WILSON_TARGET_RESIDUAL: f64 = 1e-10;
/// Residual below which a factorization is reported as converged.
pub const WILSON_ACCEPT_RESIDUAL: f64 = 1e-8;
/// Iteration cap for the Wilson loop.
pub const WILSON_MAX_ITERATIONS: usize = 200;
/// Cepstrum tail-to-head ratio above which the grid is too coarse for the
/// scalar route to deliver full accuracy.
pub const CEPSTRUM_DECAY_LIMIT: f64 = 1e-6;

/// The canonical left outer factor on the grid: samples, the full circular
/// lag-coefficient array, and Omega = f+(0)^2.
///
/// Coefficient indices t < N/2 hold causal lags t; indices t >= N/2 alias the
/// negative lags t - N and carry only the (tiny) anticausal leakage of the
/// discrete factor.
#[derive(Debug, Clone)]
pub struct SpectralFactor {
    grid: FrequencyGrid,
    values: Vec<CMat>,
    causal_coeffs: Vec<CMat>,
    omega: SpdMatrix,
}

/// Convergence data for one factorization run.
#[derive(Debug, Clone)]
pub struct FactorizationReport {
    pub iterations: usize,
    /// Max over grid points of the relative factorization residual
    /// ||psi psi* - f||_F / ||f||_F.
    pub residual: f64,
    pub converged: bool,
}

impl SpectralFactor {
    pub fn grid(&self) -> FrequencyGrid {
        self.grid
    }

    pub fn dim(&self) -> usize {
        self.values[0].nrows()
    }

    pub fn value(&self, k: usize) -> &CMat {
        &self.values[k]
    }

    pub fn values(&self) -> &[CMat] {
        &self.values
    }

    pub fn causal_coeffs(&self) -> &[CMat] {
        &self.causal_coeffs
    }

    /// The lag-0 coefficient of the sampled factor; Hermitian positive
    /// definite in the canonical gauge and equal to Omega^{1/2} up to the
    /// grid leakage of the representation (machine precision for smooth
    /// spectra, the cepstrum-tail scale for near-singular ones).
    pub fn lag0(&self) -> &CMat {
        &self.causal_coeffs[0]
    }

    pub fn omega(&self) -> &SpdMatrix {
        &self.omega
    }

    /// Energy fraction in the negative-lag half of the coefficient array;
    /// the outerness proxy.
    pub fn anticausal_energy_ratio(&self) -> f64 {
        let n = self.grid.len();
        let total: f64 = self.causal_coeffs.iter().map(|c| c.norm_squared()).sum();
        if total == 0.0 {
            return 0.0;
        }
        let anticausal: f64 = self.causal_coeffs[n / 2..]
            .iter()
            .map(|c| c.norm_squared())
            .sum();
        anticausal / total
    }

    /// Max relative pointwise residual of psi psi* against `f`.
    pub fn residual(&self, f: &MatrixPsd) -> Result<f64> {
        check_same_grid(self.grid, f.grid())?;
        Ok(max_residual(&self.values, f))
    }

    /// Rebuild a factor from grid samples (used by file input); the lag
    /// coefficients are recomputed from the samples rather than trusted.
    pub fn from_samples(grid: FrequencyGrid, values: Vec<CMat>, omega: SpdMatrix) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::SampleCount {
                expected: grid.len(),
                found: values.len(),
            });
        }
        let fft = GridFft::new(grid.len());
        let causal_coeffs = fft.matrix_coeffs_from_samples(&values);
        Ok(SpectralFactor {
            grid,
            values,
            causal_coeffs,
            omega,
        })
    }
}

fn max_residual(values: &[CMat], f: &MatrixPsd) -> f64 {
    let mut worst = 0.0f64;
    for (psi, fk) in values.iter().zip(f.values().iter()) {
        let recon = psi * psi.adjoint();
        let scale = fk.hermitian().frobenius_norm().max(f64::MIN_POSITIVE);
        worst = worst.max((recon - fk.matrix()).norm() / scale);
    }
    worst
}

/// Causal projection weights for N lags: lag 0 and the Nyquist lag at half
/// weight, positive lags below Nyquist kept, negative lags dropped.
fn causal_projection(fft: &GridFft, samples: &[CMat]) -> Vec<CMat> {
    let n = fft.len();
    let mut coeffs = fft.matrix_coeffs_from_samples(samples);
    coeffs[0] *= Complex64::new(0.5, 0.0);
    coeffs[n / 2] *= Complex64::new(0.5, 0.0);
    for c in coeffs.iter_mut().skip(n / 2 + 1) {
        *c = CMat::zeros(c.nrows(), c.ncols());
    }
    fft.matrix_samples_from_coeffs(&coeffs)
}

/// Scalar canonical factor via the cepstrum of log f.
pub fn factorize_scalar(f: &MatrixPsd) -> Result<SpectralFactor> {
    if f.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: f.dim(),
        });
    }
    let grid = f.grid();
    let n = grid.len();
    let fft = GridFft::new(n);
    let log_samples: Vec<Complex64> = f
        .values()
        .iter()
        .map(|v| Complex64::new(v.matrix()[(0, 0)].re.ln(), 0.0))
        .collect();
    let mut cepstrum = fft.coeffs_from_samples(&log_samples);
    // log f is real, so the lag-0 and Nyquist coefficients are real.
    cepstrum[0] = Complex64::new(cepstrum[0].re, 0.0);
    cepstrum[n / 2] = Complex64::new(cepstrum[n / 2].re, 0.0);

    let mut causal_log = vec![Complex64::new(0.0, 0.0); n];
    causal_log[0] = cepstrum[0] * 0.5;
    causal_log[1..n / 2].copy_from_slice(&cepstrum[1..n / 2]);
    causal_log[n / 2] = cepstrum[n / 2] * 0.5;

    let factor_scalar: Vec<Complex64> = fft
        .samples_from_coeffs(&causal_log)
        .into_iter()
        .map(|v| v.exp())
        .collect();
    let values: Vec<CMat> = factor_scalar
        .iter()
        .map(|&v| CMat::from_element(1, 1, v))
        .collect();
    let mut causal_coeffs = fft.matrix_coeffs_from_samples(&values);
    // The lag-0 coefficient is exp(c_0/2) > 0 up to grid leakage; keep the
    // canonical gauge exactly real.
    causal_coeffs[0][(0, 0)] = Complex64::new(causal_coeffs[0][(0, 0)].re, 0.0);
    // Omega comes from the normalization constant exp(c_0) of the
    // construction, which keeps the whole prediction chain Szego-exact on
    // the grid. The lag-0 DFT coefficient approximates its square root with
    // an error set by the cepstrum tail.
    let omega = SpdMatrix::from_real_diagonal(&[cepstrum[0].re.exp()])?;
    Ok(SpectralFactor {
        grid,
        values,
        causal_coeffs,
        omega,
    })
}

/// Tail-to-head cepstrum magnitude ratio |c_{N/2-1}| / |c_1| for a scalar
/// spectrum; above [`CEPSTRUM_DECAY_LIMIT`] the grid undersamples the factor.
pub fn cepstrum_decay_ratio(f: &MatrixPsd) -> Result<f64> {
    if f.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: f.dim(),
        });
    }
    let n = f.grid().len();
    let fft = GridFft::new(n);
    let log_samples: Vec<Complex64> = f
        .values()
        .iter()
        .map(|v| Complex64::new(v.matrix()[(0, 0)].re.ln(), 0.0))
        .collect();
    let cepstrum = fft.coeffs_from_samples(&log_samples);
    let head = cepstrum[1].norm();
    if head == 0.0 {
        return Ok(0.0);
    }
    Ok(cepstrum[n / 2 - 1].norm() / head)
}

/// Multivariate canonical factor via the Wilson iteration.
///
/// Non-convergence is reported, not raised: the factor corresponding to the
/// last iterate is returned together with `converged = false` and callers
/// decide. Hard errors are reserved for singular iterates.
pub fn factorize_matrix(f: &MatrixPsd) -> Result<(SpectralFactor, FactorizationReport)> {
    let grid = f.grid();
    let n = grid.len();
    let m = f.dim();
    let fft = GridFft::new(n);

    let mean = crate::psd::integrate_matrix(
        grid,
        &f.values()
            .iter()
            .map(|v| v.hermitian().clone())
            .collect::<Vec<_>>(),
    )?;
    let psi0 = SpdMatrix::try_new(mean)?.sqrt()?;
    let mut values: Vec<CMat> = vec![psi0.matrix().clone(); n];

    let identity = CMat::identity(m, m);
    let mut residual = max_residual(&values, f);
    let mut iterations = 0usize;

    while residual > WILSON_TARGET_RESIDUAL && iterations < WILSON_MAX_ITERATIONS {
        iterations += 1;
        let mut newton_rhs = Vec::with_capacity(n);
        for (k, psi) in values.iter().enumerate() {
            let inv = psi
                .clone()
                .try_inverse()
                .ok_or(Error::SingularFactorSample { index: k })?;
            newton_rhs.push(&inv * f.value(k).matrix() * inv.adjoint() + &identity);
        }
        let update = causal_projection(&fft, &newton_rhs);
        for (psi, step) in values.iter_mut().zip(update.iter()) {
            *psi = &*psi * step;
        }
        residual = max_residual(&values, f);
    }

    // Constant unitary gauge: polar decomposition of the lag-0 coefficient
    // makes f+(0) Hermitian positive definite.
    let coeffs = fft.matrix_coeffs_from_samples(&values);
    let lag0 = &coeffs[0];
    let mut p_squared = lag0 * lag0.adjoint();
    hermitize_mut(&mut p_squared);
    let p = HermitianMatrix::from_exact(p_squared).sqrt()?;
    let unitary = p.inverse()?.matrix() * lag0;
    for psi in values.iter_mut() {
        *psi = &*psi * unitary.adjoint();
    }
    let causal_coeffs = fft.matrix_coeffs_from_samples(&values);
    let mut omega_raw = causal_coeffs[0].clone() * causal_coeffs[0].adjoint();
    hermitize_mut(&mut omega_raw);
    let omega = SpdMatrix::try_new(HermitianMatrix::from_exact(omega_raw))?;

    let report = FactorizationReport {
        iterations,
        residual,
        converged: residual <= WILSON_ACCEPT_RESIDUAL,
    };
    Ok((
        SpectralFactor {
            grid,
            values,
            causal_coeffs,
            omega,
        },
        report,
    ))
}

/// Factorize through the route suited to the dimension: cepstral for scalar
/// spectra (direct, one pass), Wilson above.
pub fn factorize(f: &MatrixPsd) -> Result<(SpectralFactor, FactorizationReport)> {
    if f.dim() == 1 {
        let sf = factorize_scalar(f)?;
        let residual = sf.residual(f)?;
        let report = FactorizationReport {
            iterations: 1,
            residual,
            converged: residual <= WILSON_ACCEPT_RESIDUAL,
        };
        Ok((sf, report))
    } else {
        factorize_matrix(f)
    }
}

/// Omega = f+(0) f+(0)*, recomputed from the lag-0 coefficient.
pub fn prediction_error_variance(sf: &SpectralFactor) -> Result<SpdMatrix> {
    let mut omega = sf.lag0() * sf.lag0().adjoint();
    hermitize_mut(&mut omega);
    SpdMatrix::try_new(HermitianMatrix::from_exact(omega))
}

/// Relative error of det Omega against exp of the mean of log det f.
pub fn szego_kolmogorov_check(f: &MatrixPsd, omega: &SpdMatrix) -> Result<f64> {
    let mut mean_log_det = 0.0;
    for v in f.values() {
        mean_log_det += v.log_det()?;
    }
    mean_log_det /= f.grid().len() as f64;
    let log_det_omega = omega.log_det()?;
    Ok(((log_det_omega - mean_log_det).exp() - 1.0).abs())
}

/// Grid samples of the optimal one-step predictor p = f+(0) f+^{-1}.
///
/// The lag-0 coefficient of the result is checked against the identity (the
/// predictor convention p(0) = I); failure means the grid undersamples the
/// factor.
pub fn optimal_predictor(sf: &SpectralFactor) -> Result<Vec<CMat>> {
    let samples = predictor_samples(sf)?;
    let fft = GridFft::new(sf.grid().len());
    let coeffs = fft.matrix_coeffs_from_samples(&samples);
    let m = sf.dim();
    let defect = (&coeffs[0] - CMat::identity(m, m)).norm();
    if defect > 1e-8 * (m as f64).sqrt() {
        return Err(Error::CrossCheckFailed {
            what: "predictor normalization p(0) = I",
            a: defect,
            b: 0.0,
            tolerance: 1e-8,
        });
    }
    Ok(samples)
}

fn predictor_samples(sf: &SpectralFactor) -> Result<Vec<CMat>> {
    // The prefactor is the canonical normalization f+(0) = Omega^{1/2}
    // rather than the lag-0 DFT coefficient; the two differ only by grid
    // leakage, and the former keeps the variance identities exact.
    let prefactor = sf.omega().sqrt()?;
    sf.values()
        .iter()
        .enumerate()
        .map(|(k, psi)| {
            let inv = psi
                .clone()
                .try_inverse()
                .ok_or(Error::SingularFactorSample { index: k })?;
            Ok(prefactor.matrix() * inv)
        })
        .collect()
}

/// Omega_{i,j}: error variance of the predictor built from `sf_j` applied to
/// a process with spectrum `f_i`.
pub fn cross_error_variance(f_i: &MatrixPsd, sf_j: &SpectralFactor) -> Result<SpdMatrix> {
    check_same_grid(f_i.grid(), sf_j.grid())?;
    if f_i.dim() != sf_j.dim() {
        return Err(Error::DimensionMismatch {
            expected: sf_j.dim(),
            found: f_i.dim(),
        });
    }
    let p = predictor_samples(sf_j)?;
    let products: Vec<CMat> = p
        .iter()
        .zip(f_i.values().iter())
        .map(|(pk, fk)| pk * fk.matrix() * pk.adjoint())
        .collect();
    let mut mean = crate::psd::mean_matrices(&products);
    hermitize_mut(&mut mean);
    SpdMatrix::try_new(HermitianMatrix::from_exact(mean))
}

/// PSD of the normalized innovations h_{i,j}: pointwise
/// f_{j+}^{-1} f_i f_{j+}^{-*}. Equals the identity when f_i = f_j.
pub fn innovation_spectrum(f_i: &MatrixPsd, sf_j: &SpectralFactor) -> Result<MatrixPsd> {
    check_same_grid(f_i.grid(), sf_j.grid())?;
    if f_i.dim() != sf_j.dim() {
        return Err(Error::DimensionMismatch {
            expected: sf_j.dim(),
            found: f_i.dim(),
        });
    }
    let samples: Vec<CMat> = sf_j
        .values()
        .iter()
        .zip(f_i.values().iter())
        .enumerate()
        .map(|(k, (psi, fk))| {
            let inv = psi
                .clone()
                .try_inverse()
                .ok_or(Error::SingularFactorSample { index: k })?;
            Ok(&inv * fk.matrix() * inv.adjoint())
        })
        .collect::<Result<Vec<_>>>()?;
    MatrixPsd::try_new(f_i.grid(), samples, "innovation spectrum")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::psd::{ar_psd, ComplexPolynomial};
    use crate::random;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn grid(n: usize) -> FrequencyGrid {
        FrequencyGrid::new(n).unwrap()
    }

    fn ma1_scalar(grid: FrequencyGrid) -> MatrixPsd {
        // f = |1 - 0.5 e^{i theta}|^2, whose canonical factor is 1 - 0.5 z.
        let samples: Vec<CMat> = (0..grid.len())
            .map(|k| {
                let z = Complex64::new(0.0, grid.theta(k)).exp();
                let g = Complex64::new(1.0, 0.0) - 0.5 * z;
                CMat::from_element(1, 1, Complex64::new(g.norm_sqr(), 0.0))
            })
            .collect();
        MatrixPsd::try_new(grid, samples, "ma1").unwrap()
    }

    #[test]
    fn scalar_constant_spectrum() {
        let g = grid(64);
        let f = MatrixPsd::constant(
            g,
            &SpdMatrix::from_real_diagonal(&[4.0]).unwrap(),
            "constant 4",
        );
        let sf = factorize_scalar(&f).unwrap();
        for v in sf.values() {
            assert!((v[(0, 0)] - Complex64::new(2.0, 0.0)).norm() < 1e-12);
        }
        assert!((sf.omega().matrix()[(0, 0)].re - 4.0).abs() < 1e-12);
    }

    #[test]
    fn scalar_moving_average_recovers_polynomial() {
        let g = grid(128);
        let f = ma1_scalar(g);
        let sf = factorize_scalar(&f).unwrap();
        assert!((sf.causal_coeffs()[0][(0, 0)] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!((sf.causal_coeffs()[1][(0, 0)] - Complex64::new(-0.5, 0.0)).norm() < 1e-12);
        assert!((sf.omega().matrix()[(0, 0)].re - 1.0).abs() < 1e-12);
        assert!(sf.residual(&f).unwrap() < 1e-12);
        assert!(sf.anticausal_energy_ratio() < 1e-20);
    }

    #[test]
    fn scalar_all_pole_satisfies_szego() {
        let g = grid(512);
        let a = ComplexPolynomial::conjugate_pole_pair(0.8, 1.0)
            .mul(&ComplexPolynomial::conjugate_pole_pair(0.6, 2.2));
        let f = ar_psd(&a, g).unwrap();
        let sf = factorize_scalar(&f).unwrap();
        assert!(sf.residual(&f).unwrap() < 1e-10);
        let err = szego_kolmogorov_check(&f, sf.omega()).unwrap();
        assert!(err < 1e-10, "szego error {err}");
    }

    #[test]
    fn wilson_szego_oracle_on_the_bundled_spectrum() {
        // Independent check of det Omega = exp(mean log det f): the Wilson
        // route derives Omega from the factor's lag-0 coefficient, with no
        // reference to the mean of log f. Near-unit-circle dynamics need a
        // fine grid before the discrete factor supports this.
        let g = grid(4096);
        let (f0, _) = crate::examples::scalar_pair(g).unwrap();
        let (sf, report) = factorize_matrix(&f0).unwrap();
        assert!(report.converged, "residual {}", report.residual);
        let omega = prediction_error_variance(&sf).unwrap();
        let err = szego_kolmogorov_check(&f0, &omega).unwrap();
        assert!(err <= 1e-6, "szego error {err}");
    }

    #[test]
    fn prediction_error_variance_matches_the_examples() {
        let g = grid(64);
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let m = random::random_spd(2, 1.0, &mut rng);
        let constant = MatrixPsd::constant(g, &m, "constant");
        let (sf, _) = factorize_matrix(&constant).unwrap();
        let omega = prediction_error_variance(&sf).unwrap();
        assert!((omega.matrix() - m.matrix()).norm() < 1e-10);

        let ma = ma1_scalar(grid(128));
        let sf = factorize_scalar(&ma).unwrap();
        let omega = prediction_error_variance(&sf).unwrap();
        assert!((omega.matrix()[(0, 0)].re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn decay_ratio_flags_coarse_grids() {
        let a = ComplexPolynomial::conjugate_pole_pair(0.98, 0.9);
        let coarse = ar_psd(&a, grid(64)).unwrap();
        let fine = ar_psd(&a, grid(4096)).unwrap();
        assert!(cepstrum_decay_ratio(&coarse).unwrap() > CEPSTRUM_DECAY_LIMIT);
        assert!(cepstrum_decay_ratio(&fine).unwrap() < CEPSTRUM_DECAY_LIMIT);
    }

    #[test]
    fn matrix_constant_spectrum_in_one_iteration() {
        let g = grid(64);
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let m = random::random_spd(2, 1.0, &mut rng);
        let f = MatrixPsd::constant(g, &m, "constant");
        let (sf, report) = factorize_matrix(&f).unwrap();
        assert!(report.converged);
        assert!(report.iterations <= 2, "took {} iterations", report.iterations);
        let sqrt = m.sqrt().unwrap();
        for v in sf.values() {
            assert!((v - sqrt.matrix()).norm() < 1e-10);
        }
        assert!((sf.omega().matrix() - m.matrix()).norm() < 1e-10);
    }

    #[test]
    fn matrix_moving_average_recovers_coefficients() {
        let g = grid(128);
        let c = CMat::from_row_slice(
            2,
            2,
            &[
                Complex64::new(0.5, 0.0),
                Complex64::new(0.2, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.3, 0.0),
            ],
        );
        let poly = random::MatrixPolynomial {
            coeffs: vec![CMat::identity(2, 2), c.clone()],
        };
        let f = poly.psd(g).unwrap();
        let (sf, report) = factorize_matrix(&f).unwrap();
        assert!(report.converged, "residual {}", report.residual);
        assert!((sf.causal_coeffs()[0].clone() - CMat::identity(2, 2)).norm() < 1e-8);
        assert!((sf.causal_coeffs()[1].clone() - c).norm() < 1e-8);
        assert!((sf.omega().matrix() - CMat::identity(2, 2)).norm() < 1e-9);
        assert!(sf.anticausal_energy_ratio() < 1e-16);
    }

    #[test]
    fn block_diagonal_factors_blockwise() {
        let g = grid(256);
        let a0 = ComplexPolynomial::conjugate_pole_pair(0.8, 0.7);
        let a1 = ComplexPolynomial::conjugate_pole_pair(0.7, 2.0);
        let f0 = ar_psd(&a0, g).unwrap();
        let f1 = ar_psd(&a1, g).unwrap();
        let samples: Vec<CMat> = (0..g.len())
            .map(|k| {
                let mut s = CMat::zeros(2, 2);
                s[(0, 0)] = f0.value(k).matrix()[(0, 0)];
                s[(1, 1)] = f1.value(k).matrix()[(0, 0)];
                s
            })
            .collect();
        let f = MatrixPsd::try_new(g, samples, "block diag").unwrap();
        let (sf, report) = factorize_matrix(&f).unwrap();
        assert!(report.converged);
        let s0 = factorize_scalar(&f0).unwrap();
        let s1 = factorize_scalar(&f1).unwrap();
        for k in 0..g.len() {
            let v = sf.value(k);
            assert!((v[(0, 0)] - s0.value(k)[(0, 0)]).norm() < 1e-8);
            assert!((v[(1, 1)] - s1.value(k)[(0, 0)]).norm() < 1e-8);
            assert!(v[(0, 1)].norm() < 1e-8);
            assert!(v[(1, 0)].norm() < 1e-8);
        }
    }

    #[test]
    fn wilson_matches_cepstral_for_scalars() {
        let g = grid(256);
        let a = ComplexPolynomial::conjugate_pole_pair(0.85, 1.3);
        let f = ar_psd(&a, g).unwrap();
        let cepstral = factorize_scalar(&f).unwrap();
        let (wilson, report) = factorize_matrix(&f).unwrap();
        assert!(report.converged);
        for k in 0..g.len() {
            assert!(
                (cepstral.value(k)[(0, 0)] - wilson.value(k)[(0, 0)]).norm() < 1e-7,
                "factors differ at sample {k}"
            );
        }
    }

    #[test]
    fn factorization_is_canonical() {
        // Re-factorizing the spectrum reconstructed from psi psi* lands on
        // the same factor: the gauge fix removes the unitary ambiguity.
        let g = grid(64);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (f, _) = random::random_smooth_psd(2, g, 0.85, &mut rng).unwrap();
        let (sf1, _) = factorize_matrix(&f).unwrap();
        let rebuilt = MatrixPsd::try_new(
            g,
            sf1.values().iter().map(|v| v * v.adjoint()).collect(),
            "rebuilt",
        )
        .unwrap();
        let (sf2, _) = factorize_matrix(&rebuilt).unwrap();
        for k in 0..g.len() {
            assert!((sf1.value(k) - sf2.value(k)).norm() < 1e-8);
        }
    }

    #[test]
    fn predictor_of_constant_spectrum_is_identity() {
        let g = grid(64);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = random::random_spd(2, 1.0, &mut rng);
        let f = MatrixPsd::constant(g, &m, "constant");
        let (sf, _) = factorize_matrix(&f).unwrap();
        let p = optimal_predictor(&sf).unwrap();
        for pk in &p {
            assert!((pk - CMat::identity(2, 2)).norm() < 1e-9);
        }
    }

    #[test]
    fn predictor_inverts_the_outer_factor() {
        // Moving-average spectrum: f+ = 1 - 0.5 z, so the prediction filter
        // is the infinite AR expansion p = (1 - 0.5 z)^{-1}.
        let g = grid(128);
        let f = ma1_scalar(g);
        let sf = factorize_scalar(&f).unwrap();
        let p = optimal_predictor(&sf).unwrap();
        for (k, pk) in p.iter().enumerate() {
            let z = Complex64::new(0.0, g.theta(k)).exp();
            let expected = (Complex64::new(1.0, 0.0) - 0.5 * z).inv();
            assert!((pk[(0, 0)] - expected).norm() < 1e-10);
        }

        // All-pole spectrum 1/|1 - 0.5 e^{i theta}|^2: the factor is the
        // rational function and the predictor is the finite polynomial
        // 1 - 0.5 z.
        let samples: Vec<CMat> = (0..g.len())
            .map(|k| {
                let z = Complex64::new(0.0, g.theta(k)).exp();
                let a = Complex64::new(1.0, 0.0) - 0.5 * z;
                CMat::from_element(1, 1, Complex64::new(1.0 / a.norm_sqr(), 0.0))
            })
            .collect();
        let f_ar = MatrixPsd::try_new(g, samples, "ar1").unwrap();
        let sf_ar = factorize_scalar(&f_ar).unwrap();
        let p_ar = optimal_predictor(&sf_ar).unwrap();
        for (k, pk) in p_ar.iter().enumerate() {
            let z = Complex64::new(0.0, g.theta(k)).exp();
            let expected = Complex64::new(1.0, 0.0) - 0.5 * z;
            assert!((pk[(0, 0)] - expected).norm() < 1e-10);
        }
    }

    #[test]
    fn predictor_of_all_pole_spectrum_is_the_reflected_polynomial() {
        // For f = 1/|a|^2 with a = prod (z - p_i), |p_i| < 1, the predictor
        // polynomial is prod (1 - p_i z): coefficients of a reversed (real
        // coefficients here), normalized to 1 at lag 0.
        let g = grid(512);
        let (r, w) = (0.8, 1.1);
        let a = ComplexPolynomial::conjugate_pole_pair(r, w);
        let f = ar_psd(&a, g).unwrap();
        let sf = factorize_scalar(&f).unwrap();
        let p = optimal_predictor(&sf).unwrap();
        let fft = GridFft::new(g.len());
        let coeffs = fft.matrix_coeffs_from_samples(&p);
        let expected = [1.0, -2.0 * r * w.cos(), r * r];
        for (t, &e) in expected.iter().enumerate() {
            assert!(
                (coeffs[t][(0, 0)] - Complex64::new(e, 0.0)).norm() < 1e-8,
                "lag {t}: {} vs {e}",
                coeffs[t][(0, 0)]
            );
        }
        for (t, c) in coeffs.iter().enumerate().take(g.len() / 2).skip(3) {
            assert!(c[(0, 0)].norm() < 1e-8, "stray coefficient at lag {t}");
        }
    }

    #[test]
    fn cross_variance_reduces_to_omega_on_the_diagonal() {
        let g = grid(64);
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let (f, _) = random::random_smooth_psd(2, g, 0.85, &mut rng).unwrap();
        let (sf, _) = factorize_matrix(&f).unwrap();
        let omega_ii = cross_error_variance(&f, &sf).unwrap();
        assert!(
            (omega_ii.matrix() - sf.omega().matrix()).norm()
                / sf.omega().hermitian().frobenius_norm()
                < 1e-8
        );
    }

    #[test]
    fn cross_variance_for_constant_spectra_is_the_first_argument() {
        let g = grid(64);
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let mi = random::random_spd(2, 1.0, &mut rng);
        let mj = random::random_spd(2, 1.0, &mut rng);
        let fi = MatrixPsd::constant(g, &mi, "i");
        let fj = MatrixPsd::constant(g, &mj, "j");
        let (sfj, _) = factorize_matrix(&fj).unwrap();
        let omega_ij = cross_error_variance(&fi, &sfj).unwrap();
        assert!((omega_ij.matrix() - mi.matrix()).norm() < 1e-9);
    }

    #[test]
    fn cross_variance_dominates_own_variance() {
        let g = grid(128);
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let (fi, _) = random::random_smooth_psd(2, g, 0.85, &mut rng).unwrap();
        let (fj, _) = random::random_smooth_psd(2, g, 0.85, &mut rng).unwrap();
        let (sfi, _) = factorize_matrix(&fi).unwrap();
        let (sfj, _) = factorize_matrix(&fj).unwrap();
        let omega_ij = cross_error_variance(&fi, &sfj).unwrap();
        let gap = omega_ij.hermitian().sub(sfi.omega().hermitian());
        let min_eig = gap.eig().unwrap().eigenvalues[0];
        assert!(min_eig >= -1e-8, "Omega_ij - Omega_i had eigenvalue {min_eig}");
    }

    #[test]
    fn innovation_spectrum_of_matched_pair_is_white() {
        let g = grid(64);
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let (f, _) = random::random_smooth_psd(2, g, 0.85, &mut rng).unwrap();
        let (sf, _) = factorize_matrix(&f).unwrap();
        let h = innovation_spectrum(&f, &sf).unwrap();
        for v in h.values() {
            assert!((v.matrix() - CMat::identity(2, 2)).norm() < 1e-8);
        }
    }

    #[test]
    fn innovation_spectrum_of_constants_has_the_whitened_eigenvalues() {
        let g = grid(64);
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let mi = random::random_spd(2, 1.0, &mut rng);
        let mj = random::random_spd(2, 1.0, &mut rng);
        let fi = MatrixPsd::constant(g, &mi, "i");
        let fj = MatrixPsd::constant(g, &mj, "j");
        let (sfj, _) = factorize_matrix(&fj).unwrap();
        let h = innovation_spectrum(&fi, &sfj).unwrap();
        // Eigenvalues of M_j^{-1} M_i, computed through the whitened form.
        let w = mj.inv_sqrt().unwrap();
        let whitened =
            HermitianMatrix::from_exact(w.matrix() * mi.matrix() * w.matrix());
        let expected = whitened.eig().unwrap().eigenvalues;
        let got = h.value(0).eig().unwrap().eigenvalues;
        for (a, b) in expected.iter().zip(got.iter()) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn szego_check_is_zero_for_exact_pairs() {
        let g = grid(32);
        let f = MatrixPsd::constant(g, &SpdMatrix::identity(2), "id");
        assert!(szego_kolmogorov_check(&f, &SpdMatrix::identity(2)).unwrap() < 1e-15);
        let d = SpdMatrix::from_real_diagonal(&[2.0, 8.0]).unwrap();
        let f2 = MatrixPsd::constant(g, &d, "diag");
        assert!(szego_kolmogorov_check(&f2, &d).unwrap() < 1e-14);
    }
}
