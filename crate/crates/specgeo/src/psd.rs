//! Matrix-valued power spectral densities sampled on a uniform frequency
//! grid, the constructors used by the bundled examples, and quadrature.
//!
//! The grid theta_k = -pi + 2*pi*k/N covers one period of the circle with the
//! endpoints identified. Every integral "d theta / 2 pi" in this crate is the
//! plain average over the grid, which is the trapezoid rule for periodic
//! functions and therefore spectrally accurate for smooth integrands.
//!
//! Admissibility failures of interpolation paths (a pointwise eigenvalue
//! leaving the positive cone) are returned as data, not errors: the example
//! paths deliberately exhibit such failures and callers need the offending
//! frequencies.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::hermitian::{
    eig_floor, hermitize_mut, CMat, HermitianMatrix, SpdMatrix, DEFAULT_EIG_FLOOR_REL,
};

/// Uniform grid theta_k = -pi + 2*pi*k/N for k = 0..N-1, N a power of two.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrequencyGrid {
    n: usize,
}

impl FrequencyGrid {
    pub const DEFAULT_POINTS: usize = 512;

    pub fn new(n: usize) -> Result<Self> {
        if n < 4 || !n.is_power_of_two() {
            return Err(Error::InvalidGridSize { n });
        }
        Ok(FrequencyGrid { n })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn theta(&self, k: usize) -> f64 {
        -PI + 2.0 * PI * k as f64 / self.n as f64
    }

    pub fn thetas(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.theta(k)).collect()
    }

    /// Grid with twice the resolution, for refinement studies.
    pub fn doubled(&self) -> FrequencyGrid {
        FrequencyGrid { n: self.n * 2 }
    }
}

impl Default for FrequencyGrid {
    fn default() -> Self {
        FrequencyGrid {
            n: Self::DEFAULT_POINTS,
        }
    }
}

pub(crate) fn check_same_grid(a: FrequencyGrid, b: FrequencyGrid) -> Result<()> {
    if a != b {
        return Err(Error::GridMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(())
}

/// A matrix-valued PSD: one SPD matrix per grid point.
#[derive(Debug, Clone)]
pub struct MatrixPsd {
    grid: FrequencyGrid,
    values: Vec<SpdMatrix>,
    provenance: String,
}

/// A Hermitian-valued tangent direction on the same grid (not necessarily
/// definite).
#[derive(Debug, Clone)]
pub struct PerturbationField {
    grid: FrequencyGrid,
    values: Vec<HermitianMatrix>,
}

/// One grid point at which a candidate spectrum left the positive cone.
#[derive(Debug, Clone)]
pub struct InadmissiblePoint {
    pub index: usize,
    pub theta: f64,
    pub min_eigenvalue: f64,
}

/// The offending frequencies of an inadmissible candidate spectrum.
#[derive(Debug, Clone)]
pub struct AdmissibilityFailure {
    pub points: Vec<InadmissiblePoint>,
}

/// Result of a construction that may leave the cone of positive spectra.
#[derive(Debug, Clone)]
pub enum PathOutcome {
    Admissible(MatrixPsd),
    Inadmissible(AdmissibilityFailure),
}

impl PathOutcome {
    pub fn is_admissible(&self) -> bool {
        matches!(self, PathOutcome::Admissible(_))
    }
}

/// Validate raw samples pointwise, reporting cone failures as data.
fn classify_samples(
    grid: FrequencyGrid,
    samples: Vec<CMat>,
    provenance: String,
) -> Result<PathOutcome> {
    let mut failures = Vec::new();
    let mut values = Vec::with_capacity(samples.len());
    for (k, raw) in samples.into_iter().enumerate() {
        let herm = HermitianMatrix::from_exact(raw);
        let eig = herm.eig()?;
        let max_abs = eig
            .eigenvalues
            .iter()
            .fold(0.0f64, |acc, &l| acc.max(l.abs()));
        let floor = eig_floor(DEFAULT_EIG_FLOOR_REL, max_abs);
        let min = eig.eigenvalues.first().copied().unwrap_or(0.0);
        if min <= floor {
            failures.push(InadmissiblePoint {
                index: k,
                theta: grid.theta(k),
                min_eigenvalue: min,
            });
        } else {
            values.push(SpdMatrix::try_new(herm)?);
        }
    }
    if failures.is_empty() {
        Ok(PathOutcome::Admissible(MatrixPsd {
            grid,
            values,
            provenance,
        }))
    } else {
        Ok(PathOutcome::Inadmissible(AdmissibilityFailure {
            points: failures,
        }))
    }
}

impl MatrixPsd {
    /// Validate raw complex samples: one per grid point, Hermitian within
    /// tolerance, positive definite above the eigenvalue floor.
    pub fn try_new(
        grid: FrequencyGrid,
        samples: Vec<CMat>,
        provenance: impl Into<String>,
    ) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::SampleCount {
                expected: grid.len(),
                found: samples.len(),
            });
        }
        let dim = samples[0].nrows();
        let mut values = Vec::with_capacity(samples.len());
        for (k, raw) in samples.into_iter().enumerate() {
            if raw.nrows() != dim || raw.ncols() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: raw.nrows(),
                });
            }
            let herm = HermitianMatrix::try_new(raw)?;
            let spd = SpdMatrix::try_new(herm).map_err(|e| match e {
                Error::NotPositiveDefinite { eigenvalue, floor } => {
                    Error::SampleNotPositiveDefinite {
                        index: k,
                        eigenvalue,
                        floor,
                    }
                }
                other => other,
            })?;
            values.push(spd);
        }
        Ok(MatrixPsd {
            grid,
            values,
            provenance: provenance.into(),
        })
    }

    pub fn from_spd(
        grid: FrequencyGrid,
        values: Vec<SpdMatrix>,
        provenance: impl Into<String>,
    ) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::SampleCount {
                expected: grid.len(),
                found: values.len(),
            });
        }
        let dim = values[0].dim();
        if let Some(bad) = values.iter().find(|v| v.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.dim(),
            });
        }
        Ok(MatrixPsd {
            grid,
            values,
            provenance: provenance.into(),
        })
    }

    /// Spectrum constant across frequencies.
    pub fn constant(grid: FrequencyGrid, value: &SpdMatrix, provenance: impl Into<String>) -> Self {
        MatrixPsd {
            grid,
            values: vec![value.clone(); grid.len()],
            provenance: provenance.into(),
        }
    }

    pub fn grid(&self) -> FrequencyGrid {
        self.grid
    }

    pub fn dim(&self) -> usize {
        self.values[0].dim()
    }

    pub fn value(&self, k: usize) -> &SpdMatrix {
        &self.values[k]
    }

    pub fn values(&self) -> &[SpdMatrix] {
        &self.values
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    /// Pointwise inverse; stays inside the cone.
    pub fn inverse(&self) -> Result<MatrixPsd> {
        let values = self
            .values
            .iter()
            .map(|v| v.inverse())
            .collect::<Result<Vec<_>>>()?;
        MatrixPsd::from_spd(
            self.grid,
            values,
            format!("inverse of {}", self.provenance),
        )
    }

    /// Pointwise positive scaling.
    pub fn scale(&self, c: f64) -> Result<MatrixPsd> {
        if c.is_nan() || c <= 0.0 {
            return Err(Error::NotPositiveDefinite {
                eigenvalue: c,
                floor: 0.0,
            });
        }
        let values = self
            .values
            .iter()
            .map(|v| SpdMatrix::try_new(v.hermitian().scale(c)))
            .collect::<Result<Vec<_>>>()?;
        MatrixPsd::from_spd(self.grid, values, format!("{} scaled", self.provenance))
    }

    /// Congruence f -> g f g* with one transform matrix per grid point.
    pub fn congruence_samples(&self, g: &[CMat]) -> Result<MatrixPsd> {
        if g.len() != self.grid.len() {
            return Err(Error::SampleCount {
                expected: self.grid.len(),
                found: g.len(),
            });
        }
        let samples: Vec<CMat> = self
            .values
            .iter()
            .zip(g.iter())
            .map(|(f, t)| t * f.matrix() * t.adjoint())
            .collect();
        MatrixPsd::try_new(
            self.grid,
            samples,
            format!("congruence of {}", self.provenance),
        )
    }

    /// Congruence with a constant invertible matrix.
    pub fn congruence_constant(&self, t: &CMat) -> Result<MatrixPsd> {
        let g = vec![t.clone(); self.grid.len()];
        self.congruence_samples(&g)
    }

    /// f + epsilon * delta, classified rather than rejected: stepping out of
    /// the cone is an answer, not an error.
    pub fn perturbed(&self, delta: &PerturbationField, epsilon: f64) -> Result<PathOutcome> {
        check_same_grid(self.grid, delta.grid)?;
        if self.dim() != delta.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: delta.dim(),
            });
        }
        let samples: Vec<CMat> = self
            .values
            .iter()
            .zip(delta.values.iter())
            .map(|(f, d)| f.matrix() + d.matrix().scale(epsilon))
            .collect();
        classify_samples(
            self.grid,
            samples,
            format!("{} perturbed (eps={epsilon})", self.provenance),
        )
    }

    /// Largest relative pointwise deviation from another spectrum.
    pub fn max_relative_difference(&self, other: &MatrixPsd) -> Result<f64> {
        check_same_grid(self.grid, other.grid)?;
        let mut worst = 0.0f64;
        for (a, b) in self.values.iter().zip(other.values.iter()) {
            let scale = a.hermitian().frobenius_norm().max(f64::MIN_POSITIVE);
            worst = worst.max((a.matrix() - b.matrix()).norm() / scale);
        }
        Ok(worst)
    }
}

impl PerturbationField {
    pub fn try_new(grid: FrequencyGrid, samples: Vec<CMat>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::SampleCount {
                expected: grid.len(),
                found: samples.len(),
            });
        }
        let values = samples
            .into_iter()
            .map(HermitianMatrix::try_new)
            .collect::<Result<Vec<_>>>()?;
        Ok(PerturbationField { grid, values })
    }

    pub fn from_hermitian(grid: FrequencyGrid, values: Vec<HermitianMatrix>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::SampleCount {
                expected: grid.len(),
                found: values.len(),
            });
        }
        Ok(PerturbationField { grid, values })
    }

    /// Tangent direction f1 - f0.
    pub fn difference(f1: &MatrixPsd, f0: &MatrixPsd) -> Result<Self> {
        check_same_grid(f1.grid, f0.grid)?;
        if f1.dim() != f0.dim() {
            return Err(Error::DimensionMismatch {
                expected: f1.dim(),
                found: f0.dim(),
            });
        }
        let values = f1
            .values
            .iter()
            .zip(f0.values.iter())
            .map(|(a, b)| a.hermitian().sub(b.hermitian()))
            .collect();
        Ok(PerturbationField {
            grid: f1.grid,
            values,
        })
    }

    pub fn zero(grid: FrequencyGrid, dim: usize) -> Self {
        PerturbationField {
            grid,
            values: vec![HermitianMatrix::zeros(dim); grid.len()],
        }
    }

    pub fn grid(&self) -> FrequencyGrid {
        self.grid
    }

    pub fn dim(&self) -> usize {
        self.values[0].dim()
    }

    pub fn value(&self, k: usize) -> &HermitianMatrix {
        &self.values[k]
    }

    pub fn values(&self) -> &[HermitianMatrix] {
        &self.values
    }

    pub fn scale(&self, c: f64) -> PerturbationField {
        PerturbationField {
            grid: self.grid,
            values: self.values.iter().map(|v| v.scale(c)).collect(),
        }
    }
}

/// Average of scalar samples over the grid: the quadrature behind every
/// "integral d theta / 2 pi".
pub fn integrate_scalar(grid: FrequencyGrid, samples: &[f64]) -> Result<f64> {
    if samples.len() != grid.len() {
        return Err(Error::SampleCount {
            expected: grid.len(),
            found: samples.len(),
        });
    }
    Ok(samples.iter().sum::<f64>() / grid.len() as f64)
}

/// Entrywise average of Hermitian samples over the grid.
pub fn integrate_matrix(grid: FrequencyGrid, samples: &[HermitianMatrix]) -> Result<HermitianMatrix> {
    if samples.len() != grid.len() {
        return Err(Error::SampleCount {
            expected: grid.len(),
            found: samples.len(),
        });
    }
    let dim = samples[0].dim();
    let mut acc = CMat::zeros(dim, dim);
    for s in samples {
        if s.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: s.dim(),
            });
        }
        acc += s.matrix();
    }
    acc /= Complex64::new(grid.len() as f64, 0.0);
    hermitize_mut(&mut acc);
    Ok(HermitianMatrix::from_exact(acc))
}

/// Average of raw complex matrix samples; used internally where the result is
/// Hermitian analytically and gets symmetrized once at the end.
pub(crate) fn mean_matrices(samples: &[CMat]) -> CMat {
    let dim = samples[0].nrows();
    let mut acc = CMat::zeros(dim, dim);
    for s in samples {
        acc += s;
    }
    acc / Complex64::new(samples.len() as f64, 0.0)
}

/// Polynomial c_0 + c_1 z + ... + c_d z^d with complex coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexPolynomial {
    coeffs: Vec<Complex64>,
}

impl ComplexPolynomial {
    /// Build from coefficients in increasing degree order; exact trailing
    /// zeros are trimmed, and an all-zero polynomial is rejected.
    pub fn new(mut coeffs: Vec<Complex64>) -> Result<Self> {
        while coeffs.last().is_some_and(|c| c.norm() == 0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            return Err(Error::ZeroPolynomial);
        }
        Ok(ComplexPolynomial { coeffs })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        ComplexPolynomial::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn one() -> Self {
        ComplexPolynomial {
            coeffs: vec![Complex64::new(1.0, 0.0)],
        }
    }

    /// The quadratic z^2 - 2 r cos(angle) z + r^2 whose roots are the
    /// conjugate pair r e^{+- i angle}.
    pub fn conjugate_pole_pair(radius: f64, angle: f64) -> Self {
        ComplexPolynomial {
            coeffs: vec![
                Complex64::new(radius * radius, 0.0),
                Complex64::new(-2.0 * radius * angle.cos(), 0.0),
                Complex64::new(1.0, 0.0),
            ],
        }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    pub fn mul(&self, other: &ComplexPolynomial) -> ComplexPolynomial {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        ComplexPolynomial { coeffs }
    }
}

/// Scalar all-pole spectrum f(theta) = 1/|a(e^{i theta})|^2 sampled on the
/// grid. Rejects polynomials with (near-)roots on the unit circle, probed on
/// a 16x finer grid.
pub fn ar_psd(a: &ComplexPolynomial, grid: FrequencyGrid) -> Result<MatrixPsd> {
    let fine = 16 * grid.len();
    let mut min_abs = f64::INFINITY;
    for j in 0..fine {
        let theta = -PI + 2.0 * PI * j as f64 / fine as f64;
        let z = Complex64::new(0.0, theta).exp();
        min_abs = min_abs.min(a.eval(z).norm());
    }
    if min_abs <= 1e-9 {
        return Err(Error::SpectrumUnbounded { min_abs });
    }
    let samples: Vec<CMat> = (0..grid.len())
        .map(|k| {
            let z = Complex64::new(0.0, grid.theta(k)).exp();
            let v = 1.0 / a.eval(z).norm_sqr();
            CMat::from_element(1, 1, Complex64::new(v, 0.0))
        })
        .collect();
    MatrixPsd::try_new(grid, samples, "all-pole spectrum 1/|a|^2")
}

/// Roots via eigenvalues of the companion matrix, sorted by (re, im) for
/// deterministic output. The coefficient consistency of the result (root sum
/// and product against the polynomial) is verified to 1e-8.
pub fn polynomial_roots(a: &ComplexPolynomial) -> Result<Vec<Complex64>> {
    let d = a.degree();
    if d == 0 {
        return Err(Error::ConstantPolynomial);
    }
    let lead = a.coeffs[d];
    let monic: Vec<Complex64> = a.coeffs[..d].iter().map(|c| c / lead).collect();
    let mut companion = CMat::zeros(d, d);
    for i in 1..d {
        companion[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for (i, c) in monic.iter().enumerate() {
        companion[(i, d - 1)] = -c;
    }
    let schur = nalgebra::linalg::Schur::try_new(companion, f64::EPSILON, 100_000)
        .ok_or(Error::EigenConvergence { iterations: 100_000 })?;
    let eigenvalues = schur
        .eigenvalues()
        .ok_or(Error::EigenConvergence { iterations: 100_000 })?;
    let mut roots: Vec<Complex64> = eigenvalues.iter().copied().collect();
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));

    // Vieta cross-check: sum and product of the roots.
    let sum: Complex64 = roots.iter().sum();
    let expected_sum = -monic[d - 1];
    let prod: Complex64 = roots.iter().product();
    let expected_prod = if d.is_multiple_of(2) {
        monic[0]
    } else {
        -monic[0]
    };
    let scale = roots.iter().map(|r| r.norm().max(1.0)).product::<f64>();
    if (sum - expected_sum).norm() > 1e-8 * (1.0 + expected_sum.norm())
        || (prod - expected_prod).norm() > 1e-8 * scale.max(1.0)
    {
        return Err(Error::CrossCheckFailed {
            what: "polynomial root consistency",
            a: (sum - expected_sum).norm(),
            b: (prod - expected_prod).norm(),
            tolerance: 1e-8,
        });
    }
    Ok(roots)
}

/// Coefficientwise affine combination (1 - tau) a0 + tau a1.
pub fn ar_coefficient_path(
    a0: &ComplexPolynomial,
    a1: &ComplexPolynomial,
    tau: f64,
) -> Result<ComplexPolynomial> {
    let len = a0.coeffs.len().max(a1.coeffs.len());
    let mut coeffs = vec![Complex64::new(0.0, 0.0); len];
    for (i, c) in a0.coeffs.iter().enumerate() {
        coeffs[i] += c * (1.0 - tau);
    }
    for (i, c) in a1.coeffs.iter().enumerate() {
        coeffs[i] += c * tau;
    }
    ComplexPolynomial::new(coeffs)
}

/// Pointwise affine combination (1 - tau) f0 + tau f1, classified for
/// admissibility (extrapolation can leave the cone).
pub fn linear_psd_path(f0: &MatrixPsd, f1: &MatrixPsd, tau: f64) -> Result<PathOutcome> {
    check_same_grid(f0.grid, f1.grid)?;
    if f0.dim() != f1.dim() {
        return Err(Error::DimensionMismatch {
            expected: f0.dim(),
            found: f1.dim(),
        });
    }
    let samples: Vec<CMat> = f0
        .values
        .iter()
        .zip(f1.values.iter())
        .map(|(a, b)| a.matrix().scale(1.0 - tau) + b.matrix().scale(tau))
        .collect();
    classify_samples(f0.grid, samples, format!("linear path (tau={tau})"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn grid_rejects_non_power_of_two() {
        assert!(FrequencyGrid::new(500).is_err());
        assert!(FrequencyGrid::new(2).is_err());
        assert!(FrequencyGrid::new(512).is_ok());
    }

    #[test]
    fn grid_covers_one_period() {
        let grid = FrequencyGrid::new(8).unwrap();
        assert!((grid.theta(0) + PI).abs() < 1e-15);
        assert!((grid.theta(4)).abs() < 1e-15);
        let last = grid.theta(7);
        assert!(last < PI && (PI - last - 2.0 * PI / 8.0).abs() < 1e-15);
    }

    #[test]
    fn integrate_scalar_of_constant() {
        let grid = FrequencyGrid::new(64).unwrap();
        let samples = vec![2.5; 64];
        assert!((integrate_scalar(grid, &samples).unwrap() - 2.5).abs() < 1e-15);
    }

    #[test]
    fn integrate_scalar_of_cosine_vanishes() {
        let grid = FrequencyGrid::new(64).unwrap();
        let samples: Vec<f64> = grid.thetas().iter().map(|t| t.cos()).collect();
        assert!(integrate_scalar(grid, &samples).unwrap().abs() < 1e-14);
    }

    #[test]
    fn integrate_scalar_of_cosine_squared() {
        let grid = FrequencyGrid::new(64).unwrap();
        let samples: Vec<f64> = grid.thetas().iter().map(|t| t.cos().powi(2)).collect();
        assert!((integrate_scalar(grid, &samples).unwrap() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn integrate_scalar_rejects_length_mismatch() {
        let grid = FrequencyGrid::new(64).unwrap();
        assert!(matches!(
            integrate_scalar(grid, &[1.0; 63]),
            Err(Error::SampleCount { .. })
        ));
    }

    #[test]
    fn uniform_quadrature_is_exact_on_trig_polynomials() {
        // Exactness up to degree < N/2 is the accuracy claim behind every
        // integral in the crate.
        let grid = FrequencyGrid::new(32).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        use rand::Rng;
        for _ in 0..20 {
            let degree = rng.random_range(1..16usize);
            let coeffs: Vec<(f64, f64)> = (0..=degree)
                .map(|_| (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            // p(theta) = a_0 + sum_t a_t cos(t theta) + b_t sin(t theta); its
            // mean over the circle is a_0.
            let samples: Vec<f64> = grid
                .thetas()
                .iter()
                .map(|&t| {
                    coeffs
                        .iter()
                        .enumerate()
                        .map(|(deg, (a, b))| {
                            if deg == 0 {
                                *a
                            } else {
                                a * (deg as f64 * t).cos() + b * (deg as f64 * t).sin()
                            }
                        })
                        .sum()
                })
                .collect();
            let integral = integrate_scalar(grid, &samples).unwrap();
            assert!(
                (integral - coeffs[0].0).abs() < 1e-13,
                "degree {degree}: {integral} vs {}",
                coeffs[0].0
            );
        }
    }

    #[test]
    fn integrate_matrix_is_entrywise() {
        let grid = FrequencyGrid::new(16).unwrap();
        let samples: Vec<HermitianMatrix> = grid
            .thetas()
            .iter()
            .map(|&t| HermitianMatrix::from_real_diagonal(&[1.0 + t.cos(), 2.0 * t.cos().powi(2)]))
            .collect();
        let mean = integrate_matrix(grid, &samples).unwrap();
        assert!((mean.matrix()[(0, 0)].re - 1.0).abs() < 1e-14);
        assert!((mean.matrix()[(1, 1)].re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn ar_psd_of_unit_polynomial_is_flat() {
        let grid = FrequencyGrid::new(32).unwrap();
        let f = ar_psd(&ComplexPolynomial::one(), grid).unwrap();
        for v in f.values() {
            assert!((v.matrix()[(0, 0)].re - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn ar_psd_of_first_order_polynomial() {
        // a(z) = 1 - 0.5 z gives f(0) = 1/|1 - 0.5|^2 = 4.
        let grid = FrequencyGrid::new(32).unwrap();
        let a = ComplexPolynomial::from_real(&[1.0, -0.5]).unwrap();
        let f = ar_psd(&a, grid).unwrap();
        let k0 = grid.len() / 2; // theta = 0
        assert!((grid.theta(k0)).abs() < 1e-15);
        assert!((f.value(k0).matrix()[(0, 0)].re - 4.0).abs() < 1e-12);
    }

    #[test]
    fn ar_psd_rejects_roots_on_the_circle() {
        // a(z) = 1 - z has a root at z = 1.
        let a = ComplexPolynomial::from_real(&[1.0, -1.0]).unwrap();
        let grid = FrequencyGrid::new(32).unwrap();
        assert!(matches!(
            ar_psd(&a, grid),
            Err(Error::SpectrumUnbounded { .. })
        ));
    }

    #[test]
    fn roots_of_simple_polynomials() {
        let p = ComplexPolynomial::from_real(&[-1.0, 0.0, 1.0]).unwrap(); // z^2 - 1
        let roots = polynomial_roots(&p).unwrap();
        assert!((roots[0] - Complex64::new(-1.0, 0.0)).norm() < 1e-10);
        assert!((roots[1] - Complex64::new(1.0, 0.0)).norm() < 1e-10);

        let q = ComplexPolynomial::from_real(&[1.0, -0.5]).unwrap(); // 1 - 0.5 z
        let roots = polynomial_roots(&q).unwrap();
        assert_eq!(roots.len(), 1);
        assert!((roots[0] - Complex64::new(2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn roots_reject_constants() {
        let p = ComplexPolynomial::one();
        assert!(matches!(
            polynomial_roots(&p),
            Err(Error::ConstantPolynomial)
        ));
    }

    #[test]
    fn coefficient_path_endpoints_and_midpoint() {
        let a0 = ComplexPolynomial::one();
        let a1 = ComplexPolynomial::from_real(&[1.0, 1.0]).unwrap();
        assert_eq!(ar_coefficient_path(&a0, &a1, 0.0).unwrap(), a0);
        assert_eq!(ar_coefficient_path(&a0, &a1, 1.0).unwrap(), a1);
        let mid = ar_coefficient_path(&a0, &a1, 0.5).unwrap();
        assert_eq!(mid, ComplexPolynomial::from_real(&[1.0, 0.5]).unwrap());
    }

    #[test]
    fn linear_path_between_scalar_constants_extrapolates() {
        let grid = FrequencyGrid::new(16).unwrap();
        let one = SpdMatrix::from_real_diagonal(&[1.0]).unwrap();
        let three = SpdMatrix::from_real_diagonal(&[3.0]).unwrap();
        let f0 = MatrixPsd::constant(grid, &one, "one");
        let f1 = MatrixPsd::constant(grid, &three, "three");
        match linear_psd_path(&f0, &f1, 4.0 / 3.0).unwrap() {
            PathOutcome::Admissible(f) => {
                assert!((f.value(0).matrix()[(0, 0)].re - 11.0 / 3.0).abs() < 1e-12);
            }
            PathOutcome::Inadmissible(_) => panic!("constant extrapolation should stay positive"),
        }
    }

    #[test]
    fn linear_path_stays_in_cone_inside_unit_interval() {
        let grid = FrequencyGrid::new(64).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let (f0, _) = random::random_smooth_psd(2, grid, 0.8, &mut rng).unwrap();
        let (f1, _) = random::random_smooth_psd(2, grid, 0.8, &mut rng).unwrap();
        for tau in [0.0, 0.25, 0.5, 0.75, 1.0] {
            assert!(linear_psd_path(&f0, &f1, tau).unwrap().is_admissible());
        }
    }

    #[test]
    fn linear_path_rejects_mismatched_grids() {
        let a = MatrixPsd::constant(
            FrequencyGrid::new(16).unwrap(),
            &SpdMatrix::identity(1),
            "a",
        );
        let b = MatrixPsd::constant(
            FrequencyGrid::new(32).unwrap(),
            &SpdMatrix::identity(1),
            "b",
        );
        assert!(matches!(
            linear_psd_path(&a, &b, 0.5),
            Err(Error::GridMismatch { .. })
        ));
    }

    #[test]
    fn perturbation_difference_and_zero() {
        let grid = FrequencyGrid::new(16).unwrap();
        let one = SpdMatrix::from_real_diagonal(&[1.0]).unwrap();
        let two = SpdMatrix::from_real_diagonal(&[2.0]).unwrap();
        let f0 = MatrixPsd::constant(grid, &one, "one");
        let f1 = MatrixPsd::constant(grid, &two, "two");
        let d = PerturbationField::difference(&f1, &f0).unwrap();
        assert!((d.value(0).matrix()[(0, 0)].re - 1.0).abs() < 1e-15);
        let z = PerturbationField::zero(grid, 1);
        assert_eq!(z.value(3).frobenius_norm(), 0.0);
    }
}
