//! FFT helpers for moving between grid samples and lag (Fourier) coefficients.
//!
//! The frequency grid is theta_k = -pi + 2*pi*k/N, not the usual 0..2*pi FFT
//! grid, so every transform picks up an alternating sign: with the standard
//! DFT written as X_u = sum_k x_k e^{-2*pi*i*k*u/N},
//!
//!   c_u = (-1)^u / N * X_u
//!
//! is the coefficient of e^{i*u*theta} (lag u for u < N/2, lag u-N above).
//! N is even, so the sign is consistent for the negative-lag aliases.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

use crate::hermitian::CMat;

/// Planned forward/inverse transforms for one grid length.
pub(crate) struct GridFft {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl GridFft {
    pub(crate) fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        GridFft {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    pub(crate) fn len(&self) -> usize {
        self.n
    }

    /// Lag coefficients of a sequence sampled at theta_k.
    pub(crate) fn coeffs_from_samples(&self, samples: &[Complex64]) -> Vec<Complex64> {
        debug_assert_eq!(samples.len(), self.n);
        let mut buf = samples.to_vec();
        self.forward.process(&mut buf);
        let scale = 1.0 / self.n as f64;
        for (u, v) in buf.iter_mut().enumerate() {
            *v *= if u % 2 == 0 { scale } else { -scale };
        }
        buf
    }

    /// Grid samples of sum_u c_u e^{i*u*theta} at theta_k.
    pub(crate) fn samples_from_coeffs(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        debug_assert_eq!(coeffs.len(), self.n);
        let mut buf: Vec<Complex64> = coeffs
            .iter()
            .enumerate()
            .map(|(u, c)| if u % 2 == 0 { *c } else { -*c })
            .collect();
        self.inverse.process(&mut buf);
        buf
    }

    /// Entrywise lag coefficients of matrix-valued grid samples.
    pub(crate) fn matrix_coeffs_from_samples(&self, samples: &[CMat]) -> Vec<CMat> {
        self.matrix_map(samples, |fft, buf| fft.coeffs_from_samples(buf))
    }

    /// Entrywise evaluation of matrix-valued lag coefficients on the grid.
    pub(crate) fn matrix_samples_from_coeffs(&self, coeffs: &[CMat]) -> Vec<CMat> {
        self.matrix_map(coeffs, |fft, buf| fft.samples_from_coeffs(buf))
    }

    fn matrix_map(
        &self,
        input: &[CMat],
        transform: impl Fn(&GridFft, &[Complex64]) -> Vec<Complex64>,
    ) -> Vec<CMat> {
        debug_assert_eq!(input.len(), self.n);
        let m = input[0].nrows();
        let mut out = vec![CMat::zeros(m, m); self.n];
        let mut entry = vec![Complex64::default(); self.n];
        for i in 0..m {
            for j in 0..m {
                for (k, sample) in input.iter().enumerate() {
                    entry[k] = sample[(i, j)];
                }
                let transformed = transform(self, &entry);
                for (k, value) in transformed.into_iter().enumerate() {
                    out[k][(i, j)] = value;
                }
            }
        }
        out
    }
}
