//! Riemannian metrics on the space of matrix spectra, the closed-form
//! geodesic, and the quadratic-expansion verifiers.
//!
//! The prediction-flatness metric
//!
//!   g_1,f(D) = int tr(f^-1 D f^-1 D) d theta / 2 pi
//!
//! has pointwise geodesics: the path between f0 and f1 applies the SPD
//! geodesic at every frequency independently, so no discretization in tau is
//! ever needed. The prediction-degradation metric g_2 subtracts the squared
//! trace of the factor-whitened mean of the perturbation and satisfies
//! 0 <= g_2 <= g_1.
//!
//! The expansion checks verify div(f, f + eps D) = quadratic(eps D) + O(eps^3)
//! by bounding the ratio |div - quadratic| / eps^3 across a ladder of eps
//! values. Ratios are accepted when their spread stays within a factor of 8
//! (one octave of the default 8x ladder span); rows whose residual sits at
//! the numeric noise floor carry no order information and are skipped.

use crate::divergence;
use crate::error::{Error, Result};
use crate::factor::{factorize, SpectralFactor};
use crate::hermitian::{hermitize_mut, CMat, HermitianEigen, HermitianMatrix, SpdMatrix};
use crate::psd::{
    check_same_grid, FrequencyGrid, MatrixPsd, PathOutcome, PerturbationField,
};

/// Required agreement between the two g_1 formulas.
pub const G1_DUAL_AGREEMENT: f64 = 1e-10;
/// Default epsilon ladder for the expansion checks.
pub const DEFAULT_EPSILON_LADDER: [f64; 4] = [1e-1, 5e-2, 2.5e-2, 1.25e-2];
/// Allowed max/min spread of the residual ratios across the ladder.
pub const EXPANSION_RATIO_BOUND: f64 = 8.0;
/// Residuals below this are numeric noise, not order information.
const EXPANSION_RESIDUAL_FLOOR: f64 = 1e-12;

fn check_field(f: &MatrixPsd, delta: &PerturbationField) -> Result<()> {
    check_same_grid(f.grid(), delta.grid())?;
    if f.dim() != delta.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            found: delta.dim(),
        });
    }
    Ok(())
}

/// Prediction-flatness metric g_1. Both the trace form tr(f^-1 D f^-1 D) and
/// the whitened Frobenius form are evaluated and must agree to 1e-10.
pub fn metric_g1(f: &MatrixPsd, delta: &PerturbationField) -> Result<f64> {
    check_field(f, delta)?;
    let n = f.grid().len() as f64;
    let mut trace_form = 0.0;
    let mut frobenius_form = 0.0;
    for (fk, dk) in f.values().iter().zip(delta.values().iter()) {
        let eig = fk.eig()?;
        let inv = eig.apply(|l| 1.0 / l);
        let inv_sqrt = eig.apply(|l| 1.0 / l.sqrt());
        let whitened = &inv_sqrt * dk.matrix() * &inv_sqrt;
        frobenius_form += whitened.norm_squared();
        let product = &inv * dk.matrix();
        trace_form += (&product * &product).trace().re;
    }
    trace_form /= n;
    frobenius_form /= n;
    if (trace_form - frobenius_form).abs()
        > G1_DUAL_AGREEMENT * trace_form.abs().max(frobenius_form.abs()).max(1.0)
    {
        return Err(Error::CrossCheckFailed {
            what: "g1 dual formula",
            a: trace_form,
            b: frobenius_form,
            tolerance: G1_DUAL_AGREEMENT,
        });
    }
    Ok(trace_form)
}

/// Prediction-degradation metric g_2 = g_1 - tr(A^2) with
/// A = int f+^-1 D f+^-* d theta / 2 pi. Factorizes `f` internally.
pub fn metric_g2(f: &MatrixPsd, delta: &PerturbationField) -> Result<f64> {
    let (sf, report) = factorize(f)?;
    if !report.converged {
        return Err(Error::FactorizationDiverged {
            iterations: report.iterations,
            residual: report.residual,
        });
    }
    metric_g2_with_factor(f, &sf, delta)
}

/// g_2 with a caller-provided factor of `f`.
pub fn metric_g2_with_factor(
    f: &MatrixPsd,
    sf: &SpectralFactor,
    delta: &PerturbationField,
) -> Result<f64> {
    check_field(f, delta)?;
    check_same_grid(f.grid(), sf.grid())?;
    let g1 = metric_g1(f, delta)?;
    let m = f.dim();
    let mut acc = CMat::zeros(m, m);
    for (k, (psi, dk)) in sf.values().iter().zip(delta.values().iter()).enumerate() {
        let inv = psi
            .clone()
            .try_inverse()
            .ok_or(Error::SingularFactorSample { index: k })?;
        acc += &inv * dk.matrix() * inv.adjoint();
    }
    acc /= num_complex::Complex64::new(f.grid().len() as f64, 0.0);
    // A is Hermitian analytically; symmetrizing removes quadrature asymmetry.
    hermitize_mut(&mut acc);
    let g2 = g1 - acc.norm_squared();
    if g2 < -1e-9 {
        return Err(Error::NegativeDivergence {
            measure: "g2",
            value: g2,
        });
    }
    Ok(g2.max(0.0))
}

/// The geodesic between two spectra, with per-point spectral data
/// precomputed so evaluation at any tau costs two matrix products per
/// frequency.
pub struct GeodesicPath {
    grid: FrequencyGrid,
    dim: usize,
    sqrt_f0: Vec<CMat>,
    whitened_eig: Vec<HermitianEigen>,
    distance: f64,
}

impl GeodesicPath {
    pub fn new(f0: &MatrixPsd, f1: &MatrixPsd) -> Result<Self> {
        check_same_grid(f0.grid(), f1.grid())?;
        if f0.dim() != f1.dim() {
            return Err(Error::DimensionMismatch {
                expected: f0.dim(),
                found: f1.dim(),
            });
        }
        let n = f0.grid().len();
        let mut sqrt_f0 = Vec::with_capacity(n);
        let mut whitened_eig = Vec::with_capacity(n);
        let mut dist_sq = 0.0;
        for (a, b) in f0.values().iter().zip(f1.values().iter()) {
            let eig_a = a.eig()?;
            sqrt_f0.push(eig_a.apply(f64::sqrt));
            let inv_sqrt = eig_a.apply(|l| 1.0 / l.sqrt());
            let mut w = &inv_sqrt * b.matrix() * &inv_sqrt;
            hermitize_mut(&mut w);
            let eig_w = HermitianMatrix::from_exact(w).eig()?;
            dist_sq += eig_w
                .eigenvalues
                .iter()
                .map(|l| l.ln().powi(2))
                .sum::<f64>();
            whitened_eig.push(eig_w);
        }
        Ok(GeodesicPath {
            grid: f0.grid(),
            dim: f0.dim(),
            sqrt_f0,
            whitened_eig,
            distance: (dist_sq / n as f64).sqrt(),
        })
    }

    pub fn grid(&self) -> FrequencyGrid {
        self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Geodesic distance between the endpoints.
    pub fn distance(&self) -> f64 {
        self.distance
    }

    /// The spectrum f_tau; any real tau is admissible, including
    /// extrapolation beyond the endpoints.
    pub fn at(&self, tau: f64) -> Result<MatrixPsd> {
        let values = self
            .sqrt_f0
            .iter()
            .zip(self.whitened_eig.iter())
            .map(|(e, eig)| {
                let wt = eig.apply(|l| l.powf(tau));
                let mut out = e * wt * e;
                hermitize_mut(&mut out);
                SpdMatrix::try_new(HermitianMatrix::from_exact(out))
            })
            .collect::<Result<Vec<_>>>()?;
        MatrixPsd::from_spd(self.grid, values, format!("geodesic (tau={tau})"))
    }
}

/// Pointwise geodesic f_tau = f0^{1/2} (f0^{-1/2} f1 f0^{-1/2})^tau f0^{1/2}.
pub fn psd_geodesic(f0: &MatrixPsd, f1: &MatrixPsd, tau: f64) -> Result<MatrixPsd> {
    GeodesicPath::new(f0, f1)?.at(tau)
}

/// Geodesic distance sqrt(int ||log f0^{-1/2} f1 f0^{-1/2}||_F^2).
pub fn geodesic_distance(f0: &MatrixPsd, f1: &MatrixPsd) -> Result<f64> {
    check_same_grid(f0.grid(), f1.grid())?;
    if f0.dim() != f1.dim() {
        return Err(Error::DimensionMismatch {
            expected: f0.dim(),
            found: f1.dim(),
        });
    }
    let mut dist_sq = 0.0;
    for (a, b) in f0.values().iter().zip(f1.values().iter()) {
        let inv_sqrt = a.eig()?.apply(|l| 1.0 / l.sqrt());
        let mut w = &inv_sqrt * b.matrix() * &inv_sqrt;
        hermitize_mut(&mut w);
        let eig = HermitianMatrix::from_exact(w).eig()?;
        dist_sq += eig.eigenvalues.iter().map(|l| l.ln().powi(2)).sum::<f64>();
    }
    Ok((dist_sq / f0.grid().len() as f64).sqrt())
}

/// One ladder row of an expansion check.
#[derive(Debug, Clone)]
pub struct ExpansionRow {
    pub epsilon: f64,
    pub divergence: f64,
    pub quadratic: f64,
    pub residual: f64,
    /// |divergence - quadratic| / epsilon^3.
    pub ratio: f64,
}

/// Ladder of residual ratios for one (f, delta) direction.
#[derive(Debug, Clone)]
pub struct ExpansionCheck {
    pub rows: Vec<ExpansionRow>,
    pub passed: bool,
}

fn ratio_bounded(rows: &[ExpansionRow]) -> bool {
    let scale = rows
        .iter()
        .map(|r| r.divergence.abs().max(r.quadratic.abs()))
        .fold(1.0f64, f64::max);
    let floor = EXPANSION_RESIDUAL_FLOOR * scale;
    let active: Vec<f64> = rows
        .iter()
        .filter(|r| r.residual > floor)
        .map(|r| r.ratio)
        .collect();
    if active.len() < 2 {
        // Residuals at the noise floor mean the expansion is exact to
        // machine precision; nothing to bound.
        return true;
    }
    let max = active.iter().fold(f64::MIN, |a, &b| a.max(b));
    let min = active.iter().fold(f64::MAX, |a, &b| a.min(b));
    max / min <= EXPANSION_RATIO_BOUND
}

fn perturbed_or_error(f: &MatrixPsd, delta: &PerturbationField, eps: f64) -> Result<MatrixPsd> {
    match f.perturbed(delta, eps)? {
        PathOutcome::Admissible(fe) => Ok(fe),
        PathOutcome::Inadmissible(failure) => Err(Error::InadmissiblePerturbation {
            epsilon: eps,
            failures: failure.points.len(),
        }),
    }
}

/// Check D1(f, f + eps D) = g_1(eps D) + O(eps^3) across the ladder.
pub fn expansion_check_d1(
    f: &MatrixPsd,
    delta: &PerturbationField,
    ladder: &[f64],
) -> Result<ExpansionCheck> {
    let g1 = metric_g1(f, delta)?;
    let mut rows = Vec::with_capacity(ladder.len());
    for &eps in ladder {
        let fe = perturbed_or_error(f, delta, eps)?;
        let d = divergence::d1(f, &fe)?.value;
        let q = eps * eps * g1;
        let residual = (d - q).abs();
        rows.push(ExpansionRow {
            epsilon: eps,
            divergence: d,
            quadratic: q,
            residual,
            ratio: residual / eps.powi(3),
        });
    }
    let passed = ratio_bounded(&rows);
    Ok(ExpansionCheck { rows, passed })
}

/// Check D2(f, f + eps D) = g_2(eps D)/2 + O(eps^3) across the ladder.
pub fn expansion_check_d2(
    f: &MatrixPsd,
    delta: &PerturbationField,
    ladder: &[f64],
) -> Result<ExpansionCheck> {
    let (sf, report) = factorize(f)?;
    if !report.converged {
        return Err(Error::FactorizationDiverged {
            iterations: report.iterations,
            residual: report.residual,
        });
    }
    let g2 = metric_g2_with_factor(f, &sf, delta)?;
    let mut rows = Vec::with_capacity(ladder.len());
    for &eps in ladder {
        let fe = perturbed_or_error(f, delta, eps)?;
        let (sfe, re) = factorize(&fe)?;
        if !re.converged {
            return Err(Error::FactorizationDiverged {
                iterations: re.iterations,
                residual: re.residual,
            });
        }
        let d = divergence::d2_with_factors(f, &sf, &fe, &sfe)?.value;
        let q = 0.5 * eps * eps * g2;
        let residual = (d - q).abs();
        rows.push(ExpansionRow {
            epsilon: eps,
            divergence: d,
            quadratic: q,
            residual,
            ratio: residual / eps.powi(3),
        });
    }
    let passed = ratio_bounded(&rows);
    Ok(ExpansionCheck { rows, passed })
}
