//! Divergence measures between matrix spectra, all derived from comparing
//! optimal one-step prediction under model mismatch.
//!
//! Every measure with both a factor-based and a factor-free formula is
//! evaluated by the factor-free route (no iteration involved); where the two
//! routes are genuinely different computations the implementation runs both
//! and cross-checks them:
//!
//! * `d1` evaluates the trace form tr(f2^-1 f1 + f1^-1 f2 - 2I) and the
//!   Frobenius form ||f1^{-1/2} f2^{1/2} - f1^{1/2} f2^{-1/2}||_F^2 and
//!   requires agreement to 1e-9.
//! * `d2` evaluates log det(Omega_1^{-1/2} Omega_{1,2} Omega_1^{-1/2}) and
//!   the log-det difference of the whitened innovation spectrum and requires
//!   agreement to 1e-7.
//!
//! The remaining measures are pointwise spectral functions of the whitened
//! matrix C = f2^{-1/2} f1 f2^{-1/2}; its eigenvalues equal those of
//! f2^{-1} f1 and of the factor-whitened form, which is why no spectral
//! factorization is needed. `itakura_saito` is the only asymmetric measure
//! here besides `d2`; its second argument is the reference model.

use crate::error::{Error, Result};
use crate::factor::{
    cross_error_variance, factorize, innovation_spectrum, SpectralFactor,
};
use crate::hermitian::{hermitize_mut, CMat, HermitianMatrix, SpdMatrix};
use crate::psd::{check_same_grid, integrate_matrix, MatrixPsd};

/// Values this close to zero from below are numerical zeros; anything lower
/// is treated as a failure.
pub const NUMERICAL_ZERO_FLOOR: f64 = 1e-10;
/// Required agreement between the two `d1` formulas.
pub const D1_DUAL_AGREEMENT: f64 = 1e-9;
/// Required agreement between the two `d2` formulas.
pub const D2_DUAL_AGREEMENT: f64 = 1e-7;

/// The six divergence measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Measure {
    D1,
    D2,
    Frobenius,
    Hellinger,
    ItakuraSaito,
    LogSpectral,
}

impl Measure {
    pub const ALL: [Measure; 6] = [
        Measure::D1,
        Measure::D2,
        Measure::Frobenius,
        Measure::Hellinger,
        Measure::ItakuraSaito,
        Measure::LogSpectral,
    ];

    /// CLI spelling of the measure.
    pub fn cli_name(&self) -> &'static str {
        match self {
            Measure::D1 => "d1",
            Measure::D2 => "d2",
            Measure::Frobenius => "fro",
            Measure::Hellinger => "hellinger",
            Measure::ItakuraSaito => "is",
            Measure::LogSpectral => "log",
        }
    }

    /// Whether the measure is symmetric in its two arguments.
    pub fn is_symmetric(&self) -> bool {
        !matches!(self, Measure::D2 | Measure::ItakuraSaito)
    }
}

impl std::fmt::Display for Measure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.cli_name())
    }
}

/// A divergence value with optional per-frequency integrand samples for
/// diagnostics and plotting. `d2` has no pointwise integrand.
#[derive(Debug, Clone)]
pub struct DivergenceResult {
    pub value: f64,
    pub measure: Measure,
    pub details: Option<Vec<f64>>,
}

fn check_pair(f1: &MatrixPsd, f2: &MatrixPsd) -> Result<()> {
    check_same_grid(f1.grid(), f2.grid())?;
    if f1.dim() != f2.dim() {
        return Err(Error::DimensionMismatch {
            expected: f1.dim(),
            found: f2.dim(),
        });
    }
    Ok(())
}

fn dual_check(what: &'static str, a: f64, b: f64, tolerance: f64) -> Result<()> {
    if (a - b).abs() > tolerance * a.abs().max(b.abs()).max(1.0) {
        return Err(Error::CrossCheckFailed {
            what,
            a,
            b,
            tolerance,
        });
    }
    Ok(())
}

fn finalize(measure: Measure, value: f64, details: Option<Vec<f64>>) -> Result<DivergenceResult> {
    if value < -NUMERICAL_ZERO_FLOOR {
        return Err(Error::NegativeDivergence {
            measure: measure.cli_name(),
            value,
        });
    }
    Ok(DivergenceResult {
        value,
        measure,
        details,
    })
}

/// Spectral powers of one SPD sample reused across formulas.
struct PointPowers {
    inv: CMat,
    sqrt: CMat,
    inv_sqrt: CMat,
}

fn point_powers(v: &SpdMatrix) -> Result<PointPowers> {
    let eig = v.eig()?;
    Ok(PointPowers {
        inv: eig.apply(|l| 1.0 / l),
        sqrt: eig.apply(f64::sqrt),
        inv_sqrt: eig.apply(|l| 1.0 / l.sqrt()),
    })
}

/// Eigenvalues of the whitened matrix f2^{-1/2} f1 f2^{-1/2} at one point,
/// plus the whitened matrix itself.
fn whitened_point(f1: &SpdMatrix, f2: &SpdMatrix) -> Result<(CMat, Vec<f64>)> {
    let w = f2.inv_sqrt()?;
    let mut c = w.matrix() * f1.matrix() * w.matrix();
    hermitize_mut(&mut c);
    let herm = HermitianMatrix::from_exact(c);
    let eig = herm.eig()?;
    Ok((herm.into_matrix(), eig.eigenvalues))
}

/// Prediction-flatness divergence D1 = int tr(f2^-1 f1 + f1^-1 f2 - 2I).
pub fn d1(f1: &MatrixPsd, f2: &MatrixPsd) -> Result<DivergenceResult> {
    check_pair(f1, f2)?;
    let m = f1.dim() as f64;
    let n = f1.grid().len();
    let mut trace_form = 0.0;
    let mut frobenius_form = 0.0;
    let mut details = Vec::with_capacity(n);
    for (a, b) in f1.values().iter().zip(f2.values().iter()) {
        let pa = point_powers(a)?;
        let pb = point_powers(b)?;
        let t = (&pb.inv * a.matrix()).trace().re + (&pa.inv * b.matrix()).trace().re - 2.0 * m;
        let x = &pa.inv_sqrt * &pb.sqrt - &pa.sqrt * &pb.inv_sqrt;
        trace_form += t;
        frobenius_form += x.norm_squared();
        details.push(t);
    }
    trace_form /= n as f64;
    frobenius_form /= n as f64;
    dual_check("d1 dual formula", trace_form, frobenius_form, D1_DUAL_AGREEMENT)?;
    finalize(Measure::D1, trace_form, Some(details))
}

/// Prediction-degradation divergence
/// D2 = log det(Omega_1^{-1/2} Omega_{1,2} Omega_1^{-1/2}); factorizes both
/// arguments internally.
pub fn d2(f1: &MatrixPsd, f2: &MatrixPsd) -> Result<DivergenceResult> {
    check_pair(f1, f2)?;
    let (sf1, r1) = factorize(f1)?;
    if !r1.converged {
        return Err(Error::FactorizationDiverged {
            iterations: r1.iterations,
            residual: r1.residual,
        });
    }
    let (sf2, r2) = factorize(f2)?;
    if !r2.converged {
        return Err(Error::FactorizationDiverged {
            iterations: r2.iterations,
            residual: r2.residual,
        });
    }
    d2_with_factors(f1, &sf1, f2, &sf2)
}

/// `d2` with caller-provided spectral factors (one factorization can serve
/// many divergence evaluations).
pub fn d2_with_factors(
    f1: &MatrixPsd,
    sf1: &SpectralFactor,
    f2: &MatrixPsd,
    sf2: &SpectralFactor,
) -> Result<DivergenceResult> {
    check_pair(f1, f2)?;
    check_same_grid(f1.grid(), sf1.grid())?;
    check_same_grid(f2.grid(), sf2.grid())?;
    // Variance route: log det of the whitened cross-variance.
    let omega_12 = cross_error_variance(f1, sf2)?;
    let w = sf1.omega().inv_sqrt()?;
    let mut whitened = w.matrix() * omega_12.matrix() * w.matrix();
    hermitize_mut(&mut whitened);
    let variance_route = SpdMatrix::try_new(HermitianMatrix::from_exact(whitened))?.log_det()?;

    // Szego route: log det of the mean innovation spectrum minus the mean of
    // its pointwise log det.
    let h = innovation_spectrum(f1, sf2)?;
    let mean_h = integrate_matrix(
        h.grid(),
        &h.values()
            .iter()
            .map(|v| v.hermitian().clone())
            .collect::<Vec<_>>(),
    )?;
    let first = SpdMatrix::try_new(mean_h)?.log_det()?;
    let mut second = 0.0;
    for v in h.values() {
        second += v.log_det()?;
    }
    second /= h.grid().len() as f64;
    let szego_route = first - second;

    dual_check("d2 dual formula", variance_route, szego_route, D2_DUAL_AGREEMENT)?;
    finalize(Measure::D2, variance_route, None)
}

/// Frobenius divergence: 1/2 the symmetrized integral of
/// ||f_j^{-1/2} f_i f_j^{-1/2} - I||_F^2.
pub fn d_frobenius(f1: &MatrixPsd, f2: &MatrixPsd) -> Result<DivergenceResult> {
    check_pair(f1, f2)?;
    let n = f1.grid().len();
    let mut total = 0.0;
    let mut details = Vec::with_capacity(n);
    let identity = CMat::identity(f1.dim(), f1.dim());
    for (a, b) in f1.values().iter().zip(f2.values().iter()) {
        let (c12, lambda) = whitened_point(a, b)?;
        let forward = (&c12 - &identity).norm_squared();
        let reverse: f64 = lambda.iter().map(|l| (1.0 / l - 1.0).powi(2)).sum();
        let v = 0.5 * (forward + reverse);
        total += v;
        details.push(v);
    }
    finalize(Measure::Frobenius, total / n as f64, Some(details))
}

/// Hellinger-type divergence: the symmetrized integral of
/// ||(f_j^{-1/2} f_i f_j^{-1/2})^{1/2} - I||_F^2.
pub fn d_hellinger(f1: &MatrixPsd, f2: &MatrixPsd) -> Result<DivergenceResult> {
    check_pair(f1, f2)?;
    let n = f1.grid().len();
    let mut total = 0.0;
    let mut details = Vec::with_capacity(n);
    for (a, b) in f1.values().iter().zip(f2.values().iter()) {
        let (_, lambda) = whitened_point(a, b)?;
        let v: f64 = lambda
            .iter()
            .map(|l| (l.sqrt() - 1.0).powi(2) + (1.0 / l.sqrt() - 1.0).powi(2))
            .sum();
        total += v;
        details.push(v);
    }
    finalize(Measure::Hellinger, total / n as f64, Some(details))
}

/// Itakura-Saito divergence int tr(f2^-1 f1) - log det(f2^-1 f1) - m, with
/// `f2` the reference model.
pub fn d_itakura_saito(f1: &MatrixPsd, f2: &MatrixPsd) -> Result<DivergenceResult> {
    check_pair(f1, f2)?;
    let m = f1.dim() as f64;
    let n = f1.grid().len();
    let mut total = 0.0;
    let mut details = Vec::with_capacity(n);
    for (a, b) in f1.values().iter().zip(f2.values().iter()) {
        let (_, lambda) = whitened_point(a, b)?;
        let v: f64 = lambda.iter().map(|l| l - l.ln()).sum::<f64>() - m;
        total += v;
        details.push(v);
    }
    finalize(Measure::ItakuraSaito, total / n as f64, Some(details))
}

/// Log-spectral deviation int ||log(f1^{-1/2} f2 f1^{-1/2})||_F^2; its square
/// root is the geodesic distance of the prediction-flatness metric.
pub fn d_log_spectral(f1: &MatrixPsd, f2: &MatrixPsd) -> Result<DivergenceResult> {
    check_pair(f1, f2)?;
    let n = f1.grid().len();
    let mut total = 0.0;
    let mut details = Vec::with_capacity(n);
    for (a, b) in f1.values().iter().zip(f2.values().iter()) {
        let (_, lambda) = whitened_point(b, a)?;
        let v: f64 = lambda.iter().map(|l| l.ln().powi(2)).sum();
        total += v;
        details.push(v);
    }
    finalize(Measure::LogSpectral, total / n as f64, Some(details))
}

/// Dispatch by measure; `d2` factorizes internally.
pub fn evaluate(measure: Measure, f1: &MatrixPsd, f2: &MatrixPsd) -> Result<DivergenceResult> {
    match measure {
        Measure::D1 => d1(f1, f2),
        Measure::D2 => d2(f1, f2),
        Measure::Frobenius => d_frobenius(f1, f2),
        Measure::Hellinger => d_hellinger(f1, f2),
        Measure::ItakuraSaito => d_itakura_saito(f1, f2),
        Measure::LogSpectral => d_log_spectral(f1, f2),
    }
}

/// The five pointwise (factorization-free) measures in one pass over the
/// grid, sharing the per-point eigendecompositions. Used by the batch test
/// drivers; values agree with the individual functions exactly.
pub struct PointwiseFamily {
    pub d1: DivergenceResult,
    pub frobenius: DivergenceResult,
    pub hellinger: DivergenceResult,
    pub itakura_saito: DivergenceResult,
    pub log_spectral: DivergenceResult,
}

pub fn pointwise_family(f1: &MatrixPsd, f2: &MatrixPsd) -> Result<PointwiseFamily> {
    check_pair(f1, f2)?;
    let m = f1.dim() as f64;
    let n = f1.grid().len() as f64;
    let mut d1_trace = 0.0;
    let mut d1_frob = 0.0;
    let mut fro = 0.0;
    let mut hel = 0.0;
    let mut is = 0.0;
    let mut log = 0.0;
    let identity = CMat::identity(f1.dim(), f1.dim());
    for (a, b) in f1.values().iter().zip(f2.values().iter()) {
        let pa = point_powers(a)?;
        let pb = point_powers(b)?;
        d1_trace +=
            (&pb.inv * a.matrix()).trace().re + (&pa.inv * b.matrix()).trace().re - 2.0 * m;
        let x = &pa.inv_sqrt * &pb.sqrt - &pa.sqrt * &pb.inv_sqrt;
        d1_frob += x.norm_squared();

        let mut c12 = &pb.inv_sqrt * a.matrix() * &pb.inv_sqrt;
        hermitize_mut(&mut c12);
        let herm = HermitianMatrix::from_exact(c12);
        let lambda = herm.eig()?.eigenvalues;
        fro += 0.5
            * ((herm.matrix() - &identity).norm_squared()
                + lambda.iter().map(|l| (1.0 / l - 1.0).powi(2)).sum::<f64>());
        hel += lambda
            .iter()
            .map(|l| (l.sqrt() - 1.0).powi(2) + (1.0 / l.sqrt() - 1.0).powi(2))
            .sum::<f64>();
        is += lambda.iter().map(|l| l - l.ln()).sum::<f64>() - m;
        log += lambda.iter().map(|l| l.ln().powi(2)).sum::<f64>();
    }
    d1_trace /= n;
    d1_frob /= n;
    dual_check("d1 dual formula", d1_trace, d1_frob, D1_DUAL_AGREEMENT)?;
    Ok(PointwiseFamily {
        d1: finalize(Measure::D1, d1_trace, None)?,
        frobenius: finalize(Measure::Frobenius, fro / n, None)?,
        hellinger: finalize(Measure::Hellinger, hel / n, None)?,
        itakura_saito: finalize(Measure::ItakuraSaito, is / n, None)?,
        log_spectral: finalize(Measure::LogSpectral, log / n, None)?,
    })
}
