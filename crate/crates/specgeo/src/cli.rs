//! Implementations behind the `specgeo` subcommands. The binary is a thin
//! argument-parsing shell over these functions, so every number it prints is
//! exactly a library result.

use num_complex::Complex64;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use crate::divergence::{self, Measure};
use crate::error::{Error, Result};
use crate::examples;
use crate::factor;
use crate::fft::GridFft;
use crate::geometry::{self, GeodesicPath};
use crate::hermitian::{spd_distance, HermitianMatrix, SpdMatrix};
use crate::io::{self, svg};
use crate::psd::{
    ar_coefficient_path, linear_psd_path, polynomial_roots, ComplexPolynomial, FrequencyGrid,
    MatrixPsd, PathOutcome,
};
use crate::random;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The tau values of the bundled scalar example.
pub const EXAMPLE_TAUS: [(f64, &str); 5] = [
    (0.0, "0"),
    (1.0 / 3.0, "1/3"),
    (2.0 / 3.0, "2/3"),
    (1.0, "1"),
    (4.0 / 3.0, "4/3"),
];

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io {
        path: dir.display().to_string(),
        source: e,
    })
}

/// Parse a tau token: plain decimal or a simple fraction `a/b`.
pub fn parse_tau(token: &str) -> Result<f64> {
    let parse = |s: &str| {
        s.trim().parse::<f64>().map_err(|_| Error::Format {
            path: "--tau".into(),
            line: 0,
            message: format!("`{token}` is not a number or fraction"),
        })
    };
    if let Some((num, den)) = token.split_once('/') {
        let d = parse(den)?;
        if d == 0.0 {
            return Err(Error::Format {
                path: "--tau".into(),
                line: 0,
                message: format!("`{token}` divides by zero"),
            });
        }
        Ok(parse(num)? / d)
    } else {
        parse(token)
    }
}

fn tau_file_label(token: &str) -> String {
    token.replace('/', "over").replace(['\\', ':'], "_")
}

// ---------------------------------------------------------------------------
// divergence
// ---------------------------------------------------------------------------

pub struct DivergenceRun {
    pub measure: Measure,
    pub value: f64,
}

pub fn run_divergence(
    measure: Measure,
    f1_path: &Path,
    f2_path: &Path,
    per_frequency: Option<&Path>,
) -> Result<DivergenceRun> {
    if per_frequency.is_some() && measure == Measure::D2 {
        return Err(Error::Format {
            path: "--per-frequency".into(),
            line: 0,
            message: format!("measure `{measure}` has no per-frequency integrand"),
        });
    }
    let f1 = io::read_psd(f1_path)?;
    let f2 = io::read_psd(f2_path)?;
    let result = divergence::evaluate(measure, &f1, &f2)?;
    if let Some(csv_path) = per_frequency {
        let details = result.details.as_ref().ok_or(Error::Format {
            path: "--per-frequency".into(),
            line: 0,
            message: format!("measure `{measure}` has no per-frequency integrand"),
        })?;
        let grid = f1.grid();
        io::write_csv(
            csv_path,
            "theta,integrand",
            details
                .iter()
                .enumerate()
                .map(|(k, v)| format!("{},{}", grid.theta(k), v)),
        )?;
    }
    Ok(DivergenceRun {
        measure,
        value: result.value,
    })
}

// ---------------------------------------------------------------------------
// geodesic
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComparePath {
    Linear,
    Ar,
}

impl ComparePath {
    pub fn parse_list(tokens: &str) -> Result<Vec<ComparePath>> {
        tokens
            .split(',')
            .filter(|t| !t.trim().is_empty())
            .map(|t| match t.trim() {
                "linear" => Ok(ComparePath::Linear),
                "ar" => Ok(ComparePath::Ar),
                other => Err(Error::Format {
                    path: "--compare".into(),
                    line: 0,
                    message: format!("unknown path `{other}` (expected linear, ar)"),
                }),
            })
            .collect()
    }

    pub fn name(&self) -> &'static str {
        match self {
            ComparePath::Linear => "linear",
            ComparePath::Ar => "ar",
        }
    }
}

#[derive(Debug, Clone)]
pub struct AdmissibilityLine {
    pub path: String,
    pub tau_label: String,
    pub admissible: bool,
    pub detail: String,
}

impl AdmissibilityLine {
    fn render(&self) -> String {
        format!(
            "{} tau={}: {} ({})",
            self.path,
            self.tau_label,
            if self.admissible {
                "admissible"
            } else {
                "INADMISSIBLE"
            },
            self.detail
        )
    }
}

pub struct GeodesicRun {
    pub distance: f64,
    pub files: Vec<PathBuf>,
    pub admissibility: Vec<AdmissibilityLine>,
}

/// Monic stable-convention polynomial recovered from a scalar spectrum: the
/// causal expansion of 1/f+ normalized to unit constant term, then
/// conjugate-reversed so the roots sit inside the unit circle for all-pole
/// inputs.
fn recovered_ar_polynomial(f: &MatrixPsd) -> Result<ComplexPolynomial> {
    let sf = factor::factorize_scalar(f)?;
    let n = f.grid().len();
    let fft = GridFft::new(n);
    let inverse: Vec<Complex64> = sf
        .values()
        .iter()
        .enumerate()
        .map(|(k, v)| {
            let x = v[(0, 0)];
            if x.norm() == 0.0 {
                Err(Error::SingularFactorSample { index: k })
            } else {
                Ok(x.inv())
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let coeffs = fft.coeffs_from_samples(&inverse);
    let head = coeffs[0].norm();
    let cap = n / 4;
    let mut degree = 0;
    for (t, c) in coeffs.iter().enumerate().take(cap).skip(1) {
        if c.norm() > 1e-9 * head {
            degree = t;
        }
    }
    let normalized: Vec<Complex64> = coeffs[..=degree].iter().map(|c| c / coeffs[0]).collect();
    let reversed: Vec<Complex64> = normalized.iter().rev().map(|c| c.conj()).collect();
    ComplexPolynomial::new(reversed)
}

fn ar_admissibility(a_tau: &ComplexPolynomial, tau_label: &str) -> Result<AdmissibilityLine> {
    let roots = polynomial_roots(a_tau)?;
    let max_root = roots.iter().map(|r| r.norm()).fold(0.0f64, f64::max);
    Ok(AdmissibilityLine {
        path: "ar".into(),
        tau_label: tau_label.to_string(),
        admissible: max_root < 1.0,
        detail: if max_root < 1.0 {
            format!("max |root| = {max_root:.6}")
        } else {
            format!("max |root| = {max_root:.6} on or outside the unit circle")
        },
    })
}

fn linear_admissibility(
    f0: &MatrixPsd,
    f1: &MatrixPsd,
    tau: f64,
    tau_label: &str,
) -> Result<AdmissibilityLine> {
    match linear_psd_path(f0, f1, tau)? {
        PathOutcome::Admissible(_) => Ok(AdmissibilityLine {
            path: "linear".into(),
            tau_label: tau_label.to_string(),
            admissible: true,
            detail: "positive definite on the whole grid".into(),
        }),
        PathOutcome::Inadmissible(failure) => {
            let first = &failure.points[0];
            Ok(AdmissibilityLine {
                path: "linear".into(),
                tau_label: tau_label.to_string(),
                admissible: false,
                detail: format!(
                    "{} grid points leave the positive cone; first at theta={:.4} (min eigenvalue {:.3e})",
                    failure.points.len(),
                    first.theta,
                    first.min_eigenvalue
                ),
            })
        }
    }
}

pub fn run_geodesic(
    f0_path: &Path,
    f1_path: &Path,
    tau_tokens: &[String],
    out_dir: &Path,
    compare: &[ComparePath],
) -> Result<GeodesicRun> {
    let f0 = io::read_psd(f0_path)?;
    let f1 = io::read_psd(f1_path)?;
    ensure_dir(out_dir)?;
    let path = GeodesicPath::new(&f0, &f1)?;
    let mut files = Vec::new();

    let taus: Vec<(String, f64)> = tau_tokens
        .iter()
        .map(|t| Ok((t.clone(), parse_tau(t)?)))
        .collect::<Result<Vec<_>>>()?;

    for (token, tau) in &taus {
        let f_tau = path.at(*tau)?;
        let file = out_dir.join(format!("geodesic_tau_{}.psd", tau_file_label(token)));
        io::write_psd(&file, &f_tau)?;
        files.push(file);
    }

    let distance = path.distance();
    io::write_atomic(
        out_dir.join("distance.txt"),
        &format!("{distance:.12}\n"),
    )?;

    let mut admissibility = Vec::new();
    if !compare.is_empty() {
        let ar_polys = if compare.contains(&ComparePath::Ar) {
            if f0.dim() != 1 {
                return Err(Error::DimensionMismatch {
                    expected: 1,
                    found: f0.dim(),
                });
            }
            Some((recovered_ar_polynomial(&f0)?, recovered_ar_polynomial(&f1)?))
        } else {
            None
        };
        for (token, tau) in &taus {
            for kind in compare {
                match kind {
                    ComparePath::Linear => {
                        admissibility.push(linear_admissibility(&f0, &f1, *tau, token)?);
                    }
                    ComparePath::Ar => {
                        let (a0, a1) = ar_polys.as_ref().expect("checked above");
                        let a_tau = ar_coefficient_path(a0, a1, *tau)?;
                        admissibility.push(ar_admissibility(&a_tau, token)?);
                    }
                }
            }
        }
        let report: Vec<String> = admissibility.iter().map(|l| l.render()).collect();
        io::write_atomic(
            out_dir.join("admissibility.txt"),
            &format!("{}\n", report.join("\n")),
        )?;
    }

    Ok(GeodesicRun {
        distance,
        files,
        admissibility,
    })
}

// ---------------------------------------------------------------------------
// example
// ---------------------------------------------------------------------------

pub struct ScalarExampleRun {
    pub admissibility: Vec<AdmissibilityLine>,
}

/// The scalar interpolation value for plotting; for non-positive spectra the
/// magnitude of the complex logarithm |log f| = hypot(log|f|, pi) is emitted,
/// mirroring the dashed-curve convention for inadmissible branches.
fn plot_log_value(f: f64) -> f64 {
    if f > 0.0 {
        f.ln()
    } else if f < 0.0 {
        (-f).ln().hypot(PI)
    } else {
        f64::NEG_INFINITY
    }
}

pub fn run_example_scalar(out_dir: &Path, n: usize, emit_svg: bool) -> Result<ScalarExampleRun> {
    ensure_dir(out_dir)?;
    let grid = FrequencyGrid::new(n)?;
    let (a0, a1) = examples::scalar_polynomials();
    let (f0, f1) = examples::scalar_pair(grid)?;
    io::write_psd(out_dir.join("f0.psd"), &f0)?;
    io::write_psd(out_dir.join("f1.psd"), &f1)?;

    let thetas = grid.thetas();
    let mut admissibility = Vec::new();

    // Per-path log-spectrum tables, one column per tau.
    let header = {
        let mut h = String::from("theta");
        for (_, label) in EXAMPLE_TAUS {
            h.push_str(&format!(",tau={label}"));
        }
        h
    };

    let mut ar_columns: Vec<Vec<f64>> = Vec::new();
    let mut linear_columns: Vec<Vec<f64>> = Vec::new();
    let mut geodesic_columns: Vec<Vec<f64>> = Vec::new();
    let geod = GeodesicPath::new(&f0, &f1)?;

    for (tau, label) in EXAMPLE_TAUS {
        let a_tau = ar_coefficient_path(&a0, &a1, tau)?;
        admissibility.push(ar_admissibility(&a_tau, label)?);
        ar_columns.push(
            thetas
                .iter()
                .map(|&t| {
                    let z = Complex64::new(0.0, t).exp();
                    let denom = a_tau.eval(z).norm_sqr();
                    plot_log_value(1.0 / denom.max(1e-300))
                })
                .collect(),
        );

        admissibility.push(linear_admissibility(&f0, &f1, tau, label)?);
        linear_columns.push(
            (0..grid.len())
                .map(|k| {
                    let v = (1.0 - tau) * f0.value(k).matrix()[(0, 0)].re
                        + tau * f1.value(k).matrix()[(0, 0)].re;
                    plot_log_value(v)
                })
                .collect(),
        );

        let f_tau = geod.at(tau)?;
        admissibility.push(AdmissibilityLine {
            path: "geodesic".into(),
            tau_label: label.to_string(),
            admissible: true,
            detail: "positive definite on the whole grid".into(),
        });
        geodesic_columns.push(
            f_tau
                .values()
                .iter()
                .map(|v| v.matrix()[(0, 0)].re.ln())
                .collect(),
        );
    }

    for (name, columns) in [
        ("log_spectrum_ar.csv", &ar_columns),
        ("log_spectrum_linear.csv", &linear_columns),
        ("log_spectrum_geodesic.csv", &geodesic_columns),
    ] {
        io::write_csv(
            out_dir.join(name),
            &header,
            thetas.iter().enumerate().map(|(k, &t)| {
                let mut row = format!("{t}");
                for col in columns {
                    row.push_str(&format!(",{}", col[k]));
                }
                row
            }),
        )?;
    }

    // Root locus of a_tau over [0, 1].
    let locus_steps = 200usize;
    let mut locus_rows = Vec::new();
    for s in 0..=locus_steps {
        let tau = s as f64 / locus_steps as f64;
        let a_tau = ar_coefficient_path(&a0, &a1, tau)?;
        for root in polynomial_roots(&a_tau)? {
            locus_rows.push(format!("{tau},{},{}", root.re, root.im));
        }
    }
    io::write_csv(out_dir.join("root_locus.csv"), "tau,re,im", locus_rows.clone())?;

    let report: Vec<String> = admissibility.iter().map(|l| l.render()).collect();
    io::write_atomic(
        out_dir.join("admissibility.txt"),
        &format!("{}\n", report.join("\n")),
    )?;

    if emit_svg {
        for (name, columns, inadmissible_path) in [
            ("log_spectrum_ar.svg", &ar_columns, "ar"),
            ("log_spectrum_linear.svg", &linear_columns, "linear"),
            ("log_spectrum_geodesic.svg", &geodesic_columns, "geodesic"),
        ] {
            let series: Vec<svg::LineSeries> = EXAMPLE_TAUS
                .iter()
                .zip(columns.iter())
                .map(|((_, label), col)| {
                    let dashed = admissibility.iter().any(|l| {
                        l.path == inadmissible_path && l.tau_label == *label && !l.admissible
                    });
                    svg::LineSeries {
                        label: format!("tau={label}"),
                        points: thetas.iter().copied().zip(col.iter().copied()).collect(),
                        dashed,
                    }
                })
                .collect();
            let title = format!("log spectrum, {} path", inadmissible_path);
            io::write_atomic(
                out_dir.join(name),
                &svg::line_plot(&title, "theta", "log f", &series),
            )?;
        }
        let points: Vec<(f64, f64)> = locus_rows
            .iter()
            .filter_map(|row| {
                let mut it = row.split(',');
                let _tau = it.next()?;
                let re: f64 = it.next()?.parse().ok()?;
                let im: f64 = it.next()?.parse().ok()?;
                Some((re, im))
            })
            .collect();
        let circle: Vec<(f64, f64)> = (0..=128)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / 128.0;
                (t.cos(), t.sin())
            })
            .collect();
        let series = [
            svg::LineSeries {
                label: "unit circle".into(),
                points: circle,
                dashed: true,
            },
            svg::LineSeries {
                label: "root locus".into(),
                points,
                dashed: false,
            },
        ];
        io::write_atomic(
            out_dir.join("root_locus.svg"),
            &svg::line_plot("root locus of a_tau", "re", "im", &series),
        )?;
    }

    Ok(ScalarExampleRun { admissibility })
}

pub fn run_example_matrix(out_dir: &Path, n: usize, emit_svg: bool) -> Result<()> {
    ensure_dir(out_dir)?;
    let grid = FrequencyGrid::new(n)?;
    let (f0, f1) = examples::matrix_pair(grid)?;
    io::write_psd(out_dir.join("f0.psd"), &f0)?;
    io::write_psd(out_dir.join("f1.psd"), &f1)?;

    let path = GeodesicPath::new(&f0, &f1)?;
    let tau_steps = 20usize;
    let mut rows = Vec::new();
    let mut panels: [Vec<Vec<f64>>; 4] = [Vec::new(), Vec::new(), Vec::new(), Vec::new()];
    for s in 0..=tau_steps {
        let tau = s as f64 / tau_steps as f64;
        let f_tau = path.at(tau)?;
        let mut panel_rows: [Vec<f64>; 4] = [Vec::new(), Vec::new(), Vec::new(), Vec::new()];
        for k in 0..grid.len() {
            let theta = grid.theta(k);
            let m = f_tau.value(k).matrix();
            // Subplot convention: (1,1), (1,2), (2,2) log-magnitude, (2,1)
            // the phase of the lower off-diagonal entry.
            let values = [
                ("11", m[(0, 0)].re.ln()),
                ("12", m[(0, 1)].norm().max(1e-300).ln()),
                ("21", m[(1, 0)].arg()),
                ("22", m[(1, 1)].re.ln()),
            ];
            for (idx, (entry, value)) in values.iter().enumerate() {
                rows.push(format!("{tau},{theta},{entry},{value}"));
                panel_rows[idx].push(*value);
            }
        }
        for (idx, row) in panel_rows.into_iter().enumerate() {
            panels[idx].push(row);
        }
    }
    io::write_csv(
        out_dir.join("geodesic_surface.csv"),
        "tau,theta,entry,value",
        rows,
    )?;

    if emit_svg {
        let titles = [
            "log f(1,1)",
            "log |f(1,2)|",
            "arg f(2,1)",
            "log f(2,2)",
        ];
        let heat: Vec<svg::HeatPanel> = panels
            .iter()
            .zip(titles.iter())
            .map(|(values, title)| svg::HeatPanel {
                title: title.to_string(),
                values: values.clone(),
            })
            .collect();
        let heat: [svg::HeatPanel; 4] = heat.try_into().ok().expect("four panels");
        io::write_atomic(
            out_dir.join("geodesic_surface.svg"),
            &svg::heatmap_grid("geodesic between the example spectra", &heat),
        )?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// factorize
// ---------------------------------------------------------------------------

pub struct FactorizeRun {
    pub iterations: usize,
    pub residual: f64,
    pub szego_relative_error: f64,
    pub anticausal_ratio: f64,
}

pub fn run_factorize(f_path: &Path, out_path: &Path) -> Result<FactorizeRun> {
    let f = io::read_psd(f_path)?;
    let (sf, report) = factor::factorize(&f)?;
    if !report.converged {
        return Err(Error::FactorizationDiverged {
            iterations: report.iterations,
            residual: report.residual,
        });
    }
    io::write_factor(out_path, &sf)?;
    let szego = factor::szego_kolmogorov_check(&f, sf.omega())?;
    Ok(FactorizeRun {
        iterations: report.iterations,
        residual: report.residual,
        szego_relative_error: szego,
        anticausal_ratio: sf.anticausal_energy_ratio(),
    })
}

// ---------------------------------------------------------------------------
// selftest
// ---------------------------------------------------------------------------

pub struct SelftestLine {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

pub struct SelftestRun {
    pub lines: Vec<SelftestLine>,
}

impl SelftestRun {
    pub fn all_passed(&self) -> bool {
        self.lines.iter().all(|l| l.passed)
    }
}

pub fn run_selftest(seed: u64, trials: usize) -> Result<SelftestRun> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lines = Vec::new();
    let grid = FrequencyGrid::new(256)?;

    // Triangle inequality of the matrix geodesic distance.
    {
        let mut worst = f64::NEG_INFINITY;
        for _ in 0..trials {
            let a = random::random_spd(3, 1.2, &mut rng);
            let b = random::random_spd(3, 1.2, &mut rng);
            let c = random::random_spd(3, 1.2, &mut rng);
            let violation =
                spd_distance(&a, &c)? - spd_distance(&a, &b)? - spd_distance(&b, &c)?;
            worst = worst.max(violation);
        }
        lines.push(SelftestLine {
            name: "spd triangle inequality",
            passed: worst <= 1e-9,
            detail: format!("worst violation {worst:.3e}"),
        });
    }

    // Exponential metric increase, with equality on commuting pairs.
    {
        let mut worst = f64::NEG_INFINITY;
        let mut worst_eq = 0.0f64;
        for _ in 0..trials {
            let a = random::random_spd(3, 1.2, &mut rng);
            let b = random::random_spd(3, 1.2, &mut rng);
            let logdiff = a.log()?.sub(&b.log()?).frobenius_norm();
            worst = worst.max(logdiff - spd_distance(&a, &b)?);

            let q = random::random_unitary(3, &mut rng);
            let d0 = random::random_spd(3, 1.0, &mut rng).eig()?.eigenvalues;
            let d1 = random::random_spd(3, 1.0, &mut rng).eig()?.eigenvalues;
            let build = |d: &[f64]| {
                let diag = HermitianMatrix::from_real_diagonal(d);
                SpdMatrix::try_new(crate::hermitian::symmetrize(
                    &(&q * diag.matrix() * q.adjoint()),
                )?)
            };
            let m0 = build(&d0)?;
            let m1 = build(&d1)?;
            let gap = (spd_distance(&m0, &m1)?
                - m0.log()?.sub(&m1.log()?).frobenius_norm())
            .abs();
            worst_eq = worst_eq.max(gap);
        }
        lines.push(SelftestLine {
            name: "exponential metric increase",
            passed: worst <= 1e-10 && worst_eq <= 1e-10,
            detail: format!("worst slack {worst:.3e}, commuting gap {worst_eq:.3e}"),
        });
    }

    // Factorization quality on random smooth spectra.
    {
        let per_dim = (trials / 20).max(2);
        let mut worst_residual = 0.0f64;
        let mut worst_anticausal = 0.0f64;
        let mut worst_szego = 0.0f64;
        let mut all_converged = true;
        for m in [1usize, 2, 4] {
            for _ in 0..per_dim {
                let (f, _) = random::random_smooth_psd(m, grid, 0.9, &mut rng)?;
                let (sf, report) = factor::factorize_matrix(&f)?;
                all_converged &= report.converged;
                worst_residual = worst_residual.max(sf.residual(&f)?);
                worst_anticausal = worst_anticausal.max(sf.anticausal_energy_ratio());
                worst_szego = worst_szego.max(factor::szego_kolmogorov_check(&f, sf.omega())?);
            }
        }
        lines.push(SelftestLine {
            name: "spectral factorization",
            passed: all_converged
                && worst_residual <= 1e-8
                && worst_anticausal <= 1e-8
                && worst_szego <= 1e-6,
            detail: format!(
                "residual {worst_residual:.3e}, anticausal {worst_anticausal:.3e}, szego {worst_szego:.3e}"
            ),
        });
    }

    // Divergence axioms for the pointwise family.
    {
        let pairs = (trials / 10).max(3);
        let mut min_value = f64::INFINITY;
        let mut worst_asym = 0.0f64;
        let mut worst_self = 0.0f64;
        for _ in 0..pairs {
            let (f, _) = random::random_smooth_psd(2, grid, 0.85, &mut rng)?;
            let (g, _) = random::random_smooth_psd(2, grid, 0.85, &mut rng)?;
            let fwd = divergence::pointwise_family(&f, &g)?;
            let rev = divergence::pointwise_family(&g, &f)?;
            for (a, b) in [
                (&fwd.d1, &rev.d1),
                (&fwd.frobenius, &rev.frobenius),
                (&fwd.hellinger, &rev.hellinger),
                (&fwd.log_spectral, &rev.log_spectral),
            ] {
                min_value = min_value.min(a.value).min(b.value);
                worst_asym = worst_asym.max((a.value - b.value).abs() / a.value.max(1.0));
            }
            min_value = min_value
                .min(fwd.itakura_saito.value)
                .min(rev.itakura_saito.value);
            let own = divergence::pointwise_family(&f, &f)?;
            for r in [
                &own.d1,
                &own.frobenius,
                &own.hellinger,
                &own.itakura_saito,
                &own.log_spectral,
            ] {
                worst_self = worst_self.max(r.value.abs());
            }
        }
        lines.push(SelftestLine {
            name: "divergence axioms",
            passed: min_value >= -1e-10 && worst_asym <= 1e-9 && worst_self <= 1e-10,
            detail: format!(
                "min value {min_value:.3e}, symmetry gap {worst_asym:.3e}, self-divergence {worst_self:.3e}"
            ),
        });
    }

    // Prediction-degradation divergence basics.
    {
        let pairs = (trials / 25).max(2);
        let mut min_value = f64::INFINITY;
        let mut worst_self = 0.0f64;
        let mut worst_const = 0.0f64;
        for _ in 0..pairs {
            let (f, _) = random::random_smooth_psd(2, grid, 0.85, &mut rng)?;
            let (g, _) = random::random_smooth_psd(2, grid, 0.85, &mut rng)?;
            min_value = min_value.min(divergence::d2(&f, &g)?.value);
            worst_self = worst_self.max(divergence::d2(&f, &f)?.value.abs());
            let m1 = random::random_spd(2, 1.0, &mut rng);
            let m2 = random::random_spd(2, 1.0, &mut rng);
            let c1 = MatrixPsd::constant(grid, &m1, "c1");
            let c2 = MatrixPsd::constant(grid, &m2, "c2");
            worst_const = worst_const.max(divergence::d2(&c1, &c2)?.value.abs());
        }
        lines.push(SelftestLine {
            name: "prediction degradation divergence",
            passed: min_value >= -1e-10 && worst_self <= 1e-10 && worst_const <= 1e-10,
            detail: format!(
                "min {min_value:.3e}, self {worst_self:.3e}, constant pairs {worst_const:.3e}"
            ),
        });
    }

    // Geodesic identities.
    {
        let pairs = (trials / 25).max(2);
        let mut worst_endpoint = 0.0f64;
        let mut worst_prop = 0.0f64;
        let mut worst_dlog = 0.0f64;
        for _ in 0..pairs {
            let (f0, _) = random::random_smooth_psd(2, grid, 0.85, &mut rng)?;
            let (f1, _) = random::random_smooth_psd(2, grid, 0.85, &mut rng)?;
            let path = GeodesicPath::new(&f0, &f1)?;
            worst_endpoint = worst_endpoint
                .max(path.at(0.0)?.max_relative_difference(&f0)?)
                .max(path.at(1.0)?.max_relative_difference(&f1)?);
            let d = path.distance();
            for tau in [0.3, 0.7] {
                let part = geometry::geodesic_distance(&f0, &path.at(tau)?)?;
                worst_prop = worst_prop.max((part - tau * d).abs() / d.max(1e-12));
            }
            let dlog = divergence::d_log_spectral(&f0, &f1)?.value;
            worst_dlog = worst_dlog.max((d * d - dlog).abs() / dlog.max(1.0));
        }
        lines.push(SelftestLine {
            name: "geodesic identities",
            passed: worst_endpoint <= 1e-10 && worst_prop <= 1e-8 && worst_dlog <= 1e-10,
            detail: format!(
                "endpoints {worst_endpoint:.3e}, proportionality {worst_prop:.3e}, distance^2 vs log divergence {worst_dlog:.3e}"
            ),
        });
    }

    // Quadratic expansions.
    {
        let mut all_passed = true;
        for _ in 0..2 {
            let (f, _) = random::random_smooth_psd(2, grid, 0.85, &mut rng)?;
            let delta = random::random_perturbation(&f, 0.5, &mut rng);
            all_passed &= geometry::expansion_check_d1(&f, &delta, &geometry::DEFAULT_EPSILON_LADDER)?
                .passed;
            all_passed &= geometry::expansion_check_d2(&f, &delta, &geometry::DEFAULT_EPSILON_LADDER)?
                .passed;
        }
        lines.push(SelftestLine {
            name: "quadratic expansions",
            passed: all_passed,
            detail: "residual ratios bounded across the epsilon ladder".into(),
        });
    }

    Ok(SelftestRun { lines })
}
