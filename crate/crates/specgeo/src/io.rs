//! Text formats for spectra and factors, CSV emission, and small standalone
//! SVG plots.
//!
//! The PSD format is line-oriented:
//!
//! ```text
//! SPECGEO-PSD v1
//! m=<m> N=<N>
//! <2 m^2 space-separated floats per line, re im pairs, row-major> x N
//! ```
//!
//! Floats are written with Rust's shortest round-trip formatting, so
//! parse(serialize(f)) is bit-exact for finite doubles. Factor files use the
//! same sample layout under a `SPECGEO-FACTOR v1` header, followed by an
//! `omega` line and one row holding the matrix Omega.
//!
//! All writes go through a temp-file-then-rename so readers never observe a
//! partial file.

use num_complex::Complex64;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::factor::SpectralFactor;
use crate::hermitian::{CMat, SpdMatrix};
use crate::psd::{FrequencyGrid, MatrixPsd};

pub const PSD_MAGIC: &str = "SPECGEO-PSD v1";
pub const FACTOR_MAGIC: &str = "SPECGEO-FACTOR v1";

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        source,
    }
}

fn format_err(path: &str, line: usize, message: impl Into<String>) -> Error {
    Error::Format {
        path: path.to_string(),
        line,
        message: message.into(),
    }
}

/// Write via a temporary file in the same directory, then rename.
pub fn write_atomic(path: impl AsRef<Path>, contents: &str) -> Result<()> {
    let path = path.as_ref();
    let tmp = path.with_extension(format!(
        "{}.tmp.{}",
        path.extension().and_then(|e| e.to_str()).unwrap_or(""),
        std::process::id()
    ));
    std::fs::write(&tmp, contents).map_err(|e| io_err(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| io_err(path, e))?;
    Ok(())
}

fn push_matrix_row(out: &mut String, m: &CMat) {
    let dim = m.nrows();
    let mut first = true;
    for i in 0..dim {
        for j in 0..dim {
            let v = m[(i, j)];
            if !first {
                out.push(' ');
            }
            let _ = write!(out, "{} {}", v.re, v.im);
            first = false;
        }
    }
    out.push('\n');
}

fn parse_matrix_row(path: &str, line_no: usize, line: &str, dim: usize) -> Result<CMat> {
    let tokens: Vec<&str> = line.split_whitespace().collect();
    if tokens.len() != 2 * dim * dim {
        return Err(format_err(
            path,
            line_no,
            format!("expected {} floats, found {}", 2 * dim * dim, tokens.len()),
        ));
    }
    let mut m = CMat::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            let base = 2 * (i * dim + j);
            let re: f64 = tokens[base]
                .parse()
                .map_err(|_| format_err(path, line_no, format!("bad float `{}`", tokens[base])))?;
            let im: f64 = tokens[base + 1].parse().map_err(|_| {
                format_err(path, line_no, format!("bad float `{}`", tokens[base + 1]))
            })?;
            m[(i, j)] = Complex64::new(re, im);
        }
    }
    Ok(m)
}

fn parse_header(path: &str, line: &str) -> Result<(usize, usize)> {
    let mut m = None;
    let mut n = None;
    for token in line.split_whitespace() {
        if let Some(v) = token.strip_prefix("m=") {
            m = v.parse::<usize>().ok();
        } else if let Some(v) = token.strip_prefix("N=") {
            n = v.parse::<usize>().ok();
        }
    }
    match (m, n) {
        (Some(m), Some(n)) => Ok((m, n)),
        _ => Err(format_err(path, 2, "expected `m=<m> N=<N>`")),
    }
}

pub fn psd_to_string(f: &MatrixPsd) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{PSD_MAGIC}");
    let _ = writeln!(out, "m={} N={}", f.dim(), f.grid().len());
    for v in f.values() {
        push_matrix_row(&mut out, v.matrix());
    }
    out
}

pub fn psd_from_str(contents: &str, path: &str) -> Result<MatrixPsd> {
    let mut lines = contents.lines();
    let version = lines
        .next()
        .ok_or_else(|| format_err(path, 1, "empty file"))?;
    if version.trim() != PSD_MAGIC {
        return Err(format_err(
            path,
            1,
            format!("unsupported version line `{version}` (expected `{PSD_MAGIC}`)"),
        ));
    }
    let header = lines
        .next()
        .ok_or_else(|| format_err(path, 2, "missing header line"))?;
    let (dim, n) = parse_header(path, header)?;
    let grid = FrequencyGrid::new(n)?;
    let mut samples = Vec::with_capacity(n);
    for k in 0..n {
        let line_no = 3 + k;
        let line = lines
            .next()
            .ok_or_else(|| format_err(path, line_no, "file truncated"))?;
        samples.push(parse_matrix_row(path, line_no, line, dim)?);
    }
    MatrixPsd::try_new(grid, samples, format!("file {path}"))
}

pub fn write_psd(path: impl AsRef<Path>, f: &MatrixPsd) -> Result<()> {
    write_atomic(path, &psd_to_string(f))
}

pub fn read_psd(path: impl AsRef<Path>) -> Result<MatrixPsd> {
    let path = path.as_ref();
    let contents = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    psd_from_str(&contents, &path.display().to_string())
}

pub fn factor_to_string(sf: &SpectralFactor) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{FACTOR_MAGIC}");
    let _ = writeln!(out, "m={} N={}", sf.dim(), sf.grid().len());
    for v in sf.values() {
        push_matrix_row(&mut out, v);
    }
    let _ = writeln!(out, "omega");
    push_matrix_row(&mut out, sf.omega().matrix());
    out
}

pub fn factor_from_str(contents: &str, path: &str) -> Result<SpectralFactor> {
    let mut lines = contents.lines();
    let version = lines
        .next()
        .ok_or_else(|| format_err(path, 1, "empty file"))?;
    if version.trim() != FACTOR_MAGIC {
        return Err(format_err(
            path,
            1,
            format!("unsupported version line `{version}` (expected `{FACTOR_MAGIC}`)"),
        ));
    }
    let header = lines
        .next()
        .ok_or_else(|| format_err(path, 2, "missing header line"))?;
    let (dim, n) = parse_header(path, header)?;
    let grid = FrequencyGrid::new(n)?;
    let mut samples = Vec::with_capacity(n);
    for k in 0..n {
        let line_no = 3 + k;
        let line = lines
            .next()
            .ok_or_else(|| format_err(path, line_no, "file truncated"))?;
        samples.push(parse_matrix_row(path, line_no, line, dim)?);
    }
    let marker_line = 3 + n;
    let marker = lines
        .next()
        .ok_or_else(|| format_err(path, marker_line, "missing omega block"))?;
    if marker.trim() != "omega" {
        return Err(format_err(path, marker_line, "expected `omega`"));
    }
    let omega_line = lines
        .next()
        .ok_or_else(|| format_err(path, marker_line + 1, "missing omega row"))?;
    let omega_raw = parse_matrix_row(path, marker_line + 1, omega_line, dim)?;
    let omega = SpdMatrix::from_matrix(omega_raw)?;
    SpectralFactor::from_samples(grid, samples, omega)
}

pub fn write_factor(path: impl AsRef<Path>, sf: &SpectralFactor) -> Result<()> {
    write_atomic(path, &factor_to_string(sf))
}

pub fn read_factor(path: impl AsRef<Path>) -> Result<SpectralFactor> {
    let path = path.as_ref();
    let contents = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    factor_from_str(&contents, &path.display().to_string())
}

/// Write a CSV file with the given header line and preformatted rows.
pub fn write_csv(
    path: impl AsRef<Path>,
    header: &str,
    rows: impl IntoIterator<Item = String>,
) -> Result<()> {
    let mut out = String::new();
    let _ = writeln!(out, "{header}");
    for row in rows {
        let _ = writeln!(out, "{row}");
    }
    write_atomic(path, &out)
}

/// Minimal static SVG plots; good enough for visual comparison, not a
/// charting library.
pub mod svg {
    use std::fmt::Write as _;

    const WIDTH: f64 = 720.0;
    const HEIGHT: f64 = 420.0;
    const MARGIN: f64 = 56.0;
    const PALETTE: [&str; 6] = [
        "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
    ];

    pub struct LineSeries {
        pub label: String,
        pub points: Vec<(f64, f64)>,
        pub dashed: bool,
    }

    fn finite_bounds<'a>(values: impl Iterator<Item = &'a f64>) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &v in values {
            if v.is_finite() {
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        if !lo.is_finite() || !hi.is_finite() {
            (0.0, 1.0)
        } else if lo == hi {
            (lo - 0.5, hi + 0.5)
        } else {
            (lo, hi)
        }
    }

    pub fn line_plot(title: &str, x_label: &str, y_label: &str, series: &[LineSeries]) -> String {
        let (x_lo, x_hi) =
            finite_bounds(series.iter().flat_map(|s| s.points.iter().map(|(x, _)| x)));
        let (y_lo, y_hi) =
            finite_bounds(series.iter().flat_map(|s| s.points.iter().map(|(_, y)| y)));
        let x_span = x_hi - x_lo;
        let y_span = y_hi - y_lo;
        let to_px = |x: f64, y: f64| {
            (
                MARGIN + (x - x_lo) / x_span * (WIDTH - 2.0 * MARGIN),
                HEIGHT - MARGIN - (y - y_lo) / y_span * (HEIGHT - 2.0 * MARGIN),
            )
        };
        let mut out = String::new();
        let _ = writeln!(
            out,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
        );
        let _ = writeln!(
            out,
            "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>"
        );
        let _ = writeln!(
            out,
            "<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">{}</text>",
            WIDTH / 2.0,
            title
        );
        // Axes box with min/max tick labels.
        let _ = writeln!(
            out,
            "<rect x=\"{MARGIN}\" y=\"{MARGIN}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#444\"/>",
            WIDTH - 2.0 * MARGIN,
            HEIGHT - 2.0 * MARGIN
        );
        for (frac, value) in [(0.0, x_lo), (0.5, 0.5 * (x_lo + x_hi)), (1.0, x_hi)] {
            let x = MARGIN + frac * (WIDTH - 2.0 * MARGIN);
            let _ = writeln!(
                out,
                "<text x=\"{x}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">{value:.3}</text>",
                HEIGHT - MARGIN + 18.0
            );
        }
        for (frac, value) in [(0.0, y_lo), (0.5, 0.5 * (y_lo + y_hi)), (1.0, y_hi)] {
            let y = HEIGHT - MARGIN - frac * (HEIGHT - 2.0 * MARGIN);
            let _ = writeln!(
                out,
                "<text x=\"{}\" y=\"{y}\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">{value:.3}</text>",
                MARGIN - 6.0
            );
        }
        let _ = writeln!(
            out,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">{}</text>",
            WIDTH / 2.0,
            HEIGHT - 12.0,
            x_label
        );
        let _ = writeln!(
            out,
            "<text x=\"16\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 16 {})\">{}</text>",
            HEIGHT / 2.0,
            HEIGHT / 2.0,
            y_label
        );
        for (idx, s) in series.iter().enumerate() {
            let color = PALETTE[idx % PALETTE.len()];
            let mut points = String::new();
            for &(x, y) in &s.points {
                if x.is_finite() && y.is_finite() {
                    let (px, py) = to_px(x, y);
                    let _ = write!(points, "{px:.2},{py:.2} ");
                }
            }
            let dash = if s.dashed {
                " stroke-dasharray=\"6 4\""
            } else {
                ""
            };
            let _ = writeln!(
                out,
                "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"{dash} points=\"{points}\"/>"
            );
            let legend_y = MARGIN + 16.0 * idx as f64 + 4.0;
            let _ = writeln!(
                out,
                "<text x=\"{}\" y=\"{legend_y}\" font-family=\"sans-serif\" font-size=\"11\" fill=\"{color}\">{}</text>",
                WIDTH - MARGIN + 6.0,
                s.label
            );
        }
        out.push_str("</svg>\n");
        out
    }

    pub struct HeatPanel {
        pub title: String,
        /// values[row][col]; rows map to the y axis bottom-up.
        pub values: Vec<Vec<f64>>,
    }

    fn ramp(t: f64) -> (u8, u8, u8) {
        // Compact viridis-like ramp through five control points.
        const STOPS: [(f64, (u8, u8, u8)); 5] = [
            (0.0, (68, 1, 84)),
            (0.25, (59, 82, 139)),
            (0.5, (33, 145, 140)),
            (0.75, (94, 201, 98)),
            (1.0, (253, 231, 37)),
        ];
        let t = t.clamp(0.0, 1.0);
        for w in STOPS.windows(2) {
            let (t0, c0) = w[0];
            let (t1, c1) = w[1];
            if t <= t1 {
                let u = (t - t0) / (t1 - t0);
                let lerp = |a: u8, b: u8| (a as f64 + u * (b as f64 - a as f64)).round() as u8;
                return (lerp(c0.0, c1.0), lerp(c0.1, c1.1), lerp(c0.2, c1.2));
            }
        }
        STOPS[4].1
    }

    /// 2x2 grid of heatmaps sharing a per-panel color scale.
    pub fn heatmap_grid(title: &str, panels: &[HeatPanel; 4]) -> String {
        let cell_w = 320.0;
        let cell_h = 240.0;
        let pad = 48.0;
        let total_w = 2.0 * cell_w + 3.0 * pad;
        let total_h = 2.0 * cell_h + 3.0 * pad + 24.0;
        let mut out = String::new();
        let _ = writeln!(
            out,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{total_w}\" height=\"{total_h}\" viewBox=\"0 0 {total_w} {total_h}\">"
        );
        let _ = writeln!(
            out,
            "<rect width=\"{total_w}\" height=\"{total_h}\" fill=\"white\"/>"
        );
        let _ = writeln!(
            out,
            "<text x=\"{}\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">{}</text>",
            total_w / 2.0,
            title
        );
        for (idx, panel) in panels.iter().enumerate() {
            let gx = pad + (idx % 2) as f64 * (cell_w + pad);
            let gy = 24.0 + pad + (idx / 2) as f64 * (cell_h + pad);
            let rows = panel.values.len();
            let cols = panel.values.first().map_or(0, |r| r.len());
            if rows == 0 || cols == 0 {
                continue;
            }
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for row in &panel.values {
                for &v in row {
                    if v.is_finite() {
                        lo = lo.min(v);
                        hi = hi.max(v);
                    }
                }
            }
            if lo >= hi {
                hi = lo + 1.0;
            }
            let rect_w = cell_w / cols as f64;
            let rect_h = cell_h / rows as f64;
            for (r, row) in panel.values.iter().enumerate() {
                for (c, &v) in row.iter().enumerate() {
                    let t = (v - lo) / (hi - lo);
                    let (red, green, blue) = ramp(t);
                    let x = gx + c as f64 * rect_w;
                    let y = gy + (rows - 1 - r) as f64 * rect_h;
                    let _ = writeln!(
                        out,
                        "<rect x=\"{x:.2}\" y=\"{y:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"rgb({red},{green},{blue})\"/>",
                        rect_w + 0.5,
                        rect_h + 0.5
                    );
                }
            }
            let _ = writeln!(
                out,
                "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">{} [{lo:.2}, {hi:.2}]</text>",
                gx + cell_w / 2.0,
                gy - 8.0,
                panel.title
            );
        }
        out.push_str("</svg>\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples;
    use crate::hermitian::SpdMatrix;

    #[test]
    fn constant_scalar_round_trip() {
        let grid = FrequencyGrid::new(4).unwrap();
        let f = MatrixPsd::constant(
            grid,
            &SpdMatrix::from_real_diagonal(&[1.0]).unwrap(),
            "one",
        );
        let text = psd_to_string(&f);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], PSD_MAGIC);
        assert_eq!(lines[1], "m=1 N=4");
        assert_eq!(lines.len(), 6);
        for line in &lines[2..] {
            assert_eq!(*line, "1 0");
        }
        let back = psd_from_str(&text, "test").unwrap();
        assert_eq!(psd_to_string(&back), text);
    }

    #[test]
    fn matrix_example_round_trip_is_identical_text() {
        let grid = FrequencyGrid::new(64).unwrap();
        let (f0, _) = examples::matrix_pair(grid).unwrap();
        let text = psd_to_string(&f0);
        let back = psd_from_str(&text, "test").unwrap();
        assert_eq!(psd_to_string(&back), text);
    }

    #[test]
    fn truncated_file_reports_line() {
        let grid = FrequencyGrid::new(8).unwrap();
        let f = MatrixPsd::constant(grid, &SpdMatrix::identity(1), "one");
        let text = psd_to_string(&f);
        let truncated: String = text.lines().take(6).collect::<Vec<_>>().join("\n");
        match psd_from_str(&truncated, "trunc") {
            Err(Error::Format { line, .. }) => assert_eq!(line, 7),
            other => panic!("expected format error, got {other:?}"),
        }
    }

    #[test]
    fn version_mismatch_is_rejected() {
        assert!(matches!(
            psd_from_str("SPECGEO-PSD v9\nm=1 N=4\n", "v9"),
            Err(Error::Format { line: 1, .. })
        ));
    }

    #[test]
    fn non_spd_content_is_rejected() {
        let text = "SPECGEO-PSD v1\nm=1 N=4\n1 0\n-1 0\n1 0\n1 0\n";
        assert!(matches!(
            psd_from_str(text, "bad"),
            Err(Error::SampleNotPositiveDefinite { index: 1, .. })
        ));
    }

    #[test]
    fn factor_file_round_trip() {
        let grid = FrequencyGrid::new(64).unwrap();
        let (f, _) = examples::scalar_pair(grid).unwrap();
        let sf = crate::factor::factorize_scalar(&f).unwrap();
        let text = factor_to_string(&sf);
        let back = factor_from_str(&text, "test").unwrap();
        assert_eq!(factor_to_string(&back), text);
        assert!((back.omega().matrix()[(0, 0)].re - sf.omega().matrix()[(0, 0)].re).abs() < 1e-15);
    }

    #[test]
    fn svg_emission_is_wellformed_enough() {
        let series = [svg::LineSeries {
            label: "demo".into(),
            points: (0..32)
                .map(|k| (k as f64, (k as f64 * 0.3).sin()))
                .collect(),
            dashed: false,
        }];
        let text = svg::line_plot("demo", "x", "y", &series);
        assert!(text.starts_with("<svg"));
        assert!(text.contains("polyline"));
        assert!(text.trim_end().ends_with("</svg>"));
    }
}
