//! `specgeo`: divergences, geodesics, and spectral factorization for
//! matrix-valued power spectral densities.
//!
//! Exit codes: 0 on success, 2 on input/validation errors, 3 on numerical
//! failures (non-convergent factorizations, broken internal cross-checks).

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

use specgeo::cli::{self, ComparePath};
use specgeo::divergence::Measure;
use specgeo::error::Error;

#[derive(Parser)]
#[command(name = "specgeo", version, about = "Geometry of matrix power spectral densities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum MeasureArg {
    D1,
    D2,
    Fro,
    Hellinger,
    Is,
    Log,
}

impl From<MeasureArg> for Measure {
    fn from(m: MeasureArg) -> Measure {
        match m {
            MeasureArg::D1 => Measure::D1,
            MeasureArg::D2 => Measure::D2,
            MeasureArg::Fro => Measure::Frobenius,
            MeasureArg::Hellinger => Measure::Hellinger,
            MeasureArg::Is => Measure::ItakuraSaito,
            MeasureArg::Log => Measure::LogSpectral,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Divergence between two spectra.
    Divergence(DivergenceArgs),
    /// Geodesic interpolation between two spectra.
    Geodesic(GeodesicArgs),
    /// Emit the bundled example data sets.
    Example(ExampleArgs),
    /// Canonical left spectral factorization.
    Factorize(FactorizeArgs),
    /// Randomized self-checks of the numerical core.
    Selftest(SelftestArgs),
}

#[derive(Args)]
struct DivergenceArgs {
    /// Divergence measure.
    #[arg(long, value_enum)]
    measure: MeasureArg,
    /// First spectrum file.
    #[arg(long)]
    f1: PathBuf,
    /// Second spectrum file.
    #[arg(long)]
    f2: PathBuf,
    /// Write the per-frequency integrand to this CSV file.
    #[arg(long, value_name = "CSV")]
    per_frequency: Option<PathBuf>,
}

#[derive(Args)]
struct GeodesicArgs {
    /// Start spectrum file.
    #[arg(long)]
    f0: PathBuf,
    /// End spectrum file.
    #[arg(long)]
    f1: PathBuf,
    /// Comma-separated interpolation parameters (decimals or fractions like 4/3).
    #[arg(long, value_delimiter = ',')]
    tau: Vec<String>,
    /// Output directory.
    #[arg(long)]
    out_dir: PathBuf,
    /// Also report admissibility of alternative paths: linear, ar.
    #[arg(long)]
    compare: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExampleKind {
    Scalar,
    Matrix,
}

#[derive(Args)]
struct ExampleArgs {
    /// Which example to emit.
    #[arg(value_enum)]
    kind: ExampleKind,
    /// Output directory.
    #[arg(long)]
    out_dir: PathBuf,
    /// Grid size (power of two).
    #[arg(long, default_value_t = 512)]
    n: usize,
    /// Also render SVG plots.
    #[arg(long)]
    svg: bool,
}

#[derive(Args)]
struct FactorizeArgs {
    /// Spectrum file to factorize.
    #[arg(long)]
    f: PathBuf,
    /// Output factor file.
    #[arg(long)]
    out: PathBuf,
    /// Print iterations, residual, and the Szego-Kolmogorov check.
    #[arg(long)]
    report: bool,
}

#[derive(Args)]
struct SelftestArgs {
    /// RNG seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Trial count scale.
    #[arg(long, default_value_t = 100)]
    trials: usize,
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Divergence(args) => {
            let run = cli::run_divergence(
                args.measure.into(),
                &args.f1,
                &args.f2,
                args.per_frequency.as_deref(),
            )?;
            println!("{:.12}", run.value);
            Ok(())
        }
        Command::Geodesic(args) => {
            let compare = match &args.compare {
                Some(list) => ComparePath::parse_list(list)?,
                None => Vec::new(),
            };
            let run = cli::run_geodesic(&args.f0, &args.f1, &args.tau, &args.out_dir, &compare)?;
            println!("distance {:.12}", run.distance);
            for file in &run.files {
                println!("wrote {}", file.display());
            }
            for line in &run.admissibility {
                println!(
                    "{} tau={}: {}",
                    line.path,
                    line.tau_label,
                    if line.admissible { "admissible" } else { "INADMISSIBLE" }
                );
            }
            Ok(())
        }
        Command::Example(args) => {
            match args.kind {
                ExampleKind::Scalar => {
                    let run = cli::run_example_scalar(&args.out_dir, args.n, args.svg)?;
                    for line in &run.admissibility {
                        if !line.admissible {
                            println!(
                                "{} tau={}: INADMISSIBLE ({})",
                                line.path, line.tau_label, line.detail
                            );
                        }
                    }
                }
                ExampleKind::Matrix => cli::run_example_matrix(&args.out_dir, args.n, args.svg)?,
            }
            println!("wrote example data to {}", args.out_dir.display());
            Ok(())
        }
        Command::Factorize(args) => {
            let run = cli::run_factorize(&args.f, &args.out)?;
            if args.report {
                println!("iterations {}", run.iterations);
                println!("residual {:.6e}", run.residual);
                println!("anticausal_ratio {:.6e}", run.anticausal_ratio);
                println!("szego_relative_error {:.6e}", run.szego_relative_error);
            }
            Ok(())
        }
        Command::Selftest(args) => {
            let run = cli::run_selftest(args.seed, args.trials)?;
            for line in &run.lines {
                println!(
                    "selftest {}: {} ({})",
                    line.name,
                    if line.passed { "ok" } else { "FAILED" },
                    line.detail
                );
            }
            if run.all_passed() {
                Ok(())
            } else {
                Err(Error::SelftestFailed {
                    failures: run.lines.iter().filter(|l| !l.passed).count(),
                })
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_input_error() {
                ExitCode::from(2)
            } else {
                ExitCode::from(3)
            }
        }
    }
}
