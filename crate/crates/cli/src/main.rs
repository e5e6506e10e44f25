//! `spincurve`: generate, decompose, classify and operate on locally convex curves.
//!
//! Exit codes: 0 success, 2 invalid input or violated precondition, 3 numerical
//! failure (including failed checks), 4 file errors.

mod commands;
mod error;
mod file;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{Family, GenArgs, OutKind};
use error::CliError;
use file::CurveFile;

#[derive(Parser)]
#[command(
    name = "spincurve",
    version,
    about = "Locally convex curves on S2 and S3"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a curve from one of the built-in families.
    Gen {
        #[arg(long, value_enum)]
        family: Family,
        /// Arc length of the circle (sigma).
        #[arg(long, default_value_t = std::f64::consts::PI)]
        c: f64,
        /// Number of turns (sigma).
        #[arg(long, default_value_t = 1.0)]
        turns: f64,
        /// Two coefficients with unit sum of squares (xi).
        #[arg(long, value_delimiter = ',', default_value = "0.6,0.8")]
        coeffs: Vec<f64>,
        /// One frequency for a curve on S2, two for S3 (xi).
        #[arg(long, value_delimiter = ',', default_value = "6.283185307179586")]
        freqs: Vec<f64>,
        /// Number of grid intervals.
        #[arg(long, default_value_t = 1024)]
        n: usize,
        /// Store the curvature profile or the points; defaults per family.
        #[arg(long, value_enum)]
        kind: Option<OutKind>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Split a curve on S3 into its left and right curves on S2.
    Decompose {
        input: PathBuf,
        #[arg(long)]
        out_left: PathBuf,
        #[arg(long)]
        out_right: PathBuf,
    },
    /// Rebuild a curve on S3 from a left and a right curve.
    Compose {
        left: PathBuf,
        right: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Bruhat cell of a rotation matrix or a spin element.
    Classify {
        /// Row-major 3x3 or 4x4 matrix.
        #[arg(long, conflicts_with = "spin", required_unless_present = "spin")]
        matrix: Option<PathBuf>,
        /// Unit quaternion (4 numbers) or a left/right pair (8 numbers).
        #[arg(long)]
        spin: Option<PathBuf>,
    },
    /// Run the numerical checks.
    Check {
        /// Checks to run by name or number.
        suites: Vec<String>,
        #[arg(long, conflicts_with = "suites")]
        all: bool,
        #[arg(long, env = "SPINCURVE_SEED", default_value_t = spincurve::verify::DEFAULT_SEED)]
        seed: u64,
    },
    /// Curve surgery.
    #[command(subcommand)]
    Surgery(SurgeryCommand),
    /// Points and profile as CSV.
    PlotData {
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum SurgeryCommand {
    /// Insert loops at t0.
    AddLoop {
        input: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        t0: f64,
        #[arg(long, default_value_t = spincurve::surgery::DEFAULT_EPSILON)]
        epsilon: f64,
        /// Grid intervals of the output; defaults to 4096 or the input's, whichever is larger.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Relax and reflect a curve on S2.
    Rr {
        input: PathBuf,
        #[arg(long)]
        epsilon: f64,
        #[arg(long)]
        delta: f64,
        /// Also classify the final frame of the pair (input, output).
        #[arg(long)]
        hat: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// The sharp operation on a left/right pair.
    Sharp {
        left: PathBuf,
        right: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        t0: f64,
        #[arg(long, default_value_t = spincurve::surgery::DEFAULT_EPSILON)]
        epsilon: f64,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        out_left: PathBuf,
        #[arg(long)]
        out_right: PathBuf,
    },
}

const SURGERY_MIN_N: usize = 4096;

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Gen {
            family,
            c,
            turns,
            coeffs,
            freqs,
            n,
            kind,
            out,
        } => {
            commands::generate(&GenArgs {
                family,
                c,
                turns,
                coeffs,
                freqs,
                n,
                kind,
            })?
            .write(&out)?;
        }
        Command::Decompose {
            input,
            out_left,
            out_right,
        } => {
            let d = commands::decompose(&CurveFile::read(&input)?)?;
            d.left.write(&out_left)?;
            d.right.write(&out_right)?;
            println!("z_l {}", d.z_l);
            println!("z_r {}", d.z_r);
        }
        Command::Compose { left, right, out } => {
            commands::compose(&CurveFile::read(&left)?, &CurveFile::read(&right)?)?.write(&out)?;
        }
        Command::Classify { matrix, spin } => {
            let lines = match (matrix, spin) {
                (Some(m), _) => commands::classify_matrix(&m)?,
                (None, Some(s)) => commands::classify_spin_file(&s)?,
                (None, None) => {
                    return Err(CliError::Precondition("give --matrix or --spin".into()))
                }
            };
            for l in lines {
                println!("{l}");
            }
        }
        Command::Check { suites, all, seed } => {
            let names = if all { Vec::new() } else { suites };
            let reports = commands::check(&names, seed)?;
            for r in &reports {
                println!("{r}");
            }
            let failed = reports.iter().filter(|r| !r.passed).count();
            if failed > 0 {
                return Err(CliError::Numerical(format!(
                    "{failed} of {} checks failed",
                    reports.len()
                )));
            }
        }
        Command::Surgery(SurgeryCommand::AddLoop {
            input,
            t0,
            epsilon,
            n,
            out,
        }) => {
            let f = CurveFile::read(&input)?;
            let n = n.unwrap_or(f.n.max(SURGERY_MIN_N));
            commands::add_loop(&f, t0, epsilon, n)?.write(&out)?;
        }
        Command::Surgery(SurgeryCommand::Rr {
            input,
            epsilon,
            delta,
            hat,
            out,
        }) => {
            let r = commands::relax_reflect(&CurveFile::read(&input)?, epsilon, delta, hat)?;
            r.file.write(&out)?;
            for l in r.hat.unwrap_or_default() {
                println!("{l}");
            }
        }
        Command::Surgery(SurgeryCommand::Sharp {
            left,
            right,
            t0,
            epsilon,
            n,
            out_left,
            out_right,
        }) => {
            let (l, r) = (CurveFile::read(&left)?, CurveFile::read(&right)?);
            let n = n.unwrap_or(l.n.max(SURGERY_MIN_N));
            let s = commands::sharp(&l, &r, t0, epsilon, n)?;
            s.left.write(&out_left)?;
            s.right.write(&out_right)?;
            for line in s.summary {
                println!("{line}");
            }
        }
        Command::PlotData { input, out } => {
            write_text(&out, &commands::plot_data(&CurveFile::read(&input)?)?)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
