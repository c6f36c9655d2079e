use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ndarray::Array1;
use qsde_core::algebra::{build_basis, structure_constants};
use qsde_core::dynamics::mean_trajectory;
use qsde_core::json::{self, BasisDoc, PlantModelDoc, QsdeSystemDoc, ReportDoc};
use qsde_core::realization::{check_realizability, recover_model, synthesize, DEFAULT_TOLERANCE};
use qsde_core::verify::{verify_all, SuiteConfig};
use qsde_core::Error;

/// SU(n) bilinear QSDE synthesis, realizability checks and mean dynamics.
///
/// JSON indices are 1-based. Exit status: 0 success, 1 realizability or
/// verification failure, 2 malformed input or inconsistent dimensions,
/// 3 I/O failure.
#[derive(Debug, Parser)]
#[command(name = "qsde", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write the generator basis and structure constants for SU(n).
    Basis {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Build the QSDE matrices from a plant model.
    Synthesize {
        /// Plant model JSON: {"n", "n_w", "alpha", "Lambda"}.
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Evaluate the realizability conditions of a system (exit 1 if any fails).
    Check {
        #[arg(long)]
        system: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tol: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Recover the Hamiltonian and coupling of a realizable system.
    Recover {
        #[arg(long)]
        system: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tol: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Run the numerical identity suite for SU(n) (exit 1 if any fails).
    Verify {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random instances per identity and field count.
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Field count for the operator and round-trip suites [default: 1, 2 and 3].
        #[arg(long)]
        nw: Option<usize>,
        #[command(flatten)]
        out: Output,
    },
    /// Integrate the mean dynamics and write t, x, y as CSV.
    Simulate {
        #[arg(long)]
        system: PathBuf,
        /// Initial state, comma separated.
        #[arg(
            long,
            value_delimiter = ',',
            allow_hyphen_values = true,
            required = true
        )]
        x0: Vec<f64>,
        /// Final time.
        #[arg(long = "T")]
        t_end: f64,
        /// Step size.
        #[arg(long)]
        dt: f64,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Debug, Args)]
struct Output {
    /// Output file [default: stdout].
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Output {
    fn write(&self, text: &str) -> Result<(), Error> {
        match &self.out {
            Some(path) => fs::write(path, text).map_err(|e| io_error(path, e)),
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout
                    .write_all(text.as_bytes())
                    .and_then(|_| stdout.flush())
                    .map_err(|e| Error::Io(e.to_string()))
            }
        }
    }
}

fn io_error(path: &Path, e: std::io::Error) -> Error {
    Error::Io(format!("{}: {e}", path.display()))
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| io_error(path, e))
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_) => 3,
        Error::NotRealizable { .. }
        | Error::InconsistentRecovery { .. }
        | Error::ImaginaryResidue { .. } => 1,
        _ => 2,
    }
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Basis { n, out } => {
            let basis = build_basis(n)?;
            let sc = structure_constants(&basis)?;
            out.write(&json::to_string(&BasisDoc::new(&basis, &sc)))?;
            Ok(0)
        }
        Command::Synthesize { model, out } => {
            let model = json::parse_model(&read(&model)?)?;
            let sc = structure_constants(&build_basis(model.n())?)?;
            let sys = synthesize(&model, &sc)?;
            out.write(&json::to_string(&QsdeSystemDoc::from(&sys)))?;
            Ok(0)
        }
        Command::Check { system, tol, out } => {
            let sys = json::parse_system(&read(&system)?)?;
            let sc = structure_constants(&build_basis(sys.n)?)?;
            let report = check_realizability(&sys, &sc, tol)?;
            out.write(&json::to_string(&ReportDoc::from(&report)))?;
            if report.pass {
                Ok(0)
            } else {
                let failed: Vec<&str> = report.failed().iter().map(|c| c.label()).collect();
                eprintln!(
                    "not realizable: condition(s) {} exceed tolerance {tol:e}",
                    failed.join(", ")
                );
                Ok(1)
            }
        }
        Command::Recover { system, tol, out } => {
            let sys = json::parse_system(&read(&system)?)?;
            let sc = structure_constants(&build_basis(sys.n)?)?;
            let model = recover_model(&sys, &sc, tol)?;
            out.write(&json::to_string(&PlantModelDoc::from(&model)))?;
            Ok(0)
        }
        Command::Verify {
            n,
            seed,
            trials,
            nw,
            out,
        } => {
            let cfg = SuiteConfig {
                seed,
                trials,
                field_counts: nw.map(|k| vec![k]).unwrap_or_else(|| vec![1, 2, 3]),
                ..SuiteConfig::default()
            };
            let report = verify_all(n, &cfg)?;
            out.write(&json::to_string(&report))?;
            if report.pass {
                Ok(0)
            } else {
                for chk in report.checks.iter().filter(|c| !c.pass) {
                    eprintln!("failed: {} (residual {:e})", chk.identity, chk.max_residual);
                }
                Ok(1)
            }
        }
        Command::Simulate {
            system,
            x0,
            t_end,
            dt,
            out,
        } => {
            let sys = json::parse_system(&read(&system)?)?;
            let traj = mean_trajectory(&sys, Array1::from(x0).view(), t_end, dt)?;
            let mut buf = Vec::new();
            traj.write_csv(&mut buf)?;
            out.write(&String::from_utf8(buf).expect("CSV output is ASCII"))?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
