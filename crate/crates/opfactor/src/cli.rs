//! Thin command-line front end.
//!
//! `opfactor check|verify|gen|suite|scale` with the exit-code contract:
//! 0 success (feasible / all checks pass), 1 usage or parse failure,
//! 2 infeasible instance (the certificate is still written, witness
//! embedded), 3 verification or property-suite failure.
//!
//! The default tolerance can be overridden by the `OPFACTOR_TOL` environment
//! variable; an explicit `--tol` flag wins over the environment.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

use crate::certificate::{verify_certificate_file, CertificateFile, Mode};
use crate::douglas::douglas_factor;
use crate::error::{OpfactorError, Result};
use crate::instances::{gen_instance, InstanceKind, InstanceSpec};
use crate::io::{read_matrix_file, write_matrix_file};
use crate::matrix::vec_norm;
use crate::reversed::{check_reversed, construct_y};
use crate::sebestyen::{check_forward, construct_x};
use crate::suite::{property_suite, scaling_report};
use crate::tolerance::Tolerance;

const EXIT_OK: i32 = 0;
const EXIT_USAGE: i32 = 1;
const EXIT_INFEASIBLE: i32 = 2;
const EXIT_VERIFY_FAILED: i32 = 3;

#[derive(Parser)]
#[command(
    name = "opfactor",
    version,
    about = "Operator factorization with verifiable certificates",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide feasibility for a (T, B) pair and write a certificate file.
    Check(CheckArgs),
    /// Independently re-verify a certificate file.
    Verify(VerifyArgs),
    /// Generate a seeded instance and write its matrices.
    Gen(GenArgs),
    /// Run the cross-module property suite.
    Suite(SuiteArgs),
    /// Print the scaling table for the difference-operator family.
    Scale(ScaleArgs),
}

#[derive(Args)]
struct CheckArgs {
    /// Which factorization problem to decide.
    #[arg(long, value_enum)]
    mode: Mode,
    /// Path to the matrix T (.csv or .json).
    #[arg(long, value_name = "FILE")]
    t: PathBuf,
    /// Path to the matrix B (.csv or .json).
    #[arg(long, value_name = "FILE")]
    b: PathBuf,
    /// Scalar tolerance override (wins over OPFACTOR_TOL).
    #[arg(long, value_name = "REAL")]
    tol: Option<f64>,
    /// Where to write the certificate JSON.
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    /// Certificate file produced by `opfactor check`.
    #[arg(value_name = "CERT")]
    cert: PathBuf,
}

#[derive(Args)]
struct GenArgs {
    /// Instance family.
    #[arg(long, value_enum)]
    kind: InstanceKind,
    /// Dimension (matrices are n x n).
    #[arg(long)]
    n: usize,
    /// Seed for the deterministic generator.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Magnitude scale of the generated entries.
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    /// Where to write T.
    #[arg(long, value_name = "FILE")]
    out_t: PathBuf,
    /// Where to write B.
    #[arg(long, value_name = "FILE")]
    out_b: PathBuf,
    /// Where to write the planted factor, for kinds that have one.
    #[arg(long, value_name = "FILE")]
    out_truth: Option<PathBuf>,
}

#[derive(Args)]
struct SuiteArgs {
    /// Seed for the instance streams.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Cases per property (heavier properties run all of them).
    #[arg(long, default_value_t = 100)]
    count: usize,
    /// Scalar tolerance override (wins over OPFACTOR_TOL).
    #[arg(long, value_name = "REAL")]
    tol: Option<f64>,
}

#[derive(Args)]
struct ScaleArgs {
    /// Comma-separated, strictly ascending dimensions.
    #[arg(long, value_name = "N,N,...", value_delimiter = ',', required = true)]
    n_list: Vec<usize>,
    /// Instance family (only difference-operator has the growth contract).
    #[arg(long, value_enum, default_value_t = InstanceKind::DifferenceOperator)]
    kind: InstanceKind,
    /// Scalar tolerance override (wins over OPFACTOR_TOL).
    #[arg(long, value_name = "REAL")]
    tol: Option<f64>,
    /// Write the CSV here instead of stdout.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

/// Entry point used by the binary: parses, dispatches, and maps every
/// outcome onto the exit-code contract.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            EXIT_USAGE
        }
    }
}

fn dispatch(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Check(args) => cmd_check(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Gen(args) => cmd_gen(args),
        Command::Suite(args) => cmd_suite(args),
        Command::Scale(args) => cmd_scale(args),
    }
}

/// `--tol` flag, then `OPFACTOR_TOL`, then the default.
fn resolve_tolerance(flag: Option<f64>) -> Result<Tolerance> {
    if let Some(t) = flag {
        return Tolerance::from_scalar(t);
    }
    match std::env::var("OPFACTOR_TOL") {
        Ok(raw) => {
            let t: f64 = raw
                .trim()
                .parse()
                .map_err(|_| OpfactorError::Parse(format!("OPFACTOR_TOL is not a real number: '{raw}'")))?;
            Tolerance::from_scalar(t)
        }
        Err(_) => Ok(Tolerance::default()),
    }
}

/// Witnesses are directions; stored unit-normalized so the verifier can
/// check them without caring where they came from.
fn unit_witness(w: Vec<Complex64>) -> Vec<Complex64> {
    let norm = vec_norm(&w);
    if norm > 0.0 {
        w.into_iter().map(|z| z / norm).collect()
    } else {
        w
    }
}

fn cmd_check(args: CheckArgs) -> Result<i32> {
    let tol = resolve_tolerance(args.tol)?;
    let t = read_matrix_file(&args.t)?;
    let b = read_matrix_file(&args.b)?;

    let (file, code) = match args.mode {
        Mode::Sebestyen => {
            let fc = check_forward(&t, &b, &tol)?;
            if fc.feasible {
                let cert = construct_x(&t, &b, &tol)?;
                println!("feasible: lambda_min = {}", cert.lambda_min);
                (CertificateFile::from_sebestyen(&t, &b, &tol, &cert), EXIT_OK)
            } else {
                let mut residuals = BTreeMap::new();
                residuals.insert("hermitian_defect".to_string(), fc.hermitian_defect);
                let witness = unit_witness(fc.witness.unwrap_or_default());
                println!("infeasible: no nonnegative factor exists");
                (
                    CertificateFile::infeasible(Mode::Sebestyen, &t, &b, &tol, &witness, residuals),
                    EXIT_INFEASIBLE,
                )
            }
        }
        Mode::Douglas => match douglas_factor(&t, &b, &tol) {
            Ok(cert) => {
                println!("feasible: lambda_min = {}", cert.lambda_min);
                (CertificateFile::from_douglas(&t, &b, &tol, &cert), EXIT_OK)
            }
            Err(OpfactorError::RangeNotIncluded {
                column,
                residual,
                witness,
            }) => {
                let mut residuals = BTreeMap::new();
                residuals.insert("range_residual".to_string(), residual);
                residuals.insert("worst_column".to_string(), column as f64);
                let witness = unit_witness(witness);
                println!("infeasible: ran T is not contained in ran B (worst column {column})");
                (
                    CertificateFile::infeasible(Mode::Douglas, &t, &b, &tol, &witness, residuals),
                    EXIT_INFEASIBLE,
                )
            }
            Err(e) => return Err(e),
        },
        Mode::Reversed => {
            let rc = check_reversed(&t, &b, &tol)?;
            if rc.feasible {
                let cert = construct_y(&t, &b, &tol)?;
                if rc.borderline {
                    eprintln!(
                        "warning: m_max is within the tolerance floor; the verdict is borderline"
                    );
                }
                match cert.m_max {
                    Some(m) => println!("feasible: m_max = {m}"),
                    None => println!("feasible: m unconstrained (B*T vanishes)"),
                }
                (CertificateFile::from_reversed(&t, &b, &tol, &cert), EXIT_OK)
            } else {
                let mut residuals = BTreeMap::new();
                residuals.insert("hermitian_defect".to_string(), rc.hermitian_defect);
                let witness = unit_witness(rc.witness.unwrap_or_default());
                println!("infeasible: no m > 0 admits a nonnegative factor");
                (
                    CertificateFile::infeasible(Mode::Reversed, &t, &b, &tol, &witness, residuals),
                    EXIT_INFEASIBLE,
                )
            }
        }
    };

    file.save(&args.out)?;
    println!("certificate written to {}", args.out.display());
    Ok(code)
}

fn cmd_verify(args: VerifyArgs) -> Result<i32> {
    let file = CertificateFile::load(&args.cert)?;
    let report = verify_certificate_file(&file)?;
    println!("{report}");
    if report.all_passed() {
        Ok(EXIT_OK)
    } else {
        Ok(EXIT_VERIFY_FAILED)
    }
}

fn cmd_gen(args: GenArgs) -> Result<i32> {
    let spec = InstanceSpec::new(args.kind, args.n, args.seed, args.scale)?;
    let inst = gen_instance(&spec)?;
    write_matrix_file(&args.out_t, &inst.t)?;
    write_matrix_file(&args.out_b, &inst.b)?;
    println!(
        "wrote T to {} and B to {}",
        args.out_t.display(),
        args.out_b.display()
    );
    if let Some(path) = args.out_truth {
        match inst.ground_truth {
            Some(g) => {
                write_matrix_file(&path, &g)?;
                println!("wrote planted factor to {}", path.display());
            }
            None => println!("kind '{}' has no planted factor; skipped", args.kind.as_str()),
        }
    }
    Ok(EXIT_OK)
}

fn cmd_suite(args: SuiteArgs) -> Result<i32> {
    if args.count == 0 {
        return Err(OpfactorError::InvalidSpec("count must be at least 1".to_string()));
    }
    let tol = resolve_tolerance(args.tol)?;
    let report = property_suite(args.seed, args.count, &tol);
    println!("{report}");
    if report.all_passed() {
        Ok(EXIT_OK)
    } else {
        Ok(EXIT_VERIFY_FAILED)
    }
}

fn cmd_scale(args: ScaleArgs) -> Result<i32> {
    let tol = resolve_tolerance(args.tol)?;
    let table = scaling_report(&args.n_list, args.kind, &tol)?;
    let csv = table.to_csv();
    match args.out {
        Some(path) => {
            std::fs::write(&path, &csv)?;
            println!("wrote scaling table to {}", path.display());
        }
        None => print!("{csv}"),
    }
    Ok(EXIT_OK)
}
