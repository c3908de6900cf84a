//! Command-line front end for the even-lattice theta-congruence toolkit.
//!
//! Exit codes: 0 = every asserted property holds, 1 = a checked
//! mathematical claim failed (the report carries witnesses), 2 = input or
//! usage error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;

use thetalat_core::catalog::catalog;
use thetalat_core::fixpoint::{fixed_sublattice, splitting_check, validate_automorphism, Automorphism};
use thetalat_core::json::{
    AutomorphismFile, CongruenceReportJson, DecomposeJson, FixedSplitJson, LatticeFile,
    ThetaTableJson, ValidationJson,
};
use thetalat_core::lattice::{decompose, reduce_binary, validate_even_lattice, BinaryForm, Lattice};
use thetalat_core::theta::{
    congruence_check_theta_op, fixed_congruence_check, singularity_check, theta_table,
};

#[derive(Parser)]
#[command(
    name = "thetalat",
    about = "Exact checks for even lattices: fixed sublattices of prime-order automorphisms and Siegel theta-series congruences",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a catalog lattice (and its named automorphisms) as JSON files.
    Catalog {
        /// One of: A1, A2, A6, E8, E8+E8, Leech.
        name: String,
        /// Output directory.
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        /// Write only the automorphism with this name (e.g. `order7`).
        #[arg(long)]
        aut: Option<String>,
    },
    /// Validate a lattice file: symmetric, even diagonal, positive
    /// definite; reports the determinant.
    Validate {
        lattice: PathBuf,
    },
    /// Decompose into indecomposable orthogonal summands.
    Decompose {
        lattice: PathBuf,
    },
    /// Fixed-sublattice report for an automorphism of odd prime order.
    Fixed {
        lattice: PathBuf,
        automorphism: PathBuf,
    },
    /// Theta coefficient table of the given degree and diagonal bound.
    Theta {
        lattice: PathBuf,
        #[command(flatten)]
        range: RangeArgs,
        /// Write the table here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Mod-p congruence checks on theta coefficients.
    Opcheck {
        lattice: PathBuf,
        /// Automorphism file; enables the orbit congruence check and
        /// provides defaults for --prime and --degree.
        #[arg(long)]
        aut: Option<PathBuf>,
        /// Odd prime modulus; defaults to the automorphism order.
        #[arg(long)]
        prime: Option<u64>,
        /// Degree of the forms; defaults to the fixed-space dimension.
        #[arg(long)]
        degree: Option<usize>,
        /// Diagonal bound on the forms.
        #[arg(long, default_value = "2")]
        bound: String,
        /// Check p | A(M, T) instead of p | det(2T) A(M, T).
        #[arg(long)]
        singular: bool,
        /// Allow long-running counts (large rank at degree >= 2).
        #[arg(long)]
        heavy: bool,
    },
}

#[derive(Args)]
struct RangeArgs {
    #[arg(long)]
    degree: usize,
    /// Diagonal bound on the forms (non-negative integer).
    #[arg(long)]
    bound: String,
}

/// Input or usage failure; maps to exit code 2.
struct InputError(String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

fn main() -> ExitCode {
    if let Err(msg) = check_thread_env() {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(InputError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

/// THETA_THREADS caps internal parallelism (0 = auto). The engine is
/// sequential, so any valid cap is honoured; the value is still validated.
fn check_thread_env() -> Result<(), String> {
    match std::env::var("THETA_THREADS") {
        Ok(v) => v
            .parse::<u32>()
            .map(|_| ())
            .map_err(|_| format!("THETA_THREADS must be a non-negative integer, got `{v}`")),
        Err(_) => Ok(()),
    }
}

fn run(cli: Cli) -> Result<ExitCode, InputError> {
    match cli.command {
        Command::Catalog { name, out_dir, aut } => cmd_catalog(&name, &out_dir, aut.as_deref()),
        Command::Validate { lattice } => cmd_validate(&lattice),
        Command::Decompose { lattice } => cmd_decompose(&lattice),
        Command::Fixed {
            lattice,
            automorphism,
        } => cmd_fixed(&lattice, &automorphism),
        Command::Theta {
            lattice,
            range,
            out,
        } => cmd_theta(&lattice, range.degree, &range.bound, out.as_deref()),
        Command::Opcheck {
            lattice,
            aut,
            prime,
            degree,
            bound,
            singular,
            heavy,
        } => cmd_opcheck(
            &lattice,
            aut.as_deref(),
            prime,
            degree,
            &bound,
            singular,
            heavy,
        ),
    }
}

fn read_lattice(path: &Path) -> Result<Lattice, InputError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| InputError(format!("cannot read {}: {e}", path.display())))?;
    let file = LatticeFile::parse(&text)
        .map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    file.to_lattice()
        .map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn read_automorphism(path: &Path, l: &Lattice) -> Result<Automorphism, InputError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| InputError(format!("cannot read {}: {e}", path.display())))?;
    let file = AutomorphismFile::parse(&text)
        .map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    let matrix = file
        .matrix_value()
        .map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    validate_automorphism(l, &matrix, file.order)
        .map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn parse_bound(s: &str) -> Result<BigInt, InputError> {
    let b: BigInt = s
        .parse()
        .map_err(|_| InputError(format!("--bound must be an integer, got `{s}`")))?;
    if b < BigInt::from(0) {
        return Err(InputError("--bound must be non-negative".into()));
    }
    Ok(b)
}

fn cmd_catalog(name: &str, out_dir: &Path, aut: Option<&str>) -> Result<ExitCode, InputError> {
    let entry = catalog(name)?;
    std::fs::create_dir_all(out_dir)
        .map_err(|e| InputError(format!("cannot create {}: {e}", out_dir.display())))?;
    let lattice_path = out_dir.join(format!("{name}.lattice.json"));
    std::fs::write(&lattice_path, LatticeFile::from_lattice(&entry.lattice).to_json())
        .map_err(|e| InputError(e.to_string()))?;
    println!("{}", lattice_path.display());

    let selected: Vec<_> = match aut {
        Some(want) => {
            let found: Vec<_> = entry
                .automorphisms
                .iter()
                .filter(|a| a.name == want)
                .collect();
            if found.is_empty() {
                return Err(InputError(format!(
                    "{name} has no automorphism named `{want}`"
                )));
            }
            found
        }
        None => entry.automorphisms.iter().collect(),
    };
    for a in selected {
        let path = out_dir.join(format!("{name}.{}.json", a.name));
        std::fs::write(&path, AutomorphismFile::new(&a.matrix, a.order).to_json())
            .map_err(|e| InputError(e.to_string()))?;
        println!("{}", path.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_validate(path: &Path) -> Result<ExitCode, InputError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| InputError(format!("cannot read {}: {e}", path.display())))?;
    let file =
        LatticeFile::parse(&text).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    let gram = file
        .gram_matrix()
        .map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    let report = validate_even_lattice(&gram);
    println!(
        "{}",
        serde_json::to_string_pretty(&ValidationJson::from_report(&report)).expect("serializable")
    );
    Ok(if report.is_valid() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_decompose(path: &Path) -> Result<ExitCode, InputError> {
    let l = read_lattice(path)?;
    let parts = decompose(&l)?;
    println!(
        "{}",
        serde_json::to_string_pretty(&DecomposeJson::from_handles(&parts)).expect("serializable")
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_fixed(lattice: &Path, automorphism: &Path) -> Result<ExitCode, InputError> {
    let l = read_lattice(lattice)?;
    let aut = read_automorphism(automorphism, &l)?;
    let report = splitting_check(&l, &aut);
    let m0 = fixed_sublattice(&l, &aut);
    let reduced = if m0.rank() == 2 {
        let form = BinaryForm::from_gram(m0.gram())?;
        Some(reduce_binary(&form)?.0.gram())
    } else {
        None
    };
    let m0_gram = (m0.rank() > 0).then(|| m0.gram().clone());
    let json = FixedSplitJson::from_report(&report, m0_gram.as_ref(), reduced.as_ref());
    println!("{}", serde_json::to_string_pretty(&json).expect("serializable"));
    Ok(if report.all_assertions_hold() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_theta(
    lattice: &Path,
    degree: usize,
    bound: &str,
    out: Option<&Path>,
) -> Result<ExitCode, InputError> {
    if degree == 0 {
        return Err(InputError("--degree must be at least 1".into()));
    }
    let l = read_lattice(lattice)?;
    let bound = parse_bound(bound)?;
    let table = theta_table(&l, degree, &bound)?;
    let text = ThetaTableJson::from_table(&table).to_json();
    match out {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| InputError(e.to_string()))?;
            println!("{}", path.display());
        }
        None => println!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}

#[allow(clippy::too_many_arguments)]
fn cmd_opcheck(
    lattice: &Path,
    aut: Option<&Path>,
    prime: Option<u64>,
    degree: Option<usize>,
    bound: &str,
    singular: bool,
    heavy: bool,
) -> Result<ExitCode, InputError> {
    let l = read_lattice(lattice)?;
    let bound = parse_bound(bound)?;
    let aut = aut.map(|p| read_automorphism(p, &l)).transpose()?;
    let p = match (prime, &aut) {
        (Some(p), _) => p,
        (None, Some(a)) => a.order(),
        (None, None) => {
            return Err(InputError(
                "--prime is required when no automorphism is given".into(),
            ))
        }
    };
    let degree = match (degree, &aut) {
        (Some(n), _) => n,
        (None, Some(a)) => fixed_sublattice(&l, a).rank(),
        (None, None) => {
            return Err(InputError(
                "--degree is required when no automorphism is given".into(),
            ))
        }
    };
    if degree == 0 {
        return Err(InputError(
            "degree 0 (fixed-point-free automorphism); pass --degree explicitly".into(),
        ));
    }
    // Counting tuples of degree >= 2 over a large lattice enumerates very
    // large candidate pools; require an explicit opt-in.
    if degree >= 2 && l.rank() >= 16 && !heavy {
        return Err(InputError(
            "this check counts tuples over a large lattice; pass --heavy to run it".into(),
        ));
    }

    let mut reports = Vec::new();
    if singular {
        reports.push(singularity_check(&l, p, degree, &bound)?);
    } else {
        reports.push(congruence_check_theta_op(&l, p, degree, &bound)?);
    }
    if let Some(a) = &aut {
        reports.push(fixed_congruence_check(&l, a, degree, &bound)?);
    }
    let all_hold = reports.iter().all(|r| r.holds);
    let json: Vec<CongruenceReportJson> =
        reports.iter().map(CongruenceReportJson::from_report).collect();
    println!(
        "{}",
        serde_json::to_string_pretty(&serde_json::json!({ "reports": json }))
            .expect("serializable")
    );
    Ok(if all_hold {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
