//! `releq`: frequency maps, Horn polytopes and balance certificates from the
//! command line.

mod commands;
mod output;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Angular-momentum frequencies of N-body relative equilibria.
///
/// Random hermitian structures are drawn from the Haar measure on SO(2p)
/// pushed to SO(2p)/U(p).
#[derive(Parser, Debug)]
#[command(name = "releq", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classify a configuration as central, balanced or neither.
    Certify(Common),
    /// Frequencies of one hermitian structure.
    Freq(FreqArgs),
    /// Inequalities, vertices and basic set of the frequency polytope.
    Polytope(PolytopeArgs),
    /// Monte-Carlo check that sampled frequencies stay in the polytope.
    Verify(VerifyArgs),
    /// The p = 2 picture: grid of det Sigma, critical points, contours.
    P2(Common),
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Inertia spectrum, e.g. 4,3,2,1 (any order).
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        conflicts_with = "input"
    )]
    sigma: Option<Vec<f64>>,
    /// Configuration file: {"masses": [..], "positions": [[..], ..], "dim": d}.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Tolerance override.
    #[arg(long)]
    tol: Option<f64>,
    /// Directory for report files; the JSON report always goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Formats written to --out.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "json")]
    format: Vec<Format>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Args, Debug)]
struct FreqArgs {
    #[command(flatten)]
    common: Common,
    /// Basic structure of a pairing, e.g. (1,2)(3,4).
    #[arg(long, conflicts_with_all = ["angles", "rho", "perm"])]
    pairing: Option<String>,
    /// Sphere coordinates phi,theta (p = 2 only).
    #[arg(long, value_delimiter = ',', num_args = 1, allow_hyphen_values = true, conflicts_with_all = ["rho", "perm"])]
    angles: Option<Vec<f64>>,
    /// Rotation rho in SO(p), rows separated by ';', e.g. "0,-1;1,0".
    #[arg(long, allow_hyphen_values = true, requires = "perm")]
    rho: Option<String>,
    /// Signed permutation P: signed 1-based column of each row, e.g. 1,3,2,-4.
    #[arg(long, allow_hyphen_values = true)]
    perm: Option<String>,
}

#[derive(Args, Debug)]
struct PolytopeArgs {
    #[command(flatten)]
    common: Common,
    /// Use the basic hull (majorization) instead of the exact inequalities.
    #[arg(long)]
    hull_only: bool,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
    samples: u64,
    /// Compare against the basic hull; required for p > 3.
    #[arg(long)]
    hull_only: bool,
}

/// A negative finding: the command ran but the answer is "no".
const NEGATIVE: u8 = 1;
const USAGE: u8 = 2;
const DOMAIN: u8 = 3;

fn exit_code(err: &anyhow::Error) -> u8 {
    let collision = err.chain().any(|e| {
        matches!(
            e.downcast_ref::<releq::Error>(),
            Some(releq::Error::Collision(..))
        )
    });
    if collision {
        DOMAIN
    } else {
        USAGE
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Certify(c) => commands::certify(&c),
        Command::Freq(a) => commands::freq(&a),
        Command::Polytope(a) => commands::polytope(&a),
        Command::Verify(a) => commands::verify(&a),
        Command::P2(c) => commands::p2(&c),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(NEGATIVE),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
