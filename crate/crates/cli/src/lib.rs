//! `nilperc` command line: every subcommand reads flags over an optional
//! JSON config, writes one data file named from a hash of the resolved
//! config, and prints a short summary.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

mod commands;
mod config;
mod parse;

pub use config::{config_hash, CliError};

#[derive(Parser, Debug)]
#[command(name = "nilperc", version, about = "Spread-out percolation on nilpotent Cayley graphs")]
struct Cli {
    #[command(flatten)]
    global: config::GlobalFlags,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Ball sizes. CSV columns: n, beta_n
    Ball(BallFlags),
    /// Growth degree and c_S fit. JSON-lines: one fit record
    Growth(GrowthFlags),
    /// Rescaled lattice counts in a region. CSV columns: r, count, ratio
    Haar(HaarFlags),
    /// Anisotropic counts on R^d. CSV columns: r, count, ratio
    LatticeCount(LatticeCountFlags),
    /// Sample percolation configurations. JSON-lines: one record per (model, r, lambda, seed)
    Percolate(PercolateFlags),
    /// Estimate lambda_c by bisection with a majority rule. JSON-lines: one estimate record
    PcScan(PcScanFlags),
    /// Box renormalization. Writes a grid file and a JSON-lines summary
    Renorm(RenormFlags),
    /// Exploration couplings. JSON-lines: one record per exploration step, or dominance rows
    Couple(CoupleFlags),
    /// Acceptance suite. JSON-lines: one record per criterion
    Verify(VerifyFlags),
}

#[derive(Args, Debug, Serialize)]
pub struct BallFlags {
    /// z<d>, heisenberg3 or filiform4
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rmax: Option<usize>,
    /// Output path instead of the hashed name
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct GrowthFlags {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rmax: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct HaarFlags {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
    /// unitcube-graded, halfbox:N, or box:LO,..:HI,.. in exponential coordinates
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub region: Option<String>,
    /// Comma-separated scales
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<Vec<f64>>,
    /// Normalizing constant; ratios are count / (c_S r^d)
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_s: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct LatticeCountFlags {
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<u32>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lo: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hi: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<Vec<f64>>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct PercolateFlags {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
    /// word (lambda / beta(r)) or cc (lambda / (c_S r^d))
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Vec<f64>>,
    /// torus:SIDE, square:SIDE, ball:RADIUS, or box:LO,..:HI,..
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seeds: Option<usize>,
    /// c_S for the cc model; fitted from the ball table when absent
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_s: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct PcScanFlags {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seeds: Option<usize>,
    /// Giant threshold as a fraction of the window
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    /// Bisection tolerance, at least 0.01
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_s: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct RenormFlags {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
    /// Box scale N
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    /// Linear-size threshold as a fraction of the box
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// Side of the Z^2 box lattice
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extent: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_s: Option<f64>,
}

#[derive(Args, Debug, Serialize)]
pub struct CoupleFlags {
    /// explore, dominance or coset
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    /// ladder:LEN, grid-reflection:W,H or grid:W,H (trivial quotient)
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quotient: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<u32>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub root: Option<u32>,
    /// Explorations to run, or seeds for dominance
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runs: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub levels: Option<Vec<usize>>,
    /// Coset mode: group, subgroup generators and representatives as "a,b;c,d"
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h_gens: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reps: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window_radius: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct VerifyFlags {
    /// Reduced sizes for a fast deterministic run; thresholds may not hold
    #[arg(long)]
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub quick: bool,
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub criteria: Option<Vec<u32>>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(argv: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("nilperc: {e}");
            e.code()
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    let file = config::load_file(cli.global.config.as_deref())?;
    let global: config::Global = config::resolve(&file, &cli.global)?;
    if let Some(j) = global.jobs {
        if j == 0 {
            return Err(CliError::Usage("--jobs must be positive".into()));
        }
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(j).build_global();
    }
    match cli.command {
        Command::Ball(f) => commands::ball(&global, config::resolve(&file, &f)?),
        Command::Growth(f) => commands::growth(&global, config::resolve(&file, &f)?),
        Command::Haar(f) => commands::haar(&global, config::resolve(&file, &f)?),
        Command::LatticeCount(f) => commands::lattice_count(&global, config::resolve(&file, &f)?),
        Command::Percolate(f) => commands::percolate(&global, config::resolve(&file, &f)?),
        Command::PcScan(f) => commands::pc_scan(&global, config::resolve(&file, &f)?),
        Command::Renorm(f) => commands::renorm(&global, config::resolve(&file, &f)?),
        Command::Couple(f) => commands::couple(&global, config::resolve(&file, &f)?),
        Command::Verify(f) => commands::verify(&global, config::resolve(&file, &f)?),
    }
}
