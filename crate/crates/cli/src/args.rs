use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use e8p_core::painleve::Equation;
use e8p_core::Precision;

#[derive(Debug, Parser)]
#[command(
    name = "e8p",
    version,
    about = "Elliptic Painleve equations with E8 symmetry: lattice checks, maps and orbits"
)]
pub struct Cli {
    /// Seed for every random draw; recorded in all outputs.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Tolerance. Each command has its own default when this is absent.
    #[arg(long, global = true)]
    pub tol: Option<f64>,

    /// Output file (stdout when absent).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Arithmetic: double or extended (double-double).
    #[arg(long, global = true, env = "E8P_PRECISION", default_value = "double")]
    pub precision: Precision,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Lattice,
    Extended,
    Elliptic,
    #[value(name = "appendixB", alias = "appendixb")]
    Landen,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Setting {
    Jacobi,
    Weierstrass,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Function {
    Sn,
    Cn,
    Dn,
    Cd,
    Theta,
    Wp,
    K,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a verification suite; exit 1 if any check fails.
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        /// Random samples (default 20 for extended, 100 for elliptic and appendixB).
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Count E8 lattice vectors of a given squared length.
    Roots {
        #[arg(long)]
        norm: i64,
        /// Also write the vectors in standard coordinates.
        #[arg(long)]
        dump: bool,
    },
    /// Decide whether a word acts on the Picard lattice as a translation.
    Classify {
        /// Tokens s0..s8 and i1..i4, a digit string, or one of rj1, tj1, rj2, tj2.
        #[arg(allow_hyphen_values = true)]
        word: Vec<String>,
    },
    /// Iterate one of the maps and write the orbit.
    Iterate {
        #[arg(value_parser = parse_equation)]
        equation: Equation,
        /// JSON parameter file; random parameters from the seed when absent.
        #[arg(long)]
        params: Option<PathBuf>,
        #[arg(long, default_value_t = 10)]
        steps: usize,
        /// Retry a singular step once after moving x by this amount (changes the orbit).
        #[arg(long)]
        perturb: Option<f64>,
        /// Reduce parameters modulo the periods in the output.
        #[arg(long)]
        canonical: bool,
    },
    /// Compare closed-form steps with the word action, or check the Weierstrass correspondence
    /// along the orbit.
    Compare {
        #[arg(value_parser = parse_equation)]
        equation: Equation,
        #[arg(long)]
        params: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        steps: usize,
        #[arg(long, value_enum, default_value_t = Setting::Jacobi)]
        setting: Setting,
    },
    /// Evaluate an elliptic function at one point.
    Eval {
        #[arg(long = "fn", value_enum, ignore_case = true)]
        function: Function,
        /// Argument as `re,im` or `re`.
        #[arg(long, allow_hyphen_values = true, default_value = "0")]
        u: String,
        /// Modulus as `re,im` or `re`.
        #[arg(long, allow_hyphen_values = true, default_value = "0.5")]
        k: String,
    },
}

fn parse_equation(s: &str) -> Result<Equation, String> {
    s.parse()
}
