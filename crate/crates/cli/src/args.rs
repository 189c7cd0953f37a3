use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Deterministic integer factoring from the command line.
///
/// Integers are read and written as decimal strings. Exit status: 0 ok,
/// 1 the method gave up, 2 bad usage, 3 an output failed re-verification.
#[derive(Debug, Parser)]
#[command(name = "detfactor", version)]
pub struct Cli {
    /// Worker threads for the inner scans (results do not depend on it).
    #[arg(long, global = true, env = "DETFACTOR_PARALLELISM")]
    pub parallelism: Option<usize>,

    /// Write the JSON report here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Factor completely with p-1, p+1 or trial division.
    Factor(FactorArgs),
    /// Build or check a Fellows-Koblitz primality certificate.
    Certify(CertifyArgs),
    /// Factor from n and phi(n).
    PhiFactor(PhiFactorArgs),
    /// Factor from n and phi(n) with the smooth-structure driver.
    GrafPhi(GrafPhiArgs),
    /// Factor from the totient chain n, phi(n), ..., 1.
    PhiChain(OracleArgs),
    /// Equal-order factorization with a phi oracle.
    EqualOrder(OracleArgs),
    /// Time the methods on seeded random odd composites.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Pm1,
    Pp1,
    Trial,
}

#[derive(Debug, Args)]
pub struct FactorArgs {
    #[arg(long)]
    pub n: String,
    #[arg(long, value_enum, default_value = "pm1")]
    pub method: Method,
    /// Smoothness bound B.
    #[arg(long = "B", default_value_t = 1000)]
    pub bound: u64,
    /// Radicands tried by p+1, in order.
    #[arg(long, value_delimiter = ',', default_values_t = [2u64, 3, 5, 7, 11, 13])]
    pub m: Vec<u64>,
    /// Coefficient bound of the p+1 base set.
    #[arg(long = "H")]
    pub h: Option<u64>,
    /// Trial-division pass in front of p+1 (0 disables).
    #[arg(long, default_value_t = 1000)]
    pub pp1_trial_bound: u64,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    /// Prime to certify.
    #[arg(long, required_unless_present = "verify")]
    pub n: Option<String>,
    /// Bound for the trial division of n - 1.
    #[arg(long, default_value_t = 1_000_000)]
    pub trial_bound: u64,
    /// Check a certificate file instead.
    #[arg(long, conflicts_with = "n")]
    pub verify: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Strategy {
    SmallBase,
    Random,
}

#[derive(Debug, Args)]
pub struct PhiFactorArgs {
    #[arg(long)]
    pub n: String,
    #[arg(long)]
    pub phi: String,
    #[arg(long, value_enum, default_value = "small-base")]
    pub strategy: Strategy,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct GrafPhiArgs {
    #[arg(long)]
    pub n: String,
    #[arg(long)]
    pub phi: String,
    #[arg(long, default_value_t = 1)]
    pub k: u32,
    #[arg(long, default_value_t = 2.0)]
    pub u: f64,
    #[arg(long, default_value_t = 0.5)]
    pub delta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub eta: f64,
    /// Skip the trial-division pass below (ln n)^max(exponents).
    #[arg(long)]
    pub no_trial_guard: bool,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long)]
    pub n: String,
    /// A file of "<n> <phi(n)>" lines, or `compute`.
    #[arg(long)]
    pub oracle: String,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Number of inputs per size.
    #[arg(long, default_value_t = 50)]
    pub count: usize,
    /// Decimal digits of the inputs (each size listed separately).
    #[arg(long, value_delimiter = ',', default_values_t = [4u32, 6, 8])]
    pub digits: Vec<u32>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}
