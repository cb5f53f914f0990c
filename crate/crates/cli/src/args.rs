use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use tapmeans_core::analysis::Modulus;
use tapmeans_core::LpExponent;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Run every operator identity suite.
    /// CSV columns: suite, passed, worst, tolerance, detail.
    Verify,
    /// Approximation-rate sweep over rho = 1 - 2^-j (direct and inverse checks).
    /// CSV columns: j, rho, error, fitted, residual.
    Rates,
    /// K-functional with the two-sided realization estimate over delta = 2^-j.
    /// CSV columns: j, rho, lower, kfun, upper.
    Kfun,
    /// Block multiplier norms for d = 1, 2, 3 at matched nu_max.
    /// CSV columns: multiplier, d, p, nu_max, lower, upper, exact.
    Multnorm,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Taylor-Abel-Poisson means on the torus: identity checks, rate sweeps,
/// K-functionals and multiplier norms.
///
/// Exit status: 0 when every check passes, 1 when a check fails, 2 on an
/// invalid configuration.
#[derive(Debug, Parser)]
#[command(name = "tapmeans", version, about, long_about)]
pub struct Args {
    #[arg(long, value_enum)]
    pub cmd: Command,

    /// Dimension of the torus.
    #[arg(long, default_value_t = 2)]
    pub d: usize,

    /// Coordinate degree: coefficients live on |k_j| <= K.
    #[arg(long = "K", default_value_t = 16)]
    pub k: usize,

    /// Order of the Taylor-Abel-Poisson mean.
    #[arg(long, default_value_t = 2)]
    pub r: usize,

    /// Order of the radial derivative in the K-functional.
    #[arg(long, default_value_t = 1)]
    pub n: usize,

    /// Norm exponent: 1, 2 or inf (other values >= 1 give one-sided estimates).
    #[arg(long, default_value = "2")]
    pub p: LpExponent,

    /// Exponent of the majorant omega(t) = t^alpha.
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,

    /// Majorant for the ZBS check: "power:a", "power-log:a,b" or
    /// "custom:t:w,t:w,...". Defaults to power:<alpha>.
    #[arg(long)]
    pub modulus: Option<Modulus>,

    /// rho used by `multnorm`.
    #[arg(long, default_value_t = 0.5)]
    pub rho: f64,

    #[arg(long, default_value_t = 42)]
    pub seed: u64,

    /// First sweep exponent: rho = 1 - 2^-j0.
    #[arg(long, default_value_t = 2)]
    pub j0: u32,

    /// Last sweep exponent.
    #[arg(long, default_value_t = 12)]
    pub j1: u32,

    /// Grid points per axis are oversample * (2K + 1) for p != 2 norms.
    #[arg(long, default_value_t = 4)]
    pub oversample: usize,

    /// Read the function from a JSON file instead of generating one
    /// (`rates` and `kfun`).
    #[arg(long)]
    pub input: Option<PathBuf>,

    /// Output file; stdout when omitted. With CSV output the JSON summary is
    /// written next to it with a `.summary.json` suffix.
    #[arg(long)]
    pub out: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Perturb one lambda coefficient by 1e-6 so that `verify` must fail.
    #[arg(long)]
    pub self_test_fault: bool,
}
