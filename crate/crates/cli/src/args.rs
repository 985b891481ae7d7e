use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser, Serialize)]
#[command(
    name = "torusgaps",
    version,
    about = "Pair correlation experiments on flat torus spectra"
)]
pub struct Cli {
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true)]
    pub workers: Option<usize>,

    /// Directory for cached spectra. Falls back to $TORUSGAPS_CACHE; no
    /// caching when neither is set.
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,

    /// CSV report path. The manifest is written next to it with a `.json`
    /// extension.
    #[arg(long, short, global = true, default_value = "report.csv")]
    pub out: PathBuf,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Enumerate the normalized spectrum up to N.
    Spectrum(SpectrumArgs),
    /// Pair statistic P(alpha, N, [0, delta]) against the Poisson value.
    Pairs(PairsArgs),
    /// Smoothed statistic G(M, T) against its main term.
    Smoothed(SmoothedArgs),
    /// Exact integer counts.
    #[command(subcommand)]
    Diophantine(DiophantineCommand),
    /// Dirichlet polynomial experiments.
    #[command(subcommand)]
    Dirichlet(DirichletCommand),
    /// Deviation experiment over forms sampled from the moduli measure.
    Ensemble(EnsembleArgs),
    /// Run the exact identity suites.
    Selftest(SelftestArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassArg {
    Generic,
    Rectangular,
}

#[derive(Debug, Args, Serialize)]
pub struct FormArgs {
    /// Coefficients `a1,a2,a3`, or `a1,a3` for a rectangular form.
    #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
    pub alpha: Vec<f64>,
    /// Symmetry class; inferred from the number of coefficients when absent.
    #[arg(long, value_enum)]
    pub class: Option<ClassArg>,
}

#[derive(Debug, Args, Serialize)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub form: FormArgs,
    #[arg(long)]
    pub n: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct PairsArgs {
    #[command(flatten)]
    pub form: FormArgs,
    #[arg(long)]
    pub n: f64,
    #[arg(long)]
    pub delta: f64,
    /// Relative tolerance for the pass flag.
    #[arg(long, default_value_t = 0.25)]
    pub tolerance: f64,
    /// Admissible range is `N^(-1+eta) <= delta <= 1`.
    #[arg(long, default_value_t = 0.1)]
    pub eta: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct SmoothedArgs {
    /// Single form; otherwise forms are sampled with --box/--samples/--seed.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub alpha: Option<Vec<f64>>,
    /// Generic sampling box `a1lo,a1hi,a2lo,a2hi,a3lo,a3hi`.
    #[arg(long = "box", value_delimiter = ',')]
    pub sample_box: Option<Vec<f64>>,
    #[arg(long, default_value_t = 5)]
    pub samples: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub m: f64,
    #[arg(long)]
    pub t: f64,
    /// Window parameter of V and W.
    #[arg(long, default_value_t = 0.05)]
    pub window_delta: f64,
    #[arg(long, default_value_t = 0.25)]
    pub tolerance: f64,
    /// Admissible range is `M^eta <= T <= M^(2-eta)`.
    #[arg(long, default_value_t = 0.1)]
    pub eta: f64,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiophantineCommand {
    /// Count t-quadruples for `alpha m^2 + n^2` and compare with spectral pairs.
    Tquad(TquadArgs),
    /// Exhaustive 8-tuple count by stratum.
    Count8(Count8Args),
    /// Integers up to D free of window primes against D * P_N.
    Rough(RoughArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct TquadArgs {
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    pub n: f64,
    #[arg(long)]
    pub delta: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct Count8Args {
    #[arg(long)]
    pub m: u64,
    #[arg(long)]
    pub t: f64,
    /// Lower end of the band `D <= |det| <= 2D`.
    #[arg(long)]
    pub d: u64,
    /// Slack factor is `M^eps_exponent`.
    #[arg(long, default_value_t = 0.05)]
    pub eps_exponent: f64,
    /// Boxes for a1..a4 as `lo:hi,lo:hi,lo:hi,lo:hi`; default `1:M` each.
    #[arg(long)]
    pub a: Option<String>,
    /// Boxes for b1..b4, same syntax.
    #[arg(long)]
    pub b: Option<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct RoughArgs {
    #[arg(long)]
    pub d: u64,
    /// `log N`, so that N itself need not be representable.
    #[arg(long, default_value_t = 16.0)]
    pub log_n: f64,
    #[arg(long, default_value_t = 0.25)]
    pub rho: f64,
    /// Pass when `|count - D P_N| <= tolerance * D`.
    #[arg(long, default_value_t = 0.05)]
    pub tolerance: f64,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DirichletCommand {
    /// |G(y)| on (lo, hi] against its integral approximation over a grid of y.
    Sweep(SweepArgs),
    /// Mean value inequality on random +-1 coefficients.
    MeanValue(MeanValueArgs),
    /// Reconstruction residual of the sieve decomposition.
    Ramare(RamareArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct SweepArgs {
    #[arg(long)]
    pub lo: f64,
    #[arg(long)]
    pub hi: f64,
    #[arg(long, default_value_t = -10.0, allow_negative_numbers = true)]
    pub y_min: f64,
    #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
    pub y_max: f64,
    #[arg(long, default_value_t = 101)]
    pub steps: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct MeanValueArgs {
    #[arg(long)]
    pub x: usize,
    #[arg(long)]
    pub t: f64,
    #[arg(long, default_value_t = 1)]
    pub trials: usize,
    #[arg(long)]
    pub seed: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct RamareArgs {
    #[arg(long)]
    pub d: f64,
    /// Frequencies to test.
    #[arg(long, value_delimiter = ',', default_value = "0", allow_negative_numbers = true)]
    pub y: Vec<f64>,
    #[arg(long, default_value_t = 0.1)]
    pub delta_prime: f64,
    #[arg(long, default_value_t = 0.1)]
    pub kappa: f64,
    #[arg(long, default_value_t = 16.0)]
    pub log_n: f64,
    #[arg(long, default_value_t = 0.25)]
    pub rho: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct EnsembleArgs {
    #[arg(long, value_enum)]
    pub class: ClassArg,
    /// `a1lo,a1hi,a3lo,a3hi` (rectangular) or `a1lo,a1hi,a2lo,a2hi,a3lo,a3hi`.
    #[arg(long = "box", value_delimiter = ',', required = true)]
    pub sample_box: Vec<f64>,
    #[arg(long)]
    pub samples: usize,
    #[arg(long)]
    pub n: f64,
    #[arg(long)]
    pub delta: f64,
    /// Relative deviation counted as a failure.
    #[arg(long, default_value_t = 0.25)]
    pub dev: f64,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.1)]
    pub eta: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct SelftestArgs {
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Random trials per suite.
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
}
