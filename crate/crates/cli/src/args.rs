use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use squeeze_core::SqueezerKind;

#[derive(Debug, Parser)]
#[command(name = "squeeze", version, about = "Spin-squeezed electron interferometry: sweeps, Monte Carlo and design numbers")]
pub struct Cli {
    /// key=value file whose entries act as defaults for the subcommand flags
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Metrics over a list or log range of squeezing strengths
    #[command(args_override_self = true)]
    SweepChi(SweepArgs),
    /// Metrics over electron numbers at fixed strengths
    #[command(args_override_self = true)]
    SweepN(SweepNArgs),
    /// Strength minimizing the Wineland phase uncertainty, per N
    #[command(args_override_self = true)]
    OptimalChi(OptimalArgs),
    /// Spin Wigner function of the squeezed state on a (theta, phi) grid
    #[command(args_override_self = true)]
    Wigner(WignerArgs),
    /// Shot-by-shot simulation of the interferometer
    #[command(args_override_self = true)]
    Montecarlo(MonteCarloArgs),
    /// Hardware and beam calculators
    #[command(args_override_self = true)]
    Design(DesignArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    None,
    Interaction,
    Measurement,
}

impl From<Kind> for SqueezerKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::None => SqueezerKind::None,
            Kind::Interaction => SqueezerKind::Interaction,
            Kind::Measurement => SqueezerKind::Measurement,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Flags shared by every data-producing subcommand.
#[derive(Debug, Args)]
pub struct Common {
    /// Output file; stdout when absent
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,

    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,

    /// Worker threads, 0 = one per core
    #[arg(long, env = "SQUEEZE_WORKERS", default_value_t = 0)]
    pub workers: usize,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum, default_value = "interaction")]
    pub kind: Kind,

    /// Comma-separated electron numbers
    #[arg(long, default_value = "20,200,2000")]
    pub n: String,

    /// Comma-separated strengths; overrides --chi-range
    #[arg(long)]
    pub chi: Option<String>,

    /// Log-spaced strengths as lo:hi:count
    #[arg(long, default_value = "1e-3:1:61")]
    pub chi_range: String,

    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct SweepNArgs {
    #[arg(long, value_enum, default_value = "interaction")]
    pub kind: Kind,

    /// Comma-separated electron numbers
    #[arg(long, default_value = "10,20,50,100,200,500,1000,2000")]
    pub n: String,

    /// Comma-separated strengths, one series each
    #[arg(long, default_value = "0.268,0.065,0.015")]
    pub chi: String,

    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct OptimalArgs {
    #[arg(long, value_enum, default_value = "interaction")]
    pub kind: Kind,

    /// Comma-separated electron numbers
    #[arg(long, default_value = "10,20,40,100,200,500,1000,2000")]
    pub n: String,

    /// Search interval lo:hi; the kind's default when absent
    #[arg(long)]
    pub bracket: Option<String>,

    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct WignerArgs {
    #[arg(long, value_enum, default_value = "interaction")]
    pub kind: Kind,

    #[arg(long, default_value_t = 20)]
    pub n: usize,

    /// Comma-separated strengths, one field each
    #[arg(long, default_value = "0,0.1,0.26")]
    pub chi: String,

    /// Measurement outcome used for the measurement kind
    #[arg(long, default_value_t = 7.0, allow_negative_numbers = true)]
    pub h: f64,

    /// Apply the interferometer alignment rotation before evaluating
    #[arg(long)]
    pub align: bool,

    #[arg(long, default_value_t = 91)]
    pub n_theta: usize,

    #[arg(long, default_value_t = 180)]
    pub n_phi: usize,

    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct MonteCarloArgs {
    #[arg(long, value_enum, default_value = "none")]
    pub kind: Kind,

    #[arg(long, default_value_t = 20)]
    pub n: usize,

    #[arg(long, default_value_t = 0.0)]
    pub chi: f64,

    /// True sample phase in radians
    #[arg(long, default_value_t = 0.01, allow_negative_numbers = true)]
    pub phi: f64,

    #[arg(long, default_value_t = 100_000)]
    pub shots: u64,

    #[arg(long, default_value_t = 1)]
    pub seed: u64,

    /// Skip the alignment rotation after the squeezer
    #[arg(long)]
    pub no_align: bool,

    /// Also write every shot as CSV to this file
    #[arg(long, value_name = "PATH")]
    pub shots_out: Option<PathBuf>,

    /// Summary file; stdout when absent
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,

    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,

    /// Worker threads, 0 = one per core
    #[arg(long, env = "SQUEEZE_WORKERS", default_value_t = 0)]
    pub workers: usize,
}

#[derive(Debug, Args)]
pub struct DesignArgs {
    /// Electron kinetic energy
    #[arg(long, default_value_t = 100.0)]
    pub energy_kev: f64,

    /// Channel separation over radius for the cylindrical interaction strength
    #[arg(long)]
    pub d_over_r: Option<f64>,

    /// Channel length; with --separation-m and --radius-m gives the capacitance route
    #[arg(long)]
    pub length_m: Option<f64>,

    #[arg(long)]
    pub separation_m: Option<f64>,

    #[arg(long)]
    pub radius_m: Option<f64>,

    /// Beam current, for the mean electron spacing
    #[arg(long)]
    pub current_na: Option<f64>,

    /// Electron pair separation; with --path-m gives the Coulomb phase
    #[arg(long)]
    pub pair_separation_m: Option<f64>,

    #[arg(long, default_value_t = 1.0)]
    pub path_m: f64,

    /// Dose in electrons per square angstrom
    #[arg(long)]
    pub dose: Option<f64>,

    #[arg(long)]
    pub pixel_angstrom: Option<f64>,

    /// Sample thickness; with --mfp-nm gives the inelastic loss share
    #[arg(long)]
    pub thickness_nm: Option<f64>,

    #[arg(long)]
    pub mfp_nm: Option<f64>,

    /// Output file; stdout when absent
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}
