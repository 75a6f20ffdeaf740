use std::f64::consts::PI;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "qgraph", version, about = "Scattering, quantum walks and resonances on metric quantum graphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Transmission and reflection at a single wavenumber
    Transmit(TransmitArgs),
    /// |T|² over a uniform kl grid
    Sweep(SweepArgs),
    /// Walk amplitudes c_m and step probabilities P(m)
    Walk(WalkArgs),
    /// Exit probability and conditional hitting time
    Hitting(HittingArgs),
    /// Full-transmission peaks inside suppression bands
    Peaks(PeaksArgs),
    /// Check a graph against the model invariants
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct GraphArgs {
    /// Preset (c3 .. c99), JSON graph-spec file, or composition such as
    /// c3+c4+c3 ('+' canonical glue, '-' unit connecting edge, '*' shared vertex)
    #[arg(long, short = 'g')]
    pub graph: String,

    /// Multiplies every edge length
    #[arg(long, default_value_t = 1.0)]
    pub length_scale: f64,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output file; standard output when omitted
    #[arg(long, short = 'o')]
    pub out: Option<PathBuf>,

    /// Output format; inferred from the --out extension when omitted
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

impl OutputArgs {
    pub fn format(&self, default: Format) -> Format {
        if let Some(f) = self.format {
            return f;
        }
        match self.out.as_ref().and_then(|p| p.extension()).and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => Format::Json,
            Some(e) if e.eq_ignore_ascii_case("csv") => Format::Csv,
            _ => default,
        }
    }
}

#[derive(Debug, Args)]
pub struct TransmitArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[command(flatten)]
    pub output: OutputArgs,

    /// Dimensionless wavenumber k·l
    #[arg(long, allow_negative_numbers = true)]
    pub kl: f64,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[command(flatten)]
    pub output: OutputArgs,

    #[arg(long, default_value_t = 1e-3, allow_negative_numbers = true)]
    pub kl_min: f64,

    #[arg(long, default_value_t = 2.0 * PI - 1e-3, allow_negative_numbers = true)]
    pub kl_max: f64,

    /// Number of grid points, endpoints included
    #[arg(long, conflicts_with = "resolution")]
    pub samples: Option<usize>,

    /// Largest grid spacing (alternative to --samples)
    #[arg(long)]
    pub resolution: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WalkMethod {
    /// Linear recurrence on the rational generating function
    Recurrence,
    /// Direct iteration of the bond map
    Power,
}

#[derive(Debug, Args)]
pub struct WalkArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[command(flatten)]
    pub output: OutputArgs,

    /// Largest step count m
    #[arg(long, default_value_t = 200)]
    pub order: usize,

    #[arg(long, value_enum, default_value_t = WalkMethod::Recurrence)]
    pub method: WalkMethod,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum HittingMethod {
    /// Truncated sums with automatic order selection
    Series,
    /// Periodic trapezoid rule on the unit circle
    Quadrature,
}

#[derive(Debug, Args)]
pub struct HittingArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[command(flatten)]
    pub output: OutputArgs,

    /// Target accuracy of h
    #[arg(long, default_value_t = 1e-8)]
    pub tolerance: f64,

    #[arg(long, value_enum, default_value_t = HittingMethod::Series)]
    pub method: HittingMethod,
}

#[derive(Debug, Args)]
pub struct PeaksArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[command(flatten)]
    pub output: OutputArgs,

    #[arg(long, default_value_t = 5e-3, allow_negative_numbers = true)]
    pub kl_min: f64,

    #[arg(long, default_value_t = 2.0 * PI - 5e-3, allow_negative_numbers = true)]
    pub kl_max: f64,

    /// Sweep grid spacing used to locate candidates
    #[arg(long, default_value_t = 1e-4)]
    pub resolution: f64,

    /// |T|² threshold defining suppression bands
    #[arg(long, default_value_t = 0.01)]
    pub floor: f64,

    /// Smallest refined height reported
    #[arg(long, default_value_t = 0.99)]
    pub min_height: f64,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
}
