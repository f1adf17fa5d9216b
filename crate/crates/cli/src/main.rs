//! `nashdual`: sharp constants, infimal convolutions, optimizers and
//! verification batteries from the command line.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "nashdual", version, about = "Numerics for the dual Nash inequality on radial profiles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sharp and sub-optimal constants with discrepancy notes.
    Constants(ConstantsArgs),
    /// Solve the infimal convolution for one profile.
    Infconv(InfconvArgs),
    /// Emit an extremal profile and its metadata.
    Optimizer(OptimizerArgs),
    /// Run the verification battery.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct Output {
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ConstantsArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=10))]
    dim: u32,
    #[arg(long, default_value_t = 0.0)]
    p: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Scheme {
    Uniform,
    Graded,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Variant {
    Printed,
    Rederived,
    Auto,
}

#[derive(Args, Debug)]
struct InfconvArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=10))]
    dim: u32,
    #[arg(long, default_value_t = 0.0)]
    p: f64,
    /// Named profile family.
    #[arg(long, conflicts_with = "csv", required_unless_present = "csv",
          value_parser = ["gaussian", "triangle", "smoothed-indicator", "bump", "optimizer"])]
    family: Option<String>,
    /// Profile table with header `r,value`.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Gaussian width.
    #[arg(long)]
    sigma: Option<f64>,
    /// Ramp width of the smoothed indicator.
    #[arg(long)]
    width: Option<f64>,
    #[arg(long)]
    r_max: Option<f64>,
    /// Grid cells; a CSV input keeps its own nodes unless this is set.
    #[arg(long, env = "NASHDUAL_GRID_CELLS")]
    cells: Option<usize>,
    #[arg(long, value_enum, default_value_t = Scheme::Uniform)]
    scheme: Scheme,
    /// Accept sign-changing profiles (projected solver).
    #[arg(long)]
    allow_signed: bool,
    /// KKT tolerance of the projected solver.
    #[arg(long)]
    tol: Option<f64>,
    /// `json` prints the solution record, `csv` the columns r, g, h, phi.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct OptimizerArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=10))]
    dim: u32,
    #[arg(long, default_value_t = 0.0)]
    p: f64,
    #[arg(long, value_enum, default_value_t = Variant::Auto)]
    variant: Variant,
    #[arg(long, env = "NASHDUAL_GRID_CELLS")]
    cells: Option<usize>,
    /// `csv` prints the profile, `json` the metadata.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// With --out, the other format is written next to it.
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, value_delimiter = ',', default_value = "1,3,4",
          value_parser = clap::value_parser!(u32).range(1..=10))]
    dims: Vec<u32>,
    #[arg(long, default_value_t = 0.0)]
    p: f64,
    #[arg(long, env = "NASHDUAL_GRID_CELLS")]
    cells: Option<usize>,
    #[command(flatten)]
    output: Output,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = match cli.command {
        Command::Constants(a) => commands::constants(a),
        Command::Infconv(a) => commands::infconv(a),
        Command::Optimizer(a) => commands::optimizer(a),
        Command::Verify(a) => commands::verify(a),
    };
    match run {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
