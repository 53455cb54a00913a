//! `willslab`: batch experiments on intrinsic volumes, Hadwiger–Wills
//! sampling and Gaussian fluctuations of `π dist²(X_K, K)`.

mod artifact;
mod commands;
mod input;
mod plot;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use artifact::{CheckFailed, Format};

#[derive(Debug, Parser)]
#[command(name = "willslab", version, about = "Intrinsic volumes, Hadwiger-Wills sampling and CLT experiments")]
struct Cli {
    /// Master seed; every random stream is derived from it.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Root stream index.
    #[arg(long, global = true, default_value_t = 0)]
    stream: u64,
    /// Worker threads (results do not depend on it).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Intrinsic volumes: closed form, Steiner fit or Wills importance sampling.
    Volumes(commands::VolumesArgs),
    /// Draw points or H values.
    Sample(commands::SampleArgs),
    /// Estimate the Stein bound A + B next to the empirical distance.
    Stein(commands::SteinArgs),
    /// Distances to the Gaussian over a dimension grid, with rate fits.
    Clt(commands::CltArgs),
    /// Face-dimension law p(s) and, optionally, its empirical slice estimate.
    SurfaceLaw(commands::SurfaceArgs),
    /// Monte Carlo residual of the Gaussian integration by parts identity.
    IbpCheck(commands::IbpArgs),
    /// Brascamp-Lieb inequality on boxes with the regularized potential.
    BlCheck(commands::BlArgs),
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<CheckFailed>().is_some() {
        return 4;
    }
    match err.downcast_ref::<willslab::Error>() {
        Some(
            willslab::Error::Convergence { .. }
            | willslab::Error::Tuning { .. }
            | willslab::Error::Conditioning { .. }
            | willslab::Error::ProposalQuality { .. },
        ) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let ctx = commands::Context {
        seed: willslab::SeedSpec::new(cli.seed, cli.stream),
        out: cli.out,
        format: cli.format,
    };
    let result = match &cli.command {
        Command::Volumes(a) => commands::volumes(&ctx, a),
        Command::Sample(a) => commands::sample(&ctx, a),
        Command::Stein(a) => commands::stein(&ctx, a),
        Command::Clt(a) => commands::clt(&ctx, a),
        Command::SurfaceLaw(a) => commands::surface_law(&ctx, a),
        Command::IbpCheck(a) => commands::ibp_check(&ctx, a),
        Command::BlCheck(a) => commands::bl_check(&ctx, a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
