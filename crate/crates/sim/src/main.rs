use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::Parser;

use ssm_sim::{default_document, parse_config, run_sweep_with_threads, write_outputs};

/// Secure spatial-modulation receive-beamforming sweep.
#[derive(Debug, Parser)]
#[command(name = "simulate", version)]
struct Args {
    /// Configuration document (`key = value` lines).
    #[arg(long, required_unless_present = "print_defaults")]
    config: Option<PathBuf>,

    /// Output directory; overrides `output_dir` from the config.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Worker threads; defaults to one per core.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    threads: Option<u32>,

    /// Print a complete default configuration and exit.
    #[arg(long)]
    print_defaults: bool,
}

fn run(args: Args) -> anyhow::Result<()> {
    if args.print_defaults {
        print!("{}", default_document());
        return Ok(());
    }
    let path = args.config.expect("clap enforces --config");
    let text = std::fs::read_to_string(&path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    let (cfg, mut spec) = parse_config(&text).with_context(|| format!("in {}", path.display()))?;
    if let Some(out) = args.out {
        spec.output_dir = out;
    }
    log::info!(
        "{} realizations x {} SNR x {} P_M x {} methods",
        spec.n_channel_realizations,
        spec.snr_grid_db.len(),
        spec.p_m_list.len(),
        spec.methods.len()
    );
    let outcome = run_sweep_with_threads(&cfg, &spec, args.threads.map(|t| t as usize))?;
    let written = write_outputs(&spec.output_dir, &cfg, &spec, &outcome.records)?;
    println!(
        "wrote {} files to {} in {:.1} s",
        written.len(),
        spec.output_dir.display(),
        outcome.wall_clock.as_secs_f64()
    );
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
