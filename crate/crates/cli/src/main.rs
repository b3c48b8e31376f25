use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use ergodiclab::{calibrate, load_config, run, CalibrateParams, CliError, RunOptions};
use ergodiclab_core::Space;

#[derive(Parser)]
#[command(name = "ergodiclab", version, about = "Push-forward dynamics experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SpaceArg {
    Torus,
    Heisenberg,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment config (or re-run the config echoed in a run manifest).
    Run {
        config: PathBuf,
        #[arg(long, default_value = "ergodiclab-out")]
        out: PathBuf,
        #[arg(long)]
        threads: Option<usize>,
        /// Run cocycles over bases that fail the minimality screen.
        #[arg(long)]
        assume_ergodic: bool,
        /// Enforce the config's checks; exit 4 if any fails.
        #[arg(long)]
        check: bool,
    },
    /// Median distance of i.i.d. Haar clouds from Haar measure.
    Calibrate {
        #[arg(long, value_enum, default_value = "torus")]
        space: SpaceArg,
        /// Torus dimension.
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long)]
        size: usize,
        #[arg(long = "K", default_value_t = 8)]
        cutoff: i64,
        #[arg(long, default_value_t = 1.0)]
        s: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        repeats: usize,
        #[arg(long)]
        threads: Option<usize>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ergodiclab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Run { config, out, threads, assume_ergodic, check } => {
            let cfg = load_config(&config)?;
            let base = config.parent().map(PathBuf::from).unwrap_or_default();
            let opts = RunOptions { assume_ergodic, threads, check };
            let record = run(&cfg, &base, &out, &opts)?;
            println!("{}: wrote {}", cfg.experiment.kind(), record.out_dir.display());
            for (k, v) in &record.output.summary {
                println!("  {k} = {v:.6e}");
            }
            Ok(())
        }
        Command::Calibrate { space, dim, size, cutoff, s, seed, repeats, threads } => {
            let space = match space {
                SpaceArg::Torus => Space::torus(dim),
                SpaceArg::Heisenberg => Space::Heisenberg,
            };
            let params = CalibrateParams { space, size, cutoff, s, seed, repeats };
            let value = calibrate(&params, threads)?;
            let report = serde_json::json!({
                "space": space.to_string(),
                "size": size,
                "K": cutoff,
                "s": s,
                "seed": seed,
                "repeats": repeats,
                "noise_floor": value,
            });
            println!("{report}");
            Ok(())
        }
    }
}
