use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use vb_core::analysis::{threshold_search, StoppingCriteria};
use vb_core::decoder::AlgorithmKind;
use vb_core::{Error, Result};

use vbrecover::config::{self, ExperimentConfig, Profile};
use vbrecover::runner;

#[derive(Parser)]
#[command(
    name = "vbrecover",
    about = "Verification-based sparse recovery over biregular sensing graphs",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgArg {
    Lm,
    Sbb,
}

impl From<AlgArg> for AlgorithmKind {
    fn from(a: AlgArg) -> Self {
        match a {
            AlgArg::Lm => AlgorithmKind::Lm,
            AlgArg::Sbb => AlgorithmKind::Sbb,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ProfileArg {
    Ci,
    Paper,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment described by a TOML config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Master seed override.
        #[arg(long)]
        seed: Option<u64>,
        /// Trial count override.
        #[arg(long)]
        trials: Option<usize>,
        /// Output directory override.
        #[arg(long)]
        out: Option<PathBuf>,
        /// ci: cap at 100 trials and n = 10^4; paper: config values.
        #[arg(long, value_enum)]
        profile: Option<ProfileArg>,
    },
    /// Reproduce the fixed-ratio threshold table for both algorithms.
    Table1 {
        /// Monte-Carlo realization size per probe.
        #[arg(long, default_value_t = 1_000_000)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        seeds: usize,
        #[arg(long, default_value_t = 1e-3)]
        resolution: f64,
        #[arg(long, default_value = "out/table1.csv")]
        out: PathBuf,
    },
    /// Estimate one success threshold and print the bracket as JSON.
    Threshold {
        #[arg(long)]
        dv: usize,
        #[arg(long)]
        dc: usize,
        #[arg(long, value_enum)]
        alg: AlgArg,
        /// Monte-Carlo realization size per probe.
        #[arg(long, default_value_t = 1_000_000)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        seeds: usize,
        #[arg(long, default_value_t = 1e-3)]
        resolution: f64,
        /// Optional JSON output path (result always prints to stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run {
            config,
            seed,
            trials,
            out,
            profile,
        } => {
            let text = std::fs::read_to_string(&config)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", config.display())))?;
            let mut cfg = ExperimentConfig::from_toml(&text)?;
            cfg.apply_overrides(
                seed,
                trials,
                out,
                profile.map(|p| match p {
                    ProfileArg::Ci => Profile::Ci,
                    ProfileArg::Paper => Profile::Paper,
                }),
            );
            cfg.validate()?;
            let files = runner::run_experiment(&cfg)?;
            for f in files {
                println!("{}", f.display());
            }
            Ok(())
        }
        Command::Table1 {
            n,
            seed,
            seeds,
            resolution,
            out,
        } => {
            runner::table1_reproduction(n, seed, seeds, resolution, &out)?;
            println!("{}", out.display());
            Ok(())
        }
        Command::Threshold {
            dv,
            dc,
            alg,
            n,
            seed,
            seeds,
            resolution,
            out,
        } => {
            let n = config::fit_n(n, dv, dc);
            let res = threshold_search(
                dv,
                dc,
                alg.into(),
                n,
                seed,
                seeds,
                resolution,
                &StoppingCriteria::default(),
            )?;
            let value = runner::threshold_json(dv, dc, alg.into(), n, &res)?;
            let text = serde_json::to_string_pretty(&value)
                .map_err(|e| Error::Parse(format!("json: {e}")))?;
            println!("{text}");
            if let Some(path) = out {
                if let Some(dir) = path.parent() {
                    if !dir.as_os_str().is_empty() {
                        std::fs::create_dir_all(dir)?;
                    }
                }
                std::fs::write(path, text + "\n")?;
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ (Error::Config(_) | Error::Parse(_))) => {
            eprintln!("config error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
