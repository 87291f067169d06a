use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nematic_membrane_cli::{execute, parse_config, CliError, Experiment, RunConfig};

#[derive(Parser)]
#[command(name = "nmembrane", version, about = "Nematic membrane experiments")]
struct Cli {
    /// List the available experiments and exit.
    #[arg(long)]
    list: bool,
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    Project,
    Microstructure,
    SolveMembrane,
    GammaSweep,
    #[command(name = "energy3d-direct")]
    Energy3dDirect,
}

impl From<Command> for Experiment {
    fn from(c: Command) -> Self {
        match c {
            Command::Project => Experiment::Project,
            Command::Microstructure => Experiment::Microstructure,
            Command::SolveMembrane => Experiment::SolveMembrane,
            Command::GammaSweep => Experiment::GammaSweep,
            Command::Energy3dDirect => Experiment::Energy3dDirect,
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (mut cfg, bytes) = match &cli.config {
        Some(p) => (parse_config(p)?, std::fs::read(p).ok()),
        None => (RunConfig::default(), None),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    let exp = cli.command.map(Experiment::from).or(cfg.experiment).ok_or(CliError::NoExperiment)?;
    if let Some(n) = cli.threads {
        // fails only when a pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let out = cli.out.or_else(|| cfg.output_dir.clone()).unwrap_or_else(|| PathBuf::from("out"));
    let outcome = execute(exp, &cfg, bytes.as_deref(), &out)?;
    for a in &outcome.artifacts {
        println!("{}", outcome.out_dir.join(&a.name).display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.list {
        for e in Experiment::ALL {
            println!("{:<16} {}", e.name(), e.describe());
        }
        return ExitCode::SUCCESS;
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
