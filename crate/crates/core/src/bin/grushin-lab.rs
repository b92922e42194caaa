use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use grushin_core::experiment::{load_config, run, Command, ExperimentConfig, ExperimentError};

#[derive(Parser)]
#[command(name = "grushin-lab", version, about = "Grushin inverse-coefficient laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// TOML configuration; defaults are used when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides `ensemble.master_seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides `output.directory`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Solve the configured modes forward in time.
    Forward,
    /// Fit the growth of the ground eigenvalue against μ_n.
    EigenScaling,
    /// Recover b - b̃ on the subdomain from a snapshot.
    Reconstruct,
    /// Stability-ratio ensemble (and T₁ sweep when configured).
    StabilitySweep,
    /// Test the initial datum against the admissible class.
    CheckClass,
    /// Harnack ratios of the subdomain heat flow.
    Harnack,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Forward => Command::Forward,
            Cmd::EigenScaling => Command::EigenScaling,
            Cmd::Reconstruct => Command::Reconstruct,
            Cmd::StabilitySweep => Command::StabilitySweep,
            Cmd::CheckClass => Command::CheckClass,
            Cmd::Harnack => Command::Harnack,
        }
    }
}

fn execute(cli: &Cli) -> Result<(), ExperimentError> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| ExperimentError::Config(vec![format!("threads: {e}")]))?;
    }
    let mut config = match &cli.config {
        Some(path) => load_config(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.ensemble.master_seed = seed;
    }
    if let Some(out) = &cli.out {
        config.output.directory = out.clone();
    }
    let manifest = run(&config, cli.command.into())?;
    for f in &manifest.files {
        println!("{}  {}", f.sha256, config.output.directory.join(&f.path).display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let report = e.report();
            let text = serde_json::to_string_pretty(&report).unwrap_or_else(|_| e.to_string());
            eprintln!("{text}");
            if let Some(dir) = cli.out.as_ref() {
                let _ = std::fs::create_dir_all(dir);
                let _ = std::fs::write(dir.join("error.json"), text + "\n");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
