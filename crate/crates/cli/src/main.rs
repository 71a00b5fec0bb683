use std::io::{ErrorKind, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use probflux_cli::{config, run, Command, Failure, Options, RunConfig};

#[derive(Parser)]
#[command(
    name = "probflux",
    version,
    about = "Explicit conservation-law schemes read as Markov chains"
)]
struct Cli {
    #[command(subcommand)]
    command: Sub,

    /// Fail with exit code 3 when a scheme has negative weights
    #[arg(long, global = true)]
    strict: bool,

    /// Seed for stochastic commands; overrides the config
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Write the artifact here instead of stdout; overrides the config
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct Input {
    /// JSON config file, or `-` (the default) for stdin
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Sub {
    /// Evolve initial data and write every layer as CSV
    Solve(Input),
    /// Stability and consistency summary of a scheme
    Check(Input),
    /// Monte Carlo estimate of one grid value against the recursion
    Mc(Input),
    /// Stability-equality limiters for a given speed
    Limiters(Input),
    /// L1 errors and observed orders on a sequence of periodic grids
    Convergence(Input),
    /// Coupled slow/fast evolution
    Gds(Input),
    /// Monte Carlo L1 distance between a sigmoidal network and a target
    FnnApprox(Input),
    /// Run the command named in the config
    Run(Input),
}

fn read_config(input: &Input) -> Result<RunConfig, Failure> {
    let text = match &input.config {
        Some(path) if path.as_os_str() != "-" => std::fs::read_to_string(path)
            .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?,
        _ => {
            let mut text = String::new();
            std::io::stdin().read_to_string(&mut text)?;
            text
        }
    };
    config::parse(&text)
}

fn execute(cli: Cli) -> Result<(), Failure> {
    let (command, input) = match cli.command {
        Sub::Solve(i) => (Some(Command::Solve), i),
        Sub::Check(i) => (Some(Command::Check), i),
        Sub::Mc(i) => (Some(Command::Mc), i),
        Sub::Limiters(i) => (Some(Command::Limiters), i),
        Sub::Convergence(i) => (Some(Command::Convergence), i),
        Sub::Gds(i) => (Some(Command::Gds), i),
        Sub::FnnApprox(i) => (Some(Command::FnnApprox), i),
        Sub::Run(i) => (None, i),
    };
    let cfg = read_config(&input)?;
    let command = command
        .or(cfg.command)
        .ok_or_else(|| Failure::Config("`run` needs a `command` field in the config".into()))?;
    let artifact = run(
        command,
        &cfg,
        Options {
            strict: cli.strict,
            seed: cli.seed,
        },
    )?;
    match cli.output.or_else(|| cfg.output.path.clone()) {
        Some(path) => std::fs::write(path, artifact)?,
        None => {
            let mut out = std::io::stdout().lock();
            match out
                .write_all(artifact.as_bytes())
                .and_then(|()| out.flush())
            {
                Err(e) if e.kind() != ErrorKind::BrokenPipe => return Err(e.into()),
                _ => {}
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("probflux: {failure}");
            if let Failure::Stability(report) = &failure {
                println!(
                    "{}",
                    serde_json::to_string_pretty(report).expect("report serializes")
                );
            }
            ExitCode::from(failure.exit_code())
        }
    }
}
