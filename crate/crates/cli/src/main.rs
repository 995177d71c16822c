use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use exactapprox::config::OUT_ENV;
use exactapprox::{run, Options, RunConfig};

/// Exact approximation toolkit: decompositions, block constructions,
/// brute-force verification and certificate re-checking.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write gamma as c + mu + nu with digit-restricted mu, nu
    Decompose(Options),
    /// Build a witness alpha and its certificate
    Construct(Options),
    /// Enumerate rational solutions of the inequality up to --Q
    Verify(Options),
    /// List Markoff numbers, Lagrange values and named constants
    Spectrum(Options),
    /// Re-verify a certificate from scratch
    Recheck(Options),
    /// Run the command named in the --config file
    Run(Options),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, flags) = match cli.command {
        Command::Decompose(o) => ("decompose".to_string(), o),
        Command::Construct(o) => ("construct".to_string(), o),
        Command::Verify(o) => ("verify".to_string(), o),
        Command::Spectrum(o) => ("spectrum".to_string(), o),
        Command::Recheck(o) => ("recheck".to_string(), o),
        Command::Run(o) => match o.load_file().map(|f| f.command) {
            Ok(Some(c)) => (c, o),
            Ok(None) => {
                eprintln!("error: the config file does not name a command");
                return ExitCode::from(1);
            }
            Err(e) => {
                eprintln!("error: {e:#}");
                return ExitCode::from(1);
            }
        },
    };
    let env_out = std::env::var_os(OUT_ENV).map(PathBuf::from);
    let result = RunConfig::resolve(&name, flags, env_out).and_then(|config| run(&config));
    match result {
        Ok(outcome) => {
            print!("{}", outcome.summary);
            ExitCode::from(outcome.status.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
