//! dpow: derived functors of divided powers, K(A,n) tables and cross-checks.

mod config;
mod derive;
mod render;
mod stable;
mod table;
mod verify;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("out of range: {0}")]
    OutOfRange(String),
    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Engine(#[from] dpow_core::doldkan::DkError),
    #[error(transparent)]
    ClosedForm(#[from] dpow_core::closedform::ClosedFormError),
    #[error(transparent)]
    Cartan(#[from] dpow_core::cartan::CartanError),
}

/// Result of a command that prints JSON.
pub enum Outcome {
    Pass(Value),
    Fail(Value),
    Refused(Value),
}

#[derive(Parser, Debug)]
#[command(name = "dpow", version, about = "Derived functors of divided powers and homology of K(A,n)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// L_*F(Z^r, n) as JSON
    Derive(derive::DeriveArgs),
    /// Table cells as CSV
    Table(table::TableArgs),
    /// Run a cross-check suite; JSON report
    Verify(verify::VerifyArgs),
    /// Stable homology with the contributing words
    Stable(stable::StableArgs),
}

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("JSON values serialize"));
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Derive(a) => derive::run(a),
        Command::Verify(a) => verify::run(a),
        Command::Stable(a) => stable::run(a).map(Outcome::Pass),
        Command::Table(a) => match table::run(a) {
            Ok(csv) => {
                print!("{csv}");
                return ExitCode::SUCCESS;
            }
            Err(e) => Err(e),
        },
    };
    match result {
        Ok(Outcome::Pass(v)) => {
            print_json(&v);
            ExitCode::SUCCESS
        }
        Ok(Outcome::Fail(v)) => {
            print_json(&v);
            ExitCode::from(1)
        }
        Ok(Outcome::Refused(v)) => {
            print_json(&v);
            ExitCode::from(3)
        }
        Err(e) => {
            let kind = match e {
                CliError::Usage(_) | CliError::Config { .. } => "usage",
                CliError::OutOfRange(_) => "out_of_range",
                _ => "failure",
            };
            print_json(&json!({ "error": kind, "message": e.to_string() }));
            ExitCode::from(2)
        }
    }
}
