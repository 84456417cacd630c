//! `scalecalc`: batch driver for the scale calculus toolkit.
//!
//! Every subcommand prints a one-line JSON summary on standard output.
//! Exit codes: 0 success, 2 usage or validation, 3 numeric failure.

mod args;
mod error;
mod input;
mod output;
mod run;

use std::process::ExitCode;

use clap::Parser;
use serde_json::json;

use args::Command;
use error::{CliError, CliResult};
use output::{read_file, Outputs};

#[derive(Debug, Parser)]
#[command(
    name = "scalecalc",
    version,
    about = "Scale calculus experiments on sampled paths"
)]
struct Cli {
    /// Worker threads for sweeps.
    #[arg(long, env = "SCALECALC_JOBS", global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

fn load_manifest(path: &std::path::Path) -> CliResult<Command> {
    let file = read_file("manifest", path)?;
    let value: serde_json::Value = serde_json::from_reader(std::io::BufReader::new(file))
        .map_err(|e| CliError::usage("manifest", e))?;
    args::parse_manifest(value)
}

fn execute(cli: Cli) -> (String, CliResult<(serde_json::Value, Outputs)>) {
    let command = match cli.command {
        Command::Run(r) => match load_manifest(&r.manifest) {
            Ok(c) => c,
            Err(e) => return ("run".into(), Err(e)),
        },
        c => c,
    };
    let name = command.name().to_string();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = cli.jobs {
        if j == 0 {
            return (name, Err(CliError::usage("jobs", "must be at least 1")));
        }
        builder = builder.num_threads(j);
    }
    let pool = match builder.build() {
        Ok(p) => p,
        Err(e) => return (name, Err(CliError::usage("jobs", e))),
    };
    let result = pool.install(|| {
        let mut out = Outputs::default();
        run::dispatch(&command, &mut out).map(|v| (v, out))
    });
    (name, result)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (op, result) = execute(cli);
    match result {
        Ok((value, out)) => {
            println!(
                "{}",
                json!({ "op": op, "status": "ok", "result": value, "outputs": out.written })
            );
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            println!(
                "{}",
                json!({ "op": op, "status": "error", "code": e.code(), "message": e.message() })
            );
            ExitCode::from(e.code() as u8)
        }
    }
}
