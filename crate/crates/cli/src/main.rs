mod args;
mod io;
mod maps;
mod run;

use clap::Parser;
use serde_json::json;

use crate::args::Cli;
use crate::io::{emit, CliError};

fn main() {
    let cli = Cli::parse();
    let code = match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", e.to_json());
            e.exit_code()
        }
    };
    std::process::exit(code);
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    if cli.threads == 0 {
        return Err(CliError::usage("--threads", "must be at least 1"));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build_global()
        .map_err(|e| CliError::usage("--threads", e.to_string()))?;
    let mut config = serde_json::to_value(&cli.command).expect("arguments serialize");
    config["threads"] = json!(cli.threads);
    config["version"] = json!(env!("CARGO_PKG_VERSION"));
    let out = run::run(&cli.command, &config)?;
    emit(&out, cli.out.as_ref())
}
