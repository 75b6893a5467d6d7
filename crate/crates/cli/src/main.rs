use std::process::ExitCode;

use clap::Parser;
use jsrlab_cli::error::ERROR_EXIT;
use jsrlab_cli::{run_and_emit, Cli, RunConfig};

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(ERROR_EXIT)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = RunConfig::from_cli(cli).and_then(|cfg| run_and_emit(&cfg, &argv));
    match result {
        Ok(status) => ExitCode::from(status.code()),
        Err(e) => {
            eprintln!("jsrlab: {e}");
            ExitCode::from(ERROR_EXIT)
        }
    }
}
