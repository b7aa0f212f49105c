use std::process::ExitCode;

use clap::Parser;
use sfqm_tunnel::config::{Cli, Settings};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = sfqm_tunnel::init_threads()
        .and_then(|_| Settings::resolve(cli))
        .and_then(|s| sfqm_tunnel::run(&s));
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("validation failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
