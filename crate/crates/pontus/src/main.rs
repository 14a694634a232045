use std::process::ExitCode;

use clap::Parser;
use pontus::cli::Cli;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).parse_env("PONTUS_LOG").init();
    match pontus::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("pontus: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
