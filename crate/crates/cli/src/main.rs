use clap::Parser;
use crcconv_cli::Cli;

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    std::process::exit(crcconv_cli::run(Cli::parse()));
}
