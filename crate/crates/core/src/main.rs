use clap::Parser;

use cyclorat::cli::{self, RunConfig};

fn main() {
    cli::init_logging();
    let config = RunConfig::parse();
    std::process::exit(cli::run(&config));
}
