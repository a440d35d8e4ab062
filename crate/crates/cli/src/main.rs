use clap::Parser;
use codecal_cli::{run, Cli};

fn main() {
    std::process::exit(run(Cli::parse()));
}
