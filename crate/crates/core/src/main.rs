use clap::Parser;
use disloc_spectra::cli::{init_logging, run, Cli};

fn main() {
    init_logging();
    std::process::exit(run(Cli::parse()));
}
