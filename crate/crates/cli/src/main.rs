use clap::Parser;
use mlbound_cli::{exit_code, run, Cli};

fn main() {
    let cli = Cli::parse();
    if let Err(err) = run(cli) {
        eprintln!("mlbound: {err:#}");
        std::process::exit(exit_code(&err));
    }
}
