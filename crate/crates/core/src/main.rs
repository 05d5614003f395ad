use clap::Parser;
use orgsearch::cli::{run_command, Cli};

fn main() {
    let cli = Cli::parse();
    if let Err(err) = run_command(&cli.command) {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}
