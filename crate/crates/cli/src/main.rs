use clap::Parser;
use svmd_cli::{run, Cli};

fn main() {
    let argv: Vec<String> = std::env::args().collect();
    let cli = Cli::parse();
    if let Err(e) = run(cli, &argv) {
        eprintln!("svmd: {e}");
        std::process::exit(e.exit_code());
    }
}
