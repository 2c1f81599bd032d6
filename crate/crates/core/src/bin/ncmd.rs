use clap::Parser;
use ncmd::cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(&cli) {
        eprintln!("ncmd: error[{}]: {e}", e.code());
        std::process::exit(e.exit_code());
    }
}
