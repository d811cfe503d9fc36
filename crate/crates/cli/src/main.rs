use clap::Parser;
use eigenscale_cli::args::Cli;

fn main() {
    let cli = Cli::parse();
    if let Err(e) = eigenscale_cli::run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
