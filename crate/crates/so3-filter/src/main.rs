use clap::Parser;

use so3_filter::cli;

fn main() {
    let args = cli::Cli::parse();
    if let Err(e) = cli::execute(args) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
