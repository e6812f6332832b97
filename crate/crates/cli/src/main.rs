use clap::Parser;

fn main() {
    std::process::exit(mcflab_cli::run(mcflab_cli::Cli::parse()));
}
