use clap::Parser;

fn main() {
    let cli = baytta::cli::Cli::parse();
    std::process::exit(baytta::cli::run(cli));
}
