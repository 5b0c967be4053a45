use clap::Parser;

fn main() {
    let cli = gamow_lab::cli::Cli::parse();
    std::process::exit(gamow_lab::cli::run(&cli));
}
