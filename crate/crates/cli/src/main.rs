use clap::Parser;

fn main() {
    let cli = dqpt_cli::Cli::parse();
    std::process::exit(dqpt_cli::execute(&cli));
}
