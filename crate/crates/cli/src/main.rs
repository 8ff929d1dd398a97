use clap::Parser;

fn main() -> std::process::ExitCode {
    ranking_cli::cli::dispatch(ranking_cli::cli::Cli::parse())
}
