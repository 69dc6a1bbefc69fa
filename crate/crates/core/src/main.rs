use std::process::ExitCode;

use clap::Parser;

use simplex_walks::cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = run(&cli);
    print!("{}", outcome.render(cli.format));
    if outcome.success {
        ExitCode::SUCCESS
    } else {
        for w in outcome.report.warnings.iter().filter(|w| w.starts_with("error: ")) {
            eprintln!("{w}");
        }
        ExitCode::FAILURE
    }
}
