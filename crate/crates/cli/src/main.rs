mod args;
mod commands;
mod report;

use std::process::ExitCode;

use clap::Parser;

use bestsubset::ErrorClass;

use crate::args::{Cli, Command};

fn exit_code(class: ErrorClass) -> u8 {
    match class {
        ErrorClass::Usage => 2,
        ErrorClass::Data => 3,
        ErrorClass::Numerical => 4,
    }
}

fn run(cli: &Cli) -> bestsubset::Result<()> {
    let (outcome, output) = match &cli.command {
        Command::Fit(a) => (commands::fit(a)?, &a.run.output),
        Command::Path(a) => (commands::path(a)?, &a.run.output),
        Command::Cv(a) => (commands::cv(a)?, &a.run.output),
        Command::Spca(a) => (commands::spca(a)?, &a.run.output),
        Command::Bench(a) => (commands::bench(a)?, &a.run.output),
    };
    let json = outcome.report.to_json();
    match output {
        Some(path) => report::write(path, &json)?,
        None => print!("{json}"),
    }
    if let Some((path, csv)) = &outcome.extra {
        report::write(path, csv)?;
    }
    eprintln!("{}", outcome.summary);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(e.class()))
        }
    }
}
