mod args;
mod commands;
mod output;

use std::io::Write;
use std::process::ExitCode;

use anyhow::Result;
use clap::error::ErrorKind;
use clap::Parser;

use args::{merge, Cli, Command, Common, Format};
use commands::VerificationFailed;

const EXIT_INPUT: u8 = 1;
const EXIT_SOLVER: u8 = 2;
const EXIT_VERIFY: u8 = 3;

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<VerificationFailed>().is_some() {
        return EXIT_VERIFY;
    }
    match err.downcast_ref::<spinflip::Error>() {
        Some(spinflip::Error::NoConvergence { .. })
        | Some(spinflip::Error::NoBoundState)
        | Some(spinflip::Error::StiffFailure { .. }) => EXIT_SOLVER,
        _ => EXIT_INPUT,
    }
}

fn emit(common: &Common, text: &str) -> Result<()> {
    match &common.output {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let config = cli.config.as_deref().map(args::load_config).transpose()?;
    let common: Common = merge(&cli.common, config.as_ref())?;
    let (report, warnings, failure, default_format) = match &cli.command {
        Command::Reflect(a) => {
            let (r, w) = commands::reflect(&merge(a, config.as_ref())?)?;
            (r, w, None, Format::Table)
        }
        Command::Well(a) => (commands::well(&merge(a, config.as_ref())?)?, Vec::new(), None, Format::Table),
        Command::Sweep(a) => {
            let (r, w) = commands::sweep(&merge(a, config.as_ref())?)?;
            (r, w, None, Format::Csv)
        }
        Command::Verify(a) => {
            let (r, w, f) = commands::verify(&merge(a, config.as_ref())?)?;
            (r, w, f, Format::Csv)
        }
    };
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    let text = report.render(common.format.unwrap_or(default_format))?;
    emit(&common, &text)?;
    match failure {
        Some(f) => Err(f.into()),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = e.print();
                    ExitCode::SUCCESS
                }
                _ => {
                    let text = e.to_string();
                    eprintln!("{}", text.lines().next().unwrap_or("error: invalid arguments"));
                    ExitCode::from(EXIT_INPUT)
                }
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", format!("{err:#}").replace('\n', " "));
            ExitCode::from(exit_code(&err))
        }
    }
}
