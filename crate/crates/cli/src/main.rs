//! `waveguide`: data emitter for dispersion curves, effective models and 2D spectra.

mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::Cli;

/// Input that could not be turned into a valid run configuration.
#[derive(Debug)]
pub struct InputError(pub String);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

/// Some verification check printed FAIL.
#[derive(Debug)]
pub struct ChecksFailed(pub usize);

impl std::fmt::Display for ChecksFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} verification check(s) failed", self.0)
    }
}

impl std::error::Error for ChecksFailed {}

fn exit_code(err: &anyhow::Error) -> u8 {
    use waveguide_spectra::Error as E;
    if err.downcast_ref::<InputError>().is_some() {
        return 2;
    }
    if err.downcast_ref::<ChecksFailed>().is_some() {
        return 1;
    }
    match err.downcast_ref::<E>() {
        Some(e) if e.is_nonconvergence() => 3,
        Some(E::Argument(_) | E::BranchDomain(_) | E::Geometry(_) | E::Precondition(_)) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
