//! Command-line front end for the two-mode amplifier library: parameter
//! sweeps, prebuilt figure tables, and a closed-form-vs-numeric check.

mod config;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use config::{CliError, Experiment, Preset};

#[derive(Parser)]
#[command(
    name = "twpa-lab",
    about = "Two-mode squeezing with frequency-asymmetric loss: sweeps, \
             figure tables, and numeric cross-checks",
    after_help = "Config files are flat `key = value` text; see the README \
                  for the supported modes and keys. Output is CSV on stdout \
                  unless --out (or an `out` key) names a file."
)]
struct Args {
    /// Experiment description file (flat key = value lines).
    #[arg(long, value_name = "PATH", conflicts_with = "preset")]
    config: Option<PathBuf>,

    /// Prebuilt figure table: fig2 through fig7.
    #[arg(long, value_name = "NAME")]
    preset: Option<String>,

    /// Write the table here instead of stdout (overrides the config file).
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Worker threads; 0 or absent picks the machine default. The
    /// TWPA_LAB_THREADS environment variable is used when the flag is absent.
    #[arg(long, value_name = "N")]
    threads: Option<usize>,
}

fn thread_count(args: &Args) -> config::Result<usize> {
    if let Some(n) = args.threads {
        return Ok(n);
    }
    match std::env::var("TWPA_LAB_THREADS") {
        Ok(text) => text.trim().parse().map_err(|_| {
            CliError::Parse(format!(
                "TWPA_LAB_THREADS must be a thread count, got '{text}'"
            ))
        }),
        Err(_) => Ok(0),
    }
}

fn run_main(args: Args) -> config::Result<()> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(thread_count(&args)?)
        .build_global()
        .expect("the global thread pool is only built once");

    let mut experiment = match (&args.config, &args.preset) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)?;
            config::parse_experiment(&text)?
        }
        (None, Some(name)) => Experiment::from_preset(Preset::parse(name)?),
        (None, None) => {
            return Err(CliError::Parse(
                "pass --config PATH or --preset NAME (see --help)".into(),
            ))
        }
        (Some(_), Some(_)) => unreachable!("clap rejects the combination"),
    };
    if args.out.is_some() {
        experiment.out = args.out;
    }
    run::execute(&experiment)
}

fn main() -> ExitCode {
    match run_main(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
