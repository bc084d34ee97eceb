//! Batch runner for randomized-measurement entanglement experiments.
//!
//! Subcommands are built from the experiment registry; each experiment is
//! selected by name at runtime and driven by a TOML config file plus
//! command-line overrides. Exit codes: 0 success, 2 configuration error,
//! 3 numerical-consistency failure.

use std::process::ExitCode;

use clap::{Arg, ArgAction, Command};

use qmoments_cli::config::{ExperimentConfig, Overrides};
use qmoments_cli::error::CliError;
use qmoments_cli::{experiments, output};

fn build_cli() -> Command {
    let mut cmd = Command::new("qmoments")
        .about("Randomized-measurement entanglement analysis at desk scale")
        .version(env!("CARGO_PKG_VERSION"))
        .subcommand_required(true)
        .arg_required_else_help(true)
        .arg(
            Arg::new("config")
                .long("config")
                .value_name("PATH")
                .global(true)
                .help("TOML config file; command-line flags take precedence"),
        )
        .arg(
            Arg::new("seed")
                .long("seed")
                .value_name("U64")
                .global(true)
                .value_parser(clap::value_parser!(u64))
                .help("Master seed; identical config + seed reruns are bit-identical"),
        )
        .arg(
            Arg::new("unitaries")
                .long("unitaries")
                .value_name("M")
                .global(true)
                .value_parser(clap::value_parser!(usize))
                .help("Random measurement settings per state"),
        )
        .arg(
            Arg::new("shots")
                .long("shots")
                .value_name("N")
                .global(true)
                .value_parser(clap::value_parser!(u64))
                .help("State copies per setting"),
        )
        .arg(
            Arg::new("out")
                .long("out")
                .value_name("DIR")
                .global(true)
                .help("Output directory"),
        )
        .arg(
            Arg::new("format")
                .long("format")
                .value_name("FMT")
                .global(true)
                .action(ArgAction::Append)
                .value_delimiter(',')
                .help("Output formats: csv, svg, json (repeat or comma-separate)"),
        );
    for exp in experiments::registry() {
        cmd = cmd.subcommand(Command::new(exp.name()).about(exp.about()));
    }
    cmd
}

fn run() -> Result<(), CliError> {
    let matches = build_cli().get_matches();
    let (name, sub) = matches
        .subcommand()
        .expect("subcommand required by the parser");

    let overrides = Overrides {
        seed: sub.get_one::<u64>("seed").copied(),
        unitaries: sub.get_one::<usize>("unitaries").copied(),
        shots: sub.get_one::<u64>("shots").copied(),
        out: sub.get_one::<String>("out").cloned(),
        formats: sub
            .get_many::<String>("format")
            .map(|vals| vals.cloned().collect()),
    };
    let cfg = ExperimentConfig::load(sub.get_one::<String>("config").map(|s| s.as_str()), &overrides)?;

    let experiment = experiments::find(name)
        .ok_or_else(|| CliError::Config(format!("unknown experiment {name:?}")))?;
    let artifacts = experiment.run(&cfg)?;
    let written = output::emit_outputs(name, &artifacts, &cfg)?;

    println!("{name}: {} rows, seed {}", artifacts.table.rows.len(), cfg.seed);
    for path in written {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
