//! `levypacket` — evolve free Lévy-process densities and the matching wave
//! packets by Fourier-multiplier methods, and check the library's invariants.
//!
//! Subcommands:
//!   * `evolve --config FILE | --preset NAME [--out DIR] [--raw]`
//!   * `check --suite NAME[,NAME...]` (or `all`)
//!   * `list`
//!
//! Exit codes: 0 success, 2 configuration/usage error, 3 numeric failure or
//! failed check.  Worker threads are capped by `LEVYPACKET_THREADS`.

mod checks;
mod config;
mod output;
mod presets;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use levypacket::evolution::{evolve_process, evolve_wavepacket, EvolutionMode};
use levypacket::{Error, Result};

#[derive(Parser)]
#[command(
    name = "levypacket",
    version,
    about = "Free Levy-process densities and Levy-Schrodinger wave packets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write CSV frames plus a JSON summary.
    Evolve {
        /// Config file in the flat section/key format (see `list` presets).
        #[arg(long, conflicts_with = "preset")]
        config: Option<PathBuf>,
        /// Name of a built-in figure preset.
        #[arg(long)]
        preset: Option<String>,
        /// Output directory, created if missing.
        #[arg(long, default_value = "levypacket-out")]
        out: PathBuf,
        /// Write every grid row instead of decimating to 8192 rows per frame.
        #[arg(long)]
        raw: bool,
    },
    /// Run named invariant suites and print a JSON report.
    Check {
        /// Comma-separated suite names, or `all`.
        #[arg(long)]
        suite: String,
    },
    /// List noise families, initial states, presets and check suites.
    List,
}

/// Print to stdout, treating a closed pipe (e.g. `levypacket list | head`)
/// as a clean early exit rather than a panic.
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    if let Err(err) = out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        if err.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("error: cannot write to stdout: {err}");
        std::process::exit(3);
    }
}

fn cmd_evolve(
    config: Option<PathBuf>,
    preset: Option<String>,
    out: PathBuf,
    raw: bool,
) -> Result<()> {
    let run = match (config, preset) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(&path).map_err(|e| {
                Error::Config(format!("cannot read config {}: {e}", path.display()))
            })?;
            config::parse_config(&text, &path.display().to_string())?
        }
        (None, Some(name)) => presets::load_preset(&name)?,
        _ => {
            return Err(Error::Config(
                "evolve needs exactly one of --config FILE or --preset NAME".into(),
            ))
        }
    };

    let scenario = &run.scenario;
    let density = match scenario.mode {
        EvolutionMode::Process | EvolutionMode::Both => Some(evolve_process(scenario)?),
        EvolutionMode::Schrodinger => None,
    };
    let wave = match scenario.mode {
        EvolutionMode::Schrodinger | EvolutionMode::Both => Some(evolve_wavepacket(scenario)?),
        EvolutionMode::Process => None,
    };

    let summary_path = output::write_run(
        &out,
        &run.label,
        &run.frames_path,
        &run.summary_path,
        raw,
        density.as_ref(),
        wave.as_ref(),
    )?;
    emit(&format!("wrote {}\n", summary_path.display()));
    Ok(())
}

fn cmd_check(suite: &str) -> Result<bool> {
    let outcomes = checks::run_suites(suite)?;
    let all_pass = outcomes.iter().all(|o| o.status == "pass");
    let report = serde_json::to_string_pretty(&outcomes)
        .map_err(|e| Error::Config(format!("serialize report: {e}")))?;
    emit(&format!("{report}\n"));
    Ok(all_pass)
}

fn cmd_list() {
    let mut text = String::new();
    text.push_str("noise families (law grammar: name or name(key=value,...)):\n");
    for line in [
        "  degenerate            frozen state, no motion",
        "  normal                Brownian motion, chf exp(-(au)^2/2)",
        "  uniform               flat increment law on [-a, a]",
        "  bernoulli             +a/-a coin-flip increments (not divisible)",
        "  laplace               two-sided exponential increments",
        "  cauchy                Lorentzian increments, chf exp(-a|u|)",
        "  stable(alpha=..)      symmetric stable, chf exp(-|au|^alpha/alpha)",
        "  vg(nu=..)             variance gamma, chf (1+(au)^2)^-nu",
        "  student(alpha=3)      Student t with three degrees of freedom",
        "  relativistic(nu=..)   relativistic square-root exponent",
        "  cpoisson(lambda=..,component=..)   compound Poisson jumps",
        "  wiener_poisson(gamma=..,rate=..,jump=..)   Gaussian part + jumps",
    ] {
        text.push_str(line);
        text.push('\n');
    }
    text.push_str(
        "\ninitial states: normal, cauchy, student3, laplace, vg(nu=..), relativistic(nu=..)\n",
    );
    text.push_str("\npresets:\n");
    for preset in presets::PRESETS {
        text.push_str(&format!("  {:<22}{}\n", preset.name, preset.description));
    }
    text.push_str("\ncheck suites (or `all`):\n");
    for name in checks::SUITES {
        text.push_str(&format!("  {name}\n"));
    }
    emit(&text);
}

fn dispatch(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Evolve {
            config,
            preset,
            out,
            raw,
        } => cmd_evolve(config, preset, out, raw).map(|()| true),
        Command::Check { suite } => cmd_check(&suite),
        Command::List => {
            cmd_list();
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: one or more checks failed");
            ExitCode::from(3)
        }
        Err(err @ Error::Config(_)) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(3)
        }
    }
}
