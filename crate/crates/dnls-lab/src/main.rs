//! `dnls-lab`: simulate flows, scan the determinant over κ, run experiments
//! and the self-test battery.
//!
//! Exit codes: 0 pass, 1 error, 2 inconclusive (guard unattainable), 3 fail.

mod config;
mod selftest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{parse, read_json, ScanConfig, SimulateConfig};
use dnls_core::experiments::{default_config, run_named, Verdict, EXPERIMENTS};
use dnls_core::flows::{evolve, export_trajectory};
use dnls_core::io::write_atomic;
use dnls_core::lax::spectral_scan;
use dnls_core::spectral::snapshot::read_snapshot;
use dnls_core::Error;

const EXIT_ERROR: u8 = 1;
const EXIT_INCONCLUSIVE: u8 = 2;
const EXIT_FAIL: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "dnls-lab", version, about = "Perturbation-determinant lab for the derivative NLS")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON run configuration (strict schema, see --print-defaults).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory; created if missing.
    #[arg(long, global = true, value_name = "DIR", default_value = "dnls-out")]
    out: PathBuf,
    /// Overrides the seed of random ensembles and initial data.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    /// Print the default configuration for the command and exit.
    #[arg(long, global = true)]
    print_defaults: bool,
    #[arg(long, global = true, hide = true, value_enum)]
    inject_fault: Option<selftest::Fault>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evolve an initial field and write snapshots plus monitors.csv.
    Simulate,
    /// Tabulate a(κ), α, traces and norms of a snapshot over a κ ladder.
    Scan,
    /// Run a registered experiment and write report.json with its tables.
    Experiment {
        /// One of: equicontinuity, hs_growth, h1_coercivity, inequality_suite, scaling_covariance.
        name: String,
    },
    /// Run the fast invariant battery.
    Selftest,
}

/// A failure with its exit code.
struct Failure(u8, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Guard { .. } => Failure(EXIT_INCONCLUSIVE, e.to_string()),
            _ => Failure(EXIT_ERROR, e.to_string()),
        }
    }
}

fn load(path: &Option<PathBuf>) -> Result<serde_json::Value, Failure> {
    match path {
        Some(p) => Ok(read_json(p)?),
        None => Err(Failure(EXIT_ERROR, "--config PATH is required (see --print-defaults)".into())),
    }
}

fn print_json<T: serde::Serialize>(v: &T) -> Result<u8, Failure> {
    println!("{}", serde_json::to_string_pretty(v).map_err(Error::from)?);
    Ok(0)
}

fn simulate(cli: &Cli) -> Result<u8, Failure> {
    if cli.print_defaults {
        return print_json(&SimulateConfig::example());
    }
    let mut cfg: SimulateConfig = parse(load(&cli.config)?)?;
    let q0 = cfg.prepare(cli.seed)?;
    let traj = evolve(&q0, &cfg.flow)?;
    export_trajectory(&traj, &cli.out)?;
    write_atomic(
        &cli.out.join("config.json"),
        serde_json::to_string_pretty(&cfg).map_err(Error::from)?.as_bytes(),
    )?;
    if let Some(reason) = &traj.halted {
        eprintln!("halted at t = {}: {reason}", traj.final_time());
        return Ok(EXIT_INCONCLUSIVE);
    }
    Ok(0)
}

fn scan(cli: &Cli) -> Result<u8, Failure> {
    if cli.print_defaults {
        return print_json(&ScanConfig::example());
    }
    let cfg: ScanConfig = parse(load(&cli.config)?)?;
    let q = read_snapshot(&cfg.snapshot)?;
    let table = spectral_scan(&q, &cfg.kappas, &cfg.determinant)?.to_csv();
    table.write(&cli.out.join("scan.csv"))?;
    Ok(0)
}

fn experiment(cli: &Cli, name: &str) -> Result<u8, Failure> {
    if cli.print_defaults {
        return print_json(&default_config(name)?);
    }
    // validate the name before touching the config file
    default_config(name)?;
    let cfg = match &cli.config {
        Some(p) => Some(read_json(p)?),
        None => None,
    };
    let mut report = run_named(name, cfg, cli.seed)?;
    report.write(&cli.out)?;
    for (k, c) in &report.checks {
        eprintln!("{} {k}: {:e} (bound {:e})", if c.pass { "ok  " } else { "FAIL" }, c.value, c.bound);
    }
    for n in &report.notes {
        eprintln!("note: {n}");
    }
    let code = match report.verdict {
        Verdict::Pass => 0,
        Verdict::Exploratory => {
            eprintln!("exploratory: mass above 4π, no pass/fail verdict");
            0
        }
        Verdict::Inconclusive => EXIT_INCONCLUSIVE,
        Verdict::Fail => EXIT_FAIL,
    };
    println!("{name}: {:?}", report.verdict);
    Ok(code)
}

fn run_selftest(cli: &Cli) -> Result<u8, Failure> {
    let outcomes = selftest::run(cli.inject_fault)?;
    let mut failed = Vec::new();
    for o in &outcomes {
        println!("{} {:<30} tolerance {:e}", if o.passed { "ok  " } else { "FAIL" }, o.name, o.tolerance);
        if !o.passed {
            failed.push(o.name);
        }
    }
    if failed.is_empty() {
        println!("selftest: {} checks passed", outcomes.len());
        Ok(0)
    } else {
        println!("selftest: failed: {}", failed.join(", "));
        Ok(EXIT_FAIL)
    }
}

fn dispatch(cli: &Cli) -> Result<u8, Failure> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure(EXIT_ERROR, e.to_string()))?;
    }
    match &cli.command {
        Command::Simulate => simulate(cli),
        Command::Scan => scan(cli),
        Command::Experiment { name } => experiment(cli, name),
        Command::Selftest => run_selftest(cli),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            if code == EXIT_ERROR && matches!(&cli.command, Command::Experiment { .. }) && msg.starts_with("unknown experiment") {
                eprintln!("registered experiments:");
                for e in EXPERIMENTS {
                    eprintln!("  {e}");
                }
            }
            ExitCode::from(code)
        }
    }
}
