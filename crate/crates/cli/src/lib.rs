//! The `pform` command line: argument handling, dispatch and reports.

pub mod args;
pub mod error;
pub mod report;
pub mod suites;

use std::ffi::OsString;
use std::path::Path;

use clap::error::ErrorKind;
use clap::Parser;
use serde::Serialize;
use serde_json::Value;

use args::{merge, CheckCmd, Cli, Command, JetCmd, LatticeCmd};
use error::{CliError, Result};
use report::{Outcome, Report};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

fn init_logging() -> Result<()> {
    let level = match std::env::var("PFORM_LOG").as_deref() {
        Err(_) | Ok("info") => log::LevelFilter::Info,
        Ok("quiet") => log::LevelFilter::Off,
        Ok("debug") => log::LevelFilter::Debug,
        Ok(other) => return Err(CliError::Config(format!("PFORM_LOG={other:?}; use quiet, info or debug"))),
    };
    // a second call in the same process keeps the first logger
    let _ = env_logger::Builder::new().filter_level(level).target(env_logger::Target::Stderr).try_init();
    log::set_max_level(level);
    Ok(())
}

fn read_config(path: Option<&Path>) -> Result<Option<Value>> {
    let Some(path) = path else { return Ok(None) };
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map(Some).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

struct Run {
    verb: &'static str,
    seed: Option<u64>,
    params: Value,
    outcome: Outcome,
}

fn run_verb<T, F>(verb: &'static str, flags: &T, config: Option<Value>, seed: fn(&T) -> Option<u64>, f: F) -> Result<Run>
where
    T: Serialize + serde::de::DeserializeOwned,
    F: FnOnce(&T) -> Result<Outcome>,
{
    let merged: T = merge(flags, config)?;
    let params = serde_json::to_value(&merged).map_err(|e| CliError::Config(e.to_string()))?;
    log::info!("{verb} {params}");
    let outcome = f(&merged)?;
    Ok(Run { verb, seed: seed(&merged), params, outcome })
}

fn dispatch(cmd: &Command, config: Option<Value>) -> Result<Run> {
    use suites::{check, holonomy, jet, lattice};
    match cmd {
        Command::Check(CheckCmd::Algebra(a)) => run_verb("check algebra", a, config, |_| None, check::algebra),
        Command::Check(CheckCmd::Ybe(a)) => run_verb("check ybe", a, config, |a| Some(a.seed.unwrap_or(0)), check::ybe),
        Command::Check(CheckCmd::Tetra(a)) => run_verb("check tetra", a, config, |a| Some(a.seed.unwrap_or(0)), check::tetra),
        Command::Lattice(LatticeCmd::GaugeCheck(a)) => {
            run_verb("lattice gauge-check", a, config, |a| Some(a.seed.unwrap_or(0)), lattice::gauge_check)
        }
        Command::Lattice(LatticeCmd::Mc(a)) => run_verb("lattice mc", a, config, |a| Some(a.seed.unwrap_or(0)), lattice::mc),
        Command::Jet(JetCmd::Verify(a)) => run_verb("jet verify", a, config, |a| Some(a.seed.unwrap_or(0)), jet::verify),
        Command::Jet(JetCmd::Curvature(a)) => {
            run_verb("jet curvature", a, config, |a| Some(a.seed.unwrap_or(0)), jet::curvature)
        }
        Command::Holonomy(a) => run_verb("holonomy", a, config, |_| None, holonomy::holonomy),
    }
}

fn execute(cli: &Cli) -> Result<bool> {
    init_logging()?;
    if cli.threads == 0 {
        return Err(CliError::Config("--threads must be at least 1".into()));
    }
    let config = read_config(cli.config.as_deref())?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    let run = pool.install(|| dispatch(&cli.command, config))?;
    let report = Report::new(run.verb, run.seed, run.params, run.outcome);
    println!("{}", report.to_line());
    if let Some(path) = &cli.out {
        report.append_to(path)?;
    }
    for c in report.checks.iter().filter(|c| c.failed()) {
        log::warn!("failed: {} = {}", c.name, c.value);
    }
    Ok(report.passed())
}

/// Parse `argv`, run the verb and return the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_PASS,
                _ => EXIT_ERROR,
            };
        }
    };
    match execute(&cli) {
        Ok(true) => EXIT_PASS,
        Ok(false) => EXIT_FAIL,
        Err(e) => {
            eprintln!("pform: {e}");
            EXIT_ERROR
        }
    }
}
