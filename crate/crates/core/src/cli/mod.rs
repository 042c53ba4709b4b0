//! Batch command-line surface. Every subcommand reads typed flags, lets a
//! JSON config file override them, and writes a JSON report (plus CSV where
//! there is a series) to the output directory.

mod commands;
mod hardy;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{de::DeserializeOwned, Serialize};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};

pub use commands::{CarlemanCmdConfig, ConvexityCmdConfig, DataSpec, EvolveCmdConfig, PotentialSpec, ScanCmdConfig};
pub use hardy::{hardy_threshold, HardyConfig, HardyReport};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_VERDICT: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_CERTIFICATION: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "lattice-hardy", version, about = "Log-convexity, Carleman and Hardy checks for discrete Schrödinger flows")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// JSON object whose keys override the subcommand's flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evolve data freely or with a potential; cross-check the free engines.
    Evolve(commands::EvolveArgs),
    /// Sample a weighted norm along the flow and test log-convexity.
    Convexity(commands::ConvexityArgs),
    /// Positivity scan of a commutator coefficient or Turán-type inequality.
    Scan(commands::ScanArgs),
    /// Carleman inequality sweep and quadratic-form check.
    Carleman(commands::CarlemanArgs),
    /// Envelope threshold α + β* for u(0) = I_j(a).
    Hardy(commands::HardyArgs),
    /// Identity checks of the special functions.
    SpecfunSelftest,
}

/// The outcome of a subcommand before it is written out.
pub struct Outcome {
    pub exit_code: i32,
    pub config: Value,
    pub tolerances: Value,
    pub result: Value,
}

/// Parses `args` (including the program name), runs the subcommand and
/// returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_PASS };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_certification() {
                EXIT_CERTIFICATION
            } else {
                EXIT_CONFIG
            }
        }
    }
}

fn execute(cli: &Cli) -> Result<i32> {
    if cli.global.threads > 0 {
        // A second initialisation in the same process keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.global.threads).build_global();
    }
    let g = &cli.global;
    let (name, outcome) = match &cli.command {
        Command::Evolve(a) => ("evolve", commands::evolve(merge(a.config(g.seed), g)?, &g.out)?),
        Command::Convexity(a) => ("convexity", commands::convexity(merge(a.config(g.seed), g)?, &g.out)?),
        Command::Scan(a) => ("scan", commands::scan(merge(a.config(), g)?, &g.out)?),
        Command::Carleman(a) => ("carleman", commands::carleman(merge(a.config(), g)?, &g.out)?),
        Command::Hardy(a) => ("hardy", commands::hardy(merge(a.config(), g)?)?),
        Command::SpecfunSelftest => ("specfun-selftest", commands::specfun_selftest()?),
    };
    write_report(&g.out, name, g.seed, &outcome)?;
    Ok(outcome.exit_code)
}

/// Overlays the keys of the --config object on the flag-built config.
fn merge<T: Serialize + DeserializeOwned>(from_flags: T, g: &GlobalArgs) -> Result<T> {
    let Some(path) = &g.config else { return Ok(from_flags) };
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let file: Value = serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let Value::Object(over) = file else {
        return Err(Error::Config("config file must hold a JSON object".into()));
    };
    let mut base = serde_json::to_value(from_flags).map_err(|e| Error::Config(e.to_string()))?;
    let obj = base.as_object_mut().expect("configs serialize to objects");
    for (k, v) in over {
        obj.insert(k, v);
    }
    serde_json::from_value(base).map_err(|e| Error::Config(e.to_string()))
}

fn write_report(out: &Path, name: &str, seed: u64, o: &Outcome) -> Result<()> {
    std::fs::create_dir_all(out)?;
    let timestamp = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let report = json!({
        "command": name,
        "version": env!("CARGO_PKG_VERSION"),
        "seed": seed,
        "config": o.config,
        "tolerances": o.tolerances,
        "result": o.result,
        "exit_code": o.exit_code,
        "timestamp": timestamp,
    });
    let text = serde_json::to_string_pretty(&sorted(report)).map_err(|e| Error::Io(e.to_string()))?;
    std::fs::write(out.join(format!("{name}.json")), text + "\n")?;
    Ok(())
}

/// Rebuilds every object with keys in sorted order.
fn sorted(v: Value) -> Value {
    match v {
        Value::Object(m) => {
            let mut keys: Vec<(String, Value)> = m.into_iter().collect();
            keys.sort_by(|a, b| a.0.cmp(&b.0));
            Value::Object(keys.into_iter().map(|(k, v)| (k, sorted(v))).collect::<Map<_, _>>())
        }
        Value::Array(a) => Value::Array(a.into_iter().map(sorted).collect()),
        other => other,
    }
}
