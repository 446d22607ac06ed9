use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::Parser;
use serde::{Deserialize, Serialize};

mod args;
mod commands;

use args::{Cli, Command};
use commands::{Context, Outcome};

pub const SEED_ENV: &str = "TCL_SEED";

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Io(String),
    Numerical(String),
}

impl From<tcl_core::Error> for Failure {
    fn from(e: tcl_core::Error) -> Self {
        use tcl_core::Error::*;
        match e {
            InvalidParameter(_) | Domain { .. } | DimensionMismatch { .. } | NotSquare { .. } | Empty => Failure::Usage(e.to_string()),
            _ => Failure::Numerical(e.to_string()),
        }
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Io(_) => 3,
            Failure::Numerical(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Io(m) | Failure::Numerical(m) => m,
        }
    }
}

/// Everything needed to reproduce an output file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// Arguments after the program name, as given.
    pub argv: Vec<String>,
    pub parameters: Cli,
    /// Seed actually used (after `TCL_SEED`).
    pub seed: u64,
    pub version: String,
    pub timestamp_unix: u64,
    pub outputs: Vec<PathBuf>,
}

fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

fn resolve_seed(flag: u64) -> Result<u64, Failure> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure::Usage(format!("{SEED_ENV}={v:?} is not an unsigned integer"))),
        Err(_) => Ok(flag),
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Classify(_) => "classify",
        Command::Scan(_) => "scan",
        Command::Probe(_) => "probe",
        Command::Counterexample(_) => "counterexample",
        Command::Variational(_) => "variational",
        Command::Dpi(_) => "dpi",
        Command::Replay(_) => "replay",
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display())))
}

/// Runs `cli` with the given seed and sends the output to `out` (with a
/// manifest next to it) or stdout.
fn execute(cli: &Cli, argv: &[String], seed: u64) -> Result<Outcome, Failure> {
    let ctx = Context { global: &cli.global, seed };
    let outcome = match &cli.command {
        Command::Classify(a) => commands::classify_cmd(&ctx, a)?,
        Command::Scan(a) => commands::scan_cmd(&ctx, a)?,
        Command::Probe(a) => commands::probe_cmd(&ctx, a)?,
        Command::Counterexample(c) => commands::counterexample_cmd(&ctx, c)?,
        Command::Variational(a) => commands::variational_cmd(&ctx, a)?,
        Command::Dpi(a) => commands::dpi_cmd(&ctx, a)?,
        Command::Replay(_) => return Err(Failure::Usage("a manifest cannot replay another replay".into())),
    };
    match &cli.global.out {
        Some(path) => {
            write_file(path, &outcome.body)?;
            let manifest = RunManifest {
                command: command_name(&cli.command).into(),
                argv: argv.to_vec(),
                parameters: cli.clone(),
                seed,
                version: env!("CARGO_PKG_VERSION").into(),
                timestamp_unix: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
                outputs: vec![path.clone()],
            };
            let json = serde_json::to_string_pretty(&manifest).map_err(|e| Failure::Numerical(e.to_string()))?;
            write_file(&manifest_path(path), &(json + "\n"))?;
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(outcome.body.as_bytes())
                .map_err(|e| Failure::Io(format!("cannot write to stdout: {e}")))?;
        }
    }
    Ok(outcome)
}

/// Re-parses the recorded arguments and runs them with the recorded seed.
/// A `--out` given to `replay` redirects the output.
fn replay(manifest: &Path, out: Option<PathBuf>) -> Result<Outcome, Failure> {
    let text = fs::read_to_string(manifest).map_err(|e| Failure::Io(format!("cannot read {}: {e}", manifest.display())))?;
    let m: RunManifest = serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("bad manifest {}: {e}", manifest.display())))?;
    let mut cli = Cli::try_parse_from(std::iter::once("tcl".to_string()).chain(m.argv.iter().cloned()))
        .map_err(|e| Failure::Usage(format!("manifest arguments no longer parse: {e}")))?;
    if out.is_some() {
        cli.global.out = out;
    }
    let mut argv = m.argv.clone();
    if let Some(path) = &cli.global.out {
        // record the effective destination so the new manifest replays itself
        strip_out(&mut argv);
        argv.extend(["--out".to_string(), path.display().to_string()]);
    }
    execute(&cli, &argv, m.seed)
}

fn strip_out(argv: &mut Vec<String>) {
    let mut i = 0;
    while i < argv.len() {
        if argv[i] == "--out" {
            argv.drain(i..(i + 2).min(argv.len()));
        } else if argv[i].starts_with("--out=") {
            argv.remove(i);
        } else {
            i += 1;
        }
    }
}

/// Subcommands available at the deepest level `argv` reached.
fn valid_subcommands(argv: &[String]) -> Vec<String> {
    use clap::CommandFactory;
    let mut node = Cli::command();
    for a in argv {
        match node.find_subcommand(a) {
            Some(sub) => node = sub.clone(),
            None if a.starts_with('-') => continue,
            None => break,
        }
    }
    node.get_subcommands().map(|c| c.get_name().to_string()).filter(|n| n != "help").collect()
}

fn run() -> Result<Outcome, Failure> {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            if e.kind() == clap::error::ErrorKind::InvalidSubcommand {
                let _ = e.print();
                eprintln!("valid names: {}", valid_subcommands(&argv).join(", "));
                return Err(Failure::Usage("unknown subcommand".into()));
            }
            // help and version are successes; everything else is a usage error (2)
            e.exit();
        }
    };
    if let Some(n) = cli.global.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Usage(format!("cannot start {n} workers: {e}")))?;
    }
    if !(cli.global.tol > 0.0 && cli.global.tol.is_finite()) {
        return Err(Failure::Usage(format!("--tol must be positive, got {}", cli.global.tol)));
    }
    match &cli.command {
        Command::Replay(r) => replay(&r.manifest, cli.global.out.clone()),
        _ => execute(&cli, &argv, resolve_seed(cli.global.seed)?),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(outcome) => {
            if let Some(s) = &outcome.summary {
                eprintln!("{s}");
            }
            if outcome.violation {
                eprintln!("violation of a proven property detected");
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.exit_code())
        }
    }
}
