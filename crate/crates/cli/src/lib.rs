//! Front end for the paramp toolkit: config parsing, command dispatch and
//! result emission.

pub mod commands;
pub mod config;
pub mod emit;
pub mod units;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

pub use commands::run_command;
pub use config::{parse_config, Command, Format, RunConfig};
pub use emit::{emit_results, Cell, Table};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Numerical(String),
    #[error(transparent)]
    Core(#[from] paramp_core::Error),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    /// 0 success, 1 validation, 2 numerical failure, 3 I/O.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Numerical(_) => 2,
            CliError::Core(e) if e.is_validation() => 1,
            CliError::Core(_) => 2,
            CliError::Io { .. } => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "paramp", version, about = "Design and simulate kinetic-inductance parametric amplifiers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Sub,
    #[command(flatten)]
    pub opts: Opts,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Run the command named in the config file
    Run,
    /// Synthesize the three-stage transformer from prototype coefficients
    Synth,
    /// Gain spectrum at one pump setting
    Simulate,
    /// Best bandwidth over a pump-frequency by bias-current grid
    Map,
    /// Brute-force design search
    Search,
    /// Fit kinetic-inductance current scales to frequency-shift data
    FitKi,
    /// Fit qubit saturation spectroscopy
    FitQubit,
    /// Added noise, SNR gain and system temperature from noise spectra
    Noise,
}

#[derive(Debug, Args, Default)]
pub struct Opts {
    /// TOML config file
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Preset for the command (design, synthesis or search ranges)
    #[arg(long, global = true)]
    pub preset: Option<String>,
    /// Environment preset (ideal, paper-env)
    #[arg(long, global = true)]
    pub env: Option<String>,
    /// Output file (default stdout)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Worker threads for sweeps
    #[arg(long, global = true, env = "PARAMP_THREADS")]
    pub threads: Option<usize>,
    /// Input data file for fit-ki, fit-qubit and noise
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// DC bias, e.g. 0.57mA
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub idc: Option<String>,
    /// Pump frequency, e.g. 16.9GHz
    #[arg(long, global = true)]
    pub fp: Option<String>,
    /// Pump level as |xi3|/2pi, e.g. 2.5GHz
    #[arg(long, global = true)]
    pub xi3: Option<String>,
    /// Signal sweep start:stop:step, e.g. 7.9GHz:8.9GHz:1MHz
    #[arg(long, global = true)]
    pub span: Option<String>,
    /// -v info, -vv debug
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

fn to_command(s: &Sub) -> Option<Command> {
    Some(match s {
        Sub::Run => return None,
        Sub::Synth => Command::Synth,
        Sub::Simulate => Command::Simulate,
        Sub::Map => Command::Map,
        Sub::Search => Command::Search,
        Sub::FitKi => Command::FitKi,
        Sub::FitQubit => Command::FitQubit,
        Sub::Noise => Command::Noise,
    })
}

/// Loads the config, applies command-line overrides and resolves it.
pub fn build_config(sub: &Sub, o: &Opts) -> Result<(Command, RunConfig), CliError> {
    let mut raw = match &o.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|source| CliError::Io { path: p.display().to_string(), source })?;
            config::parse_raw(&text)?
        }
        None => config::RawConfig::default(),
    };
    let cmd = match (to_command(sub), raw.command) {
        (Some(c), _) => c,
        (None, Some(c)) => c,
        (None, None) => return Err(CliError::Validation("command: 'run' needs a config with a command key".into())),
    };
    let text = |s: &String| Some(config::Q::Text(s.clone()));
    if let Some(p) = &o.preset {
        match cmd {
            Command::Synth => raw.synth.preset = Some(p.clone()),
            Command::Search => raw.search.preset = Some(p.clone()),
            _ => raw.design.preset = Some(p.clone()),
        }
    }
    if let Some(e) = &o.env {
        raw.environment.preset = Some(e.clone());
    }
    if let Some(v) = &o.idc {
        raw.pump.idc = text(v);
        raw.map.idc = text(v);
    }
    if let Some(v) = &o.fp {
        raw.pump.fp = text(v);
        raw.map.fp = text(v);
    }
    if let Some(v) = &o.xi3 {
        raw.pump.xi3 = text(v);
        raw.pump.ip = None;
    }
    if let Some(v) = &o.span {
        raw.sweep.span = Some(v.clone());
    }
    if let Some(i) = &o.input {
        match cmd {
            Command::FitKi => raw.fit_ki.data = Some(i.clone()),
            Command::FitQubit => raw.fit_qubit.data = Some(i.clone()),
            Command::Noise => raw.noise.data = Some(i.clone()),
            _ => log::warn!("--input is ignored by this command"),
        }
    }
    if let Some(p) = &o.out {
        raw.output.path = Some(p.clone());
    }
    if let Some(f) = o.format {
        raw.output.format = Some(f);
    }
    Ok((cmd, raw.resolve()?))
}

/// Runs one invocation and writes its table.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    if let Some(n) = cli.opts.threads {
        if n == 0 {
            return Err(CliError::Validation("threads: must be >= 1".into()));
        }
        if rayon::ThreadPoolBuilder::new().num_threads(n).build_global().is_err() {
            log::warn!("thread pool already initialised");
        }
    }
    let (cmd, cfg) = build_config(&cli.command, &cli.opts)?;
    let table = run_command(cmd, &cfg)?;
    match &cfg.out {
        Some(p) => {
            let io = |source| CliError::Io { path: p.display().to_string(), source };
            let mut f = std::io::BufWriter::new(std::fs::File::create(p).map_err(io)?);
            emit_results(&table, cfg.format, &mut f).map_err(io)?;
            f.flush().map_err(io)
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            emit_results(&table, cfg.format, &mut lock).map_err(|source| CliError::Io { path: "<stdout>".into(), source })
        }
    }
}
