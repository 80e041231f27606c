//! `pneumodel` command line. Every command writes one CSV table to stdout
//! or `--out`; diagnostics go to stderr. Exit codes: 0 success, 1 bad
//! usage or input files, 2 model or solver failure.

pub mod args;
pub mod commands;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use pneumodel::config::{load_config, ConfigError, ModelConfig};
use pneumodel::control::{ControlError, Joint};
use pneumodel::csvio::{CsvError, CsvTable};
use pneumodel::lisper::LisperError;
use pneumodel::scasper::ScasperError;
use pneumodel::scenario::{Mode, ScenarioError};

use args::ArgError;
use commands::Metric;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Args(#[from] ArgError),
    #[error("config: {0}")]
    Config(#[from] ConfigError),
    #[error("scenario: {0}")]
    Scenario(#[from] ScenarioError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("output: {0}")]
    Csv(#[from] CsvError),
    #[error("elbow model: {0}")]
    Lisper(#[from] LisperError),
    #[error("shoulder model: {0}")]
    Scasper(#[from] ScasperError),
    #[error("simulation: {0}")]
    Control(#[from] ControlError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Lisper(_) | CliError::Scasper(_) | CliError::Control(_) => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "pneumodel", version, about = "Quasi-static actuator models and arm simulation, emitting CSV")]
pub struct Cli {
    /// Model config file (`key = value` lines).
    #[arg(long, global = true, env = "PNEUMODEL_CONFIG")]
    pub config: Option<PathBuf>,
    /// Write the table here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Overrides `sim.seed`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Elbow (bellow) actuator curves.
    #[command(subcommand)]
    Lisper(LisperCmd),
    /// Shoulder (airbag) actuator curves.
    #[command(subcommand)]
    Scasper(ScasperCmd),
    /// Pressure needed for a load at a fixed actuator angle.
    Inverse {
        #[arg(long)]
        joint: JointArg,
        /// Actuator angle from rest, deg.
        #[arg(long, allow_hyphen_values = true)]
        angle: f64,
        /// N for the elbow, N·m for the shoulder.
        #[arg(long, allow_hyphen_values = true)]
        load: f64,
    },
    /// Design-parameter study over one config key.
    Sweep {
        /// Dotted config key, e.g. `lisper.l_thick`.
        #[arg(long)]
        param: String,
        /// `start:end:step` or a comma list, in config-file units.
        #[arg(long, allow_hyphen_values = true)]
        values: String,
        #[arg(long)]
        metric: MetricArg,
    },
    /// Closed-loop simulation; prints the sampled trace of both joints.
    Simulate {
        /// Overrides the scenario's mode.
        #[arg(long)]
        mode: Option<ModeArg>,
        /// Scenario file; without it both joints sweep their limits at 0.25 Hz for 12 s.
        #[arg(long)]
        scenario: Option<PathBuf>,
    },
    /// Bench sweeps at several frequencies; one metrics row per frequency.
    Bandwidth {
        #[arg(long, default_value = "1,0.5,0.25")]
        freqs: String,
        #[arg(long)]
        joint: JointArg,
        /// Sine periods simulated per frequency.
        #[arg(long, default_value_t = 4.0)]
        cycles: f64,
    },
}

#[derive(Debug, Subcommand)]
pub enum LisperCmd {
    /// Free bending angle against pressure.
    Curve {
        #[command(flatten)]
        range: PressureRange,
    },
    /// Force components with the actuator held at `--angle`.
    Force {
        /// Bend angle, deg.
        #[arg(long, allow_hyphen_values = true)]
        angle: f64,
        #[command(flatten)]
        range: PressureRange,
    },
}

#[derive(Debug, Subcommand)]
pub enum ScasperCmd {
    /// Free extension angle against pressure.
    Angle {
        #[command(flatten)]
        range: PressureRange,
    },
    /// Torque components with the actuator held at `--angle`.
    Torque {
        /// Extension angle, deg.
        #[arg(long, allow_hyphen_values = true)]
        angle: f64,
        #[command(flatten)]
        range: PressureRange,
    },
}

/// Pressure grid in kPa; defaults depend on the actuator.
#[derive(Debug, Args)]
pub struct PressureRange {
    #[arg(long, allow_hyphen_values = true)]
    pub p_start: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub p_end: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub p_step: Option<f64>,
}

impl PressureRange {
    fn resolve(&self, end: f64) -> Result<Vec<f64>, CliError> {
        let v = args::inclusive_steps(self.p_start.unwrap_or(10.0), self.p_end.unwrap_or(end), self.p_step.unwrap_or(10.0))?;
        if v[0] < 0.0 {
            return Err(CliError::Usage(format!("pressure must be >= 0 kPa, got {}", v[0])));
        }
        Ok(v)
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum JointArg {
    Elbow,
    Shoulder,
}

impl From<JointArg> for Joint {
    fn from(j: JointArg) -> Self {
        match j {
            JointArg::Elbow => Joint::Elbow,
            JointArg::Shoulder => Joint::Shoulder,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Position,
    Gravity,
    Pid,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Position => Mode::Position,
            ModeArg::Gravity => Mode::Gravity,
            ModeArg::Pid => Mode::Pid,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MetricArg {
    #[value(name = "free_angle")]
    FreeAngle,
    #[value(name = "max_force")]
    MaxForce,
    #[value(name = "max_torque")]
    MaxTorque,
}

impl From<MetricArg> for Metric {
    fn from(m: MetricArg) -> Self {
        match m {
            MetricArg::FreeAngle => Metric::FreeAngle,
            MetricArg::MaxForce => Metric::MaxForce,
            MetricArg::MaxTorque => Metric::MaxTorque,
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn positive(name: &str, values: &[f64]) -> Result<(), CliError> {
    match values.iter().find(|&&x| !(x > 0.0)) {
        Some(x) => Err(CliError::Usage(format!("{name} must be > 0, got {x}"))),
        None => Ok(()),
    }
}

/// Runs a parsed command line and returns the table it produces.
pub fn execute(cli: &Cli) -> Result<CsvTable, CliError> {
    let mut cfg = match &cli.config {
        Some(p) => load_config(p)?,
        None => ModelConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.sim.seed = seed;
    }
    match &cli.command {
        Command::Lisper(LisperCmd::Curve { range }) => commands::lisper_curve(&cfg, &range.resolve(100.0)?),
        Command::Lisper(LisperCmd::Force { angle, range }) => commands::lisper_force(&cfg, *angle, &range.resolve(100.0)?),
        Command::Scasper(ScasperCmd::Angle { range }) => Ok(commands::scasper_angle(&cfg, &range.resolve(90.0)?)),
        Command::Scasper(ScasperCmd::Torque { angle, range }) => {
            Ok(commands::scasper_torque(&cfg, *angle, &range.resolve(90.0)?))
        }
        Command::Inverse { joint, angle, load } => commands::inverse(&cfg, (*joint).into(), *angle, *load),
        Command::Sweep { param, values, metric } => {
            let values = args::parse_values(values)?;
            commands::sweep(&cfg, param, &values, (*metric).into())
        }
        Command::Simulate { mode, scenario } => {
            let mode = mode.map(Mode::from);
            let (mut cfg, sc) = match scenario {
                Some(path) => commands::load_scenario(&read(path)?, &cfg, mode)?,
                None => (cfg, commands::default_scenario(&cfg, mode.unwrap_or(Mode::Position))),
            };
            // the seed flag wins over a seed inside the scenario file
            if let Some(seed) = cli.seed {
                cfg.sim.seed = seed;
            }
            commands::simulate(&cfg, &sc)
        }
        Command::Bandwidth { freqs, joint, cycles } => {
            let freqs = args::parse_list(freqs)?;
            positive("frequency", &freqs)?;
            positive("cycles", &[*cycles])?;
            commands::bandwidth(&cfg, (*joint).into(), &freqs, *cycles)
        }
    }
}

/// Full entry point: parses `argv`, runs, writes. Returns the exit code.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                1
            } else {
                let _ = write!(stdout, "{text}");
                0
            };
        }
    };
    let result = execute(&cli).and_then(|t| {
        let text = t.to_csv_string();
        match &cli.out {
            Some(p) => std::fs::write(p, text).map_err(|source| CliError::Io { path: p.display().to_string(), source }),
            None => stdout.write_all(text.as_bytes()).map_err(|source| CliError::Io { path: "<stdout>".into(), source }),
        }
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
