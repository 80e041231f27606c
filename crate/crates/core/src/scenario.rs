//! Scenario files: the config format with `scenario.*` keys describing one
//! simulation run. Any non-scenario key in the same file overrides the base
//! configuration, so a single file fully determines a run.
//!
//! ```text
//! scenario.mode = position          # position | gravity | pid
//! scenario.duration = 12            # s; optional when a sine sets cycles
//! scenario.prefill = true           # start with gravity-holding pressures
//! scenario.initial.shoulder = 16    # deg
//! scenario.initial.elbow = -10      # deg
//! scenario.elbow.kind = sine        # sine | constant
//! scenario.elbow.amplitude = 20     # deg
//! scenario.elbow.offset = 10        # deg
//! scenario.elbow.frequency = 0.25   # Hz
//! scenario.elbow.phase = -90        # deg, default -90 (start at the trough)
//! scenario.elbow.cycles = 3         # optional; holds the end value after
//! scenario.shoulder.kind = constant
//! scenario.shoulder.value = 30      # deg
//! ```

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::config::{parse_entries, ConfigError, Entry, ModelConfig};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("line {line}: unknown scenario key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: bad value for `{key}`: {message}")]
    BadValue { line: usize, key: String, message: String },
    #[error("missing required key `{0}`")]
    Missing(String),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Position,
    Gravity,
    Pid,
}

impl FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "position" => Ok(Mode::Position),
            "gravity" => Ok(Mode::Gravity),
            "pid" => Ok(Mode::Pid),
            _ => Err(format!("`{s}` is not one of position, gravity, pid")),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Position => "position",
            Mode::Gravity => "gravity",
            Mode::Pid => "pid",
        })
    }
}

/// Set-angle trajectory for one joint. Angles in rad.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Trajectory {
    Sine { amplitude: f64, offset: f64, frequency: f64, phase: f64, cycles: Option<f64> },
    Constant(f64),
}

impl Trajectory {
    /// Sine from `lo` to `hi` starting at `lo`.
    pub fn sweep(lo: f64, hi: f64, frequency: f64) -> Self {
        Trajectory::Sine {
            amplitude: 0.5 * (hi - lo),
            offset: 0.5 * (hi + lo),
            frequency,
            phase: -TAU / 4.0,
            cycles: None,
        }
    }

    pub fn at(&self, t: f64) -> f64 {
        match *self {
            Trajectory::Constant(v) => v,
            Trajectory::Sine { amplitude, offset, frequency, phase, cycles } => {
                let t = cycles.map_or(t, |c| t.min(c / frequency));
                offset + amplitude * (TAU * frequency * t + phase).sin()
            }
        }
    }

    /// Time covered by a finite sine, if any.
    pub fn natural_duration(&self) -> Option<f64> {
        match *self {
            Trajectory::Sine { frequency, cycles: Some(c), .. } => Some(c / frequency),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub mode: Mode,
    pub duration: f64,
    pub prefill: bool,
    pub initial_shoulder: f64,
    pub initial_elbow: f64,
    pub shoulder: Trajectory,
    pub elbow: Trajectory,
}

impl Scenario {
    /// Holds both joints at their lower limits.
    pub fn hold(mode: Mode, duration: f64, cfg: &ModelConfig) -> Self {
        let s = cfg.arm.shoulder_limits.lo;
        let e = cfg.arm.elbow_limits.lo;
        Self {
            mode,
            duration,
            prefill: false,
            initial_shoulder: s,
            initial_elbow: e,
            shoulder: Trajectory::Constant(s),
            elbow: Trajectory::Constant(e),
        }
    }

    pub fn check(&self) -> Result<(), ScenarioError> {
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            return Err(ScenarioError::Invalid(format!("duration must be > 0, got {}", self.duration)));
        }
        for (name, tr) in [("shoulder", self.shoulder), ("elbow", self.elbow)] {
            if let Trajectory::Sine { frequency, cycles, .. } = tr {
                if !(frequency > 0.0 && frequency.is_finite()) {
                    return Err(ScenarioError::Invalid(format!("{name} frequency must be > 0, got {frequency}")));
                }
                if cycles.is_some_and(|c| !(c > 0.0)) {
                    return Err(ScenarioError::Invalid(format!("{name} cycles must be > 0")));
                }
            }
        }
        Ok(())
    }
}

#[derive(Default)]
struct JointKeys {
    kind: Option<String>,
    amplitude: f64,
    offset: f64,
    frequency: Option<f64>,
    phase: Option<f64>,
    value: Option<f64>,
    cycles: Option<f64>,
}

impl JointKeys {
    fn build(self, joint: &str, default: f64) -> Result<Trajectory, ScenarioError> {
        match self.kind.as_deref() {
            None | Some("constant") => Ok(Trajectory::Constant(self.value.unwrap_or(default))),
            Some("sine") => Ok(Trajectory::Sine {
                amplitude: self.amplitude,
                offset: self.offset,
                frequency: self
                    .frequency
                    .ok_or_else(|| ScenarioError::Missing(format!("scenario.{joint}.frequency")))?,
                phase: self.phase.unwrap_or(-TAU / 4.0),
                cycles: self.cycles,
            }),
            Some(other) => Err(ScenarioError::Invalid(format!("scenario.{joint}.kind `{other}` is not sine or constant"))),
        }
    }
}

fn number(e: &Entry) -> Result<f64, ScenarioError> {
    e.value
        .parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| ScenarioError::BadValue { line: e.line, key: e.key.clone(), message: format!("`{}` is not a finite number", e.value) })
}

/// Parses a scenario document. Returns the base config with the file's
/// non-scenario keys applied, and the scenario itself.
pub fn parse_scenario(text: &str, base: &ModelConfig) -> Result<(ModelConfig, Scenario), ScenarioError> {
    let entries = parse_entries(text)?;
    let mut cfg = *base;
    cfg.apply_entries(&entries, Some("scenario."))?;
    cfg.check()?;

    let mut mode = None;
    let mut duration = None;
    let mut prefill = false;
    let mut init_s = None;
    let mut init_e = None;
    let mut shoulder = JointKeys::default();
    let mut elbow = JointKeys::default();
    for e in entries.iter().filter(|e| e.key.starts_with("scenario.")) {
        let rest = &e.key["scenario.".len()..];
        let bad = |message: String| ScenarioError::BadValue { line: e.line, key: e.key.clone(), message };
        match rest {
            "mode" => mode = Some(e.value.parse::<Mode>().map_err(bad)?),
            "duration" => duration = Some(number(e)?),
            "prefill" => {
                prefill = match e.value.as_str() {
                    "true" | "1" | "yes" | "on" => true,
                    "false" | "0" | "no" | "off" => false,
                    v => return Err(bad(format!("`{v}` is not a boolean"))),
                }
            }
            "initial.shoulder" => init_s = Some(number(e)?.to_radians()),
            "initial.elbow" => init_e = Some(number(e)?.to_radians()),
            _ => {
                let (joint, field) = rest.split_once('.').unwrap_or((rest, ""));
                let keys = match joint {
                    "shoulder" => &mut shoulder,
                    "elbow" => &mut elbow,
                    _ => return Err(ScenarioError::UnknownKey { line: e.line, key: e.key.clone() }),
                };
                match field {
                    "kind" => keys.kind = Some(e.value.clone()),
                    "amplitude" => keys.amplitude = number(e)?.to_radians(),
                    "offset" => keys.offset = number(e)?.to_radians(),
                    "frequency" => keys.frequency = Some(number(e)?),
                    "phase" => keys.phase = Some(number(e)?.to_radians()),
                    "value" => keys.value = Some(number(e)?.to_radians()),
                    "cycles" => keys.cycles = Some(number(e)?),
                    _ => return Err(ScenarioError::UnknownKey { line: e.line, key: e.key.clone() }),
                }
            }
        }
    }

    let mode = mode.ok_or_else(|| ScenarioError::Missing("scenario.mode".into()))?;
    let initial_shoulder = init_s.unwrap_or(cfg.arm.shoulder_limits.lo);
    let initial_elbow = init_e.unwrap_or(cfg.arm.elbow_limits.lo);
    let shoulder = shoulder.build("shoulder", initial_shoulder)?;
    let elbow = elbow.build("elbow", initial_elbow)?;
    let duration = match duration {
        Some(d) => d,
        None => {
            let natural = [shoulder.natural_duration(), elbow.natural_duration()].into_iter().flatten().fold(None, |m: Option<f64>, d| Some(m.map_or(d, |m| m.max(d))));
            natural.ok_or_else(|| ScenarioError::Missing("scenario.duration".into()))?
        }
    };
    let sc = Scenario { mode, duration, prefill, initial_shoulder, initial_elbow, shoulder, elbow };
    sc.check()?;
    Ok((cfg, sc))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_document() {
        let text = "\
scenario.mode = position
scenario.elbow.kind = sine
scenario.elbow.amplitude = 20
scenario.elbow.offset = 10
scenario.elbow.frequency = 0.25
scenario.elbow.cycles = 3
scenario.shoulder.kind = constant
scenario.shoulder.value = 30
sim.valve_tau = 0.1
";
        let (cfg, sc) = parse_scenario(text, &ModelConfig::default()).unwrap();
        assert_eq!(cfg.sim.valve_tau, 0.1);
        assert_eq!(sc.mode, Mode::Position);
        assert!((sc.duration - 12.0).abs() < 1e-12);
        assert!((sc.elbow.at(0.0) - (-10f64).to_radians()).abs() < 1e-12);
        assert!((sc.elbow.at(2.0) - 30f64.to_radians()).abs() < 1e-12);
        assert_eq!(sc.elbow.at(100.0), sc.elbow.at(12.0));
        assert_eq!(sc.shoulder, Trajectory::Constant(30f64.to_radians()));
    }

    #[test]
    fn zero_amplitude_is_constant() {
        let tr = Trajectory::Sine { amplitude: 0.0, offset: 0.3, frequency: 1.0, phase: 0.0, cycles: None };
        for i in 0..100 {
            assert_eq!(tr.at(i as f64 * 0.037), 0.3);
        }
    }

    #[test]
    fn errors() {
        let base = ModelConfig::default();
        assert!(matches!(parse_scenario("scenario.duration = 1", &base), Err(ScenarioError::Missing(_))));
        assert!(matches!(
            parse_scenario("scenario.mode = gravity\nscenario.duration = 0", &base),
            Err(ScenarioError::Invalid(_))
        ));
        assert!(matches!(
            parse_scenario("scenario.mode = pid\nscenario.duration = 1\nscenario.elbow.kind = sine\nscenario.elbow.frequency = 0", &base),
            Err(ScenarioError::Invalid(_))
        ));
        assert!(matches!(
            parse_scenario("scenario.mode = pid\nscenario.duration = 1\nscenario.wrist.kind = sine", &base),
            Err(ScenarioError::UnknownKey { line: 3, .. })
        ));
        assert!(matches!(
            parse_scenario("scenario.mode = fast\nscenario.duration = 1", &base),
            Err(ScenarioError::BadValue { line: 1, .. })
        ));
        assert!(matches!(
            parse_scenario("scenario.mode = pid\nscenario.duration = 1\narm.nope = 2", &base),
            Err(ScenarioError::Config(ConfigError::UnknownKey { .. }))
        ));
    }
}
