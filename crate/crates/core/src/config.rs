//! Configuration value types and the dotted `key = value` file format.
//!
//! Internally every angle is in radians and every pressure in pascals. The
//! file format uses degrees and kilopascals; the conversion happens only in
//! [`keys`] below. Lengths are metres, areas square metres, moduli pascals,
//! masses kilograms and times seconds on both sides.
//!
//! The LISPER internal dimensions (ring angle, radii, wall lengths, areas)
//! are not published. Defaults were calibrated once against the 100 kPa free
//! bending angle (112.2°) and the ~35 % bellow share at 50 kPa / 45°, within
//! the 132 × 55 × 92 mm outer envelope; see `LisperGeometry::default`.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use crate::control::PidGains;
use crate::numerics::{QuadConfig, RootConfig};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialParams {
    /// Young's modulus of the silicone body, Pa.
    pub e_silicone: f64,
    pub poisson: f64,
    /// Young's modulus of the PU pipe, Pa.
    pub e_pipe: f64,
}

impl Default for MaterialParams {
    fn default() -> Self {
        // e_pipe together with the default pipe geometry puts the unloaded
        // shoulder extension at 122.5 deg for 100 kPa.
        Self { e_silicone: 1.53e6, poisson: 0.5, e_pipe: 6.7e7 }
    }
}

/// Bellow elbow actuator geometry. Angles in radians, lengths in metres.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LisperGeometry {
    /// Half of the ring angle of one bellow.
    pub beta: f64,
    pub r_inner: f64,
    pub r_outer: f64,
    pub l_thick: f64,
    pub l_base: f64,
    pub l_wall_initial: f64,
    /// Height between the lower and upper base areas.
    pub h_base: f64,
    /// Radius from the bellow centre to the external ring. Not used by the
    /// force model; kept for validation against drawings.
    pub r2_external: f64,
    pub d_bellow_wall: f64,
    pub n_bellows: u32,
    /// Angle between the bellow tip extension line and the segment.
    pub gamma: f64,
    pub l_equiv: f64,
    /// Distance from the rotation axis to the bellow base plane.
    pub h2: f64,
    pub a_feet: f64,
    pub a_base: f64,
    /// Arm of the base-section restoring force.
    pub r_base: f64,
    pub theta_initial: f64,
    /// Supply limit, Pa.
    pub p_max: f64,
}

impl LisperGeometry {
    /// Mid-layer ring radius.
    pub fn r_mid(&self) -> f64 {
        0.5 * (self.r_inner + self.r_outer)
    }

    /// Base length for which the uninflated contour closes exactly, i.e. the
    /// bellow equations are satisfied by (2β, β, r) at zero pressure.
    pub fn rest_consistent_base(beta: f64, r_mid: f64, l_wall: f64) -> f64 {
        2.0 * (l_wall * beta.cos() + r_mid * beta.sin())
    }

    /// Moment arm of one bellow about the rotation axis. The bellows sit on
    /// an arc centred on the axis, so every bellow shares the same arm: the
    /// base-plane distance plus half the base height.
    pub fn bellow_arm(&self) -> f64 {
        self.h2 + 0.5 * self.h_base
    }
}

impl Default for LisperGeometry {
    fn default() -> Self {
        // Calibrated values (see module docs). Sharp folds (β = 0.05 rad),
        // 20 mm walls and a 50 mm wall width fill the 55 mm actuator width;
        // a_feet and a_base were then solved so that the free angle at
        // 100 kPa is 112.2° and the bellow share at 50 kPa / 45° is 35 %.
        let beta = 0.05;
        let (r_inner, r_outer) = (0.002, 0.005);
        let l_wall_initial = 0.02;
        Self {
            beta,
            r_inner,
            r_outer,
            l_thick: 0.003,
            l_base: Self::rest_consistent_base(beta, 0.5 * (r_inner + r_outer), l_wall_initial),
            l_wall_initial,
            h_base: 0.02,
            r2_external: 0.006,
            d_bellow_wall: 0.05,
            n_bellows: 15,
            gamma: PI / 2.0,
            l_equiv: 0.048,
            h2: 0.04,
            a_feet: 4.6e-4,
            a_base: 8.56e-4,
            r_base: 0.03,
            theta_initial: 0.0,
            p_max: 100e3,
        }
    }
}

/// Airbag shoulder actuator geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScasperGeometry {
    pub n_bags: u32,
    /// Width of each airbag, m.
    pub bag_width: f64,
    pub bag_length: f64,
    /// Moment arm from the bag contact point to the rotation axis, m.
    pub r1: f64,
    pub l_pipe: f64,
    /// Pipe inner diameter, m.
    pub d1: f64,
    /// Pipe outer diameter, m.
    pub d2: f64,
    /// Free extension polynomial; output in degrees, input is the raw
    /// pressure number supplied by the caller.
    pub poly: Quadratic,
    pub p_max: f64,
}

impl Default for ScasperGeometry {
    fn default() -> Self {
        Self {
            n_bags: 6,
            bag_width: 0.09,
            bag_length: 0.12,
            r1: 0.02,
            l_pipe: 0.01,
            d1: 0.004,
            d2: 0.008,
            poly: Quadratic { a2: 0.0145, a1: 3.0507, a0: -1.1438 },
            p_max: 150e3,
        }
    }
}

/// `a2·x² + a1·x + a0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadratic {
    pub a2: f64,
    pub a1: f64,
    pub a0: f64,
}

impl Quadratic {
    pub fn eval(&self, x: f64) -> f64 {
        (self.a2 * x + self.a1) * x + self.a0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn clamp(&self, x: f64) -> f64 {
        x.clamp(self.lo, self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

/// Two-link dummy arm. Joint angles are measured from the horizontal
/// (shoulder) and relative to the upper arm (elbow), in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArmParams {
    pub l1: f64,
    pub l2: f64,
    pub m1: f64,
    pub m2: f64,
    pub r_com1: f64,
    pub r_com2: f64,
    pub g: f64,
    pub elbow_limits: Interval,
    pub shoulder_limits: Interval,
    /// Joint angle at which the elbow actuator is at its initial bend.
    pub elbow_offset: f64,
    /// Joint angle at which the shoulder actuator is closed.
    pub shoulder_offset: f64,
}

impl ArmParams {
    /// Actuator bending angle for an elbow joint angle.
    pub fn elbow_bend(&self, theta_elbow: f64, lisper: &LisperGeometry) -> f64 {
        theta_elbow - self.elbow_offset + lisper.theta_initial
    }

    pub fn elbow_joint(&self, bend: f64, lisper: &LisperGeometry) -> f64 {
        bend + self.elbow_offset - lisper.theta_initial
    }

    /// Actuator extension angle for a shoulder joint angle.
    pub fn shoulder_extension(&self, theta_shoulder: f64) -> f64 {
        theta_shoulder - self.shoulder_offset
    }
}

impl Default for ArmParams {
    fn default() -> Self {
        Self {
            l1: 0.28,
            l2: 0.25,
            m1: 1.5,
            m2: 1.0,
            r_com1: 0.14,
            r_com2: 0.125,
            g: 9.81,
            elbow_limits: Interval { lo: (-10f64).to_radians(), hi: 30f64.to_radians() },
            shoulder_limits: Interval { lo: 16f64.to_radians(), hi: 60f64.to_radians() },
            elbow_offset: (-10f64).to_radians(),
            shoulder_offset: 16f64.to_radians(),
        }
    }
}

/// Solver, integrator, valve and sensor settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimParams {
    pub root: RootConfig,
    pub quad: QuadConfig,
    /// Plant integration step, s.
    pub dt: f64,
    /// Valve first-order time constant, s.
    pub valve_tau: f64,
    /// Valve slew limit, Pa/s.
    pub valve_slew: f64,
    /// IMU (and controller) sample rate, Hz.
    pub imu_rate: f64,
    /// IMU noise standard deviation, rad.
    pub imu_noise: f64,
    pub seed: u64,
    /// Viscous joint damping, N·m·s/rad.
    pub damping_shoulder: f64,
    pub damping_elbow: f64,
    /// Shoulder rubber strips: linear stiffness and damping toward the
    /// closed actuator angle.
    pub strips: bool,
    pub strip_stiffness: f64,
    pub strip_damping: f64,
}

impl Default for SimParams {
    fn default() -> Self {
        Self {
            root: RootConfig::default(),
            quad: QuadConfig::default(),
            dt: 1e-3,
            valve_tau: 0.2,
            valve_slew: 1.0e6,
            imu_rate: 100.0,
            imu_noise: 0.05f64.to_radians(),
            seed: 42,
            damping_shoulder: 1.0,
            damping_elbow: 0.15,
            strips: false,
            strip_stiffness: 2.0,
            strip_damping: 0.5,
        }
    }
}

/// Controller gains. Position-controller gains map an angle error in rad to
/// a force (elbow, N) or torque (shoulder, N·m); baseline gains map it
/// straight to pressure (Pa).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlParams {
    pub elbow: PidGains,
    pub shoulder: PidGains,
    pub baseline_elbow: PidGains,
    pub baseline_shoulder: PidGains,
}

impl Default for ControlParams {
    fn default() -> Self {
        // Tuned on the default plant: steps settle inside 2 degrees and the
        // 0.25 Hz full-range sines stay within about 11 degrees. Shoulder ki
        // above ~250 excites a coupled limit cycle between the joints.
        Self {
            elbow: PidGains { kp: 125.0, ki: 417.0, kd: 20.0, integral_limit: 40.0 },
            shoulder: PidGains { kp: 40.0, ki: 160.0, kd: 8.0, integral_limit: 8.0 },
            baseline_elbow: PidGains { kp: 2.0e5, ki: 4.0e5, kd: 5.0e3, integral_limit: 1.0e5 },
            baseline_shoulder: PidGains { kp: 2.0e5, ki: 4.0e5, kd: 1.0e4, integral_limit: 1.5e5 },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ModelConfig {
    pub material: MaterialParams,
    pub lisper: LisperGeometry,
    pub scasper: ScasperGeometry,
    pub arm: ArmParams,
    pub sim: SimParams,
    pub control: ControlParams,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub field: String,
    pub rule: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.field, self.rule)
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: duplicate key `{key}`")]
    DuplicateKey { line: usize, key: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: bad value for `{key}`: {message}")]
    BadValue { line: usize, key: String, message: String },
    #[error("invalid configuration: {}", join_violations(.0))]
    Invalid(Vec<Violation>),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

/// One `key = value` line from a config or scenario file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub key: String,
    pub value: String,
    pub line: usize,
}

/// Splits a config document into entries. Blank lines and `#` comments are
/// skipped; anything else must be `key = value` with a dotted key.
pub fn parse_entries(text: &str) -> Result<Vec<Entry>, ConfigError> {
    let mut out: Vec<Entry> = Vec::new();
    let mut seen = BTreeSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((k, v)) = content.split_once('=') else {
            return Err(ConfigError::Syntax { line, message: format!("expected `key = value`, got `{content}`") });
        };
        let key = k.trim();
        let value = v.trim();
        if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.') {
            return Err(ConfigError::Syntax { line, message: format!("invalid key `{key}`") });
        }
        if key.starts_with('.') || key.ends_with('.') || key.contains("..") {
            return Err(ConfigError::Syntax { line, message: format!("invalid key `{key}`") });
        }
        if value.is_empty() {
            return Err(ConfigError::Syntax { line, message: format!("missing value for `{key}`") });
        }
        if !seen.insert(key.to_string()) {
            return Err(ConfigError::DuplicateKey { line, key: key.to_string() });
        }
        out.push(Entry { key: key.to_string(), value: value.to_string(), line });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Value {
    Num(f64),
    Int(u64),
    Flag(bool),
}

impl Value {
    fn num(self) -> f64 {
        match self {
            Value::Num(x) => x,
            Value::Int(n) => n as f64,
            Value::Flag(b) => f64::from(u8::from(b)),
        }
    }

    fn int(self) -> u64 {
        match self {
            Value::Int(n) => n,
            Value::Num(x) => x as u64,
            Value::Flag(b) => u64::from(b),
        }
    }

    fn flag(self) -> bool {
        matches!(self, Value::Flag(true))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Kind {
    /// Real number; file value × factor = internal value.
    Real(f64),
    Count,
    Flag,
}

const DEG: f64 = PI / 180.0;
const KPA: f64 = 1000.0;

/// One documented configuration key.
pub struct Key {
    pub name: &'static str,
    pub unit: &'static str,
    kind: Kind,
    get: fn(&ModelConfig) -> Value,
    set: fn(&mut ModelConfig, Value),
}

macro_rules! real {
    ($name:expr, $unit:literal, $factor:expr, $($field:ident).+) => {
        Key {
            name: $name,
            unit: $unit,
            kind: Kind::Real($factor),
            get: |c| Value::Num(c.$($field).+),
            set: |c, v| c.$($field).+ = v.num(),
        }
    };
}

macro_rules! count {
    ($name:literal, $ty:ty, $($field:ident).+) => {
        Key {
            name: $name,
            unit: "count",
            kind: Kind::Count,
            get: |c| Value::Int(c.$($field).+ as u64),
            set: |c, v| c.$($field).+ = v.int() as $ty,
        }
    };
}

macro_rules! gains {
    ($prefix:literal, $unit:literal, $($field:ident).+) => {
        [
            real!(concat!($prefix, ".kp"), $unit, 1.0, $($field).+.kp),
            real!(concat!($prefix, ".ki"), $unit, 1.0, $($field).+.ki),
            real!(concat!($prefix, ".kd"), $unit, 1.0, $($field).+.kd),
            real!(concat!($prefix, ".integral_limit"), $unit, 1.0, $($field).+.integral_limit),
        ]
    };
}

/// Every recognised configuration key, in file order.
pub fn keys() -> Vec<Key> {
    let mut v = vec![
        real!("material.e_silicone", "Pa", 1.0, material.e_silicone),
        real!("material.poisson", "-", 1.0, material.poisson),
        real!("material.e_pipe", "Pa", 1.0, material.e_pipe),
        real!("lisper.beta", "deg", DEG, lisper.beta),
        real!("lisper.r_inner", "m", 1.0, lisper.r_inner),
        real!("lisper.r_outer", "m", 1.0, lisper.r_outer),
        real!("lisper.l_thick", "m", 1.0, lisper.l_thick),
        real!("lisper.l_base", "m", 1.0, lisper.l_base),
        real!("lisper.l_wall_initial", "m", 1.0, lisper.l_wall_initial),
        real!("lisper.h_base", "m", 1.0, lisper.h_base),
        real!("lisper.r2_external", "m", 1.0, lisper.r2_external),
        real!("lisper.d_bellow_wall", "m", 1.0, lisper.d_bellow_wall),
        count!("lisper.n_bellows", u32, lisper.n_bellows),
        real!("lisper.gamma", "deg", DEG, lisper.gamma),
        real!("lisper.l_equiv", "m", 1.0, lisper.l_equiv),
        real!("lisper.h2", "m", 1.0, lisper.h2),
        real!("lisper.a_feet", "m^2", 1.0, lisper.a_feet),
        real!("lisper.a_base", "m^2", 1.0, lisper.a_base),
        real!("lisper.r_base", "m", 1.0, lisper.r_base),
        real!("lisper.theta_initial", "deg", DEG, lisper.theta_initial),
        real!("lisper.p_max", "kPa", KPA, lisper.p_max),
        count!("scasper.n_bags", u32, scasper.n_bags),
        real!("scasper.bag_width", "m", 1.0, scasper.bag_width),
        real!("scasper.bag_length", "m", 1.0, scasper.bag_length),
        real!("scasper.r1", "m", 1.0, scasper.r1),
        real!("scasper.l_pipe", "m", 1.0, scasper.l_pipe),
        real!("scasper.d1", "m", 1.0, scasper.d1),
        real!("scasper.d2", "m", 1.0, scasper.d2),
        real!("scasper.poly_a2", "deg/unit^2", 1.0, scasper.poly.a2),
        real!("scasper.poly_a1", "deg/unit", 1.0, scasper.poly.a1),
        real!("scasper.poly_a0", "deg", 1.0, scasper.poly.a0),
        real!("scasper.p_max", "kPa", KPA, scasper.p_max),
        real!("arm.l1", "m", 1.0, arm.l1),
        real!("arm.l2", "m", 1.0, arm.l2),
        real!("arm.m1", "kg", 1.0, arm.m1),
        real!("arm.m2", "kg", 1.0, arm.m2),
        real!("arm.r_com1", "m", 1.0, arm.r_com1),
        real!("arm.r_com2", "m", 1.0, arm.r_com2),
        real!("arm.g", "m/s^2", 1.0, arm.g),
        real!("arm.elbow_min", "deg", DEG, arm.elbow_limits.lo),
        real!("arm.elbow_max", "deg", DEG, arm.elbow_limits.hi),
        real!("arm.shoulder_min", "deg", DEG, arm.shoulder_limits.lo),
        real!("arm.shoulder_max", "deg", DEG, arm.shoulder_limits.hi),
        real!("arm.elbow_offset", "deg", DEG, arm.elbow_offset),
        real!("arm.shoulder_offset", "deg", DEG, arm.shoulder_offset),
        real!("sim.root_abs_tol", "-", 1.0, sim.root.abs_tol),
        real!("sim.root_x_tol", "-", 1.0, sim.root.x_tol),
        count!("sim.root_max_iter", usize, sim.root.max_iter),
        count!("sim.quad_n", usize, sim.quad.n_initial),
        real!("sim.quad_rel_tol", "-", 1.0, sim.quad.rel_tol),
        count!("sim.quad_n_max", usize, sim.quad.n_max),
        real!("sim.dt", "s", 1.0, sim.dt),
        real!("sim.valve_tau", "s", 1.0, sim.valve_tau),
        real!("sim.valve_slew", "kPa/s", KPA, sim.valve_slew),
        real!("sim.imu_rate", "Hz", 1.0, sim.imu_rate),
        real!("sim.imu_noise", "deg", DEG, sim.imu_noise),
        count!("sim.seed", u64, sim.seed),
        real!("sim.damping_shoulder", "N*m*s/rad", 1.0, sim.damping_shoulder),
        real!("sim.damping_elbow", "N*m*s/rad", 1.0, sim.damping_elbow),
        Key {
            name: "sim.strips",
            unit: "bool",
            kind: Kind::Flag,
            get: |c| Value::Flag(c.sim.strips),
            set: |c, v| c.sim.strips = v.flag(),
        },
        real!("sim.strip_stiffness", "N*m/rad", 1.0, sim.strip_stiffness),
        real!("sim.strip_damping", "N*m*s/rad", 1.0, sim.strip_damping),
    ];
    v.extend(gains!("control.elbow", "N/rad", control.elbow));
    v.extend(gains!("control.shoulder", "N*m/rad", control.shoulder));
    v.extend(gains!("control.baseline_elbow", "Pa/rad", control.baseline_elbow));
    v.extend(gains!("control.baseline_shoulder", "Pa/rad", control.baseline_shoulder));
    v
}

fn parse_value(kind: Kind, raw: &str) -> Result<Value, String> {
    match kind {
        Kind::Real(factor) => {
            let x: f64 = raw.parse().map_err(|_| format!("`{raw}` is not a number"))?;
            if !x.is_finite() {
                return Err(format!("`{raw}` is not finite"));
            }
            Ok(Value::Num(x * factor))
        }
        Kind::Count => raw
            .parse::<u64>()
            .map(Value::Int)
            .map_err(|_| format!("`{raw}` is not a non-negative integer")),
        Kind::Flag => match raw {
            "true" | "1" | "yes" | "on" => Ok(Value::Flag(true)),
            "false" | "0" | "no" | "off" => Ok(Value::Flag(false)),
            _ => Err(format!("`{raw}` is not a boolean")),
        },
    }
}

impl ModelConfig {
    /// Applies entries on top of `self`. Keys under `skip_prefix` (for
    /// example `scenario.`) are left for another consumer.
    pub fn apply_entries(&mut self, entries: &[Entry], skip_prefix: Option<&str>) -> Result<(), ConfigError> {
        let table = keys();
        for e in entries {
            if skip_prefix.is_some_and(|p| e.key.starts_with(p)) {
                continue;
            }
            let Some(k) = table.iter().find(|k| k.name == e.key) else {
                return Err(ConfigError::UnknownKey { line: e.line, key: e.key.clone() });
            };
            let value = parse_value(k.kind, &e.value).map_err(|message| ConfigError::BadValue {
                line: e.line,
                key: e.key.clone(),
                message,
            })?;
            (k.set)(self, value);
        }
        Ok(())
    }

    /// Parses a config document over the defaults and validates the result.
    pub fn from_config_str(text: &str) -> Result<Self, ConfigError> {
        let entries = parse_entries(text)?;
        let mut cfg = Self::default();
        cfg.apply_entries(&entries, None)?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn check(&self) -> Result<(), ConfigError> {
        let v = validate(self);
        if v.is_empty() {
            Ok(())
        } else {
            Err(ConfigError::Invalid(v))
        }
    }

    /// Serialises every key. `from_config_str(to_config_string())` gives back
    /// the same configuration up to the degree/kPa conversions.
    pub fn to_config_string(&self) -> String {
        let mut out = String::new();
        let mut section = "";
        for k in keys() {
            let sec = k.name.split('.').next().unwrap_or("");
            if sec != section {
                if !section.is_empty() {
                    out.push('\n');
                }
                section = sec;
            }
            let value = match ((k.get)(self), k.kind) {
                (Value::Num(x), Kind::Real(factor)) => format!("{}", x / factor),
                (Value::Int(n), _) => n.to_string(),
                (Value::Flag(b), _) => b.to_string(),
                (v, _) => format!("{}", v.num()),
            };
            let _ = writeln!(out, "{} = {}  # {}", k.name, value, k.unit);
        }
        out
    }
}

/// Reads and validates a config file. Keys under `scenario.` are ignored so
/// scenario files can be loaded as configs too.
pub fn load_config(path: &Path) -> Result<ModelConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
    let entries = parse_entries(&text)?;
    let mut cfg = ModelConfig::default();
    cfg.apply_entries(&entries, Some("scenario."))?;
    cfg.check()?;
    Ok(cfg)
}

/// Lists every violated invariant. An empty list means the config is usable.
pub fn validate(cfg: &ModelConfig) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut rule = |ok: bool, field: &str, text: &str| {
        if !ok {
            out.push(Violation { field: field.to_string(), rule: text.to_string() });
        }
    };
    let pos = |x: f64| x.is_finite() && x > 0.0;
    let nonneg = |x: f64| x.is_finite() && x >= 0.0;

    let m = &cfg.material;
    rule(pos(m.e_silicone), "material.e_silicone", "must be > 0");
    rule(pos(m.e_pipe), "material.e_pipe", "must be > 0");
    rule(m.poisson > 0.0 && m.poisson <= 0.5, "material.poisson", "must satisfy 0 < poisson <= 0.5");

    let l = &cfg.lisper;
    for (name, x) in [
        ("lisper.r_inner", l.r_inner),
        ("lisper.r_outer", l.r_outer),
        ("lisper.l_thick", l.l_thick),
        ("lisper.l_base", l.l_base),
        ("lisper.l_wall_initial", l.l_wall_initial),
        ("lisper.h_base", l.h_base),
        ("lisper.r2_external", l.r2_external),
        ("lisper.d_bellow_wall", l.d_bellow_wall),
        ("lisper.l_equiv", l.l_equiv),
        ("lisper.h2", l.h2),
        ("lisper.a_feet", l.a_feet),
        ("lisper.a_base", l.a_base),
        ("lisper.r_base", l.r_base),
        ("lisper.p_max", l.p_max),
    ] {
        rule(pos(x), name, "must be > 0");
    }
    rule(l.r_inner < l.r_outer, "lisper.r_inner/lisper.r_outer", "r_inner must be < r_outer");
    rule(l.beta > 0.0 && l.beta < PI / 2.0, "lisper.beta", "must satisfy 0 < beta < 90 deg");
    rule(l.n_bellows >= 1, "lisper.n_bellows", "must be >= 1");
    rule(l.gamma.is_finite(), "lisper.gamma", "must be finite");
    rule(l.theta_initial.is_finite(), "lisper.theta_initial", "must be finite");
    rule(
        l.l_thick * l.p_max / (m.e_silicone * m.poisson) < 1.0,
        "lisper.l_thick",
        "strain term l_thick*p_max/(E*poisson) must stay below 1",
    );

    let s = &cfg.scasper;
    rule(s.n_bags >= 2 && s.n_bags.is_multiple_of(2), "scasper.n_bags", "n_bags must be even and >= 2");
    for (name, x) in [
        ("scasper.bag_width", s.bag_width),
        ("scasper.bag_length", s.bag_length),
        ("scasper.r1", s.r1),
        ("scasper.l_pipe", s.l_pipe),
        ("scasper.d1", s.d1),
        ("scasper.p_max", s.p_max),
    ] {
        rule(pos(x), name, "must be > 0");
    }
    rule(s.d2 > s.d1, "scasper.d1/scasper.d2", "d2 must be > d1");
    rule(
        s.poly.a2.is_finite() && s.poly.a1.is_finite() && s.poly.a0.is_finite(),
        "scasper.poly",
        "coefficients must be finite",
    );

    let a = &cfg.arm;
    for (name, x) in [
        ("arm.l1", a.l1),
        ("arm.l2", a.l2),
        ("arm.m1", a.m1),
        ("arm.m2", a.m2),
        ("arm.r_com1", a.r_com1),
        ("arm.r_com2", a.r_com2),
    ] {
        rule(pos(x), name, "must be > 0");
    }
    rule(nonneg(a.g), "arm.g", "must be >= 0");
    rule(a.r_com1 <= a.l1, "arm.r_com1", "must be <= l1");
    rule(a.r_com2 <= a.l2, "arm.r_com2", "must be <= l2");
    rule(a.elbow_limits.lo <= a.elbow_limits.hi, "arm.elbow_min/arm.elbow_max", "interval must be non-empty");
    rule(
        a.shoulder_limits.lo <= a.shoulder_limits.hi,
        "arm.shoulder_min/arm.shoulder_max",
        "interval must be non-empty",
    );
    rule(a.elbow_offset.is_finite(), "arm.elbow_offset", "must be finite");
    rule(a.shoulder_offset.is_finite(), "arm.shoulder_offset", "must be finite");

    let sim = &cfg.sim;
    rule(pos(sim.root.abs_tol), "sim.root_abs_tol", "must be > 0");
    rule(pos(sim.root.x_tol), "sim.root_x_tol", "must be > 0");
    rule(sim.root.max_iter >= 1, "sim.root_max_iter", "must be >= 1");
    rule(
        sim.quad.n_initial >= 2 && sim.quad.n_initial.is_multiple_of(2),
        "sim.quad_n",
        "must be even and >= 2",
    );
    rule(sim.quad.n_max >= sim.quad.n_initial, "sim.quad_n_max", "must be >= sim.quad_n");
    rule(pos(sim.quad.rel_tol), "sim.quad_rel_tol", "must be > 0");
    rule(pos(sim.dt), "sim.dt", "must be > 0");
    rule(pos(sim.valve_tau), "sim.valve_tau", "must be > 0");
    rule(pos(sim.valve_slew), "sim.valve_slew", "must be > 0");
    rule(pos(sim.imu_rate), "sim.imu_rate", "must be > 0");
    rule(nonneg(sim.imu_noise), "sim.imu_noise", "must be >= 0");
    if pos(sim.dt) && pos(sim.imu_rate) {
        let ratio = 1.0 / (sim.imu_rate * sim.dt);
        rule(
            ratio >= 1.0 - 1e-9 && (ratio - ratio.round()).abs() <= 1e-6 * ratio,
            "sim.dt",
            "must divide the IMU sample interval",
        );
    }
    rule(nonneg(sim.damping_shoulder), "sim.damping_shoulder", "must be >= 0");
    rule(nonneg(sim.damping_elbow), "sim.damping_elbow", "must be >= 0");
    rule(nonneg(sim.strip_stiffness), "sim.strip_stiffness", "must be >= 0");
    rule(nonneg(sim.strip_damping), "sim.strip_damping", "must be >= 0");

    for (name, g) in [
        ("control.elbow", &cfg.control.elbow),
        ("control.shoulder", &cfg.control.shoulder),
        ("control.baseline_elbow", &cfg.control.baseline_elbow),
        ("control.baseline_shoulder", &cfg.control.baseline_shoulder),
    ] {
        rule(nonneg(g.kp) && nonneg(g.ki) && nonneg(g.kd), name, "gains must be >= 0");
        rule(pos(g.integral_limit), name, "integral_limit must be > 0");
    }
    out
}
