//! Controllers, the scenario runner and tracking metrics.
//!
//! The position controller combines a zero-load feedforward pressure with a
//! force correction: a PID turns the angle error into a desired extra force
//! (elbow, N) or torque (shoulder, N·m), the forward model estimates what
//! the actuator exerts now, and the inverse model turns the sum back into a
//! pressure increment. Gravity compensation is open loop. The baseline PID
//! maps the angle error straight to pressure.

use std::f64::consts::PI;

use thiserror::Error;

use crate::config::ModelConfig;
use crate::lisper::LisperError;
use crate::plant::{gravity_torque, measure, ImuModel, Plant, PlantError, PlantState};
use crate::scasper::{self, ScasperError};
use crate::scenario::{Mode, Scenario, ScenarioError, Trajectory};

#[derive(Debug, Error)]
pub enum ControlError {
    #[error(transparent)]
    Lisper(#[from] LisperError),
    #[error(transparent)]
    Scasper(#[from] ScasperError),
    #[error(transparent)]
    Plant(#[from] PlantError),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("set and real traces differ in length ({set} vs {real})")]
    GridMismatch { set: usize, real: usize },
    #[error("need at least two full periods ({needed} samples), got {got}")]
    TooShort { needed: usize, got: usize },
    #[error("period must span at least two samples")]
    BadPeriod,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Joint {
    Shoulder,
    Elbow,
}

impl Joint {
    pub fn name(self) -> &'static str {
        match self {
            Joint::Shoulder => "shoulder",
            Joint::Elbow => "elbow",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PidGains {
    pub kp: f64,
    pub ki: f64,
    pub kd: f64,
    /// Bound on |ki·∫e|.
    pub integral_limit: f64,
}

impl PidGains {
    pub const ZERO: PidGains = PidGains { kp: 0.0, ki: 0.0, kd: 0.0, integral_limit: 1.0 };
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PidState {
    /// Accumulated ∫e dt, already clamped.
    pub integral: f64,
    /// Last measurement, for the derivative term.
    pub last: Option<f64>,
}

/// One PID update. The derivative acts on `measurement` rather than on the
/// error, so set-point jumps do not kick the output.
pub fn pid_step(gains: &PidGains, error: f64, measurement: f64, state: PidState, dt: f64) -> (f64, PidState) {
    let mut integral = state.integral + error * dt;
    if gains.ki > 0.0 {
        let bound = gains.integral_limit / gains.ki;
        integral = integral.clamp(-bound, bound);
    }
    let derivative = state.last.map_or(0.0, |prev| -(measurement - prev) / dt);
    let out = gains.kp * error + gains.ki * integral + gains.kd * derivative;
    (out, PidState { integral, last: Some(measurement) })
}

/// Pressure command plus whether an inverse query had to saturate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Command {
    pub p_cmd: f64,
    pub saturated: bool,
}

/// Per-joint forward and inverse actuator models in joint coordinates.
/// Elbow effort is the LISPER output force (N), shoulder effort the SCASPER
/// net torque (N·m).
#[derive(Debug, Clone)]
pub struct JointModels {
    plant: Plant,
}

impl JointModels {
    pub fn new(cfg: &ModelConfig) -> Result<Self, ControlError> {
        Ok(Self { plant: Plant::new(cfg)? })
    }

    pub fn from_plant(plant: &Plant) -> Self {
        Self { plant: plant.clone() }
    }

    pub fn cfg(&self) -> &ModelConfig {
        &self.plant.cfg
    }

    pub fn p_max(&self, joint: Joint) -> f64 {
        match joint {
            Joint::Shoulder => self.cfg().scasper.p_max,
            Joint::Elbow => self.cfg().lisper.p_max,
        }
    }

    pub fn forward(&self, joint: Joint, p: f64, theta: f64) -> Result<f64, ControlError> {
        let cfg = self.cfg();
        Ok(match joint {
            Joint::Shoulder => self.plant.shoulder_torque(p, theta),
            Joint::Elbow => {
                let bend = cfg.arm.elbow_bend(theta, &cfg.lisper);
                self.plant.lisper().output_force(p, bend)?.f_output
            }
        })
    }

    /// Pressure giving `effort` at `theta`, saturating at the bracket ends.
    pub fn inverse(&self, joint: Joint, theta: f64, effort: f64) -> Result<(f64, bool), ControlError> {
        let cfg = self.cfg();
        match joint {
            Joint::Shoulder => {
                let ext = cfg.arm.shoulder_extension(theta);
                match scasper::inverse_pressure_scasper(&cfg.scasper, &cfg.material, ext, effort) {
                    Ok(p) => Ok((p, false)),
                    Err(ScasperError::NegativePressure { .. }) => Ok((0.0, true)),
                    Err(e) => Err(e.into()),
                }
            }
            Joint::Elbow => {
                let bend = cfg.arm.elbow_bend(theta, &cfg.lisper);
                Ok(self.plant.lisper().inverse_pressure_saturating(bend, effort)?)
            }
        }
    }

    /// Strict inverse; unreachable efforts are errors.
    pub fn inverse_strict(&self, joint: Joint, theta: f64, effort: f64) -> Result<f64, ControlError> {
        let cfg = self.cfg();
        Ok(match joint {
            Joint::Shoulder => {
                scasper::inverse_pressure_scasper(&cfg.scasper, &cfg.material, cfg.arm.shoulder_extension(theta), effort)?
            }
            Joint::Elbow => {
                let bend = cfg.arm.elbow_bend(theta, &cfg.lisper);
                self.plant.lisper().inverse_pressure(bend, effort)?
            }
        })
    }

    /// Joint torque to actuator effort.
    pub fn effort_from_torque(&self, joint: Joint, torque: f64) -> f64 {
        match joint {
            Joint::Shoulder => torque,
            Joint::Elbow => torque / self.cfg().lisper.l_equiv,
        }
    }
}

/// One position-controller update for `joint`; angles in rad.
///
/// `p_cmd = clamp(P1 + (P2 − p_current), 0, p_max)` where P1 is the zero-load
/// pressure at the target and P2 the pressure that would add the PID effort
/// to the currently estimated effort at the measured angle.
#[allow(clippy::too_many_arguments)]
pub fn position_controller_step(
    models: &JointModels,
    gains: &PidGains,
    joint: Joint,
    theta_desired: f64,
    theta_real: f64,
    p_current: f64,
    pid: PidState,
    dt: f64,
) -> Result<(Command, PidState), ControlError> {
    let (p1, sat1) = models.inverse(joint, theta_desired, 0.0)?;
    let (f_desired, pid) = pid_step(gains, theta_desired - theta_real, theta_real, pid, dt);
    let (p2, sat2) = if f_desired == 0.0 {
        // inverse(forward(p)) = p; skip the round trip
        (p_current, false)
    } else {
        let f_est = models.forward(joint, p_current, theta_real)?;
        models.inverse(joint, theta_real, f_est + f_desired)?
    };
    let p_cmd = (p1 + p2 - p_current).clamp(0.0, models.p_max(joint));
    Ok((Command { p_cmd, saturated: sat1 || sat2 }, pid))
}

/// Open-loop gravity holding pressures `(shoulder, elbow)` at the measured
/// posture. Unreachable torques are errors.
pub fn gravity_comp_step(models: &JointModels, theta_shoulder: f64, theta_elbow: f64) -> Result<(f64, f64), ControlError> {
    let (ts, te) = gravity_torque(&models.cfg().arm, theta_shoulder, theta_elbow);
    let ps = models.inverse_strict(Joint::Shoulder, theta_shoulder, ts)?;
    let pe = models.inverse_strict(Joint::Elbow, theta_elbow, models.effort_from_torque(Joint::Elbow, te))?;
    Ok((ps.min(models.p_max(Joint::Shoulder)), pe.min(models.p_max(Joint::Elbow))))
}

/// Saturating variant used inside the simulation loop.
pub fn gravity_comp_saturating(models: &JointModels, theta_shoulder: f64, theta_elbow: f64) -> Result<(Command, Command), ControlError> {
    let (ts, te) = gravity_torque(&models.cfg().arm, theta_shoulder, theta_elbow);
    let one = |joint, theta, torque| -> Result<Command, ControlError> {
        let (p, sat) = models.inverse(joint, theta, models.effort_from_torque(joint, torque))?;
        let p_max = models.p_max(joint);
        Ok(Command { p_cmd: p.min(p_max), saturated: sat || p > p_max })
    };
    Ok((one(Joint::Shoulder, theta_shoulder, ts)?, one(Joint::Elbow, theta_elbow, te)?))
}

/// Uniformly sampled record of one joint. Angles in rad, pressures in Pa,
/// torque in N·m (actuator torque at the joint).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Timeseries {
    pub dt: f64,
    pub t: Vec<f64>,
    pub set_angle: Vec<f64>,
    pub real_angle: Vec<f64>,
    pub p_cmd: Vec<f64>,
    pub p_actual: Vec<f64>,
    pub torque: Vec<f64>,
}

impl Timeseries {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// Tracking metrics against a sine of `period` seconds.
    pub fn metrics(&self, period: f64) -> Result<BandwidthMetrics, ControlError> {
        bandwidth_metrics(self.dt, &self.set_angle, &self.real_angle, period)
    }

    fn push(&mut self, t: f64, set: f64, real: f64, cmd: f64, p: f64, torque: f64) {
        self.t.push(t);
        self.set_angle.push(set);
        self.real_angle.push(real);
        self.p_cmd.push(cmd);
        self.p_actual.push(p);
        self.torque.push(torque);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioRun {
    pub shoulder: Timeseries,
    pub elbow: Timeseries,
    /// Controller updates in which an inverse query saturated.
    pub saturated_updates: usize,
}

/// Simulates `scenario`. Controllers run at the IMU rate and hold their
/// command between samples; the plant runs at `sim.dt`. Records are taken
/// at each controller update, before the command is applied, and carry the
/// true (noise-free) angle. Output length is `round(duration · imu_rate)`.
pub fn run_scenario(cfg: &ModelConfig, scenario: &Scenario) -> Result<ScenarioRun, ControlError> {
    scenario.check()?;
    let plant = Plant::new(cfg)?;
    run_on_plant(&plant, &plant.cfg.control.elbow, &plant.cfg.control.shoulder, scenario)
}

fn run_on_plant(
    plant: &Plant,
    elbow_gains: &crate::control::PidGains,
    shoulder_gains: &PidGains,
    scenario: &Scenario,
) -> Result<ScenarioRun, ControlError> {
    let cfg = plant.cfg;
    let models = JointModels::from_plant(plant);
    let imu = ImuModel::from_config(&cfg);
    let mut rng = imu.rng();
    let rate = cfg.sim.imu_rate;
    let ctrl_dt = 1.0 / rate;
    let substeps = ((ctrl_dt / cfg.sim.dt).round() as usize).max(1);
    let n = (scenario.duration * rate).round() as usize;
    let limits = (cfg.arm.shoulder_limits, cfg.arm.elbow_limits);

    let mut state = PlantState::at(limits.0.clamp(scenario.initial_shoulder), limits.1.clamp(scenario.initial_elbow));
    if scenario.prefill {
        let (s, e) = gravity_comp_saturating(&models, state.theta_shoulder, state.theta_elbow)?;
        state.p_shoulder = s.p_cmd;
        state.p_elbow = e.p_cmd;
    }

    let mut run = ScenarioRun {
        shoulder: Timeseries { dt: ctrl_dt, ..Default::default() },
        elbow: Timeseries { dt: ctrl_dt, ..Default::default() },
        saturated_updates: 0,
    };
    let (mut pid_s, mut pid_e) = (PidState::default(), PidState::default());
    for k in 0..n {
        let t = k as f64 * ctrl_dt;
        let reading = measure(&state, &imu, &mut rng);
        let (ms, me) = (reading.shoulder_deg.to_radians(), reading.elbow_deg.to_radians());
        let set_s = limits.0.clamp(scenario.shoulder.at(t));
        let set_e = limits.1.clamp(scenario.elbow.at(t));
        let (cs, ce) = match scenario.mode {
            Mode::Position => {
                let (cs, ps) = position_controller_step(&models, shoulder_gains, Joint::Shoulder, set_s, ms, state.p_shoulder, pid_s, ctrl_dt)?;
                let (ce, pe) = position_controller_step(&models, elbow_gains, Joint::Elbow, set_e, me, state.p_elbow, pid_e, ctrl_dt)?;
                pid_s = ps;
                pid_e = pe;
                (cs, ce)
            }
            Mode::Gravity => gravity_comp_saturating(&models, ms, me)?,
            Mode::Pid => {
                let (us, ps) = pid_step(&cfg.control.baseline_shoulder, set_s - ms, ms, pid_s, ctrl_dt);
                let (ue, pe) = pid_step(&cfg.control.baseline_elbow, set_e - me, me, pid_e, ctrl_dt);
                pid_s = ps;
                pid_e = pe;
                let clamp = |u: f64, joint| Command { p_cmd: u.clamp(0.0, models.p_max(joint)), saturated: false };
                (clamp(us, Joint::Shoulder), clamp(ue, Joint::Elbow))
            }
        };
        run.saturated_updates += usize::from(cs.saturated || ce.saturated);
        let torque_s = plant.shoulder_torque(state.p_shoulder, state.theta_shoulder);
        let torque_e = plant.elbow_torque(state.p_elbow, state.theta_elbow)?;
        run.shoulder.push(t, set_s, state.theta_shoulder, cs.p_cmd, state.p_shoulder, torque_s);
        run.elbow.push(t, set_e, state.theta_elbow, ce.p_cmd, state.p_elbow, torque_e);
        for _ in 0..substeps {
            state = plant.step(&state, (cs.p_cmd, ce.p_cmd), cfg.sim.dt)?;
        }
    }
    Ok(run)
}

/// Table-style tracking metrics. Angles in degrees, time in seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandwidthMetrics {
    pub range_of_motion: f64,
    pub mean_time_error: f64,
    pub max_angular_error: f64,
}

/// Metrics for a set/real pair sampled every `dt` under a sine of
/// `period` seconds. Angles in rad.
///
/// * range of motion: max − min of `real` over the whole trace.
/// * mean time error: for each full cycle, the lag in [0, period/2] that
///   maximises the normalised cross-correlation of the mean-removed set
///   window against the shifted real window; averaged over cycles. The
///   first cycle is skipped when later ones are available.
/// * max angular error: max |set − real| after the first cycle.
pub fn bandwidth_metrics(dt: f64, set: &[f64], real: &[f64], period: f64) -> Result<BandwidthMetrics, ControlError> {
    if set.len() != real.len() {
        return Err(ControlError::GridMismatch { set: set.len(), real: real.len() });
    }
    let np = (period / dt).round() as usize;
    if np < 2 {
        return Err(ControlError::BadPeriod);
    }
    let n = set.len();
    if n < 2 * np {
        return Err(ControlError::TooShort { needed: 2 * np, got: n });
    }
    let max_lag = np / 2;

    let (lo, hi) = real.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    let max_err = set[np..].iter().zip(&real[np..]).map(|(s, r)| (s - r).abs()).fold(0.0, f64::max);

    let cycles: Vec<usize> = (0..).map(|c| c * np).take_while(|&s0| s0 + np + max_lag <= n).collect();
    let used = if cycles.len() > 1 { &cycles[1..] } else { &cycles[..] };
    let lags: Vec<f64> = used.iter().map(|&s0| best_lag(&set[s0..s0 + np], &real[s0..s0 + np + max_lag], max_lag) as f64 * dt).collect();
    let mean_time_error = lags.iter().sum::<f64>() / lags.len() as f64;

    Ok(BandwidthMetrics {
        range_of_motion: (hi - lo).to_degrees(),
        mean_time_error,
        max_angular_error: max_err.to_degrees(),
    })
}

fn best_lag(set: &[f64], real: &[f64], max_lag: usize) -> usize {
    let m = set.len();
    let centred = |w: &[f64]| {
        let mean = w.iter().sum::<f64>() / w.len() as f64;
        w.iter().map(|x| x - mean).collect::<Vec<_>>()
    };
    let a = centred(set);
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut best = (0, f64::NEG_INFINITY);
    for lag in 0..=max_lag {
        let b = centred(&real[lag..lag + m]);
        let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
        let dot: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
        let score = if na > 0.0 && nb > 0.0 { dot / (na * nb) } else { 0.0 };
        // strict > keeps the smallest lag on ties
        if score > best.1 + 1e-12 {
            best = (lag, score);
        }
    }
    best.0
}

/// Bench run of one actuator on its own: no gravity, the other joint locked
/// at its offset and the tested joint free over a wide range.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRun {
    pub frequency: f64,
    pub metrics: BandwidthMetrics,
    pub trace: Timeseries,
}

/// Set-angle sweep of the bench runs, actuator angle in rad.
pub const BENCH_SWEEP: (f64, f64) = (0.0, 85.0 * PI / 180.0);

/// Sine tracking on the bench at `frequency` for `cycles` periods.
///
/// The elbow runs on zero-load feedforward alone; the shoulder uses the
/// position controller with the configured gains.
pub fn bench_run(cfg: &ModelConfig, joint: Joint, frequency: f64, cycles: f64) -> Result<BenchRun, ControlError> {
    if !(frequency > 0.0 && frequency.is_finite()) {
        return Err(ScenarioError::Invalid(format!("frequency must be > 0, got {frequency}")).into());
    }
    let mut bench = *cfg;
    bench.arm.g = 0.0;
    let lock = |offset: f64| crate::config::Interval { lo: offset, hi: offset };
    let free = |offset: f64| crate::config::Interval { lo: offset - 0.2, hi: offset + PI * 0.75 };
    let (so, eo) = (bench.arm.shoulder_offset, bench.arm.elbow_offset);
    match joint {
        Joint::Elbow => {
            bench.arm.shoulder_limits = lock(so);
            bench.arm.elbow_limits = free(eo);
        }
        Joint::Shoulder => {
            bench.arm.shoulder_limits = free(so);
            bench.arm.elbow_limits = lock(eo);
        }
    }
    let sweep = |offset: f64| Trajectory::sweep(offset + BENCH_SWEEP.0, offset + BENCH_SWEEP.1, frequency);
    let (shoulder, elbow) = match joint {
        Joint::Elbow => (Trajectory::Constant(so), sweep(eo)),
        Joint::Shoulder => (sweep(so), Trajectory::Constant(eo)),
    };
    let scenario = Scenario {
        mode: Mode::Position,
        duration: cycles / frequency,
        prefill: false,
        initial_shoulder: so,
        initial_elbow: eo,
        shoulder,
        elbow,
    };
    scenario.check()?;
    let plant = Plant::new(&bench)?;
    let run = run_on_plant(&plant, &PidGains::ZERO, &bench.control.shoulder, &scenario)?;
    let trace = match joint {
        Joint::Elbow => run.elbow,
        Joint::Shoulder => run.shoulder,
    };
    let metrics = trace.metrics(1.0 / frequency)?;
    Ok(BenchRun { frequency, metrics, trace })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pid_zero_error_keeps_state() {
        let g = PidGains { kp: 3.0, ki: 2.0, kd: 1.0, integral_limit: 10.0 };
        let s = PidState { integral: 0.0, last: Some(0.4) };
        let (u, n) = pid_step(&g, 0.0, 0.4, s, 0.01);
        assert_eq!(u, 0.0);
        assert_eq!(n, s);
    }

    #[test]
    fn pid_proportional_only() {
        let g = PidGains { kp: 7.0, ki: 0.0, kd: 0.0, integral_limit: 1.0 };
        assert_eq!(pid_step(&g, 2.0, 0.0, PidState::default(), 0.01).0, 14.0);
    }

    #[test]
    fn pid_integral_ramps_then_clamps() {
        let g = PidGains { kp: 0.0, ki: 4.0, kd: 0.0, integral_limit: 2.0 };
        let (e, dt) = (0.5, 0.01);
        let mut s = PidState::default();
        for k in 1..=200 {
            let (u, n) = pid_step(&g, e, 0.0, s, dt);
            let ramp = g.ki * e * dt * k as f64;
            assert!((u - ramp.min(g.integral_limit)).abs() < 1e-12, "step {k}");
            s = n;
        }
        assert_eq!(pid_step(&g, e, 0.0, s, dt).0, 2.0);
    }

    #[test]
    fn pid_derivative_on_measurement() {
        let g = PidGains { kp: 0.0, ki: 0.0, kd: 2.0, integral_limit: 1.0 };
        let s = PidState { integral: 0.0, last: Some(1.0) };
        let (u, _) = pid_step(&g, 5.0, 1.1, s, 0.1);
        assert!((u + 2.0).abs() < 1e-12);
    }

    #[test]
    fn feedforward_fixed_point() {
        let cfg = ModelConfig::default();
        let models = JointModels::new(&cfg).unwrap();
        for (joint, target) in [(Joint::Elbow, 10f64.to_radians()), (Joint::Shoulder, 40f64.to_radians())] {
            let (p1, _) = models.inverse(joint, target, 0.0).unwrap();
            let (cmd, _) = position_controller_step(&models, &PidGains::ZERO, joint, target, target, p1, PidState::default(), 0.01).unwrap();
            assert_eq!(cmd.p_cmd, p1);
            let (cmd, _) = position_controller_step(&models, &PidGains::ZERO, joint, target, target + 0.1, 0.0, PidState::default(), 0.01).unwrap();
            assert_eq!(cmd.p_cmd, p1, "zero gains give pure feedforward");
        }
    }

    #[test]
    fn commands_stay_in_range() {
        let cfg = ModelConfig::default();
        let models = JointModels::new(&cfg).unwrap();
        let g = PidGains { kp: 1e4, ki: 0.0, kd: 0.0, integral_limit: 1.0 };
        for joint in [Joint::Elbow, Joint::Shoulder] {
            for (d, r) in [(0.5, -0.5), (-0.5, 0.5)] {
                let (c, _) = position_controller_step(&models, &g, joint, d, r, 50e3, PidState::default(), 0.01).unwrap();
                assert!((0.0..=models.p_max(joint)).contains(&c.p_cmd));
            }
        }
    }

    #[test]
    fn gravity_comp_monotone() {
        let cfg = ModelConfig::default();
        let models = JointModels::new(&cfg).unwrap();
        // shoulder and forearm vertical: no gravity load
        let (qs, qe) = (PI / 2.0, 0.0);
        let (ps, pe) = gravity_comp_step(&models, qs, qe).unwrap();
        let ps0 = models.inverse(Joint::Shoulder, qs, 0.0).unwrap().0;
        assert!((ps - ps0).abs() < 1e-9 * ps0);
        let pe0 = models.inverse(Joint::Elbow, qe, 0.0).unwrap().0;
        assert!((pe - pe0).abs() < 1e-6 * pe0.max(1.0));

        let (qs, qe) = (cfg.arm.shoulder_limits.lo, 0.0);
        let (ps, pe) = gravity_comp_step(&models, qs, qe).unwrap();
        assert!(ps > models.inverse(Joint::Shoulder, qs, 0.0).unwrap().0);
        assert!(pe > models.inverse(Joint::Elbow, qe, 0.0).unwrap().0);
    }

    fn sine(n: usize, dt: f64, period: f64, delay: f64) -> Vec<f64> {
        (0..n).map(|i| ((i as f64 * dt - delay).max(0.0) * 2.0 * PI / period).sin()).collect()
    }

    #[test]
    fn metrics_identity_and_delay() {
        let dt = 0.01;
        let set = sine(800, dt, 2.0, 0.0);
        let id = bandwidth_metrics(dt, &set, &set, 2.0).unwrap();
        assert_eq!(id.mean_time_error, 0.0);
        assert_eq!(id.max_angular_error, 0.0);
        assert!((id.range_of_motion - 2f64.to_degrees()).abs() < 1e-3);

        let real = sine(800, dt, 2.0, 0.3);
        let m = bandwidth_metrics(dt, &set, &real, 2.0).unwrap();
        assert!((m.mean_time_error - 0.3).abs() <= dt + 1e-12, "{}", m.mean_time_error);
    }

    #[test]
    fn metrics_offset_and_shift_invariance() {
        let dt = 0.01;
        let set = sine(600, dt, 1.0, 0.0);
        let real = sine(600, dt, 1.0, 0.17);
        let base = bandwidth_metrics(dt, &set, &real, 1.0).unwrap();
        let shift = |v: &[f64]| v.iter().map(|x| x + 0.7).collect::<Vec<_>>();
        let moved = bandwidth_metrics(dt, &shift(&set), &shift(&real), 1.0).unwrap();
        assert!((base.mean_time_error - moved.mean_time_error).abs() < 1e-12);
        assert!((base.max_angular_error - moved.max_angular_error).abs() < 1e-9);
        assert!((base.range_of_motion - moved.range_of_motion).abs() < 1e-9);
    }

    #[test]
    fn metrics_errors() {
        assert!(matches!(bandwidth_metrics(0.01, &[0.0; 10], &[0.0; 11], 0.02), Err(ControlError::GridMismatch { .. })));
        assert!(matches!(bandwidth_metrics(0.01, &[0.0; 10], &[0.0; 10], 1.0), Err(ControlError::TooShort { .. })));
    }
}
