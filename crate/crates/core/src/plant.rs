//! Two-link dummy arm driven by the two actuators.
//!
//! The shoulder angle is measured from the horizontal and the elbow angle
//! relative to the upper arm. Links are point masses at their centres of
//! mass. The quasi-static actuator models supply the joint torques inside a
//! dynamic step; pressures lag their commands through a first-order valve.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

use crate::config::{ArmParams, Interval, ModelConfig};
use crate::lisper::{LisperError, LisperModel};
use crate::numerics::SolverSettings;
use crate::scasper;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlantError {
    #[error("non-finite {quantity} ({value}) at t = {t} s")]
    NonFinite { quantity: &'static str, value: f64, t: f64 },
    #[error("time step must be positive, got {0}")]
    BadStep(f64),
    #[error("elbow actuator: {0}")]
    Lisper(#[from] LisperError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlantState {
    pub theta_shoulder: f64,
    pub theta_elbow: f64,
    pub omega_shoulder: f64,
    pub omega_elbow: f64,
    pub p_shoulder: f64,
    pub p_elbow: f64,
    pub t: f64,
}

impl PlantState {
    /// At rest with empty chambers.
    pub fn at(theta_shoulder: f64, theta_elbow: f64) -> Self {
        Self { theta_shoulder, theta_elbow, omega_shoulder: 0.0, omega_elbow: 0.0, p_shoulder: 0.0, p_elbow: 0.0, t: 0.0 }
    }
}

/// First-order pressure lag with a slew limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValveModel {
    pub tau_valve: f64,
    pub slew_max: f64,
    pub p_max: f64,
}

impl ValveModel {
    pub fn step(&self, p: f64, p_cmd: f64, dt: f64) -> f64 {
        let rate = ((p_cmd - p) / self.tau_valve).clamp(-self.slew_max, self.slew_max);
        (p + dt * rate).clamp(0.0, self.p_max)
    }
}

/// Angle sensor. `noise_std` is in degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImuModel {
    pub sample_rate: f64,
    pub noise_std: f64,
    pub seed: u64,
}

impl ImuModel {
    pub fn from_config(cfg: &ModelConfig) -> Self {
        Self { sample_rate: cfg.sim.imu_rate, noise_std: cfg.sim.imu_noise.to_degrees(), seed: cfg.sim.seed }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        rand::SeedableRng::seed_from_u64(self.seed)
    }
}

/// Angle readings in degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reading {
    pub shoulder_deg: f64,
    pub elbow_deg: f64,
}

/// Samples both IMUs. The shoulder draw always precedes the elbow draw.
pub fn measure<R: Rng>(state: &PlantState, imu: &ImuModel, rng: &mut R) -> Reading {
    let mut noisy = |angle: f64| {
        let deg = angle.to_degrees();
        if imu.noise_std > 0.0 {
            // std > 0 and finite, so construction cannot fail
            deg + Normal::new(0.0, imu.noise_std).map(|n| n.sample(rng)).unwrap_or(0.0)
        } else {
            deg
        }
    };
    let shoulder_deg = noisy(state.theta_shoulder);
    let elbow_deg = noisy(state.theta_elbow);
    Reading { shoulder_deg, elbow_deg }
}

/// Joint torques needed to hold the posture against gravity.
pub fn gravity_torque(arm: &ArmParams, theta_shoulder: f64, theta_elbow: f64) -> (f64, f64) {
    let c1 = theta_shoulder.cos();
    let c12 = (theta_shoulder + theta_elbow).cos();
    let elbow = arm.m2 * arm.g * arm.r_com2 * c12;
    let shoulder = arm.m1 * arm.g * arm.r_com1 * c1 + arm.m2 * arm.g * arm.l1 * c1 + elbow;
    (shoulder, elbow)
}

/// Gravitational potential energy, zero with both links horizontal.
pub fn potential_energy(arm: &ArmParams, theta_shoulder: f64, theta_elbow: f64) -> f64 {
    let s1 = theta_shoulder.sin();
    let s12 = (theta_shoulder + theta_elbow).sin();
    arm.g * (arm.m1 * arm.r_com1 * s1 + arm.m2 * (arm.l1 * s1 + arm.r_com2 * s12))
}

pub fn forward_kinematics(arm: &ArmParams, theta_shoulder: f64, theta_elbow: f64) -> (f64, f64) {
    let q12 = theta_shoulder + theta_elbow;
    (
        arm.l1 * theta_shoulder.cos() + arm.l2 * q12.cos(),
        arm.l1 * theta_shoulder.sin() + arm.l2 * q12.sin(),
    )
}

/// Joint-space mass matrix `[m11, m12, m22]`.
pub fn mass_matrix(arm: &ArmParams, theta_elbow: f64) -> [f64; 3] {
    let c2 = theta_elbow.cos();
    let (m1, m2, l1, rc1, rc2) = (arm.m1, arm.m2, arm.l1, arm.r_com1, arm.r_com2);
    [
        m1 * rc1 * rc1 + m2 * (l1 * l1 + rc2 * rc2 + 2.0 * l1 * rc2 * c2),
        m2 * (rc2 * rc2 + l1 * rc2 * c2),
        m2 * rc2 * rc2,
    ]
}

pub fn kinetic_energy(arm: &ArmParams, s: &PlantState) -> f64 {
    let [a, b, c] = mass_matrix(arm, s.theta_elbow);
    let (w1, w2) = (s.omega_shoulder, s.omega_elbow);
    0.5 * (a * w1 * w1 + 2.0 * b * w1 * w2 + c * w2 * w2)
}

/// Arm model with both actuators attached.
#[derive(Debug, Clone)]
pub struct Plant {
    pub cfg: ModelConfig,
    lisper: LisperModel,
    pub shoulder_valve: ValveModel,
    pub elbow_valve: ValveModel,
}

impl Plant {
    pub fn new(cfg: &ModelConfig) -> Result<Self, PlantError> {
        let settings = SolverSettings { root: cfg.sim.root, quad: cfg.sim.quad };
        let lisper = LisperModel::new(cfg.lisper, cfg.material, settings)?;
        let valve = |p_max| ValveModel { tau_valve: cfg.sim.valve_tau, slew_max: cfg.sim.valve_slew, p_max };
        Ok(Self {
            cfg: *cfg,
            lisper,
            shoulder_valve: valve(cfg.scasper.p_max),
            elbow_valve: valve(cfg.lisper.p_max),
        })
    }

    pub fn lisper(&self) -> &LisperModel {
        &self.lisper
    }

    /// Elbow actuator torque at joint angle `theta_elbow`.
    pub fn elbow_torque(&self, p: f64, theta_elbow: f64) -> Result<f64, PlantError> {
        let bend = self.cfg.arm.elbow_bend(theta_elbow, &self.cfg.lisper);
        Ok(self.lisper.torque(p, bend)?)
    }

    /// Shoulder actuator torque at joint angle `theta_shoulder`. The pipe
    /// moment stays linear through negative extension.
    pub fn shoulder_torque(&self, p: f64, theta_shoulder: f64) -> f64 {
        let ext = self.cfg.arm.shoulder_extension(theta_shoulder);
        scasper::total_torque(&self.cfg.scasper, &self.cfg.material, p, ext).m_total
    }

    /// Passive torques (damping and optional strips) on each joint.
    fn passive_torque(&self, s: &PlantState) -> (f64, f64) {
        let sim = &self.cfg.sim;
        let mut shoulder = -sim.damping_shoulder * s.omega_shoulder;
        if sim.strips {
            let ext = self.cfg.arm.shoulder_extension(s.theta_shoulder);
            shoulder -= sim.strip_stiffness * ext + sim.strip_damping * s.omega_shoulder;
        }
        (shoulder, -sim.damping_elbow * s.omega_elbow)
    }

    /// Joint accelerations at state `s` with chamber pressures as stored.
    pub fn accelerations(&self, s: &PlantState) -> Result<(f64, f64), PlantError> {
        let arm = &self.cfg.arm;
        let q1 = self.shoulder_torque(s.p_shoulder, s.theta_shoulder);
        let q2 = self.elbow_torque(s.p_elbow, s.theta_elbow)?;
        let (g1, g2) = gravity_torque(arm, s.theta_shoulder, s.theta_elbow);
        let (d1, d2) = self.passive_torque(s);
        let k = arm.m2 * arm.l1 * arm.r_com2 * s.theta_elbow.sin();
        let (w1, w2) = (s.omega_shoulder, s.omega_elbow);
        let h1 = -k * (2.0 * w1 * w2 + w2 * w2);
        let h2 = k * w1 * w1;
        let r1 = q1 + d1 - g1 - h1;
        let r2 = q2 + d2 - g2 - h2;
        let [a, b, c] = mass_matrix(arm, s.theta_elbow);
        let det = a * c - b * b;
        let free = ((c * r1 - b * r2) / det, (a * r2 - b * r1) / det);
        // A joint resting on a stop and pushed into it is held there; the
        // other joint then moves with its own diagonal inertia.
        let lims = (arm.shoulder_limits, arm.elbow_limits);
        let pinned = |theta: f64, omega: f64, acc: f64, lim: Interval| {
            (theta <= lim.lo && omega <= 0.0 && acc < 0.0) || (theta >= lim.hi && omega >= 0.0 && acc > 0.0)
        };
        let mut acc = free;
        if pinned(s.theta_shoulder, w1, acc.0, lims.0) {
            acc = (0.0, r2 / c);
            if pinned(s.theta_elbow, w2, acc.1, lims.1) {
                acc.1 = 0.0;
            }
        } else if pinned(s.theta_elbow, w2, acc.1, lims.1) {
            acc = (r1 / a, 0.0);
            if pinned(s.theta_shoulder, w1, acc.0, lims.0) {
                acc.0 = 0.0;
            }
        }
        Ok(acc)
    }

    /// One semi-implicit Euler step. Pressures advance first; the new
    /// pressures drive the joints.
    pub fn step(&self, s: &PlantState, cmd: (f64, f64), dt: f64) -> Result<PlantState, PlantError> {
        if !(dt > 0.0) {
            return Err(PlantError::BadStep(dt));
        }
        let mut n = *s;
        n.p_shoulder = self.shoulder_valve.step(s.p_shoulder, cmd.0, dt);
        n.p_elbow = self.elbow_valve.step(s.p_elbow, cmd.1, dt);
        let (a1, a2) = self.accelerations(&n)?;
        n.omega_shoulder += dt * a1;
        n.omega_elbow += dt * a2;
        n.theta_shoulder += dt * n.omega_shoulder;
        n.theta_elbow += dt * n.omega_elbow;
        n.t = s.t + dt;
        hard_stop(&mut n.theta_shoulder, &mut n.omega_shoulder, self.cfg.arm.shoulder_limits);
        hard_stop(&mut n.theta_elbow, &mut n.omega_elbow, self.cfg.arm.elbow_limits);
        n.check()?;
        Ok(n)
    }

    /// Kinetic, gravitational and elastic energy with empty chambers. The
    /// elastic parts are the base-arc spring, the pipe and the strips.
    pub fn unforced_energy(&self, s: &PlantState) -> f64 {
        let cfg = &self.cfg;
        let g = &cfg.lisper;
        let bend = cfg.arm.elbow_bend(s.theta_elbow, g) - g.theta_initial;
        let k_elbow = g.r_base * g.r_base * g.a_base * cfg.material.e_silicone;
        let ext = cfg.arm.shoulder_extension(s.theta_shoulder);
        let mut k_shoulder = scasper::pipe_moment(&cfg.scasper, &cfg.material, 1.0);
        if cfg.sim.strips {
            k_shoulder += cfg.sim.strip_stiffness;
        }
        kinetic_energy(&cfg.arm, s)
            + potential_energy(&cfg.arm, s.theta_shoulder, s.theta_elbow)
            + 0.5 * k_elbow * bend * bend
            + 0.5 * k_shoulder * ext * ext
    }
}

impl PlantState {
    fn check(&self) -> Result<(), PlantError> {
        let fields = [
            ("theta_shoulder", self.theta_shoulder),
            ("theta_elbow", self.theta_elbow),
            ("omega_shoulder", self.omega_shoulder),
            ("omega_elbow", self.omega_elbow),
            ("p_shoulder", self.p_shoulder),
            ("p_elbow", self.p_elbow),
        ];
        match fields.iter().find(|(_, v)| !v.is_finite()) {
            Some(&(quantity, value)) => Err(PlantError::NonFinite { quantity, value, t: self.t }),
            None => Ok(()),
        }
    }
}

fn hard_stop(theta: &mut f64, omega: &mut f64, limits: Interval) {
    if *theta < limits.lo || *theta > limits.hi {
        *theta = limits.clamp(*theta);
        *omega = 0.0;
    }
}

/// Single step on a freshly built plant. Prefer [`Plant::step`] in loops.
pub fn step(state: &PlantState, cmd: (f64, f64), cfg: &ModelConfig, dt: f64) -> Result<PlantState, PlantError> {
    Plant::new(cfg)?.step(state, cmd, dt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::central_diff;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn gravity_torque_special_postures() {
        let arm = ArmParams::default();
        let (s, e) = gravity_torque(&arm, FRAC_PI_2, 0.0);
        assert!(s.abs() < 1e-15 && e.abs() < 1e-15);
        let (s, e) = gravity_torque(&arm, 0.0, 0.0);
        assert!((s - arm.g * (arm.m1 * arm.r_com1 + arm.m2 * (arm.l1 + arm.r_com2))).abs() < 1e-12);
        assert!((e - arm.g * arm.m2 * arm.r_com2).abs() < 1e-12);
    }

    #[test]
    fn gravity_torque_is_potential_gradient() {
        let arm = ArmParams::default();
        for &(q1, q2) in &[(0.3, 0.2), (1.1, -0.4), (-0.2, 0.9)] {
            let (s, e) = gravity_torque(&arm, q1, q2);
            let ds = central_diff(|x| potential_energy(&arm, x, q2), q1, 1e-5);
            let de = central_diff(|x| potential_energy(&arm, q1, x), q2, 1e-5);
            assert!((s - ds).abs() < 1e-6 && (e - de).abs() < 1e-6);
        }
    }

    #[test]
    fn kinematics_examples() {
        let arm = ArmParams::default();
        let (x, y) = forward_kinematics(&arm, 0.0, 0.0);
        assert!((x - arm.l1 - arm.l2).abs() < 1e-15 && y == 0.0);
        let (x, y) = forward_kinematics(&arm, FRAC_PI_2, 0.0);
        assert!(x.abs() < 1e-15 && (y - arm.l1 - arm.l2).abs() < 1e-15);
    }

    #[test]
    fn valve_first_order_lag() {
        let v = ValveModel { tau_valve: 0.2, slew_max: 1e9, p_max: 200e3 };
        let dt = v.tau_valve / 100.0;
        let mut p = 0.0;
        for _ in 0..100 {
            p = v.step(p, 100e3, dt);
        }
        let expected = 100e3 * (1.0 - (-1f64).exp());
        assert!(((p - expected) / expected).abs() < 0.02);
        assert_eq!(v.step(150e3, 1e9, 1.0), 200e3);
        assert_eq!(v.step(10.0, -1e9, 1.0), 0.0);
        let slow = ValveModel { slew_max: 1e3, ..v };
        assert!((slow.step(0.0, 100e3, 0.01) - 10.0).abs() < 1e-12);
    }

    #[test]
    fn rest_at_stop_is_stationary() {
        let cfg = ModelConfig::default();
        let plant = Plant::new(&cfg).unwrap();
        let s = PlantState::at(cfg.arm.shoulder_limits.lo, cfg.arm.elbow_limits.lo);
        let n = plant.step(&s, (0.0, 0.0), cfg.sim.dt).unwrap();
        assert_eq!(n, PlantState { t: cfg.sim.dt, ..s });
    }

    #[test]
    fn limits_hold_under_full_pressure() {
        let cfg = ModelConfig::default();
        let plant = Plant::new(&cfg).unwrap();
        let mut s = PlantState::at(0.5, 0.0);
        for _ in 0..2000 {
            s = plant.step(&s, (1e9, 1e9), cfg.sim.dt).unwrap();
            assert!(cfg.arm.shoulder_limits.contains(s.theta_shoulder));
            assert!(cfg.arm.elbow_limits.contains(s.theta_elbow));
            assert!(s.p_shoulder <= cfg.scasper.p_max && s.p_elbow <= cfg.lisper.p_max);
        }
        assert_eq!(s.theta_shoulder, cfg.arm.shoulder_limits.hi);
        assert_eq!(s.theta_elbow, cfg.arm.elbow_limits.hi);
        assert_eq!(s.omega_elbow, 0.0);
    }

    #[test]
    fn non_positive_step_rejected() {
        let plant = Plant::new(&ModelConfig::default()).unwrap();
        assert!(matches!(plant.step(&PlantState::at(0.5, 0.0), (0.0, 0.0), 0.0), Err(PlantError::BadStep(_))));
    }

    #[test]
    fn imu_noise_statistics() {
        let exact = ImuModel { sample_rate: 100.0, noise_std: 0.0, seed: 1 };
        let s = PlantState::at(0.4, 0.1);
        let r = measure(&s, &exact, &mut exact.rng());
        assert_eq!(r, Reading { shoulder_deg: 0.4f64.to_degrees(), elbow_deg: 0.1f64.to_degrees() });

        let imu = ImuModel { noise_std: 0.5, ..exact };
        let draw = |imu: &ImuModel| {
            let mut rng = imu.rng();
            (0..10_000).map(|_| measure(&s, imu, &mut rng).shoulder_deg - 0.4f64.to_degrees()).collect::<Vec<_>>()
        };
        let a = draw(&imu);
        assert_eq!(a, draw(&imu));
        let mean = a.iter().sum::<f64>() / a.len() as f64;
        let std = (a.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (a.len() - 1) as f64).sqrt();
        assert!((std - 0.5).abs() < 0.025, "{std}");
    }

    #[test]
    fn strips_return_shoulder_monotonically() {
        let mut cfg = ModelConfig::default();
        cfg.arm.g = 0.0;
        cfg.sim.strips = true;
        let plant = Plant::new(&cfg).unwrap();
        let mut s = PlantState::at(40f64.to_radians(), cfg.arm.elbow_offset);
        let rest = cfg.arm.shoulder_offset;
        for _ in 0..5000 {
            let n = plant.step(&s, (0.0, 0.0), cfg.sim.dt).unwrap();
            assert!(n.theta_shoulder <= s.theta_shoulder && n.theta_shoulder >= rest);
            s = n;
        }
        assert!(s.theta_shoulder - rest < 1f64.to_radians());
    }
}
