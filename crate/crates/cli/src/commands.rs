use pneumodel::config::{Entry, ModelConfig};
use pneumodel::control::{bench_run, run_scenario, Joint, Timeseries};
use pneumodel::csvio::CsvTable;
use pneumodel::lisper::{LisperError, LisperModel};
use pneumodel::numerics::SolverSettings;
use pneumodel::scasper::{extension_angle, inverse_pressure_scasper, total_torque};
use pneumodel::scenario::{parse_scenario, Mode, Scenario, ScenarioError, Trajectory};

use crate::CliError;

const KPA: f64 = 1e3;

fn table(header: &[&str]) -> CsvTable {
    // headers are compile-time constants: unique and non-empty
    CsvTable::new(header.iter().copied()).expect("static header")
}

fn push(t: &mut CsvTable, row: Vec<f64>) {
    t.push(row).expect("row width matches header");
}

pub fn lisper_model(cfg: &ModelConfig) -> Result<LisperModel, CliError> {
    let settings = SolverSettings { root: cfg.sim.root, quad: cfg.sim.quad };
    Ok(LisperModel::new(cfg.lisper, cfg.material, settings)?)
}

pub fn lisper_curve(cfg: &ModelConfig, pressures_kpa: &[f64]) -> Result<CsvTable, CliError> {
    let m = lisper_model(cfg)?;
    let mut t = table(&["pressure_kpa", "free_angle_deg"]);
    for &p in pressures_kpa {
        push(&mut t, vec![p, m.free_bending_angle(p * KPA)?.to_degrees()]);
    }
    Ok(t)
}

pub fn lisper_force(cfg: &ModelConfig, angle_deg: f64, pressures_kpa: &[f64]) -> Result<CsvTable, CliError> {
    let m = lisper_model(cfg)?;
    let theta = angle_deg.to_radians();
    let mut t = table(&["pressure_kpa", "force_n", "f_total1_n", "f_total2_n", "f_total3_n", "bellow_contrib_pct"]);
    for &p in pressures_kpa {
        let b = m.output_force(p * KPA, theta)?;
        let share = match b.bellow_share() {
            Ok(s) => s,
            Err(LisperError::ZeroOutput) => f64::NAN,
            Err(e) => return Err(e.into()),
        };
        push(&mut t, vec![p, b.f_output, b.f_total1, b.f_total2, b.f_total3, share]);
    }
    Ok(t)
}

/// The extension polynomial is evaluated on the pressure in kPa.
pub fn scasper_angle(cfg: &ModelConfig, pressures_kpa: &[f64]) -> CsvTable {
    let mut t = table(&["pressure_kpa", "extension_angle_deg"]);
    for &p in pressures_kpa {
        push(&mut t, vec![p, extension_angle(&cfg.scasper, p)]);
    }
    t
}

pub fn scasper_torque(cfg: &ModelConfig, angle_deg: f64, pressures_kpa: &[f64]) -> CsvTable {
    let theta = angle_deg.to_radians();
    let mut t = table(&["pressure_kpa", "torque_nm", "tau_bag_nm", "m_pipe_nm"]);
    for &p in pressures_kpa {
        let b = total_torque(&cfg.scasper, &cfg.material, p * KPA, theta);
        push(&mut t, vec![p, b.m_total, b.tau_bag, b.m_pipe]);
    }
    t
}

/// Pressure for `load` (N at the elbow tip, N·m at the shoulder) with the
/// actuator held at `angle_deg`.
pub fn inverse(cfg: &ModelConfig, joint: Joint, angle_deg: f64, load: f64) -> Result<CsvTable, CliError> {
    let theta = angle_deg.to_radians();
    let p = match joint {
        Joint::Elbow => lisper_model(cfg)?.inverse_pressure(theta, load)?,
        Joint::Shoulder => inverse_pressure_scasper(&cfg.scasper, &cfg.material, theta, load)?,
    };
    let mut t = table(&["pressure_kpa"]);
    push(&mut t, vec![p / KPA]);
    Ok(t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    /// Unloaded elbow bend at the elbow supply limit.
    FreeAngle,
    /// Elbow output force at the supply limit, held at the initial bend.
    MaxForce,
    /// Shoulder torque at the supply limit, held closed.
    MaxTorque,
}

impl Metric {
    fn column(self) -> &'static str {
        match self {
            Metric::FreeAngle => "free_angle_deg",
            Metric::MaxForce => "max_force_n",
            Metric::MaxTorque => "max_torque_nm",
        }
    }

    fn eval(self, cfg: &ModelConfig) -> Result<f64, CliError> {
        let g = &cfg.lisper;
        Ok(match self {
            Metric::FreeAngle => lisper_model(cfg)?.free_bending_angle(g.p_max)?.to_degrees(),
            Metric::MaxForce => lisper_model(cfg)?.output_force(g.p_max, g.theta_initial)?.f_output,
            Metric::MaxTorque => total_torque(&cfg.scasper, &cfg.material, cfg.scasper.p_max, 0.0).m_total,
        })
    }
}

/// Sets config key `param` to each value (in config-file units) and
/// evaluates `metric`. Rows follow the order of `values`.
pub fn sweep(cfg: &ModelConfig, param: &str, values: &[f64], metric: Metric) -> Result<CsvTable, CliError> {
    let mut t = CsvTable::new([param, metric.column()]).map_err(|e| CliError::Usage(e.to_string()))?;
    for &v in values {
        let mut c = *cfg;
        let entry = Entry { key: param.to_string(), value: format!("{v}"), line: 0 };
        c.apply_entries(&[entry], None)?;
        c.check()?;
        push(&mut t, vec![v, metric.eval(&c)?]);
    }
    Ok(t)
}

/// The paper-range tracking run: both joints sweep their limits at 0.25 Hz.
pub fn default_scenario(cfg: &ModelConfig, mode: Mode) -> Scenario {
    let (s, e) = (cfg.arm.shoulder_limits, cfg.arm.elbow_limits);
    Scenario {
        mode,
        duration: 12.0,
        prefill: true,
        initial_shoulder: s.lo,
        initial_elbow: e.lo,
        shoulder: Trajectory::sweep(s.lo, s.hi, 0.25),
        elbow: Trajectory::sweep(e.lo, e.hi, 0.25),
    }
}

/// Parses a scenario document; `mode` overrides (or supplies) its mode.
pub fn load_scenario(text: &str, base: &ModelConfig, mode: Option<Mode>) -> Result<(ModelConfig, Scenario), CliError> {
    let parsed = match (parse_scenario(text, base), mode) {
        (Err(ScenarioError::Missing(key)), Some(m)) if key == "scenario.mode" => {
            parse_scenario(&format!("{text}\nscenario.mode = {m}\n"), base)
        }
        (r, _) => r,
    };
    let (cfg, mut sc) = parsed?;
    if let Some(m) = mode {
        sc.mode = m;
    }
    Ok((cfg, sc))
}

pub fn simulate(cfg: &ModelConfig, sc: &Scenario) -> Result<CsvTable, CliError> {
    let run = run_scenario(cfg, sc)?;
    let mut t = table(&[
        "time_s",
        "shoulder_set_deg",
        "shoulder_real_deg",
        "shoulder_p_cmd_kpa",
        "shoulder_p_kpa",
        "shoulder_torque_nm",
        "elbow_set_deg",
        "elbow_real_deg",
        "elbow_p_cmd_kpa",
        "elbow_p_kpa",
        "elbow_torque_nm",
    ]);
    let cols = |tr: &Timeseries, i: usize| {
        [tr.set_angle[i].to_degrees(), tr.real_angle[i].to_degrees(), tr.p_cmd[i] / KPA, tr.p_actual[i] / KPA, tr.torque[i]]
    };
    for i in 0..run.shoulder.len() {
        let mut row = vec![run.shoulder.t[i]];
        row.extend(cols(&run.shoulder, i));
        row.extend(cols(&run.elbow, i));
        push(&mut t, row);
    }
    Ok(t)
}

pub fn bandwidth(cfg: &ModelConfig, joint: Joint, freqs: &[f64], cycles: f64) -> Result<CsvTable, CliError> {
    let mut t = table(&["frequency_hz", "range_of_motion_deg", "mean_time_error_s", "max_angular_error_deg"]);
    for &f in freqs {
        let m = bench_run(cfg, joint, f, cycles)?.metrics;
        push(&mut t, vec![f, m.range_of_motion, m.mean_time_error, m.max_angular_error]);
    }
    Ok(t)
}
