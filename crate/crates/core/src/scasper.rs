//! Stacked-airbag shoulder actuator (SCASPER).
//!
//! Torque comes from a work balance over the inflating bags and is
//! independent of the extension angle; the central PU pipe resists bending
//! as a chain of Euler–Bernoulli segments.

use std::f64::consts::PI;

use thiserror::Error;

use crate::config::{MaterialParams, ScasperGeometry};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScasperError {
    #[error("torque {m_desired} N·m needs negative pressure {p} Pa at {theta} rad")]
    NegativePressure { m_desired: f64, theta: f64, p: f64 },
    #[error("degenerate bag geometry (width·length·r1 = 0)")]
    DegenerateGeometry,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorqueBreakdown {
    pub tau_bag: f64,
    pub m_pipe: f64,
    pub m_total: f64,
}

/// Free extension angle in degrees. `p` is in whatever unit the polynomial
/// was fitted in (kPa for the default coefficients).
pub fn extension_angle(g: &ScasperGeometry, p: f64) -> f64 {
    g.poly.eval(p)
}

/// Bag torque, N·m, for gauge pressure `p` in Pa.
pub fn bag_torque(g: &ScasperGeometry, p: f64) -> f64 {
    g.bag_width * g.bag_length * g.r1 * p / 2.0
}

/// Area moment of the pipe cross-section.
pub fn pipe_area_moment(g: &ScasperGeometry) -> f64 {
    PI * (g.d2.powi(4) - g.d1.powi(4)) / 32.0
}

/// Resisting moment of the pipe at extension `theta` (rad).
///
/// Segment k of N/2 on each side bends with radius `l_pipe/(k·Θ/N)`; the
/// sum over k collapses to `EI·Θ·(N/2)(N/2+1)/(N·l_pipe)`.
pub fn pipe_moment(g: &ScasperGeometry, m: &MaterialParams, theta: f64) -> f64 {
    let n = f64::from(g.n_bags);
    let half = n / 2.0;
    m.e_pipe * pipe_area_moment(g) * theta * half * (half + 1.0) / (n * g.l_pipe)
}

pub fn total_torque(g: &ScasperGeometry, m: &MaterialParams, p: f64, theta: f64) -> TorqueBreakdown {
    let tau_bag = bag_torque(g, p);
    let m_pipe = pipe_moment(g, m, theta);
    TorqueBreakdown { tau_bag, m_pipe, m_total: tau_bag - m_pipe }
}

/// Closed-form pressure that delivers `m_desired` at extension `theta`.
pub fn inverse_pressure_scasper(
    g: &ScasperGeometry,
    m: &MaterialParams,
    theta: f64,
    m_desired: f64,
) -> Result<f64, ScasperError> {
    let k = g.bag_width * g.bag_length * g.r1;
    if k == 0.0 {
        return Err(ScasperError::DegenerateGeometry);
    }
    let p = 2.0 * (m_desired + pipe_moment(g, m, theta)) / k;
    if p < 0.0 {
        return Err(ScasperError::NegativePressure { m_desired, theta, p });
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::fit_quadratic;

    fn explicit_sum(g: &ScasperGeometry, m: &MaterialParams, theta: f64) -> f64 {
        let ei = m.e_pipe * pipe_area_moment(g);
        let n = f64::from(g.n_bags);
        (1..=g.n_bags / 2)
            .map(|k| 2.0 * ei / (g.l_pipe / (f64::from(k) * theta / n)))
            .sum()
    }

    #[test]
    fn polynomial_values() {
        let g = ScasperGeometry::default();
        assert_eq!(extension_angle(&g, 0.0), -1.1438);
        assert!((extension_angle(&g, 10.0) - 30.8132).abs() < 1e-9);
        let mut id = g;
        id.poly.a2 = 0.0;
        id.poly.a1 = 1.0;
        id.poly.a0 = 0.0;
        assert_eq!(extension_angle(&id, 37.5), 37.5);
    }

    #[test]
    fn polynomial_agrees_with_fit_of_own_samples() {
        let g = ScasperGeometry::default();
        let pts: Vec<_> = (0..=15).map(|i| {
            let p = 10.0 * i as f64;
            (p, extension_angle(&g, p))
        }).collect();
        let (a2, a1, a0) = fit_quadratic(&pts).unwrap();
        for p in [3.0, 47.0, 140.0] {
            let fitted = (a2 * p + a1) * p + a0;
            assert!((fitted - extension_angle(&g, p)).abs() < 1e-9);
        }
    }

    #[test]
    fn bag_torque_values() {
        let mut g = ScasperGeometry::default();
        assert_eq!(bag_torque(&g, 0.0), 0.0);
        g.r1 = 0.05;
        assert!((bag_torque(&g, 100e3) - 27.0).abs() < 1e-12);
        let t = bag_torque(&g, 42e3);
        assert!((bag_torque(&g, 84e3) - 2.0 * t).abs() <= 1e-12 * t);
    }

    #[test]
    fn area_moment_value() {
        let mut g = ScasperGeometry::default();
        g.d1 = 0.002;
        g.d2 = 0.004;
        let i = pipe_area_moment(&g);
        assert!((i - PI * 240e-12 / 32.0).abs() < 1e-24);
        assert!((i - 2.356e-11).abs() < 1e-14);
    }

    #[test]
    fn pipe_moment_closed_form_matches_sum() {
        let m = MaterialParams::default();
        let mut g = ScasperGeometry::default();
        assert_eq!(pipe_moment(&g, &m, 0.0), 0.0);
        for n in [2, 6, 12] {
            g.n_bags = n;
            let theta = 0.7;
            let closed = pipe_moment(&g, &m, theta);
            let sum = explicit_sum(&g, &m, theta);
            assert!(((closed - sum) / sum).abs() < 1e-12, "N = {n}");
        }
    }

    #[test]
    fn pipe_moment_is_linear() {
        let g = ScasperGeometry::default();
        let m = MaterialParams::default();
        let a = pipe_moment(&g, &m, 0.3);
        assert!((pipe_moment(&g, &m, 0.6) - 2.0 * a).abs() < 1e-15);
        let mut m2 = m;
        m2.e_pipe *= 3.0;
        assert!((pipe_moment(&g, &m2, 0.3) - 3.0 * a).abs() < 1e-14);
    }

    #[test]
    fn total_is_difference() {
        let g = ScasperGeometry::default();
        let m = MaterialParams::default();
        let zero = total_torque(&g, &m, 0.0, 0.0);
        assert_eq!(zero, TorqueBreakdown { tau_bag: 0.0, m_pipe: 0.0, m_total: 0.0 });
        let b = total_torque(&g, &m, 80e3, 0.5);
        assert_eq!(b.m_total, b.tau_bag - b.m_pipe);
        assert_eq!(b.tau_bag, total_torque(&g, &m, 80e3, 1.2).tau_bag);
        let ei = m.e_pipe * PI * (g.d2.powi(4) - g.d1.powi(4)) / 32.0;
        let oracle = g.bag_width * g.bag_length * g.r1 * 80e3 / 2.0 - 2.0 * ei * (1.0 + 2.0 + 3.0) * 0.5 / (6.0 * g.l_pipe);
        assert!((b.m_total - oracle).abs() < 1e-12);
    }

    #[test]
    fn default_free_extension_calibration() {
        let g = ScasperGeometry::default();
        let m = MaterialParams::default();
        let free = bag_torque(&g, 100e3) / pipe_moment(&g, &m, 1.0);
        assert!((free.to_degrees() - 122.5).abs() < 0.5, "{}", free.to_degrees());
    }

    #[test]
    fn inversion() {
        let g = ScasperGeometry::default();
        let m = MaterialParams::default();
        assert_eq!(inverse_pressure_scasper(&g, &m, 0.0, 0.0).unwrap(), 0.0);
        for i in 1..=150 {
            let p0 = 1e3 * i as f64;
            let theta = 0.01 * i as f64;
            let mt = total_torque(&g, &m, p0, theta).m_total;
            let p = inverse_pressure_scasper(&g, &m, theta, mt).unwrap();
            assert!(((p - p0) / p0).abs() < 1e-9);
            let back = total_torque(&g, &m, p, theta).m_total;
            assert!(((back - mt) / mt.abs().max(1e-12)).abs() < 1e-9);
        }
        let theta = 0.5;
        let bad = -2.0 * pipe_moment(&g, &m, theta);
        assert!(matches!(inverse_pressure_scasper(&g, &m, theta, bad), Err(ScasperError::NegativePressure { .. })));
    }
}
