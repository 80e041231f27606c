//! Quasi-static force model of the bellow elbow actuator (LISPER).
//!
//! Pipeline: inflated arc and wall lengths → bellow contour (three coupled
//! relations reduced to one scalar equation in the ring angle θ2) → chamber
//! height profile h(x) → per-slice compression via the law of cosines →
//! integrated bellow force, feet pressure force and base-arc restoring force
//! → moment balance about the rotation axis.
//!
//! The material law is linear elastic. The strain term `l_thick·P/(E·ν)` is
//! evaluated exactly as written with SI inputs, even though it is not
//! dimensionless; the default geometry was calibrated with it in place.

use std::f64::consts::PI;

use thiserror::Error;

use crate::config::{LisperGeometry, MaterialParams};
use crate::numerics::{find_root_bracketed, integrate_refined, NumericsError, SolverSettings};

/// Upper end of the pressure bracket searched by [`inverse_pressure`], Pa.
pub const INVERSE_P_MAX: f64 = 150e3;

/// Lower end of the ring-angle bracket for the contour solve, rad.
const THETA2_MIN: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LisperError {
    #[error("pressure {p} Pa reaches the strain pole (limit {p_limit} Pa)")]
    Pole { p: f64, p_limit: f64 },
    #[error("negative pressure {0} Pa")]
    NegativePressure(f64),
    #[error("bellow contour has no solution in (0, pi): {0}")]
    InfeasibleGeometry(NumericsError),
    #[error("x = {x} m is outside [-{half}, {half}]")]
    OutOfDomain { x: f64, half: f64 },
    #[error("output force is zero; bellow share is undefined")]
    ZeroOutput,
    #[error("output force stays positive on [{lo}, {hi}] rad; no free bending angle")]
    NoFreeAngle { lo: f64, hi: f64 },
    #[error("force {f_desired} N unreachable at {theta} rad; achievable range [{min}, {max}] N")]
    Unreachable { f_desired: f64, theta: f64, min: f64, max: f64 },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Inflated bellow contour.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellowSolution {
    pub s_new: f64,
    pub l_wall_new: f64,
    pub theta2: f64,
    pub theta3: f64,
    pub r_new: f64,
}

impl BellowSolution {
    /// Residuals of the three contour relations:
    /// `θ2/2 − θ3`, `θ2 − s/r` and `l_base/(2 cos θ3) − l_wall − r tan(θ2/2)`.
    pub fn residuals(&self, g: &LisperGeometry) -> [f64; 3] {
        [
            self.theta2 / 2.0 - self.theta3,
            self.theta2 - self.s_new / self.r_new,
            g.l_base / (2.0 * self.theta3.cos()) - self.l_wall_new - self.r_new * (self.theta2 / 2.0).tan(),
        ]
    }

    /// |x| at which the straight walls meet the ring arc.
    pub fn wall_arc_boundary(&self, g: &LisperGeometry) -> f64 {
        g.l_base / 2.0 - self.l_wall_new * self.theta3.cos()
    }

    fn height_unchecked(&self, g: &LisperGeometry, x: f64) -> f64 {
        let half = g.l_base / 2.0;
        let ax = x.abs();
        if ax >= self.wall_arc_boundary(g) {
            self.theta3.tan() * (half - ax)
        } else {
            self.theta3.sin() * self.l_wall_new - self.r_new * (self.theta2 / 2.0).cos()
                + (self.r_new * self.r_new - x * x).max(0.0).sqrt()
        }
    }
}

/// Force components. `f_output` is the moment balance of the other three.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForceBreakdown {
    pub f_total1: f64,
    pub f_total2: f64,
    pub f_total3: f64,
    pub f_output: f64,
}

impl ForceBreakdown {
    /// Moment balance about the rotation axis with arms l_equiv for the
    /// bellow and feet forces and r_base for the opposing arc force.
    pub fn compose(g: &LisperGeometry, f_total1: f64, f_total2: f64, f_total3: f64) -> Self {
        let f_output = (g.l_equiv * (f_total1 + f_total2) - g.r_base * f_total3) / g.l_equiv;
        Self { f_total1, f_total2, f_total3, f_output }
    }

    /// Bellow share of the output force, percent.
    pub fn bellow_share(&self) -> Result<f64, LisperError> {
        if self.f_output == 0.0 {
            return Err(LisperError::ZeroOutput);
        }
        Ok(self.f_total1 / self.f_output * 100.0)
    }
}

fn strain(g: &LisperGeometry, m: &MaterialParams, p: f64) -> f64 {
    g.l_thick * p / (m.e_silicone * m.poisson)
}

/// Inflated ring arc length `2βr / (1 − l_thick·P/(Eν))`.
pub fn arc_length_inflated(g: &LisperGeometry, m: &MaterialParams, p: f64) -> Result<f64, LisperError> {
    let k = strain(g, m, p);
    if k >= 1.0 {
        return Err(LisperError::Pole { p, p_limit: m.e_silicone * m.poisson / g.l_thick });
    }
    Ok(2.0 * g.beta * g.r_mid() / (1.0 - k))
}

/// Inflated side wall length `l_wall (1 + l_thick·P/(Eν))`.
pub fn wall_length_inflated(g: &LisperGeometry, m: &MaterialParams, p: f64) -> f64 {
    g.l_wall_initial * (1.0 + strain(g, m, p))
}

/// Solves the bellow contour at pressure `p`.
///
/// With θ3 = θ2/2 and r_new = s_new/θ2 substituted, the remaining closure
/// relation is a single equation in θ2, bracketed on (0, π).
pub fn solve_bellow_geometry(
    g: &LisperGeometry,
    m: &MaterialParams,
    p: f64,
    settings: &SolverSettings,
) -> Result<BellowSolution, LisperError> {
    if p < 0.0 {
        return Err(LisperError::NegativePressure(p));
    }
    let s_new = arc_length_inflated(g, m, p)?;
    let l_wall_new = wall_length_inflated(g, m, p);
    // scaled by l_base so the residual tolerance is relative
    let closure = |t2: f64| {
        let half = t2 / 2.0;
        (g.l_base / (2.0 * half.cos()) - l_wall_new - (s_new / t2) * half.tan()) / g.l_base
    };
    // (π/2)⁻ for the half angle; both terms diverge together at π.
    let hi = PI * (1.0 - 1e-9);
    let theta2 = find_root_bracketed(closure, THETA2_MIN, hi, &settings.root)
        .map_err(LisperError::InfeasibleGeometry)?;
    Ok(BellowSolution { s_new, l_wall_new, theta2, theta3: theta2 / 2.0, r_new: s_new / theta2 })
}

/// Height of the chamber contour above the base at `x`, symmetric about 0.
pub fn chamber_height(sol: &BellowSolution, g: &LisperGeometry, x: f64) -> Result<f64, LisperError> {
    let half = g.l_base / 2.0;
    if !(x.abs() <= half * (1.0 + 1e-12)) {
        return Err(LisperError::OutOfDomain { x, half });
    }
    Ok(sol.height_unchecked(g, x.clamp(-half, half)))
}

/// Distance between a point at radius `oa` and one at radius `ob`
/// separated by angle `alpha` about the axis.
pub fn cosine_law(oa: f64, ob: f64, alpha: f64) -> f64 {
    (oa * oa + ob * ob - 2.0 * alpha.cos() * oa * ob).max(0.0).sqrt()
}

/// `new − old` for two cosine-law distances sharing `ob` and `alpha`,
/// computed without cancellation.
fn cosine_law_gap(oa_old: f64, oa_new: f64, ob: f64, alpha: f64) -> f64 {
    let l_old = cosine_law(oa_old, ob, alpha);
    let l_new = cosine_law(oa_new, ob, alpha);
    let sum = l_old + l_new;
    if sum == 0.0 {
        return 0.0;
    }
    (oa_new - oa_old) * (oa_new + oa_old - 2.0 * alpha.cos() * ob) / sum
}

/// Slice force `(d + Δl/ν)·Δl·E` for a compression `dl`. Negative `dl`
/// (extension) is returned signed.
pub fn slice_force(g: &LisperGeometry, m: &MaterialParams, dl: f64) -> f64 {
    (g.d_bellow_wall + dl / m.poisson) * dl * m.e_silicone
}

/// Half angle between neighbouring bellow side lines at bend `theta_bend`.
pub fn bellow_half_angle(g: &LisperGeometry, theta_bend: f64) -> f64 {
    theta_bend / (2.0 * f64::from(g.n_bellows))
}

/// 2D compression force of the slice at `x`, comparing the rest contour
/// with the inflated one at bending angle `theta_bend`.
pub fn compression_force_2d(
    rest: &BellowSolution,
    inflated: &BellowSolution,
    g: &LisperGeometry,
    m: &MaterialParams,
    theta_bend: f64,
    x: f64,
) -> Result<f64, LisperError> {
    let h_old = chamber_height(rest, g, x)?;
    let h_new = chamber_height(inflated, g, x)?;
    let alpha = bellow_half_angle(g, theta_bend);
    let dl = cosine_law_gap(g.h2 + h_old, g.h2 + h_new, g.h2, alpha);
    Ok(slice_force(g, m, dl))
}

/// Bellow force at the side normal from the integrated slice force.
pub fn total1_from_f3d(g: &LisperGeometry, f3d: f64) -> f64 {
    f3d * g.bellow_arm() * (PI / 2.0 - g.gamma).cos() * 2.0 * f64::from(g.n_bellows) / g.l_equiv
}

/// Pressure force on the actuator feet.
pub fn feet_force(g: &LisperGeometry, p: f64) -> f64 {
    g.a_feet * p
}

/// Restoring term of the inner base arc, `Δφ·A_base·E·R`.
pub fn arc_restoring_force(g: &LisperGeometry, m: &MaterialParams, theta_bend: f64) -> f64 {
    (theta_bend - g.theta_initial) * g.a_base * m.e_silicone * g.r_base
}

/// Solved model for one geometry and material. Holds the rest contour so
/// repeated evaluations only solve the inflated one.
#[derive(Debug, Clone, Copy)]
pub struct LisperModel {
    pub geometry: LisperGeometry,
    pub material: MaterialParams,
    pub settings: SolverSettings,
    rest: BellowSolution,
}

impl LisperModel {
    pub fn new(geometry: LisperGeometry, material: MaterialParams, settings: SolverSettings) -> Result<Self, LisperError> {
        let rest = solve_bellow_geometry(&geometry, &material, 0.0, &settings)?;
        Ok(Self { geometry, material, settings, rest })
    }

    pub fn rest(&self) -> &BellowSolution {
        &self.rest
    }

    pub fn inflated(&self, p: f64) -> Result<BellowSolution, LisperError> {
        if p == 0.0 {
            return Ok(self.rest);
        }
        solve_bellow_geometry(&self.geometry, &self.material, p, &self.settings)
    }

    /// Integrated slice force over the base width.
    pub fn f3d(&self, p: f64, theta_bend: f64) -> Result<f64, LisperError> {
        let g = &self.geometry;
        let inflated = self.inflated(p)?;
        if p == 0.0 {
            return Ok(0.0);
        }
        let rest = &self.rest;
        let alpha = bellow_half_angle(g, theta_bend);
        let integrand = |x: f64| {
            let dl = cosine_law_gap(
                g.h2 + rest.height_unchecked(g, x),
                g.h2 + inflated.height_unchecked(g, x),
                g.h2,
                alpha,
            );
            slice_force(g, &self.material, dl)
        };
        // Integrate piecewise between the wall/arc corners of both contours so
        // every piece is smooth.
        let half = g.l_base / 2.0;
        let mut cuts = vec![-half, half];
        for b in [rest.wall_arc_boundary(g), inflated.wall_arc_boundary(g)] {
            if b > 0.0 && b < half {
                cuts.push(b);
                cuts.push(-b);
            }
        }
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let mut total = 0.0;
        for w in cuts.windows(2) {
            if w[1] > w[0] {
                total += integrate_refined(integrand, w[0], w[1], &self.settings.quad)?;
            }
        }
        Ok(total)
    }

    pub fn bellow_force(&self, p: f64, theta_bend: f64) -> Result<f64, LisperError> {
        Ok(total1_from_f3d(&self.geometry, self.f3d(p, theta_bend)?))
    }

    pub fn output_force(&self, p: f64, theta_bend: f64) -> Result<ForceBreakdown, LisperError> {
        if p < 0.0 {
            return Err(LisperError::NegativePressure(p));
        }
        let g = &self.geometry;
        let f1 = self.bellow_force(p, theta_bend)?;
        let f2 = feet_force(g, p);
        let f3 = arc_restoring_force(g, &self.material, theta_bend);
        Ok(ForceBreakdown::compose(g, f1, f2, f3))
    }

    /// Joint torque delivered at `theta_bend`, N·m.
    pub fn torque(&self, p: f64, theta_bend: f64) -> Result<f64, LisperError> {
        Ok(self.output_force(p, theta_bend)?.f_output * self.geometry.l_equiv)
    }

    /// Unloaded equilibrium angle: the root of the output force in θ on
    /// (θ_initial, π].
    pub fn free_bending_angle(&self, p: f64) -> Result<f64, LisperError> {
        if p < 0.0 {
            return Err(LisperError::NegativePressure(p));
        }
        let lo = self.geometry.theta_initial;
        if p == 0.0 {
            return Ok(lo);
        }
        let hi = PI;
        let f_hi = self.output_force(p, hi)?.f_output;
        if f_hi > 0.0 {
            return Err(LisperError::NoFreeAngle { lo, hi });
        }
        let residual = |theta: f64| self.output_force(p, theta).map(|b| b.f_output).unwrap_or(f64::NAN);
        Ok(find_root_bracketed(residual, lo, hi, &self.settings.root)?)
    }

    /// Pressure in [0, 150 kPa] at which the output force at `theta` equals
    /// `f_desired`. `f_desired = 0` gives the zero-load feedforward pressure.
    pub fn inverse_pressure(&self, theta: f64, f_desired: f64) -> Result<f64, LisperError> {
        let min = self.output_force(0.0, theta)?.f_output;
        let max = self.output_force(INVERSE_P_MAX, theta)?.f_output;
        if !(min..=max).contains(&f_desired) {
            return Err(LisperError::Unreachable { f_desired, theta, min, max });
        }
        if f_desired == min {
            return Ok(0.0);
        }
        let residual = |p: f64| self.output_force(p, theta).map(|b| b.f_output - f_desired).unwrap_or(f64::NAN);
        Ok(find_root_bracketed(residual, 0.0, INVERSE_P_MAX, &self.settings.root)?)
    }

    /// Like [`Self::inverse_pressure`] but saturates at the bracket ends
    /// instead of failing. The flag is set when saturation occurred.
    pub fn inverse_pressure_saturating(&self, theta: f64, f_desired: f64) -> Result<(f64, bool), LisperError> {
        match self.inverse_pressure(theta, f_desired) {
            Ok(p) => Ok((p, false)),
            Err(LisperError::Unreachable { min, .. }) => {
                Ok((if f_desired < min { 0.0 } else { INVERSE_P_MAX }, true))
            }
            Err(e) => Err(e),
        }
    }
}

pub fn output_force(
    g: &LisperGeometry,
    m: &MaterialParams,
    p: f64,
    theta_bend: f64,
    settings: &SolverSettings,
) -> Result<ForceBreakdown, LisperError> {
    LisperModel::new(*g, *m, *settings)?.output_force(p, theta_bend)
}

pub fn bellow_force(
    g: &LisperGeometry,
    m: &MaterialParams,
    p: f64,
    theta_bend: f64,
    settings: &SolverSettings,
) -> Result<f64, LisperError> {
    LisperModel::new(*g, *m, *settings)?.bellow_force(p, theta_bend)
}

/// Bellow share of the output force, percent.
pub fn bellow_contribution(
    g: &LisperGeometry,
    m: &MaterialParams,
    p: f64,
    theta_bend: f64,
    settings: &SolverSettings,
) -> Result<f64, LisperError> {
    output_force(g, m, p, theta_bend, settings)?.bellow_share()
}

pub fn free_bending_angle(
    g: &LisperGeometry,
    m: &MaterialParams,
    p: f64,
    settings: &SolverSettings,
) -> Result<f64, LisperError> {
    LisperModel::new(*g, *m, *settings)?.free_bending_angle(p)
}

pub fn inverse_pressure(
    g: &LisperGeometry,
    m: &MaterialParams,
    theta: f64,
    f_desired: f64,
    settings: &SolverSettings,
) -> Result<f64, LisperError> {
    LisperModel::new(*g, *m, *settings)?.inverse_pressure(theta, f_desired)
}
