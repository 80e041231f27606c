//! Scalar numerical kernels shared by the actuator models.
//!
//! Everything here is a pure function of its arguments: a bracketed root
//! finder (bisection safeguarded inverse-quadratic/secant steps, in the style
//! of Brent's method), composite Simpson quadrature with a doubling driver, a
//! 3×3 normal-equation quadratic fit and a central difference.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("no sign change on [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    NoSignChange { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },
    #[error("root finder hit {iterations} iterations; last bracket [{lo}, {hi}]")]
    MaxIterations { iterations: usize, lo: f64, hi: f64 },
    #[error("function value is not finite at x = {x}")]
    NonFinite { x: f64 },
    #[error("invalid subdivision count {n}: must be even and >= 2")]
    InvalidSubdivisions { n: usize },
    #[error("invalid interval [{a}, {b}]")]
    InvalidInterval { a: f64, b: f64 },
    #[error("quadratic fit needs at least 3 points, got {0}")]
    TooFewPoints(usize),
    #[error("normal equations are singular (degenerate design)")]
    DegenerateDesign,
}

/// Termination settings for [`find_root_bracketed`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootConfig {
    /// Accept `x` once `|f(x)| <= abs_tol`.
    pub abs_tol: f64,
    /// Accept once the bracket is narrower than this.
    pub x_tol: f64,
    pub max_iter: usize,
}

impl Default for RootConfig {
    fn default() -> Self {
        Self { abs_tol: 1e-12, x_tol: 1e-12, max_iter: 200 }
    }
}

/// Finds a root of `f` in `[lo, hi]`.
///
/// `f(lo)` and `f(hi)` must differ in sign, unless one of them is already
/// within `abs_tol` of zero. The returned point always lies inside the
/// original bracket.
pub fn find_root_bracketed<F>(f: F, lo: f64, hi: f64, cfg: &RootConfig) -> Result<f64, NumericsError>
where
    F: Fn(f64) -> f64,
{
    if !(lo.is_finite() && hi.is_finite()) || lo > hi {
        return Err(NumericsError::InvalidInterval { a: lo, b: hi });
    }
    let (mut a, mut b) = (lo, hi);
    let mut fa = f(a);
    let mut fb = f(b);
    if !fa.is_finite() {
        return Err(NumericsError::NonFinite { x: a });
    }
    if !fb.is_finite() {
        return Err(NumericsError::NonFinite { x: b });
    }
    if fa.abs() <= cfg.abs_tol {
        return Ok(a);
    }
    if fb.abs() <= cfg.abs_tol {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(NumericsError::NoSignChange { lo, hi, f_lo: fa, f_hi: fb });
    }

    // c is the previous iterate on the far side of the root from b.
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..cfg.max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * cfg.x_tol;
        let half = 0.5 * (c - b);
        if fb.abs() <= cfg.abs_tol || half.abs() <= tol {
            return Ok(b.clamp(lo, hi));
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                // secant
                p = 2.0 * half * s;
                q = 1.0 - s;
            } else {
                // inverse quadratic interpolation
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * half * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            let min1 = 3.0 * half * q - (tol * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = half;
                e = d;
            }
        } else {
            d = half;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(half) };
        fb = f(b);
        if !fb.is_finite() {
            return Err(NumericsError::NonFinite { x: b });
        }
    }
    let (l, h) = if b < c { (b, c) } else { (c, b) };
    Err(NumericsError::MaxIterations { iterations: cfg.max_iter, lo: l, hi: h })
}

/// Composite Simpson rule with `n` subintervals.
pub fn integrate<F>(f: F, a: f64, b: f64, n: usize) -> Result<f64, NumericsError>
where
    F: Fn(f64) -> f64,
{
    if n < 2 || !n.is_multiple_of(2) {
        return Err(NumericsError::InvalidSubdivisions { n });
    }
    if !(a.is_finite() && b.is_finite()) || a > b {
        return Err(NumericsError::InvalidInterval { a, b });
    }
    if a == b {
        return Ok(0.0);
    }
    let h = (b - a) / n as f64;
    let mut odd = 0.0;
    let mut even = 0.0;
    for i in 1..n {
        let x = a + h * i as f64;
        if i % 2 == 1 {
            odd += f(x);
        } else {
            even += f(x);
        }
    }
    let sum = f(a) + f(b) + 4.0 * odd + 2.0 * even;
    if !sum.is_finite() {
        return Err(NumericsError::NonFinite { x: f64::NAN });
    }
    Ok(sum * h / 3.0)
}

/// Subdivision policy for [`integrate_refined`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    pub n_initial: usize,
    pub rel_tol: f64,
    pub n_max: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self { n_initial: 256, rel_tol: 1e-8, n_max: 8192 }
    }
}

/// Simpson estimate, doubling `n` until two successive estimates agree to
/// `rel_tol` or `n_max` is reached. The last estimate is returned either way.
pub fn integrate_refined<F>(f: F, a: f64, b: f64, cfg: &QuadConfig) -> Result<f64, NumericsError>
where
    F: Fn(f64) -> f64,
{
    let mut n = cfg.n_initial;
    let mut prev = integrate(&f, a, b, n)?;
    while n < cfg.n_max {
        n = (2 * n).min(cfg.n_max);
        if n % 2 == 1 {
            n -= 1;
        }
        let next = integrate(&f, a, b, n)?;
        let scale = next.abs().max(prev.abs()).max(f64::MIN_POSITIVE);
        let done = (next - prev).abs() <= cfg.rel_tol * scale || (next - prev).abs() < f64::MIN_POSITIVE;
        prev = next;
        if done {
            break;
        }
    }
    Ok(prev)
}

/// Root-finding and quadrature settings used together by the actuator
/// models.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SolverSettings {
    pub root: RootConfig,
    pub quad: QuadConfig,
}

/// Least-squares quadratic through `points`, returned as `(a2, a1, a0)`.
pub fn fit_quadratic(points: &[(f64, f64)]) -> Result<(f64, f64, f64), NumericsError> {
    if points.len() < 3 {
        return Err(NumericsError::TooFewPoints(points.len()));
    }
    // Centre and scale x so the normal matrix stays well conditioned; the
    // sums are accumulated in sorted order so the result does not depend on
    // the order the points were supplied in.
    let mut sorted = points.to_vec();
    sorted.sort_by(|p, q| p.0.total_cmp(&q.0).then(p.1.total_cmp(&q.1)));
    let n = sorted.len() as f64;
    let mean = sorted.iter().map(|p| p.0).sum::<f64>() / n;
    let spread = sorted.iter().map(|p| (p.0 - mean).abs()).fold(0.0, f64::max);
    if spread == 0.0 {
        return Err(NumericsError::DegenerateDesign);
    }
    let mut s = [0.0f64; 5];
    let mut t = [0.0f64; 3];
    for &(x, y) in &sorted {
        let u = (x - mean) / spread;
        let mut pw = 1.0;
        for (k, sk) in s.iter_mut().enumerate() {
            *sk += pw;
            if k < 3 {
                t[k] += pw * y;
            }
            pw *= u;
        }
    }
    // rows: sum u^(i+j), unknowns (c0, c1, c2) in the scaled variable
    let mut m = [
        [s[0], s[1], s[2], t[0]],
        [s[1], s[2], s[3], t[1]],
        [s[2], s[3], s[4], t[2]],
    ];
    let c = solve3(&mut m)?;
    // expand c0 + c1 u + c2 u^2 with u = (x - mean)/spread
    let k = 1.0 / spread;
    let a2 = c[2] * k * k;
    let a1 = c[1] * k - 2.0 * c[2] * mean * k * k;
    let a0 = c[0] - c[1] * mean * k + c[2] * mean * mean * k * k;
    Ok((a2, a1, a0))
}

fn solve3(m: &mut [[f64; 4]; 3]) -> Result<[f64; 3], NumericsError> {
    let scale = m.iter().flat_map(|r| r[..3].iter()).fold(0.0f64, |acc, v| acc.max(v.abs()));
    for col in 0..3 {
        let pivot = (col..3)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap_or(col);
        if m[pivot][col].abs() <= 1e-12 * scale.max(f64::MIN_POSITIVE) {
            return Err(NumericsError::DegenerateDesign);
        }
        m.swap(col, pivot);
        for row in col + 1..3 {
            let factor = m[row][col] / m[col][col];
            for k in col..4 {
                m[row][k] -= factor * m[col][k];
            }
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let mut acc = m[row][3];
        for k in row + 1..3 {
            acc -= m[row][k] * x[k];
        }
        x[row] = acc / m[row][row];
    }
    Ok(x)
}

pub fn central_diff<F>(f: F, x: f64, h: f64) -> f64
where
    F: Fn(f64) -> f64,
{
    (f(x + h) - f(x - h)) / (2.0 * h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn linear_root() {
        let x = find_root_bracketed(|x| x - 1.0, 0.0, 2.0, &RootConfig::default()).unwrap();
        assert!((x - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cosine_root_is_half_pi() {
        let x = find_root_bracketed(f64::cos, 1.0, 2.0, &RootConfig::default()).unwrap();
        assert!((x - 1.570_796_326_794_896_6).abs() < 1e-12);
    }

    #[test]
    fn no_root_reports_bracket() {
        let err = find_root_bracketed(|x| x * x + 1.0, 0.0, 1.0, &RootConfig::default()).unwrap_err();
        assert!(matches!(err, NumericsError::NoSignChange { lo, hi, .. } if lo == 0.0 && hi == 1.0));
    }

    #[test]
    fn endpoint_root_accepted() {
        let x = find_root_bracketed(|x| x, 0.0, 1.0, &RootConfig::default()).unwrap();
        assert_eq!(x, 0.0);
    }

    #[test]
    fn iteration_cap_reports_last_bracket() {
        let cfg = RootConfig { abs_tol: 0.0, x_tol: 0.0, max_iter: 3 };
        let err = find_root_bracketed(|x| x.powi(3) - 0.3, 0.0, 1.0, &cfg).unwrap_err();
        match err {
            NumericsError::MaxIterations { lo, hi, .. } => {
                assert!(lo <= hi && lo >= 0.0 && hi <= 1.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn non_smooth_residual_converges() {
        let f = |x: f64| if x < 0.3 { -1.0 } else { x - 0.29 };
        let x = find_root_bracketed(f, 0.0, 1.0, &RootConfig::default()).unwrap();
        assert!((0.29..=0.3).contains(&x) || (x - 0.3).abs() < 1e-11);
    }

    #[test]
    fn simpson_constant_and_cubic() {
        assert_eq!(integrate(|_| 1.0, 0.0, 1.0, 2).unwrap(), 1.0);
        assert_eq!(integrate(|x| x * x * x, 0.0, 1.0, 2).unwrap(), 0.25);
    }

    #[test]
    fn simpson_sine() {
        // Composite Simpson's leading error on sin over [0, pi] is
        // (b - a) h^4 / 180 * mean(f'''') = 2 h^4 / 180; at n = 64 that is
        // 6.5e-8, so 1e-8 is first met at n = 128.
        let v64 = integrate(f64::sin, 0.0, PI, 64).unwrap();
        let h = PI / 64.0;
        let predicted = 2.0 * h.powi(4) / 180.0;
        assert!(((v64 - 2.0) - predicted).abs() < 0.01 * predicted, "{v64}");
        let v128 = integrate(f64::sin, 0.0, PI, 128).unwrap();
        assert!((v128 - 2.0).abs() < 1e-8, "{v128}");
    }

    #[test]
    fn simpson_rejects_odd_n() {
        assert_eq!(integrate(|x| x, 0.0, 1.0, 3), Err(NumericsError::InvalidSubdivisions { n: 3 }));
        assert_eq!(integrate(|x| x, 0.0, 1.0, 0), Err(NumericsError::InvalidSubdivisions { n: 0 }));
    }

    #[test]
    fn refined_quadrature_meets_tolerance() {
        let v = integrate_refined(f64::exp, 0.0, 1.0, &QuadConfig::default()).unwrap();
        assert!((v - (1f64.exp() - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn richardson_ratio() {
        for f in [f64::sin as fn(f64) -> f64, f64::exp, |x: f64| 1.0 / (1.0 + x * x)] {
            let i8 = integrate(f, 0.0, 2.0, 8).unwrap();
            let i16 = integrate(f, 0.0, 2.0, 16).unwrap();
            let i32 = integrate(f, 0.0, 2.0, 32).unwrap();
            let ratio = (i8 - i16).abs() / (i16 - i32).abs();
            assert!(ratio >= 6.0, "ratio {ratio}");
        }
    }

    #[test]
    fn quadratic_recovered_exactly() {
        let (a2, a1, a0) = (0.0145, 3.0507, -1.1438);
        let pts: Vec<_> = (0..10).map(|i| {
            let x = 10.0 * i as f64;
            (x, a2 * x * x + a1 * x + a0)
        }).collect();
        let (b2, b1, b0) = fit_quadratic(&pts).unwrap();
        assert!(((b2 - a2) / a2).abs() < 1e-9);
        assert!(((b1 - a1) / a1).abs() < 1e-9);
        assert!(((b0 - a0) / a0).abs() < 1e-9);
    }

    #[test]
    fn collinear_points_give_zero_curvature() {
        let (a2, a1, a0) = fit_quadratic(&[(0.0, 1.0), (1.0, 3.0), (2.0, 5.0)]).unwrap();
        assert!(a2.abs() < 1e-12);
        assert!((a1 - 2.0).abs() < 1e-12);
        assert!((a0 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fit_rejects_degenerate_input() {
        assert_eq!(fit_quadratic(&[(0.0, 1.0), (1.0, 2.0)]), Err(NumericsError::TooFewPoints(2)));
        assert_eq!(
            fit_quadratic(&[(1.0, 1.0), (1.0, 2.0), (1.0, 3.0)]),
            Err(NumericsError::DegenerateDesign)
        );
        // two distinct abscissae cannot pin down a quadratic
        assert_eq!(
            fit_quadratic(&[(0.0, 1.0), (1.0, 2.0), (1.0, 3.0), (0.0, 0.5)]),
            Err(NumericsError::DegenerateDesign)
        );
    }

    #[test]
    fn noisy_fit_beats_coarse_grid() {
        // deterministic pseudo-noise
        let pts: Vec<(f64, f64)> = (0..12)
            .map(|i| {
                let x = i as f64 * 0.5;
                let noise = ((i * 7919) % 13) as f64 / 13.0 - 0.5;
                (x, 0.3 * x * x - 1.2 * x + 2.0 + 0.2 * noise)
            })
            .collect();
        let sse = |c: (f64, f64, f64)| -> f64 {
            pts.iter().map(|&(x, y)| (c.0 * x * x + c.1 * x + c.2 - y).powi(2)).sum()
        };
        let best = fit_quadratic(&pts).unwrap();
        let best_sse = sse(best);
        let mut grid_min = f64::INFINITY;
        for i in 0..=40 {
            for j in 0..=40 {
                for k in 0..=40 {
                    let c = (0.2 + 0.005 * i as f64, -1.4 + 0.01 * j as f64, 1.8 + 0.01 * k as f64);
                    grid_min = grid_min.min(sse(c));
                }
            }
        }
        assert!(best_sse <= grid_min + 1e-12, "{best_sse} vs grid {grid_min}");
    }

    #[test]
    fn central_difference_examples() {
        assert!((central_diff(|x| x * x, 3.0, 1e-4) - 6.0).abs() < 1e-6);
        assert_eq!(central_diff(|_| 4.2, 1.0, 1e-3), 0.0);
        assert!((central_diff(f64::exp, 0.0, 1e-5) - 1.0).abs() < 1e-7);
    }
}
