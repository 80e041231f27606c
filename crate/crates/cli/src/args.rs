//! Numeric argument grammars: inclusive ranges (`start:end:step`) and comma
//! lists (`1,0.5,0.25`).

use thiserror::Error;

/// Upper bound on generated points, to keep typos like `0:1e9:1` cheap.
pub const MAX_POINTS: usize = 100_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ArgError {
    #[error("empty value list")]
    Empty,
    #[error("`{0}` is not a finite number")]
    NotNumber(String),
    #[error("range needs `start:end:step`, got `{0}`")]
    RangeShape(String),
    #[error("step must be > 0, got {0}")]
    Step(f64),
    #[error("range end {end} is below start {start}")]
    Reversed { start: f64, end: f64 },
    #[error("range has more than {MAX_POINTS} points")]
    TooMany,
}

fn number(s: &str) -> Result<f64, ArgError> {
    let t = s.trim();
    t.parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(|| ArgError::NotNumber(t.to_string()))
}

/// `start, start+step, ...` up to and including `end` (within 1e-9 steps).
/// A degenerate range `start == end` yields one point for any step.
pub fn inclusive_steps(start: f64, end: f64, step: f64) -> Result<Vec<f64>, ArgError> {
    for x in [start, end, step] {
        if !x.is_finite() {
            return Err(ArgError::NotNumber(x.to_string()));
        }
    }
    if end < start {
        return Err(ArgError::Reversed { start, end });
    }
    if start == end {
        return Ok(vec![start]);
    }
    if step <= 0.0 {
        return Err(ArgError::Step(step));
    }
    let span = (end - start) / step;
    if !(span < MAX_POINTS as f64) {
        return Err(ArgError::TooMany);
    }
    let n = (span + 1e-9).floor() as usize + 1;
    let v: Vec<f64> = (0..n).map(|i| start + i as f64 * step).collect();
    // a step below the float resolution at `start` would repeat values
    if v.windows(2).any(|w| w[1] <= w[0]) {
        return Err(ArgError::Step(step));
    }
    Ok(v)
}

/// Parses `start:end:step`.
pub fn parse_range(s: &str) -> Result<Vec<f64>, ArgError> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, c] = parts.as_slice() else {
        return Err(ArgError::RangeShape(s.to_string()));
    };
    inclusive_steps(number(a)?, number(b)?, number(c)?)
}

/// Parses a comma-separated list, keeping order and duplicates.
pub fn parse_list(s: &str) -> Result<Vec<f64>, ArgError> {
    if s.trim().is_empty() {
        return Err(ArgError::Empty);
    }
    let v = s.split(',').map(number).collect::<Result<Vec<_>, _>>()?;
    if v.len() > MAX_POINTS {
        return Err(ArgError::TooMany);
    }
    Ok(v)
}

/// A range if the text contains `:`, a list otherwise.
pub fn parse_values(s: &str) -> Result<Vec<f64>, ArgError> {
    if s.contains(':') {
        parse_range(s)
    } else {
        parse_list(s)
    }
}
