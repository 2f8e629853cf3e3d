//! Parameter grids: `start:stop:step` ranges and comma lists, freely mixed.

use crate::error::{CliError, Result};

const SNAP: f64 = 1e-12;

/// Parses `text` into its values in the order given.
///
/// Ranges include both endpoints; the last point is snapped onto `stop`
/// when it lands within 1e-12 of it.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for item in text.split(',') {
        let item = item.trim();
        if item.is_empty() {
            return Err(usage(text, "empty item"));
        }
        let parts: Vec<&str> = item.split(':').collect();
        match parts.as_slice() {
            [v] => out.push(number(text, v)?),
            [a, b, s] => range(text, number(text, a)?, number(text, b)?, number(text, s)?, &mut out)?,
            _ => return Err(usage(text, "expected a number or start:stop:step")),
        }
    }
    Ok(out)
}

fn range(text: &str, start: f64, stop: f64, step: f64, out: &mut Vec<f64>) -> Result<()> {
    if step <= 0.0 {
        return Err(usage(text, "step must be positive"));
    }
    if stop < start {
        return Err(usage(text, "stop is below start"));
    }
    let span = (stop - start) / step;
    let tol = SNAP * stop.abs().max(1.0) / step;
    let count = (span + tol).floor() as usize;
    if count > 1_000_000 {
        return Err(usage(text, "range has more than a million points"));
    }
    for i in 0..=count {
        let v = start + i as f64 * step;
        out.push(if (v - stop).abs() <= SNAP * stop.abs().max(1.0) { stop } else { v });
    }
    Ok(())
}

fn number(text: &str, s: &str) -> Result<f64> {
    let v: f64 = s.trim().parse().map_err(|_| usage(text, &format!("'{s}' is not a number")))?;
    if !v.is_finite() {
        return Err(usage(text, "values must be finite"));
    }
    Ok(v)
}

/// Integer grid for family sizes; ranges must step by whole numbers.
pub fn parse_int_grid(text: &str) -> Result<Vec<usize>> {
    parse_grid(text)?
        .into_iter()
        .map(|v| {
            if v >= 0.0 && v.fract() == 0.0 {
                Ok(v as usize)
            } else {
                Err(usage(text, &format!("{v} is not a non-negative integer")))
            }
        })
        .collect()
}

fn usage(text: &str, why: &str) -> CliError {
    CliError::Usage(format!("bad grid '{text}': {why}"))
}
