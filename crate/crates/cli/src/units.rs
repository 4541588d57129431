//! Numeric value parsing for flags and config files.

use crate::error::CliError;

/// Power in watts from `"0.5"`, `"0.5W"`, `"1mW"` or `"20uW"` (`µW` too).
/// A bare number is watts.
pub fn parse_power(text: &str) -> Result<f64, CliError> {
    let t = text.trim();
    // divide so that "20uW" is the double nearest 2e-5
    let (number, divisor) = if let Some(n) = t.strip_suffix("mW").or_else(|| t.strip_suffix("mw")) {
        (n, 1e3)
    } else if let Some(n) = ["uW", "uw", "µW", "µw"].iter().find_map(|s| t.strip_suffix(s)) {
        (n, 1e6)
    } else if let Some(n) = t.strip_suffix('W').or_else(|| t.strip_suffix('w')) {
        (n, 1.0)
    } else {
        (t, 1.0)
    };
    let value = parse_real(number.trim())?;
    Ok(value / divisor)
}

pub fn parse_real(text: &str) -> Result<f64, CliError> {
    let t = text.trim();
    t.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| CliError::Config(format!("not a number: {t:?}")))
}

pub fn parse_count(text: &str) -> Result<u64, CliError> {
    let t = text.trim();
    if let Ok(v) = t.parse::<u64>() {
        return Ok(v);
    }
    // allow 1e5
    match t.parse::<f64>() {
        Ok(v) if v >= 0.0 && v.fract() == 0.0 && v < 1.8e19 => Ok(v as u64),
        _ => Err(CliError::Config(format!("not a nonnegative integer: {t:?}"))),
    }
}

pub fn parse_bool(text: &str) -> Result<bool, CliError> {
    match text.trim() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        other => Err(CliError::Config(format!("not a boolean: {other:?}"))),
    }
}

/// Comma-separated list; an empty string is an empty list.
pub fn parse_list<T>(text: &str, item: impl Fn(&str) -> Result<T, CliError>) -> Result<Vec<T>, CliError> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',').map(|s| item(s.trim())).collect()
}
