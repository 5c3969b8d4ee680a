//! Durations like `15min`, `4h`, `900s` and rates like `5e-3/h`.
//! Everything is converted to seconds.

use tmrdep_core::HOUR;

fn unit_seconds(unit: &str) -> Option<f64> {
    match unit {
        "s" | "sec" => Some(1.0),
        "min" => Some(60.0),
        "h" => Some(HOUR),
        "d" => Some(24.0 * HOUR),
        _ => None,
    }
}

/// Splits `"12.5min"` into `(12.5, "min")`.
fn split_number(text: &str) -> Option<(f64, &str)> {
    let text = text.trim();
    let end = text
        .char_indices()
        .find(|&(i, c)| {
            let exponent_sign = (c == '-' || c == '+') && text[..i].ends_with(['e', 'E']);
            let exponent = (c == 'e' || c == 'E')
                && text[i + 1..].starts_with(|n: char| n.is_ascii_digit() || n == '-' || n == '+');
            !(c.is_ascii_digit() || c == '.' || exponent || exponent_sign)
        })
        .map_or(text.len(), |(i, _)| i);
    let value: f64 = text[..end].parse().ok()?;
    Some((value, text[end..].trim()))
}

/// Duration in seconds. A unit suffix is required.
pub fn parse_duration(text: &str) -> Result<f64, String> {
    let (value, unit) = split_number(text).ok_or_else(|| format!("`{text}` is not a duration"))?;
    let scale = unit_seconds(unit)
        .ok_or_else(|| format!("`{text}`: duration needs a unit of s, min, h or d"))?;
    let seconds = value * scale;
    if seconds.is_finite() && seconds >= 0.0 {
        Ok(seconds)
    } else {
        Err(format!("`{text}` is not a nonnegative duration"))
    }
}

/// Rate per second from `"<number>/<unit>"`.
pub fn parse_rate(text: &str) -> Result<f64, String> {
    let (value, rest) = split_number(text).ok_or_else(|| format!("`{text}` is not a rate"))?;
    let unit = rest
        .strip_prefix('/')
        .map(str::trim)
        .ok_or_else(|| format!("`{text}`: rate needs a unit such as /s or /h"))?;
    let scale = unit_seconds(unit).ok_or_else(|| format!("`{text}`: unknown time unit `{unit}`"))?;
    let per_second = value / scale;
    if per_second.is_finite() && per_second >= 0.0 {
        Ok(per_second)
    } else {
        Err(format!("`{text}` is not a nonnegative rate"))
    }
}

/// Shortest text that [`parse_duration`] maps back to exactly `seconds`.
pub fn format_duration(seconds: f64) -> String {
    for (unit, scale) in [("h", HOUR), ("min", 60.0)] {
        let v = seconds / scale;
        if seconds != 0.0 && v.fract() == 0.0 && v * scale == seconds {
            return format!("{v}{unit}");
        }
    }
    format!("{seconds}s")
}
