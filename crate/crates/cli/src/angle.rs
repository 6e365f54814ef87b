//! Angle tokens: decimals or multiples of pi such as `pi`, `-pi/2`, `2pi/3`, `3*pi/4`.

use std::f64::consts::PI;

pub fn parse_angle(raw: &str) -> Result<f64, String> {
    let s = raw.trim().to_ascii_lowercase();
    if let Ok(x) = s.parse::<f64>() {
        return if x.is_finite() {
            Ok(x)
        } else {
            Err(format!("angle {raw:?} is not finite"))
        };
    }
    let (sign, body) = match s.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, s.as_str()),
    };
    let Some(pos) = body.find("pi") else {
        return Err(format!("cannot parse angle {raw:?}"));
    };
    let coeff = body[..pos].trim_end_matches('*');
    let num: f64 = if coeff.is_empty() {
        1.0
    } else {
        coeff.parse().map_err(|_| format!("cannot parse angle {raw:?}"))?
    };
    let rest = &body[pos + 2..];
    let den: f64 = if rest.is_empty() {
        1.0
    } else {
        rest.strip_prefix('/')
            .and_then(|d| d.parse().ok())
            .filter(|d: &f64| *d != 0.0)
            .ok_or_else(|| format!("cannot parse angle {raw:?}"))?
    };
    Ok(sign * num * PI / den)
}

/// Comma-separated angles.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleList(pub Vec<f64>);

pub fn parse_angle_list(raw: &str) -> Result<AngleList, String> {
    let v: Vec<f64> = raw
        .split(',')
        .filter(|t| !t.trim().is_empty())
        .map(parse_angle)
        .collect::<Result<_, _>>()?;
    if v.is_empty() {
        return Err(format!("no angles in {raw:?}"));
    }
    Ok(AngleList(v))
}
