//! Lambert `W₀` and the program-dimension lower bound `f_d(ε, n)`.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::E;

/// Principal branch of the Lambert function, by Halley iteration.
pub fn lambert_w0(x: f64) -> Result<f64> {
    let branch = -1.0 / E;
    if x.is_nan() || x < branch - 1e-15 {
        return Err(Error::Domain(format!("lambert_w0 needs x >= -1/e, got {x}")));
    }
    if x <= branch {
        return Ok(-1.0);
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let mut w = if x < -0.25 {
        let p = (2.0 * (E * x + 1.0)).sqrt();
        -1.0 + p - p * p / 3.0
    } else if x < 3.0 {
        (1.0 + x).ln() * 0.75
    } else {
        let l = x.ln();
        l - l.ln()
    };
    for _ in 0..100 {
        let ew = w.exp();
        let f = w * ew - x;
        let denom = ew * (w + 1.0) - (w + 2.0) * f / (2.0 * w + 2.0);
        let step = f / denom;
        w -= step;
        if step.abs() <= 1e-16 * (1.0 + w.abs()) {
            break;
        }
    }
    Ok(w)
}

/// `ln binom(n + k, k)` for real `n ≥ 0` and integer `k`.
pub fn ln_binom_shift(n: f64, k: usize) -> f64 {
    (1..=k).map(|i| ((n + i as f64) / i as f64).ln()).sum()
}

/// `f_d(ε, n)` in natural-log units.
pub fn lower_bound_fd(epsilon: f64, n: f64, d: usize) -> f64 {
    let penalty = 4.0 * n * (2.0 * epsilon).sqrt();
    if d == 2 {
        ln_binom_shift(n, 2) - penalty * ln_binom_shift(n, 3) - 2f64.ln()
    } else {
        2.0 * ln_binom_shift(n, d - 1) - penalty * ln_binom_shift(n, d * d - 1) - 2f64.ln()
    }
}

/// Solution of `n ln n = 1/(2(d+1)√(2ε))`, i.e. `exp(W₀(√(1/(8(d+1)²ε))))`.
pub fn n_of_eps(epsilon: f64, d: usize) -> Result<f64> {
    if epsilon <= 0.0 {
        return Err(Error::Domain(format!("epsilon must be positive, got {epsilon}")));
    }
    let x = (1.0 / (8.0 * ((d + 1) as f64).powi(2) * epsilon)).sqrt();
    Ok(lambert_w0(x)?.exp())
}

/// Asymptotic bound `ln d_P ≥ (1 − δ)·leading`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FinalBound {
    pub d: usize,
    pub epsilon: f64,
    pub n_star: f64,
    pub f_d: f64,
    pub leading: f64,
    pub delta: f64,
    pub value: f64,
    /// `ε ≤ 10⁻³/(d+1)²` and `δ < 1`.
    pub valid: bool,
}

/// `leading = (d−1) ln(1/(8(d²−1)²ε))` for `d ≥ 3`, `ln(1/ε)` for `d = 2`.
/// For `d ≥ 3`, `δ = (2 ln ln √(1/(8(d+1)²ε)) + K(d))/leading`, with
/// `K(d) = (2 ln(d−1) + ln 2)/(d−1)`. For `d = 2`, `δ = 1 − f_2(ε, n*)/leading`.
pub fn final_bound(epsilon: f64, d: usize) -> Result<FinalBound> {
    if d < 2 {
        return Err(Error::InvalidArgument("d must be at least 2".into()));
    }
    let n_star = n_of_eps(epsilon, d)?;
    let f_d = lower_bound_fd(epsilon, n_star, d);
    let df = d as f64;
    let (leading, delta) = if d == 2 {
        let leading = (1.0 / epsilon).ln();
        (leading, 1.0 - f_d / leading)
    } else {
        let leading = (df - 1.0) * (1.0 / (8.0 * (df * df - 1.0).powi(2) * epsilon)).ln();
        let x = (1.0 / (8.0 * (df + 1.0).powi(2) * epsilon)).sqrt();
        let k = (2.0 * (df - 1.0).ln() + 2f64.ln()) / (df - 1.0);
        let base = leading / (df - 1.0);
        (leading, (2.0 * x.ln().ln() + k) / base)
    };
    let valid = epsilon <= 1e-3 / (df + 1.0).powi(2) && delta < 1.0;
    Ok(FinalBound {
        d,
        epsilon,
        n_star,
        f_d,
        leading,
        delta,
        value: (1.0 - delta) * leading,
        valid,
    })
}
