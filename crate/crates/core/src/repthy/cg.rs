//! SU(2) Clebsch–Gordan coefficients in the Condon–Shortley convention.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Spin label `(j, m)` stored as doubled integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpinLabel {
    pub two_j: i64,
    pub two_m: i64,
}

impl SpinLabel {
    pub fn new(two_j: i64, two_m: i64) -> Result<Self> {
        if two_j < 0 {
            return Err(Error::InvalidSpin(format!("negative spin 2j = {two_j}")));
        }
        if two_m.abs() > two_j {
            return Err(Error::InvalidSpin(format!("|m| > j for 2j = {two_j}, 2m = {two_m}")));
        }
        if (two_j - two_m).rem_euclid(2) != 0 {
            return Err(Error::InvalidSpin(format!(
                "parity mismatch 2j = {two_j}, 2m = {two_m}"
            )));
        }
        Ok(Self { two_j, two_m })
    }
}

fn factorial(k: i64) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, i| acc * i)
}

/// Exact `C²` with its sign, as `(sign, C²)`.
pub fn cg_squared_signed(a: SpinLabel, b: SpinLabel, c: SpinLabel) -> Result<(i8, BigRational)> {
    let a = SpinLabel::new(a.two_j, a.two_m)?;
    let b = SpinLabel::new(b.two_j, b.two_m)?;
    let c = SpinLabel::new(c.two_j, c.two_m)?;
    let zero = (0, BigRational::zero());
    if c.two_m != a.two_m + b.two_m {
        return Ok(zero);
    }
    if c.two_j < (a.two_j - b.two_j).abs() || c.two_j > a.two_j + b.two_j {
        return Ok(zero);
    }
    if (a.two_j + b.two_j + c.two_j) % 2 != 0 {
        return Ok(zero);
    }
    // All quantities below are integers once the doubled labels are halved.
    let (j1, j2, j) = (a.two_j, b.two_j, c.two_j);
    let (m1, m2, m) = (a.two_m, b.two_m, c.two_m);
    let h = |x: i64| x / 2;
    let f = |x: i64| factorial(x);
    let pre_num = BigInt::from(j + 1)
        * f(h(j + j1 - j2))
        * f(h(j - j1 + j2))
        * f(h(j1 + j2 - j))
        * f(h(j + m))
        * f(h(j - m))
        * f(h(j1 - m1))
        * f(h(j1 + m1))
        * f(h(j2 - m2))
        * f(h(j2 + m2));
    let pre_den = f(h(j1 + j2 + j) + 1);
    let k_min = 0.max(h(j2 - j - m1)).max(h(j1 + m2 - j));
    let k_max = h(j1 + j2 - j).min(h(j1 - m1)).min(h(j2 + m2));
    let mut sum = BigRational::zero();
    for k in k_min..=k_max {
        let den = f(k)
            * f(h(j1 + j2 - j) - k)
            * f(h(j1 - m1) - k)
            * f(h(j2 + m2) - k)
            * f(h(j - j2 + m1) + k)
            * f(h(j - j1 - m2) + k);
        let term = BigRational::new(BigInt::one(), den);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    if sum.is_zero() {
        return Ok(zero);
    }
    let sign = if sum.is_negative() { -1 } else { 1 };
    let squared = BigRational::new(pre_num, pre_den) * &sum * &sum;
    Ok((sign, squared))
}

/// `C^{J M}_{j1 m1, j2 m2}`.
pub fn cg_su2(a: SpinLabel, b: SpinLabel, c: SpinLabel) -> Result<f64> {
    let (sign, sq) = cg_squared_signed(a, b, c)?;
    if sign == 0 {
        return Ok(0.0);
    }
    let v = sq
        .to_f64()
        .ok_or_else(|| Error::Overflow("Clebsch-Gordan square".into()))?;
    Ok(f64::from(sign) * v.sqrt())
}

/// Convenience form with doubled integer labels.
pub fn cg(two_j1: i64, two_m1: i64, two_j2: i64, two_m2: i64, two_j: i64, two_m: i64) -> Result<f64> {
    cg_su2(
        SpinLabel {
            two_j: two_j1,
            two_m: two_m1,
        },
        SpinLabel {
            two_j: two_j2,
            two_m: two_m2,
        },
        SpinLabel { two_j, two_m },
    )
}

/// `Σ_m (−1)^{j−m} C^{00}_{jm, j−m}`, which equals `√(2j+1)`.
pub fn magic_sum_check(two_j: i64) -> Result<f64> {
    if two_j < 0 {
        return Err(Error::InvalidSpin(format!("negative spin 2j = {two_j}")));
    }
    let mut total = 0.0;
    for two_m in (-two_j..=two_j).step_by(2) {
        let sign = if ((two_j - two_m) / 2) % 2 == 0 { 1.0 } else { -1.0 };
        total += sign * cg(two_j, two_m, two_j, -two_m, 0, 0)?;
    }
    Ok(total)
}

/// `Σ_m C^{J0}_{jm, j−m}` for integer `J` and `2j`.
pub fn zero_projection_sum(two_j: i64, big_j: i64) -> Result<f64> {
    let mut total = 0.0;
    for two_m in (-two_j..=two_j).step_by(2) {
        total += cg(two_j, two_m, two_j, -two_m, 2 * big_j, 0)?;
    }
    Ok(total)
}
