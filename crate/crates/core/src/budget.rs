//! Global cap on the number of complex entries a dense allocation may hold.
//!
//! The cap defaults to 2^22 and can be overridden through the
//! `REFLECTRON_BUDGET` environment variable or [`set_max_entries`].

use crate::error::{Error, Result};
use std::sync::atomic::{AtomicUsize, Ordering};

pub const DEFAULT_MAX_ENTRIES: usize = 1 << 22;
pub const ENV_VAR: &str = "REFLECTRON_BUDGET";

static MAX_ENTRIES: AtomicUsize = AtomicUsize::new(0);

fn from_env() -> usize {
    std::env::var(ENV_VAR)
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&v| v > 0)
        .unwrap_or(DEFAULT_MAX_ENTRIES)
}

pub fn max_entries() -> usize {
    let v = MAX_ENTRIES.load(Ordering::Relaxed);
    if v != 0 {
        return v;
    }
    let v = from_env();
    MAX_ENTRIES.store(v, Ordering::Relaxed);
    v
}

pub fn set_max_entries(entries: usize) {
    MAX_ENTRIES.store(entries.max(1), Ordering::Relaxed);
}

/// Fails when `entries` exceeds the configured budget.
pub fn check(entries: u128) -> Result<()> {
    let budget = max_entries();
    if entries > budget as u128 {
        Err(Error::DimensionOverflow { entries, budget })
    } else {
        Ok(())
    }
}

/// `d^k` as u128, saturating on overflow.
pub fn pow(d: usize, k: usize) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..k {
        acc = acc.saturating_mul(d as u128);
    }
    acc
}

/// Checks that a dense `d^k × d^k` operator fits and returns `d^k`.
pub fn check_operator(d: usize, k: usize) -> Result<usize> {
    let dim = pow(d, k);
    check(dim.saturating_mul(dim))?;
    Ok(dim as usize)
}

/// Checks that a length `d^k` vector fits and returns `d^k`.
pub fn check_vector(d: usize, k: usize) -> Result<usize> {
    let dim = pow(d, k);
    check(dim)?;
    Ok(dim as usize)
}
