//! Flat-spectrum linear system for qubit programs.

use super::cg::zero_projection_sum;
use super::probe::{Partition, ProbeSpec};
use crate::error::{Error, Result};
use crate::tensor_core::binomial_big;
use nalgebra::{DMatrix, DVector};
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

/// Tolerance for accepting weights as a probability vector.
pub const Q_TOL: f64 = 1e-9;

fn projection_cache() -> &'static Mutex<HashMap<(i64, i64), f64>> {
    static CACHE: OnceLock<Mutex<HashMap<(i64, i64), f64>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn cached_projection(two_j: i64, big_j: i64) -> Result<f64> {
    if let Some(&v) = projection_cache().lock().expect("cache lock").get(&(two_j, big_j)) {
        return Ok(v);
    }
    let v = zero_projection_sum(two_j, big_j)?;
    projection_cache().lock().expect("cache lock").insert((two_j, big_j), v);
    Ok(v)
}

/// Spin labels `J` (rows) and doubled `2j` (columns): both run over
/// `n mod 2, n mod 2 + 2, …, n`.
pub fn system_labels(n: usize) -> Vec<i64> {
    ((n % 2) as i64..=n as i64).step_by(2).collect()
}

/// `A[J, j] = |Σ_m C^{J0}_{jm,j−m}|²/(2j+1)` for `2j ≥ J`, `b[J] = (2J+1)/binom(n+2,2)`.
pub fn conjecture_system_d2(n: usize) -> Result<(DMatrix<f64>, DVector<f64>)> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let labels = system_labels(n);
    let size = labels.len();
    let cells: Vec<(usize, usize)> = (0..size).flat_map(|r| (0..size).map(move |c| (r, c))).collect();
    let values: Vec<f64> = cells
        .par_iter()
        .map(|&(r, c)| {
            let (big_j, two_j) = (labels[r], labels[c]);
            if two_j < big_j {
                return Ok(0.0);
            }
            let s = cached_projection(two_j, big_j)?;
            Ok(s * s / (two_j + 1) as f64)
        })
        .collect::<Result<_>>()?;
    let a = DMatrix::from_row_slice(size, size, &values);
    let norm = binomial_big(n as u64 + 2, 2).to_f64().expect("small binomial");
    let b = DVector::from_iterator(size, labels.iter().map(|&j| (2 * j + 1) as f64 / norm));
    Ok((a, b))
}

/// Solution of the flat-spectrum system.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QSolution {
    pub n: usize,
    /// Doubled spins `2j`, aligned with `q`.
    pub two_j: Vec<i64>,
    pub q: Vec<f64>,
    pub residual: f64,
    /// `q ∈ [−1e−9, 1 + 1e−9]` componentwise.
    pub within_simplex: bool,
}

impl QSolution {
    /// Weights keyed by two-row partitions `(n/2 + j, n/2 − j)`.
    pub fn probe_spec(&self) -> Result<ProbeSpec> {
        let weights = self
            .two_j
            .iter()
            .zip(&self.q)
            .map(|(&tj, &q)| (spin_partition(self.n, tj), q))
            .collect();
        ProbeSpec::new(self.n, 2, weights)
    }
}

/// Two-row partition for spin `j` on `n` qubits.
pub fn spin_partition(n: usize, two_j: i64) -> Partition {
    let top = (n as i64 + two_j) / 2;
    let bottom = n as i64 - top;
    let mut rows = vec![top as usize];
    if bottom > 0 {
        rows.push(bottom as usize);
    }
    rows
}

/// Solves the square system by LU with partial pivoting. Weights outside the
/// simplex are reported through `within_simplex`, not as errors.
pub fn solve_q_d2(n: usize) -> Result<QSolution> {
    let (a, b) = conjecture_system_d2(n)?;
    let q = a
        .clone()
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::Singular(format!("flat-spectrum system for n = {n}")))?;
    let residual = (&a * &q - &b).amax();
    let within_simplex = q.iter().all(|&x| (-Q_TOL..=1.0 + Q_TOL).contains(&x));
    Ok(QSolution {
        n,
        two_j: system_labels(n),
        q: q.iter().copied().collect(),
        residual,
        within_simplex,
    })
}
