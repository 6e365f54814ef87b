//! Probe states `Σ_λ √q_λ |Φ⁺_λ⟩ ⊗ |χ_λ⟩` built from one copy of each
//! `U(d)` irrep inside `(C^d)^{⊗n}`.

use super::commutant::{all_permutations, sign};
use crate::budget;
use crate::error::{Error, Result};
use crate::tensor_core::{permuted_index, PureState, C64};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

/// Weights tolerance below zero before clipping.
pub const NEGATIVE_TOL: f64 = 1e-10;
/// Tolerance on `Σ q = 1`.
pub const SUM_TOL: f64 = 1e-9;

/// Partition as weakly decreasing row lengths.
pub type Partition = Vec<usize>;

/// Partitions of `n` with at most `max_rows` rows, in reverse lexicographic order.
pub fn partitions(n: usize, max_rows: usize) -> Vec<Partition> {
    fn go(rest: usize, cap: usize, rows_left: usize, cur: &mut Partition, out: &mut Vec<Partition>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        if rows_left == 0 {
            return;
        }
        for first in (1..=cap.min(rest)).rev() {
            cur.push(first);
            go(rest - first, first, rows_left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, max_rows, &mut Vec::new(), &mut out);
    out
}

fn validate_partition(lambda: &[usize], n: usize, d: usize) -> Result<()> {
    let ok = lambda.iter().sum::<usize>() == n
        && lambda.len() <= d
        && lambda.iter().all(|&r| r > 0)
        && lambda.windows(2).all(|w| w[0] >= w[1]);
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "{lambda:?} is not a partition of {n} with at most {d} rows"
        )))
    }
}

/// Dimension of the `U(d)` irrep `λ` by the hook-content formula.
pub fn irrep_dim(lambda: &[usize], d: usize) -> usize {
    let mut num = 1f64;
    let mut den = 1f64;
    for (i, &row) in lambda.iter().enumerate() {
        for j in 0..row {
            let arm = row - j - 1;
            let leg = lambda[i + 1..].iter().filter(|&&r| r > j).count();
            num *= (d + j) as f64 - i as f64;
            den *= (arm + leg + 1) as f64;
        }
    }
    (num / den).round() as usize
}

/// Weights `q_λ` over partitions of `n` with at most `d` rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeSpec {
    pub n: usize,
    pub d: usize,
    pub weights: Vec<(Partition, f64)>,
}

impl ProbeSpec {
    /// Validates, clipping weights in `[−1e−10, 0)` to zero.
    pub fn new(n: usize, d: usize, weights: Vec<(Partition, f64)>) -> Result<Self> {
        let mut clean = Vec::with_capacity(weights.len());
        for (lambda, q) in weights {
            validate_partition(&lambda, n, d)?;
            if q < -NEGATIVE_TOL || !q.is_finite() {
                return Err(Error::InvalidArgument(format!("weight {q} for {lambda:?} is negative")));
            }
            clean.push((lambda, q.max(0.0)));
        }
        let total: f64 = clean.iter().map(|(_, q)| q).sum();
        if (total - 1.0).abs() > SUM_TOL {
            return Err(Error::InvalidArgument(format!("weights sum to {total}, not 1")));
        }
        Ok(Self { n, d, weights: clean })
    }
}

fn permutation_matrix(perm: &[usize], d: usize, dim: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(dim, dim);
    for col in 0..dim {
        m[(permuted_index(col, perm, d), col)] = 1.0;
    }
    m
}

/// Young symmetrizer of the row-filled standard tableau of `λ`, acting on `(C^d)^{⊗n}`.
pub fn young_symmetrizer(lambda: &[usize], d: usize) -> Result<DMatrix<f64>> {
    let n: usize = lambda.iter().sum();
    validate_partition(lambda, n, d)?;
    let dim = budget::check_operator(d, n)?;
    let mut row_of = Vec::with_capacity(n);
    let mut col_of = Vec::with_capacity(n);
    for (i, &len) in lambda.iter().enumerate() {
        for j in 0..len {
            row_of.push(i);
            col_of.push(j);
        }
    }
    let mut rows = DMatrix::zeros(dim, dim);
    let mut cols = DMatrix::zeros(dim, dim);
    for perm in all_permutations(n) {
        if (0..n).all(|a| row_of[perm[a]] == row_of[a]) {
            rows += permutation_matrix(&perm, d, dim);
        }
        if (0..n).all(|a| col_of[perm[a]] == col_of[a]) {
            cols += permutation_matrix(&perm, d, dim) * f64::from(sign(&perm));
        }
    }
    Ok(rows * cols)
}

/// Orthonormal basis (columns) of the range of the Young symmetrizer,
/// one copy of the irrep `λ`.
pub fn young_block_basis(lambda: &[usize], d: usize) -> Result<DMatrix<f64>> {
    let y = young_symmetrizer(lambda, d)?;
    let expected = irrep_dim(lambda, d);
    let svd = y.svd(true, false);
    let u = svd.u.expect("left vectors requested");
    let top = svd.singular_values.max();
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| {
        svd.singular_values[b]
            .partial_cmp(&svd.singular_values[a])
            .expect("finite")
    });
    let kept: Vec<usize> = order
        .into_iter()
        .filter(|&k| svd.singular_values[k] > 1e-9 * top)
        .collect();
    if kept.len() != expected {
        return Err(Error::Consistency(format!(
            "Young symmetrizer range for {lambda:?} has rank {}, expected {expected}",
            kept.len()
        )));
    }
    Ok(DMatrix::from_columns(
        &kept.iter().map(|&k| u.column(k).into_owned()).collect::<Vec<_>>(),
    ))
}

/// Spin-`j` block on `n` qubits ordered `m = j, j−1, …, −j`, built from the
/// highest-weight vector by the lowering operator, so lowering matrix
/// elements are nonnegative. `|0⟩` carries `m = +½`.
pub fn spin_block_basis(n: usize, two_j: i64) -> Result<DMatrix<f64>> {
    if two_j < 0 || two_j > n as i64 || (n as i64 - two_j) % 2 != 0 {
        return Err(Error::InvalidSpin(format!(
            "spin 2j = {two_j} does not occur in {n} qubits"
        )));
    }
    let lambda = super::conjecture::spin_partition(n, two_j);
    let range = young_block_basis(&lambda, 2)?;
    let dim = range.nrows();
    let k = (n as i64 - two_j) as u32 / 2;
    let mut weight = range.clone();
    for r in 0..dim {
        if (r as u32).count_ones() != k {
            weight.row_mut(r).fill(0.0);
        }
    }
    let svd = weight.svd(true, false);
    let best = svd.singular_values.imax();
    let mut top: DVector<f64> = svd.u.expect("left vectors requested").column(best).into_owned();
    let lead = top.iter().copied().find(|x| x.abs() > 1e-12).unwrap_or(1.0);
    if lead < 0.0 {
        top = -top;
    }
    let size = (two_j + 1) as usize;
    let mut columns = Vec::with_capacity(size);
    columns.push(top.normalize());
    for _ in 1..size {
        let prev = columns.last().expect("nonempty");
        let mut next = DVector::zeros(dim);
        for (idx, &amp) in prev.iter().enumerate() {
            if amp == 0.0 {
                continue;
            }
            for bit in 0..n {
                let mask = 1 << (n - 1 - bit);
                if idx & mask == 0 {
                    next[idx | mask] += amp;
                }
            }
        }
        columns.push(next.normalize());
    }
    Ok(DMatrix::from_columns(&columns))
}

fn probe_from_blocks(spec: &ProbeSpec, blocks: &[DMatrix<f64>]) -> Result<PureState> {
    let dim = budget::check_vector(spec.d, spec.n)?;
    budget::check_vector(spec.d, 2 * spec.n)?;
    let mut k = DMatrix::<f64>::zeros(dim, dim);
    for ((_, q), b) in spec.weights.iter().zip(blocks) {
        let scale = (q / b.ncols() as f64).sqrt();
        k += b * b.transpose() * scale;
    }
    let amps: Vec<C64> = k.transpose().iter().map(|&x| C64::from(x)).collect();
    PureState::normalized(amps, spec.d, 2 * spec.n)
}

/// Probe with Young-symmetrizer blocks; the `(a, b)` amplitude is `K[a, b]`
/// for `K = Σ_λ √(q_λ/d_λ) Π_λ`.
pub fn build_probe(spec: &ProbeSpec) -> Result<PureState> {
    let blocks = spec
        .weights
        .iter()
        .map(|(lambda, _)| young_block_basis(lambda, spec.d))
        .collect::<Result<Vec<_>>>()?;
    probe_from_blocks(spec, &blocks)
}

/// Qubit probe with spin blocks in the Condon–Shortley phase convention.
pub fn build_probe_d2(n: usize, spec: &ProbeSpec) -> Result<PureState> {
    if spec.d != 2 || spec.n != n {
        return Err(Error::InvalidArgument("qubit probe needs d = 2 and matching n".into()));
    }
    let blocks = spec
        .weights
        .iter()
        .map(|(lambda, _)| {
            let two_j = (lambda[0] - lambda.get(1).copied().unwrap_or(0)) as i64;
            spin_block_basis(n, two_j)
        })
        .collect::<Result<Vec<_>>>()?;
    probe_from_blocks(spec, &blocks)
}
