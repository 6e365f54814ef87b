//! Partially transposed permutation operators and the Haar twirl
//! `X ↦ ∫dU (U^{⊗n}⊗Ū^{⊗n}) X (U^{⊗n}⊗Ū^{⊗n})†`.

use crate::budget;
use crate::error::{Error, Result};
use crate::tensor_core::{permuted_index, CMatrix, DenseOperator, C64, ONE, ZERO};
use nalgebra::DMatrix;
use rayon::prelude::*;

/// Relative cutoff for the Gram pseudo-inverse.
pub const GRAM_CUTOFF: f64 = 1e-10;
/// Largest symmetric group handled, `(2n)! ≤ 720`.
pub const MAX_PERMUTATIONS: usize = 720;
/// Largest operator side handled, `d^{2n} ≤ 2^10`.
pub const MAX_SIDE: usize = 1 << 10;

/// All permutations of `0..k` in lexicographic order.
pub fn all_permutations(k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..k).collect();
    loop {
        out.push(current.clone());
        let Some(i) = (1..k).rev().find(|&i| current[i - 1] < current[i]) else {
            break;
        };
        let j = (i..k)
            .rev()
            .find(|&j| current[j] > current[i - 1])
            .expect("successor exists");
        current.swap(i - 1, j);
        current[i..].reverse();
    }
    out
}

/// Number of cycles of a permutation.
pub fn cycle_count(perm: &[usize]) -> usize {
    let mut seen = vec![false; perm.len()];
    let mut cycles = 0;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        cycles += 1;
        let mut a = start;
        while !seen[a] {
            seen[a] = true;
            a = perm[a];
        }
    }
    cycles
}

fn inverse(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (a, &p) in perm.iter().enumerate() {
        inv[p] = a;
    }
    inv
}

/// Sign of a permutation.
pub fn sign(perm: &[usize]) -> i8 {
    if (perm.len() - cycle_count(perm)).is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Spanning set `{η_π : π ∈ S_{2n}}` with its Gram matrix.
#[derive(Debug, Clone)]
pub struct CommutantBasis {
    n: usize,
    d: usize,
    perms: Vec<Vec<usize>>,
    /// Unit entries `(row, col)` of each `η_π`.
    entries: Vec<Vec<(u32, u32)>>,
    gram: DMatrix<f64>,
    pinv: DMatrix<f64>,
}

/// Builds the partially transposed permutations on `(C^d)^{⊗n} ⊗ (C^d)^{⊗n}`,
/// the transpose acting on the last `n` factors.
pub fn commutant_basis(n: usize, d: usize) -> Result<CommutantBasis> {
    if n == 0 || d < 2 {
        return Err(Error::InvalidArgument("need n >= 1 and d >= 2".into()));
    }
    let perms = all_permutations(2 * n);
    let side = budget::pow(d, 2 * n);
    if perms.len() > MAX_PERMUTATIONS || side > MAX_SIDE as u128 {
        return Err(Error::DimensionOverflow {
            entries: side * perms.len() as u128,
            budget: MAX_SIDE * MAX_PERMUTATIONS,
        });
    }
    let side = side as usize;
    let half = budget::pow(d, n) as usize;
    let entries: Vec<Vec<(u32, u32)>> = perms
        .par_iter()
        .map(|perm| {
            (0..side)
                .map(|col| {
                    let row = permuted_index(col, perm, d);
                    let (ra, rb) = (row / half, row % half);
                    let (ca, cb) = (col / half, col % half);
                    ((ra * half + cb) as u32, (ca * half + rb) as u32)
                })
                .collect()
        })
        .collect();
    let m = perms.len();
    let inverses: Vec<Vec<usize>> = perms.iter().map(|p| inverse(p)).collect();
    let values: Vec<f64> = (0..m * m)
        .into_par_iter()
        .map(|k| {
            let (a, b) = (k / m, k % m);
            let composed: Vec<usize> = perms[b].iter().map(|&x| inverses[a][x]).collect();
            (d as f64).powi(cycle_count(&composed) as i32)
        })
        .collect();
    let gram = DMatrix::from_row_slice(m, m, &values);
    let pinv = pseudo_inverse(&gram);
    Ok(CommutantBasis {
        n,
        d,
        perms,
        entries,
        gram,
        pinv,
    })
}

fn pseudo_inverse(g: &DMatrix<f64>) -> DMatrix<f64> {
    let eig = g.clone().symmetric_eigen();
    let top = eig.eigenvalues.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let m = g.nrows();
    let mut out = DMatrix::zeros(m, m);
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda.abs() > GRAM_CUTOFF * top {
            let v = eig.eigenvectors.column(k);
            out += (v * v.transpose()) / lambda;
        }
    }
    out
}

impl CommutantBasis {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.perms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perms.is_empty()
    }

    /// Side length `d^{2n}` of every operator.
    pub fn side(&self) -> usize {
        self.entries.first().map_or(0, |e| e.len())
    }

    pub fn permutations(&self) -> &[Vec<usize>] {
        &self.perms
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    /// Dense copy of `η_π` for the `index`-th permutation.
    pub fn op(&self, index: usize) -> Result<DenseOperator> {
        let side = self.side();
        budget::check((side as u128) * (side as u128))?;
        let mut m = CMatrix::zeros(side, side);
        for &(r, c) in &self.entries[index] {
            m[(r as usize, c as usize)] = ONE;
        }
        DenseOperator::new(m, self.d, 2 * self.n)
    }

    /// `tr(η_a† η_b)` by counting shared unit entries.
    pub fn overlap(&self, a: usize, b: usize) -> f64 {
        let mut x = self.entries[a].clone();
        let mut y = self.entries[b].clone();
        x.sort_unstable();
        y.sort_unstable();
        let (mut i, mut j, mut count) = (0, 0, 0usize);
        while i < x.len() && j < y.len() {
            match x[i].cmp(&y[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    count += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        count as f64
    }

    fn project<F: Fn(usize, usize) -> C64 + Sync>(&self, entry: F) -> Result<CMatrix> {
        let side = self.side();
        budget::check((side as u128) * (side as u128))?;
        let v: Vec<C64> = self
            .entries
            .par_iter()
            .map(|ops| ops.iter().map(|&(r, c)| entry(r as usize, c as usize)).sum())
            .collect();
        let m = self.len();
        let coeffs: Vec<C64> = (0..m)
            .into_par_iter()
            .map(|a| (0..m).map(|b| v[b] * self.pinv[(a, b)]).sum())
            .collect();
        let mut out = CMatrix::zeros(side, side);
        for (ops, &c) in self.entries.iter().zip(&coeffs) {
            if c == ZERO {
                continue;
            }
            for &(r, col) in ops {
                out[(r as usize, col as usize)] += c;
            }
        }
        Ok(out)
    }

    /// Hilbert–Schmidt projection of `x` onto the span of the `η_π`.
    pub fn twirl(&self, x: &CMatrix) -> Result<CMatrix> {
        let side = self.side();
        if x.nrows() != side || x.ncols() != side {
            return Err(Error::InvalidArgument(format!("operator must be {side} x {side}")));
        }
        self.project(|r, c| x[(r, c)])
    }

    /// Twirl of the rank-one operator `|v⟩⟨v|`.
    pub fn twirl_pure(&self, v: &[C64]) -> Result<CMatrix> {
        if v.len() != self.side() {
            return Err(Error::InvalidArgument(format!(
                "vector must have length {}",
                self.side()
            )));
        }
        self.project(|r, c| v[r] * v[c].conj())
    }
}

/// Twirl with a freshly built basis.
pub fn twirl(x: &DenseOperator, basis: &CommutantBasis) -> Result<DenseOperator> {
    DenseOperator::new(basis.twirl(x.entries())?, basis.d(), 2 * basis.n())
}
