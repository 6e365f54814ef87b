//! Dense complex linear algebra over tensor-product spaces.
//!
//! Factor 0 is the leftmost tensor slot. Basis index `i_0 i_1 … i_{k-1}` is
//! stored big-endian, so factor 0 is the most significant digit.

use crate::budget;
use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
use num_bigint::BigUint;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

const NORM_TOL: f64 = 1e-12;

/// Seeded RNG used throughout the crate.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Normalized pure state on `(C^d)^{⊗k}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PureState {
    amplitudes: Vec<C64>,
    local_dim: usize,
    factors: usize,
}

impl PureState {
    /// Builds a state, rejecting wrong lengths and norms off by more than 1e-12.
    pub fn new(amplitudes: Vec<C64>, local_dim: usize, factors: usize) -> Result<Self> {
        let dim = budget::pow(local_dim, factors);
        if local_dim < 1 || amplitudes.len() as u128 != dim {
            return Err(Error::InvalidArgument(format!(
                "state length {} is not {}^{}",
                amplitudes.len(),
                local_dim,
                factors
            )));
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidArgument(format!("state norm {norm} is not 1")));
        }
        Ok(Self {
            amplitudes,
            local_dim,
            factors,
        })
    }

    /// Builds a state after rescaling to unit norm.
    pub fn normalized(mut amplitudes: Vec<C64>, local_dim: usize, factors: usize) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidArgument("cannot normalize a zero vector".into()));
        }
        for a in amplitudes.iter_mut() {
            *a /= norm;
        }
        Self::new(amplitudes, local_dim, factors)
    }

    /// Single-factor state on `C^d`.
    pub fn qudit(amplitudes: Vec<C64>) -> Result<Self> {
        let d = amplitudes.len();
        Self::normalized(amplitudes, d, 1)
    }

    pub fn basis(local_dim: usize, index: usize) -> Self {
        let mut amplitudes = vec![ZERO; local_dim];
        amplitudes[index] = ONE;
        Self {
            amplitudes,
            local_dim,
            factors: 1,
        }
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn to_vector(&self) -> CVector {
        CVector::from_column_slice(&self.amplitudes)
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    pub fn factors(&self) -> usize {
        self.factors
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &PureState) -> C64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn projector(&self) -> DenseOperator {
        let v = self.to_vector();
        DenseOperator::from_parts(&v * v.adjoint(), self.local_dim, self.factors)
    }

    pub fn tensor(&self, other: &PureState) -> Result<PureState> {
        if self.local_dim != other.local_dim {
            return Err(Error::InvalidArgument("local dimensions differ".into()));
        }
        budget::check_vector(self.local_dim, self.factors + other.factors)?;
        let mut out = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                out.push(a * b);
            }
        }
        Ok(Self {
            amplitudes: out,
            local_dim: self.local_dim,
            factors: self.factors + other.factors,
        })
    }

    /// `|ψ⟩^{⊗n}`.
    pub fn tensor_power(&self, n: usize) -> Result<PureState> {
        budget::check_vector(self.local_dim, self.factors * n)?;
        let mut acc = PureState {
            amplitudes: vec![ONE],
            local_dim: self.local_dim,
            factors: 0,
        };
        for _ in 0..n {
            acc = acc.tensor(self)?;
        }
        Ok(acc)
    }
}

/// Square operator on `(C^d)^{⊗k}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    entries: CMatrix,
    local_dim: usize,
    factors: usize,
}

impl DenseOperator {
    pub fn new(entries: CMatrix, local_dim: usize, factors: usize) -> Result<Self> {
        let dim = budget::pow(local_dim, factors);
        if entries.nrows() != entries.ncols() || entries.nrows() as u128 != dim {
            return Err(Error::InvalidArgument(format!(
                "operator of shape {}x{} is not {}^{} square",
                entries.nrows(),
                entries.ncols(),
                local_dim,
                factors
            )));
        }
        Ok(Self {
            entries,
            local_dim,
            factors,
        })
    }

    pub(crate) fn from_parts(entries: CMatrix, local_dim: usize, factors: usize) -> Self {
        debug_assert_eq!(entries.nrows() as u128, budget::pow(local_dim, factors));
        Self {
            entries,
            local_dim,
            factors,
        }
    }

    /// Operator on a single factor `C^d` with `d = entries.nrows()`.
    pub fn single(entries: CMatrix) -> Result<Self> {
        let d = entries.nrows();
        Self::new(entries, d, 1)
    }

    pub fn identity(local_dim: usize, factors: usize) -> Result<Self> {
        let dim = budget::check_operator(local_dim, factors)?;
        Ok(Self {
            entries: CMatrix::identity(dim, dim),
            local_dim,
            factors,
        })
    }

    pub fn zeros(local_dim: usize, factors: usize) -> Result<Self> {
        let dim = budget::check_operator(local_dim, factors)?;
        Ok(Self {
            entries: CMatrix::zeros(dim, dim),
            local_dim,
            factors,
        })
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_entries(self) -> CMatrix {
        self.entries
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    pub fn factors(&self) -> usize {
        self.factors
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn trace(&self) -> C64 {
        self.entries.trace()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_parts(self.entries.adjoint(), self.local_dim, self.factors)
    }

    pub fn matmul(&self, other: &DenseOperator) -> Result<Self> {
        self.same_shape(other)?;
        Ok(Self::from_parts(
            &self.entries * &other.entries,
            self.local_dim,
            self.factors,
        ))
    }

    pub fn add(&self, other: &DenseOperator) -> Result<Self> {
        self.same_shape(other)?;
        Ok(Self::from_parts(
            &self.entries + &other.entries,
            self.local_dim,
            self.factors,
        ))
    }

    pub fn sub(&self, other: &DenseOperator) -> Result<Self> {
        self.same_shape(other)?;
        Ok(Self::from_parts(
            &self.entries - &other.entries,
            self.local_dim,
            self.factors,
        ))
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::from_parts(&self.entries * s, self.local_dim, self.factors)
    }

    pub fn kron(&self, other: &DenseOperator) -> Result<Self> {
        if self.local_dim != other.local_dim {
            return Err(Error::InvalidArgument("local dimensions differ".into()));
        }
        budget::check_operator(self.local_dim, self.factors + other.factors)?;
        Ok(Self::from_parts(
            self.entries.kronecker(&other.entries),
            self.local_dim,
            self.factors + other.factors,
        ))
    }

    pub fn apply(&self, state: &PureState) -> Result<CVector> {
        if state.dim() != self.dim() {
            return Err(Error::InvalidArgument("state and operator dimensions differ".into()));
        }
        Ok(&self.entries * state.to_vector())
    }

    pub fn max_abs_diff(&self, other: &DenseOperator) -> f64 {
        max_abs_diff(&self.entries, &other.entries)
    }

    /// `max |U†U − I|`.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.dim();
        max_abs_diff(&(self.entries.adjoint() * &self.entries), &CMatrix::identity(n, n))
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_defect() <= tol
    }

    fn same_shape(&self, other: &DenseOperator) -> Result<()> {
        if self.local_dim != other.local_dim || self.factors != other.factors {
            return Err(Error::InvalidArgument(format!(
                "shape mismatch: {}^{} vs {}^{}",
                self.local_dim, self.factors, other.local_dim, other.factors
            )));
        }
        Ok(())
    }
}

/// Isometry `D_out × D_in` with orthonormal columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Isometry {
    entries: CMatrix,
}

impl Isometry {
    pub fn new(entries: CMatrix) -> Result<Self> {
        let iso = Self { entries };
        let defect = iso.defect();
        if defect >= 1e-10 {
            return Err(Error::InvalidArgument(format!("columns not orthonormal ({defect:e})")));
        }
        Ok(iso)
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn dim_in(&self) -> usize {
        self.entries.ncols()
    }

    pub fn dim_out(&self) -> usize {
        self.entries.nrows()
    }

    /// `‖M†M − I‖_max`.
    pub fn defect(&self) -> f64 {
        let k = self.entries.ncols();
        max_abs_diff(&(self.entries.adjoint() * &self.entries), &CMatrix::identity(k, k))
    }
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn max_abs_diff_vec(a: &CVector, b: &CVector) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Digits of `index` in base `d` over `k` factors, factor 0 first.
pub fn digits(mut index: usize, d: usize, k: usize) -> Vec<usize> {
    let mut out = vec![0; k];
    for slot in (0..k).rev() {
        out[slot] = index % d;
        index /= d;
    }
    out
}

pub fn from_digits(digits: &[usize], d: usize) -> usize {
    digits.iter().fold(0, |acc, &x| acc * d + x)
}

fn validate_perm(perm: &[usize]) -> Result<()> {
    let k = perm.len();
    let mut seen = vec![false; k];
    for &p in perm {
        if p >= k || seen[p] {
            return Err(Error::InvalidArgument(format!("{perm:?} is not a permutation")));
        }
        seen[p] = true;
    }
    Ok(())
}

/// Index of the basis ket that `|index⟩` is sent to: the content of slot
/// `a` moves to slot `perm[a]`.
pub fn permuted_index(index: usize, perm: &[usize], d: usize) -> usize {
    let k = perm.len();
    let input = digits(index, d, k);
    let mut output = vec![0; k];
    for (a, &p) in perm.iter().enumerate() {
        output[p] = input[a];
    }
    from_digits(&output, d)
}

/// Operator sending `|i_1…i_k⟩` to `|i_{σ⁻¹(1)}…i_{σ⁻¹(k)}⟩`, with `perm[a] = σ(a)`.
pub fn permutation_operator(perm: &[usize], d: usize) -> Result<DenseOperator> {
    validate_perm(perm)?;
    if perm.is_empty() || d < 2 {
        return Err(Error::InvalidArgument("need k >= 1 and d >= 2".into()));
    }
    let k = perm.len();
    let dim = budget::check_operator(d, k)?;
    let mut m = CMatrix::zeros(dim, dim);
    for col in 0..dim {
        m[(permuted_index(col, perm, d), col)] = ONE;
    }
    Ok(DenseOperator::from_parts(m, d, k))
}

/// Applies the permutation operator to a vector without forming the matrix.
pub fn permute_vector(v: &[C64], perm: &[usize], d: usize) -> Vec<C64> {
    let mut out = vec![ZERO; v.len()];
    for (i, &x) in v.iter().enumerate() {
        out[permuted_index(i, perm, d)] = x;
    }
    out
}

/// The "push right" cycle: slot `a` moves to slot `a + 1 mod k`.
pub fn cyclic_perm(k: usize) -> Vec<usize> {
    (0..k).map(|a| (a + 1) % k).collect()
}

pub fn cyclic_permutation(k: usize, d: usize) -> Result<DenseOperator> {
    permutation_operator(&cyclic_perm(k), d)
}

/// Traces out every factor not listed in `keep`; kept factors retain their order.
pub fn partial_trace(x: &DenseOperator, keep: &[usize]) -> Result<DenseOperator> {
    let k = x.factors();
    let d = x.local_dim();
    if keep.is_empty() {
        return Err(Error::InvalidArgument("keep must be nonempty".into()));
    }
    let mut keep_sorted = keep.to_vec();
    keep_sorted.sort_unstable();
    keep_sorted.dedup();
    if let Some(&bad) = keep_sorted.iter().find(|&&f| f >= k) {
        return Err(Error::InvalidFactor { index: bad, factors: k });
    }
    let traced: Vec<usize> = (0..k).filter(|f| !keep_sorted.contains(f)).collect();
    let kd = keep_sorted.len();
    let out_dim = d.pow(kd as u32);
    let t_dim = d.pow(traced.len() as u32);
    let compose = |kept_idx: usize, traced_idx: usize| -> usize {
        let kdig = digits(kept_idx, d, kd);
        let tdig = digits(traced_idx, d, traced.len());
        let mut full = vec![0; k];
        for (pos, &f) in keep_sorted.iter().enumerate() {
            full[f] = kdig[pos];
        }
        for (pos, &f) in traced.iter().enumerate() {
            full[f] = tdig[pos];
        }
        from_digits(&full, d)
    };
    let table: Vec<Vec<usize>> = (0..out_dim)
        .map(|r| (0..t_dim).map(|t| compose(r, t)).collect())
        .collect();
    let e = x.entries();
    let mut out = CMatrix::zeros(out_dim, out_dim);
    for r in 0..out_dim {
        for c in 0..out_dim {
            let mut acc = ZERO;
            for t in 0..t_dim {
                acc += e[(table[r][t], table[c][t])];
            }
            out[(r, c)] = acc;
        }
    }
    Ok(DenseOperator::from_parts(out, d, kd))
}

/// Exact binomial coefficient as an arbitrary-precision integer.
pub fn binomial_big(n: u64, k: u64) -> BigUint {
    let k = k.min(n.saturating_sub(k));
    let mut acc = BigUint::from(1u32);
    for i in 0..k {
        acc *= BigUint::from(n - i);
        acc /= BigUint::from(i + 1);
    }
    acc
}

/// `binom(n + d − 1, d − 1)`, erroring past 64 bits.
pub fn sym_dim(n: usize, d: usize) -> Result<u64> {
    if d == 0 {
        return Err(Error::InvalidArgument("d must be at least 1".into()));
    }
    let top = (n + d - 1) as u128;
    let k = (d - 1).min(n) as u128;
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc
            .checked_mul(top - i)
            .ok_or_else(|| Error::Overflow(format!("sym_dim({n}, {d})")))?
            / (i + 1);
    }
    u64::try_from(acc).map_err(|_| Error::Overflow(format!("sym_dim({n}, {d}) exceeds 64 bits")))
}

/// `binom(n + d − 1, d − 1)` in arbitrary precision.
pub fn sym_dim_big(n: u64, d: u64) -> BigUint {
    binomial_big(n + d - 1, d - 1)
}

/// `⌈log₂ x⌉` for a positive big integer.
pub fn ceil_log2_big(x: &BigUint) -> u64 {
    let one = BigUint::from(1u32);
    if *x <= one {
        return 0;
    }
    (x - &one).bits()
}

/// Sorted multi-indices `i_1 ≤ … ≤ i_n` in lexicographic order.
pub fn sorted_multi_indices(n: usize, d: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, d: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for i in start..d {
            cur.push(i);
            rec(n, d, i, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, d, 0, &mut Vec::with_capacity(n), &mut out);
    out
}

/// Encoder from sorted multi-index kets to normalized symmetrized vectors.
pub fn symmetric_encoder(n: usize, d: usize) -> Result<Isometry> {
    if d < 2 {
        return Err(Error::InvalidArgument("d must be at least 2".into()));
    }
    let s = sym_dim(n, d)? as u128;
    let dim = budget::pow(d, n);
    budget::check(dim.saturating_mul(s))?;
    let dim = dim as usize;
    let labels = sorted_multi_indices(n, d);
    let lookup: HashMap<Vec<usize>, usize> = labels.iter().cloned().enumerate().map(|(i, l)| (l, i)).collect();
    let mut m = CMatrix::zeros(dim, labels.len());
    let mut counts = vec![0usize; labels.len()];
    for idx in 0..dim {
        let mut key = digits(idx, d, n);
        key.sort_unstable();
        let col = lookup[&key];
        m[(idx, col)] = ONE;
        counts[col] += 1;
    }
    for (col, &c) in counts.iter().enumerate() {
        let s = 1.0 / (c as f64).sqrt();
        for row in 0..dim {
            m[(row, col)] *= s;
        }
    }
    Isometry::new(m)
}

/// Projector onto `Sym^n(C^d)`, built as `𝒟𝒟†`.
pub fn symmetric_projector(n: usize, d: usize) -> Result<DenseOperator> {
    budget::check_operator(d, n)?;
    let enc = symmetric_encoder(n, d)?;
    let e = enc.entries();
    Ok(DenseOperator::from_parts(e * e.adjoint(), d, n))
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im)
}

pub fn haar_state_with<R: Rng + ?Sized>(rng: &mut R, d: usize) -> PureState {
    let v: Vec<C64> = (0..d).map(|_| complex_gaussian(rng)).collect();
    PureState::normalized(v, d, 1).expect("gaussian vector is nonzero")
}

/// Haar unitary: QR of a Ginibre matrix with R's diagonal phases absorbed into Q.
pub fn haar_unitary_with<R: Rng + ?Sized>(rng: &mut R, d: usize) -> DenseOperator {
    let z = CMatrix::from_fn(d, d, |_, _| complex_gaussian(rng));
    let qr = z.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { ONE };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    DenseOperator::from_parts(q, d, 1)
}

pub fn haar_random_state(d: usize, seed: u64) -> PureState {
    haar_state_with(&mut rng_from_seed(seed), d)
}

pub fn haar_random_unitary(d: usize, seed: u64) -> DenseOperator {
    haar_unitary_with(&mut rng_from_seed(seed), d)
}

/// Unitary `W` with `W|ψ⟩ = e^{iγ}|ψ⟩` and a Haar block on the complement.
pub fn stabilizer_unitary_with<R: Rng + ?Sized>(rng: &mut R, psi: &PureState, gamma: f64) -> CMatrix {
    let d = psi.dim();
    let frame = orthonormal_frame(psi);
    let mut basis = CMatrix::zeros(d, d);
    basis.set_column(0, &psi.to_vector());
    for (j, f) in frame.iter().enumerate() {
        basis.set_column(j + 1, f);
    }
    let mut block = CMatrix::zeros(d, d);
    block[(0, 0)] = C64::from_polar(1.0, gamma);
    if d > 1 {
        let h = haar_unitary_with(rng, d - 1);
        block.view_mut((1, 1), (d - 1, d - 1)).copy_from(h.entries());
    }
    &basis * block * basis.adjoint()
}

/// Orthonormal basis of `ψ^⊥` by Gram–Schmidt over the computational basis,
/// dropping the basis vector with the largest overlap with `ψ`.
pub fn orthonormal_frame(psi: &PureState) -> Vec<CVector> {
    let d = psi.dim();
    let p = psi.to_vector();
    let drop = (0..d)
        .max_by(|&a, &b| p[a].norm().partial_cmp(&p[b].norm()).unwrap().then(b.cmp(&a)))
        .unwrap_or(0);
    let mut frame: Vec<CVector> = Vec::with_capacity(d.saturating_sub(1));
    for e in (0..d).filter(|&e| e != drop) {
        let mut v = CVector::zeros(d);
        v[e] = ONE;
        for _ in 0..2 {
            let c = p.dotc(&v);
            v -= &p * c;
            for f in &frame {
                let c = f.dotc(&v);
                v -= f * c;
            }
        }
        let nrm = v.norm();
        frame.push(v / C64::from(nrm));
    }
    frame
}

/// Hermitian eigenvalues, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let h = (m + m.adjoint()) * C64::from(0.5);
    let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ket(bits: &[usize], d: usize) -> CVector {
        let mut v = CVector::zeros(d.pow(bits.len() as u32));
        v[from_digits(bits, d)] = ONE;
        v
    }

    #[test]
    fn identity_permutation_is_identity() {
        let p = permutation_operator(&[0, 1], 2).unwrap();
        assert_eq!(p.entries(), &CMatrix::identity(4, 4));
    }

    #[test]
    fn transposition_is_swap() {
        let p = permutation_operator(&[1, 0], 2).unwrap();
        assert_eq!(p.entries() * ket(&[0, 1], 2), ket(&[1, 0], 2));
        assert_eq!(p.entries() * ket(&[0, 0], 2), ket(&[0, 0], 2));
    }

    #[test]
    fn three_cycle_moves_content_right() {
        let p = permutation_operator(&[1, 2, 0], 2).unwrap();
        assert_eq!(p.entries() * ket(&[1, 0, 0], 2), ket(&[0, 1, 0], 2));
    }

    #[test]
    fn cyclic_permutation_order() {
        let c = cyclic_permutation(3, 2).unwrap();
        let c3 = c.matmul(&c).unwrap().matmul(&c).unwrap();
        assert!(max_abs_diff(c3.entries(), &CMatrix::identity(8, 8)) < 1e-13);
        let swap = cyclic_permutation(2, 2).unwrap();
        assert_eq!(swap, permutation_operator(&[1, 0], 2).unwrap());
    }

    #[test]
    fn cyclic_permutation_fixes_symmetric_product() {
        let psi = haar_random_state(2, 5);
        let p3 = psi.tensor_power(3).unwrap();
        let c = cyclic_permutation(3, 2).unwrap();
        let out = c.apply(&p3).unwrap();
        assert!(max_abs_diff_vec(&out, &p3.to_vector()) < 1e-13);
    }

    #[test]
    fn partial_trace_of_product() {
        let a = haar_random_state(2, 1).projector();
        let b = haar_random_state(2, 2).projector();
        let ab = a.kron(&b).unwrap();
        let t = partial_trace(&ab, &[0]).unwrap();
        assert!(t.max_abs_diff(&a) < 1e-12);
        let t = partial_trace(&ab, &[1]).unwrap();
        assert!(t.max_abs_diff(&b) < 1e-12);
    }

    #[test]
    fn partial_trace_of_bell_state() {
        let s = 1.0 / 2f64.sqrt();
        let bell = PureState::new(vec![C64::from(s), ZERO, ZERO, C64::from(s)], 2, 2).unwrap();
        let t = partial_trace(&bell.projector(), &[1]).unwrap();
        assert!(max_abs_diff(t.entries(), &(CMatrix::identity(2, 2) * C64::from(0.5))) < 1e-14);
    }

    #[test]
    fn partial_trace_rejects_bad_factor() {
        let x = DenseOperator::identity(2, 2).unwrap();
        assert!(matches!(partial_trace(&x, &[2]), Err(Error::InvalidFactor { .. })));
    }

    #[test]
    fn sym_dim_values() {
        assert_eq!(sym_dim(2, 2).unwrap(), 3);
        assert_eq!(sym_dim(0, 5).unwrap(), 1);
        assert_eq!(sym_dim(4, 3).unwrap(), 15);
        assert_eq!(sym_dim(4, 3).unwrap() as usize, sorted_multi_indices(4, 3).len());
        assert!(sym_dim(usize::MAX / 4, 40).is_err());
        assert_eq!(sym_dim_big(4, 3), BigUint::from(15u32));
    }

    #[test]
    fn ceil_log2_values() {
        for (x, want) in [(1u32, 0u64), (2, 1), (3, 2), (4, 2), (5, 3), (1024, 10), (1025, 11)] {
            assert_eq!(ceil_log2_big(&BigUint::from(x)), want, "x = {x}");
        }
    }

    #[test]
    fn symmetric_projector_traces() {
        let p = symmetric_projector(2, 2).unwrap();
        assert!((p.trace() - C64::from(3.0)).norm() < 1e-12);
        let p = symmetric_projector(3, 2).unwrap();
        assert!((p.trace() - C64::from(4.0)).norm() < 1e-12);
        assert!(p.matmul(&p).unwrap().max_abs_diff(&p) < 1e-12);
    }

    #[test]
    fn encoder_two_term_column() {
        let e = symmetric_encoder(2, 2).unwrap();
        assert_eq!(e.dim_in(), 3);
        let s = 1.0 / 2f64.sqrt();
        let col = e.entries().column(1).into_owned();
        let want = (ket(&[0, 1], 2) + ket(&[1, 0], 2)) * C64::from(s);
        assert!(max_abs_diff_vec(&col, &want) < 1e-14);
    }

    #[test]
    fn encoder_preserves_product_states() {
        let psi = haar_random_state(3, 9);
        let p = psi.tensor_power(3).unwrap().to_vector();
        let e = symmetric_encoder(3, 3).unwrap();
        let compressed = e.entries().adjoint() * p;
        assert!((compressed.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn haar_outputs_are_normalized() {
        let psi = haar_random_state(4, 3);
        assert!((psi.inner(&psi).re - 1.0).abs() < 1e-12);
        let u = haar_random_unitary(4, 3);
        assert!(u.unitarity_defect() < 1e-10);
        assert_eq!(haar_random_unitary(3, 7), haar_random_unitary(3, 7));
    }

    #[test]
    fn frame_is_orthonormal_complement() {
        let psi = haar_random_state(4, 11);
        let f = orthonormal_frame(&psi);
        assert_eq!(f.len(), 3);
        let p = psi.to_vector();
        for (i, a) in f.iter().enumerate() {
            assert!(p.dotc(a).norm() < 1e-13);
            for (j, b) in f.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((a.dotc(b) - C64::from(want)).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn stabilizer_fixes_axis() {
        let psi = haar_random_state(3, 4);
        let mut rng = rng_from_seed(1);
        let w = stabilizer_unitary_with(&mut rng, &psi, 0.7);
        let out = &w * psi.to_vector();
        assert!(max_abs_diff_vec(&out, &(psi.to_vector() * C64::from_polar(1.0, 0.7))) < 1e-12);
        let op = DenseOperator::single(w).unwrap();
        assert!(op.unitarity_defect() < 1e-12);
    }

    #[test]
    fn budget_overflow_is_reported() {
        assert!(matches!(
            permutation_operator(&(0..30).collect::<Vec<_>>(), 2),
            Err(Error::DimensionOverflow { .. })
        ));
    }
}
