//! Universal processor from `d − 1` programmable rotations: eigendecomposition
//! of the target, binary angle registers, copy budgets and end-to-end checks.

use crate::channels::{effective_channel, Channel, ComposedChannel, EffectiveChannel, UnitaryChannel};
use crate::cyclic_algebra::r_theta_coeffs;
use crate::distances::{linear_bound, sampled_diamond_lower_bound};
use crate::error::{Error, Result};
use crate::repthy::final_bound;
use crate::tensor_core::{
    ceil_log2_big, haar_unitary_with, max_abs_diff, rng_from_seed, sym_dim_big, CMatrix, DenseOperator, PureState, C64,
};
use nalgebra::Schur;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Tolerance for the unitarity of targets.
pub const TARGET_UNITARY_TOL: f64 = 1e-10;

fn wrap_phase(x: f64) -> f64 {
    let mut y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y -= 2.0 * PI;
    }
    y
}

/// Eigenpairs `(ψ_j, α_j)` of `U = e^{iφ} Σ_j e^{iα_j}|ψ_j⟩⟨ψ_j|` with
/// `α_0 = 0` and `α_j ∈ (−π, π]`, ordered by eigenphase.
pub fn eigendecompose_target(u: &DenseOperator) -> Result<(f64, Vec<(PureState, f64)>)> {
    let deviation = u.unitarity_defect();
    if deviation > TARGET_UNITARY_TOL {
        return Err(Error::NonUnitaryOperator { deviation });
    }
    let d = u.dim();
    let (q, t) = Schur::new(u.entries().clone()).unpack();
    let mut pairs: Vec<(f64, usize)> = (0..d).map(|k| (t[(k, k)].arg(), k)).collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
    let global = pairs[0].0;
    let out = pairs
        .iter()
        .map(|&(phase, k)| {
            let v: Vec<C64> = q.column(k).iter().copied().collect();
            let alpha = if k == pairs[0].1 {
                0.0
            } else {
                wrap_phase(phase - global)
            };
            PureState::normalized(v, d, 1).map(|s| (s, alpha))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((global, out))
}

/// `Σ_j e^{iα_j}|ψ_j⟩⟨ψ_j|`.
pub fn reconstruct(pairs: &[(PureState, f64)]) -> CMatrix {
    let d = pairs.first().map_or(0, |(s, _)| s.dim());
    let mut m = CMatrix::zeros(d, d);
    for (psi, alpha) in pairs {
        let v = psi.to_vector();
        m += &v * v.adjoint() * C64::from_polar(1.0, *alpha);
    }
    m
}

/// Signed binary fraction `(−1)^{b₀} 0.b₁…b_K`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignedFraction {
    pub negative: bool,
    pub bits: Vec<u8>,
}

impl SignedFraction {
    pub fn value(&self) -> f64 {
        let magnitude: f64 = self
            .bits
            .iter()
            .enumerate()
            .map(|(k, &b)| f64::from(b) * 0.5f64.powi(k as i32 + 1))
            .sum();
        if self.negative {
            -magnitude
        } else {
            magnitude
        }
    }
}

/// Truncated `K`-bit expansion of `θ/π`, so `|θ − π a| ≤ π 2^{−K}` and `|π a| ≤ |θ|`.
pub fn binary_angle(theta: f64, k: usize) -> Result<SignedFraction> {
    if k == 0 {
        return Err(Error::InvalidArgument("need at least one bit".into()));
    }
    if !(theta > -PI - 1e-15 && theta <= PI + 1e-15) {
        return Err(Error::Domain(format!("theta = {theta} outside (-pi, pi]")));
    }
    let x = (theta.abs() / PI).min(1.0);
    let scale = 2f64.powi(k as i32);
    let top = (1u128 << k) - 1;
    let mut m = ((x * scale).floor() as u128).min(top);
    let mut bits = vec![0u8; k];
    for slot in (0..k).rev() {
        bits[slot] = (m & 1) as u8;
        m >>= 1;
    }
    Ok(SignedFraction {
        negative: theta < 0.0,
        bits,
    })
}

/// Per-rotation program record.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RotationRecord {
    pub psi: PureState,
    pub alpha: f64,
    pub a: SignedFraction,
    pub theta: f64,
    pub n: usize,
    /// `3|α_j|/n_j`, or 0 when no copies are needed.
    pub linear_bound: f64,
}

/// Program layout and qubit accounting.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UniversalProgram {
    pub d: usize,
    pub epsilon: f64,
    pub k_bits: usize,
    /// Encoder precision `ε/(6(d−1))`.
    pub delta: f64,
    pub rotations: Vec<RotationRecord>,
    pub angle_qubits: u64,
    pub count_qubits: u64,
    pub symmetric_qubits: u64,
    pub total_qubits: u64,
}

/// `K = ⌈log₂(6π(d−1)/ε)⌉`.
pub fn angle_bits(d: usize, epsilon: f64) -> usize {
    (6.0 * PI * (d - 1) as f64 / epsilon).log2().ceil().max(1.0) as usize
}

/// `n = ⌈9(d−1)|α|/ε⌉`.
pub fn copies_for(d: usize, epsilon: f64, alpha: f64) -> usize {
    (9.0 * (d - 1) as f64 * alpha.abs() / epsilon - 1e-12).ceil().max(0.0) as usize
}

fn ceil_log2_u(x: f64) -> u64 {
    x.ceil().max(1.0).log2().ceil() as u64
}

/// Budget for rotations `(ψ_j, α_j)`, `j = 1..d−1`.
pub fn budget(d: usize, epsilon: f64, rotations: &[(PureState, f64)]) -> Result<UniversalProgram> {
    if d < 2 {
        return Err(Error::InvalidArgument("d must be at least 2".into()));
    }
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::Domain(format!("epsilon must be positive, got {epsilon}")));
    }
    let k_bits = angle_bits(d, epsilon);
    let records = rotations
        .iter()
        .map(|(psi, alpha)| {
            let a = binary_angle(*alpha, k_bits)?;
            let n = copies_for(d, epsilon, *alpha);
            let lb = if n == 0 { 0.0 } else { linear_bound(n, alpha.abs()) };
            Ok(RotationRecord {
                psi: psi.clone(),
                alpha: *alpha,
                theta: PI * a.value(),
                a,
                n,
                linear_bound: lb,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let df = (d - 1) as f64;
    let per = d as u64 - 1;
    let angle_qubits = per * ceil_log2_u(6.0 * PI * df / epsilon);
    let count_qubits = per * ceil_log2_u(9.0 * PI * df / epsilon);
    let symmetric_qubits = records
        .iter()
        .map(|r| ceil_log2_big(&sym_dim_big(r.n as u64, d as u64)))
        .sum();
    Ok(UniversalProgram {
        d,
        epsilon,
        k_bits,
        delta: epsilon / (6.0 * df),
        rotations: records,
        angle_qubits,
        count_qubits,
        symmetric_qubits,
        total_qubits: angle_qubits + count_qubits + symmetric_qubits,
    })
}

/// Worst-case accounting with every `|α_j| = π`.
pub fn worst_case_budget(d: usize, epsilon: f64) -> Result<UniversalProgram> {
    let rotations: Vec<(PureState, f64)> = (1..d).map(|j| (PureState::basis(d, j), PI)).collect();
    budget(d, epsilon, &rotations)
}

/// Least-squares slope of symmetric-register qubits against `(d−1)² log₂(1/ε)`
/// over `ε = 2^{−k}`, `k ∈ ks`, intercept included.
pub fn fitted_constant(d: usize, ks: &[u32]) -> Result<f64> {
    let points = ks
        .iter()
        .map(|&k| {
            let eps = 0.5f64.powi(k as i32);
            let x = ((d - 1) * (d - 1)) as f64 * f64::from(k);
            worst_case_budget(d, eps).map(|b| (x, b.symmetric_qubits as f64))
        })
        .collect::<Result<Vec<_>>>()?;
    let m = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / m;
    let my = points.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("need at least two distinct grid points".into()));
    }
    Ok(sxy / sxx)
}

/// `E_{ψ_{d−1}} ∘ … ∘ E_{ψ_1}` with `r_theta_coeffs(n_j, θ_j)` stages.
pub fn assemble_from_program(program: &UniversalProgram) -> Result<ComposedChannel> {
    let stages = program
        .rotations
        .iter()
        .map(|r| effective_channel(&r_theta_coeffs(r.n, r.theta), &r.psi).map(|c| Box::new(c) as Box<dyn Channel>))
        .collect::<Result<Vec<_>>>()?;
    ComposedChannel::new(program.d, stages)
}

/// Program and channel for the target `U`.
pub fn assemble_universal_channel(u: &DenseOperator, epsilon: f64) -> Result<(UniversalProgram, ComposedChannel)> {
    let (_, pairs) = eigendecompose_target(u)?;
    let program = budget(u.dim(), epsilon, &pairs[1..])?;
    let channel = assemble_from_program(&program)?;
    Ok((program, channel))
}

/// One target's verification result.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TargetReport {
    pub measured: f64,
    /// `Σ_j 2|α_j − θ_j|`, bounded by `ε/3`.
    pub angle_term: f64,
    /// `Σ_j 3|θ_j|/n_j`, bounded by `ε/3`.
    pub rotation_term: f64,
    /// Encoder term; the symmetric encoder is exact here.
    pub encoder_term: f64,
    pub slack: f64,
    pub pass: bool,
}

/// Aggregate over sampled targets.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifyReport {
    pub d: usize,
    pub epsilon: f64,
    pub trials: usize,
    pub targets: Vec<TargetReport>,
    pub pass: bool,
}

pub fn verify_target(u: &DenseOperator, epsilon: f64, trials: usize, seed: u64) -> Result<TargetReport> {
    let (program, channel) = assemble_universal_channel(u, epsilon)?;
    let target = UnitaryChannel::new(u.entries().clone());
    let measured = sampled_diamond_lower_bound(&target, &channel, trials, seed);
    let angle_term = program.rotations.iter().map(|r| 2.0 * (r.alpha - r.theta).abs()).sum();
    let rotation_term = program
        .rotations
        .iter()
        .map(|r| {
            if r.n == 0 {
                0.0
            } else {
                linear_bound(r.n, r.theta.abs())
            }
        })
        .sum();
    Ok(TargetReport {
        measured,
        angle_term,
        rotation_term,
        encoder_term: 0.0,
        slack: epsilon - measured,
        pass: measured <= epsilon,
    })
}

/// Checks `targets` Haar-random unitaries in dimension `d`.
pub fn verify_budget(d: usize, epsilon: f64, targets: usize, trials: usize, seed: u64) -> Result<VerifyReport> {
    let mut rng = rng_from_seed(seed);
    let unitaries: Vec<DenseOperator> = (0..targets).map(|_| haar_unitary_with(&mut rng, d)).collect();
    let reports = unitaries
        .par_iter()
        .enumerate()
        .map(|(k, u)| verify_target(u, epsilon, trials, seed.wrapping_add(k as u64 + 1)))
        .collect::<Result<Vec<_>>>()?;
    let pass = reports.iter().all(|r| r.pass);
    Ok(VerifyReport {
        d,
        epsilon,
        trials,
        targets: reports,
        pass,
    })
}

/// `(d+1)/2 · log₂(C d^{−5}/ε)`.
pub fn lower_bound_via_universal(d: usize, epsilon: f64, constant: f64) -> f64 {
    let df = d as f64;
    (df + 1.0) / 2.0 * (constant * df.powi(-5) / epsilon).log2()
}

/// Both lower bounds on `log₂ d_P` at one `(d, ε)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundComparison {
    pub d: usize,
    pub epsilon: f64,
    /// Representation-theoretic bound converted to bits.
    pub repthy_bits: f64,
    pub universal_bits: f64,
    pub ratio: f64,
    pub repthy_valid: bool,
}

pub fn compare_lower_bounds(d: usize, epsilon: f64, constant: f64) -> Result<BoundComparison> {
    let fb = final_bound(epsilon, d)?;
    let repthy_bits = fb.value / std::f64::consts::LN_2;
    let universal_bits = lower_bound_via_universal(d, epsilon, constant);
    Ok(BoundComparison {
        d,
        epsilon,
        repthy_bits,
        universal_bits,
        ratio: repthy_bits / universal_bits,
        repthy_valid: fb.valid,
    })
}

/// Qubits for `d − 1` reflections with `n` copies each: `(d−1)⌈log₂ sym_dim(n, d)⌉`.
pub fn reflections_only_qubits(d: usize, n: usize) -> u64 {
    (d as u64 - 1) * ceil_log2_big(&sym_dim_big(n as u64, d as u64))
}

/// `max |E(W X W†) − W E(X) W†|` for a fixed unitary `W` and input `X`.
pub fn covariance_defect<E: Channel + ?Sized>(channel: &E, w: &CMatrix, x: &CMatrix) -> f64 {
    let lhs = channel.apply(&(w * x * w.adjoint()));
    let rhs = w * channel.apply(x) * w.adjoint();
    max_abs_diff(&lhs, &rhs)
}

/// Single-rotation stage, exposed for comparisons with the distance module.
pub fn rotation_stage(psi: &PureState, n: usize, theta: f64) -> Result<EffectiveChannel> {
    effective_channel(&r_theta_coeffs(n, theta), psi)
}
