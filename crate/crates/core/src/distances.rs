//! Trace norms and diamond distances.
//!
//! For channels covariant under the stabilizer of `ψ`, the diamond distance to
//! the rotation `R_ψ(α)` is attained on the one-parameter family `φ_p`, which
//! reduces the optimization to a scalar maximization with a closed form.
//! All distances are un-halved, taking values in `[0, 2]`.

use crate::channels::{apply_extended, choi_of, effective_channel, rotation, Channel, EffectiveChannel};
use crate::cyclic_algebra::{r_theta_coeffs, CyclicElement};
use crate::error::{Error, Result};
use crate::tensor_core::{
    haar_state_with, hermitian_eigenvalues, max_abs_diff, orthonormal_frame, rng_from_seed, CMatrix, CVector,
    DenseOperator, PureState, C64,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub const AGREEMENT_TOL: f64 = 1e-9;
pub const GRID_TOL: f64 = 1e-8;

/// Sum of singular values; for Hermitian input the sum of `|λ|`.
pub fn trace_norm(x: &CMatrix) -> f64 {
    let scale = x.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
    if max_abs_diff(x, &x.adjoint()) <= 1e-12 * scale {
        hermitian_eigenvalues(x).iter().map(|l| l.abs()).sum()
    } else {
        x.clone().singular_values().iter().sum()
    }
}

pub fn trace_norm_op(x: &DenseOperator) -> f64 {
    trace_norm(x.entries())
}

/// `√p|0⟩|ψ⟩ + √((1−p)/(d−1)) Σ_i |i⟩|ψ_i⟩` on `C^d ⊗ C^d`, reference first.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiP {
    pub p: f64,
    pub psi: PureState,
    pub d: usize,
}

impl PhiP {
    pub fn new(p: f64, psi: PureState) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain(format!("p = {p} outside [0, 1]")));
        }
        let d = psi.dim();
        if d < 2 {
            return Err(Error::InvalidArgument("need d >= 2".into()));
        }
        Ok(Self { p, psi, d })
    }

    pub fn vector(&self) -> CVector {
        let d = self.d;
        let mut v = CVector::zeros(d * d);
        let psi = self.psi.to_vector();
        for s in 0..d {
            v[s] += psi[s] * self.p.sqrt();
        }
        let w = ((1.0 - self.p) / (d as f64 - 1.0)).sqrt();
        for (i, f) in orthonormal_frame(&self.psi).iter().enumerate() {
            let r = i + 1;
            for s in 0..d {
                v[r * d + s] += f[s] * w;
            }
        }
        v
    }

    pub fn density(&self) -> CMatrix {
        let v = self.vector();
        &v * v.adjoint()
    }
}

/// Which closed-form branch attains the maximum over `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    A,
    B,
    Boundary,
}

impl Branch {
    pub fn as_str(&self) -> &'static str {
        match self {
            Branch::A => "A",
            Branch::B => "B",
            Branch::Boundary => "boundary",
        }
    }
}

/// A covariant approximate rotation channel paired with its target angle.
#[derive(Debug, Clone)]
pub struct CovariantPair {
    pub alpha: f64,
    pub element: CyclicElement,
    pub channel: EffectiveChannel,
}

impl CovariantPair {
    /// Uses `ψ = |0⟩` on `C^d`; covariance makes the choice immaterial.
    pub fn new(element: CyclicElement, alpha: f64, d: usize) -> Result<Self> {
        Self::with_psi(element, alpha, PureState::basis(d, 0))
    }

    pub fn with_psi(element: CyclicElement, alpha: f64, psi: PureState) -> Result<Self> {
        let channel = effective_channel(&element, &psi)?;
        Ok(Self {
            alpha,
            element,
            channel,
        })
    }

    /// `1 − |c_0|²`.
    pub fn gap(&self) -> f64 {
        1.0 - self.element.c0().norm_sqr()
    }

    /// `|c̃_0 c̄_0 − e^{iα}|`.
    pub fn deviation(&self) -> f64 {
        (self.element.c_tilde0() * self.element.c0().conj() - C64::from_polar(1.0, self.alpha)).norm()
    }

    pub fn psi(&self) -> &PureState {
        &self.channel.psi
    }
}

/// `(1−p)g + √((1−p)²g² + 4p(1−p)|z|²)`.
pub fn closed_form_at_p(gap: f64, z: f64, p: f64) -> f64 {
    let q = 1.0 - p;
    q * gap + ((q * gap).powi(2) + 4.0 * p * q * z * z).max(0.0).sqrt()
}

/// `‖(I ⊗ (R_ψ(α) − E))(φ_p)‖₁` computed densely for any channel on `C^d`.
pub fn dense_distance_at_p<E: Channel + ?Sized>(alpha: f64, psi: &PureState, channel: &E, p: f64) -> Result<f64> {
    let phi = PhiP::new(p, psi.clone())?;
    let rho = phi.density();
    let target = rotation(psi, alpha);
    let diff = apply_extended(&target, &rho) - apply_extended(channel, &rho);
    Ok(trace_norm(&diff))
}

/// Closed form at `p`, cross-checked against the dense evaluation.
pub fn distance_at_p(pair: &CovariantPair, p: f64) -> Result<f64> {
    let closed = closed_form_at_p(pair.gap(), pair.deviation(), p);
    let dense = dense_distance_at_p(pair.alpha, pair.psi(), &pair.channel, p)?;
    if (closed - dense).abs() > AGREEMENT_TOL {
        return Err(Error::Consistency(format!(
            "distance at p = {p}: closed form {closed} vs dense {dense}"
        )));
    }
    Ok(closed)
}

fn golden_max<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, iters: usize) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..iters {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        }
    }
    let candidates = [(lo, f(lo)), (x1, f1), (x2, f2), (hi, f(hi))];
    candidates
        .into_iter()
        .fold((lo, f64::NEG_INFINITY), |best, c| if c.1 > best.1 { c } else { best })
}

/// Grid-plus-golden-section maximum of the closed form over `p ∈ [0, 1]`.
pub fn grid_maximum(gap: f64, z: f64) -> (f64, f64) {
    let f = |p: f64| closed_form_at_p(gap, z, p);
    let n = 1001;
    let (mut best_i, mut best_v) = (0usize, f64::NEG_INFINITY);
    for i in 0..n {
        let v = f(i as f64 / (n - 1) as f64);
        if v > best_v {
            best_v = v;
            best_i = i;
        }
    }
    let lo = best_i.saturating_sub(1) as f64 / (n - 1) as f64;
    let hi = (best_i + 1).min(n - 1) as f64 / (n - 1) as f64;
    let (p, v) = golden_max(f, lo, hi, 80);
    if v >= best_v {
        (p, v)
    } else {
        (best_i as f64 / (n - 1) as f64, best_v)
    }
}

/// Analytic maximizer: `p*` in Domain B, `p = 0` otherwise.
pub fn analytic_argmax(gap: f64, z: f64) -> f64 {
    if gap < z {
        ((z - gap) / (2.0 * z - gap)).clamp(0.0, 1.0)
    } else {
        0.0
    }
}

/// Diamond distance `(value, argmax_p)` for a covariant pair.
pub fn diamond_covariant(pair: &CovariantPair) -> Result<(f64, f64)> {
    let gap = pair.gap();
    let z = pair.deviation();
    let p = analytic_argmax(gap, z);
    let value = distance_at_p(pair, p)?;
    let (_, grid_value) = grid_maximum(gap, z);
    if (grid_value - value).abs() > GRID_TOL {
        return Err(Error::Consistency(format!(
            "critical point value {value} vs grid maximum {grid_value}"
        )));
    }
    Ok((value, p))
}

/// Branch label with the `1e−10` boundary band.
pub fn branch_of(gap: f64, z: f64) -> Branch {
    if gap >= z + 1e-10 {
        Branch::A
    } else if gap <= z - 1e-10 {
        Branch::B
    } else {
        Branch::Boundary
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.0..=PI).contains(&alpha) {
        return Err(Error::Domain(format!("alpha = {alpha} outside [0, pi]")));
    }
    Ok(())
}

/// Two-branch closed form of the rotation distance for `α ∈ [0, π]`.
pub fn closed_form_rotation_distance(e: &CyclicElement, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    e.require_channel()?;
    let gap = 1.0 - e.c0().norm_sqr();
    let z = (e.c_tilde0() * e.c0().conj() - C64::from_polar(1.0, alpha)).norm();
    Ok(closed_form_value(gap, z))
}

pub fn closed_form_value(gap: f64, z: f64) -> f64 {
    if z <= gap {
        2.0 * gap
    } else {
        2.0 * z * z / (2.0 * z - gap)
    }
}

/// Maps `α ∈ (π, 2π)` to `2π − α`; angles are first wrapped into `[0, 2π)`.
pub fn reduce_angle(alpha: f64) -> f64 {
    let a = alpha.rem_euclid(2.0 * PI);
    if a > PI {
        2.0 * PI - a
    } else {
        a
    }
}

/// Distance of the equal-angle algorithm `θ = α`.
pub fn equal_angle_distance(n: usize, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    if alpha == 0.0 {
        return Ok(0.0);
    }
    let nf = n as f64;
    let ratio = (nf + 1.0) / (2.0 * nf);
    let threshold = if ratio >= 1.0 { PI } else { 2.0 * ratio.asin() };
    if alpha >= threshold {
        Ok(4.0 * nf * (1.0 - alpha.cos()) / (nf + 1.0).powi(2))
    } else {
        Ok(2.0 / ((nf + 1.0) / (alpha / 2.0).sin() - nf))
    }
}

/// `3α/n`.
pub fn linear_bound(n: usize, alpha: f64) -> f64 {
    3.0 * alpha / n as f64
}

/// `8(n+2)/(8 + 4n + n²)`.
pub fn optimal_reflection_distance(n: usize) -> f64 {
    let n = n as f64;
    8.0 * (n + 2.0) / (8.0 + 4.0 * n + n * n)
}

/// `8n/(n+1)²`.
pub fn theta_pi_distance(n: usize) -> f64 {
    let n = n as f64;
    8.0 * n / (n + 1.0).powi(2)
}

/// Diamond distance of `r_theta_coeffs(n, θ)` to `R_ψ(α)`.
pub fn r_theta_distance(n: usize, theta: f64, alpha: f64) -> f64 {
    let e = r_theta_coeffs(n, theta);
    let gap = 1.0 - e.c0().norm_sqr();
    let z = (e.c_tilde0() * e.c0().conj() - C64::from_polar(1.0, alpha)).norm();
    closed_form_value(gap, z)
}

/// Smallest arc covering a set of unit-circle phases.
pub fn covering_arc(phases: &[f64]) -> f64 {
    if phases.len() <= 1 {
        return 0.0;
    }
    let mut p: Vec<f64> = phases.iter().map(|x| x.rem_euclid(2.0 * PI)).collect();
    p.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut max_gap = p[0] + 2.0 * PI - p[p.len() - 1];
    for w in p.windows(2) {
        max_gap = max_gap.max(w[1] - w[0]);
    }
    2.0 * PI - max_gap
}

/// Eigenvalues of a normal matrix via complex Schur form.
pub fn normal_eigenvalues(m: &CMatrix) -> Vec<C64> {
    let schur = nalgebra::Schur::new(m.clone());
    let (_, t) = schur.unpack();
    (0..t.nrows()).map(|i| t[(i, i)]).collect()
}

/// Diamond distance between the unitary channels of `U` and `V`.
pub fn diamond_unitary_channels(u: &CMatrix, v: &CMatrix) -> Result<f64> {
    for m in [u, v] {
        let n = m.nrows();
        let deviation = max_abs_diff(&(m.adjoint() * m), &CMatrix::identity(n, n));
        if deviation > 1e-9 {
            return Err(Error::NonUnitaryOperator { deviation });
        }
    }
    let w = u.adjoint() * v;
    let phases: Vec<f64> = normal_eigenvalues(&w).iter().map(|z| z.arg()).collect();
    let arc = covering_arc(&phases);
    if arc >= PI {
        Ok(2.0)
    } else {
        Ok(2.0 * (arc / 2.0).sin())
    }
}

/// Difference Choi matrix `J_A − J_B`.
fn difference_choi<A: Channel + ?Sized, B: Channel + ?Sized>(a: &A, b: &B) -> CMatrix {
    choi_of(a).into_entries() - choi_of(b).into_entries()
}

/// `‖(I ⊗ Δ)(φ)‖₁` for `φ = (K ⊗ I)Σ_a|a⟩|a⟩` with `K` read from `φ`'s amplitudes.
fn probe_value(j: &CMatrix, d: usize, phi: &[C64]) -> f64 {
    let k = CMatrix::from_row_slice(d, d, phi);
    let kk = k.kronecker(&CMatrix::identity(d, d));
    trace_norm(&(&kk * j * kk.adjoint()))
}

/// Maximum over Haar-random pure inputs on `C^d ⊗ C^d`; a lower bound on the diamond distance.
pub fn sampled_diamond_lower_bound<A: Channel + ?Sized, B: Channel + ?Sized>(
    a: &A,
    b: &B,
    trials: usize,
    seed: u64,
) -> f64 {
    let d = a.dim();
    let j = difference_choi(a, b);
    let mut rng = rng_from_seed(seed);
    let probes: Vec<Vec<C64>> = (0..trials)
        .map(|_| haar_state_with(&mut rng, d * d).amplitudes().to_vec())
        .collect();
    probes
        .par_iter()
        .map(|phi| probe_value(&j, d, phi))
        .reduce(|| 0.0, f64::max)
}

/// Sampled lower bound followed by a random-perturbation hill climb from the best sample.
pub fn refined_diamond_lower_bound<A: Channel + ?Sized, B: Channel + ?Sized>(
    a: &A,
    b: &B,
    trials: usize,
    steps: usize,
    seed: u64,
) -> f64 {
    use rand::Rng;
    use rand_distr::StandardNormal;
    let d = a.dim();
    let j = difference_choi(a, b);
    let mut rng = rng_from_seed(seed);
    let mut best_phi = haar_state_with(&mut rng, d * d).amplitudes().to_vec();
    let mut best = probe_value(&j, d, &best_phi);
    for _ in 1..trials {
        let phi = haar_state_with(&mut rng, d * d).amplitudes().to_vec();
        let v = probe_value(&j, d, &phi);
        if v > best {
            best = v;
            best_phi = phi;
        }
    }
    let mut step = 0.3;
    for _ in 0..steps {
        let mut cand: Vec<C64> = best_phi
            .iter()
            .map(|z| {
                z + C64::new(
                    rng.sample::<f64, _>(StandardNormal),
                    rng.sample::<f64, _>(StandardNormal),
                ) * step
            })
            .collect();
        let norm = cand.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        cand.iter_mut().for_each(|z| *z /= norm);
        let v = probe_value(&j, d, &cand);
        if v > best {
            best = v;
            best_phi = cand;
        } else {
            step = (step * 0.97).max(1e-4);
        }
    }
    best
}

/// `‖ψ₁^{⊗n} − ψ₂^{⊗n}‖₁` for pure states, computed densely.
pub fn tensor_power_trace_distance(psi1: &PureState, psi2: &PureState, n: usize) -> Result<f64> {
    let a = psi1.tensor_power(n)?.projector();
    let b = psi2.tensor_power(n)?.projector();
    Ok(trace_norm(&(a.into_entries() - b.into_entries())))
}

/// `2√(1 − cos^{2n} φ)` with `cos φ = |⟨ψ₁|ψ₂⟩|`.
pub fn tensor_power_trace_distance_formula(psi1: &PureState, psi2: &PureState, n: usize) -> f64 {
    let c = psi1.inner(psi2).norm();
    2.0 * (1.0 - c.powi(2 * n as i32)).max(0.0).sqrt()
}

/// Diamond distance of the measure-and-reflect channel to the reflection,
/// maximized over the `φ_p` family; returns `(value, argmax_p)`.
pub fn mr_distance(n: usize, d: usize) -> Result<(f64, f64)> {
    let psi = PureState::basis(d, 0);
    let ch = crate::channels::MrChannel::new(&psi, n)?;
    let f = |p: f64| dense_distance_at_p(PI, &psi, &ch, p).unwrap_or(f64::NEG_INFINITY);
    let grid = 201;
    let (best_i, _) = (0..grid)
        .map(|i| (i, f(i as f64 / (grid - 1) as f64)))
        .fold((0usize, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
    let lo = best_i.saturating_sub(1) as f64 / (grid - 1) as f64;
    let hi = (best_i + 1).min(grid - 1) as f64 / (grid - 1) as f64;
    let (p, v) = golden_max(f, lo, hi, 60);
    Ok((v, p))
}

/// `8(n+1)/((n+2)(n+3))`, the qubit measure-and-reflect distance.
pub fn mr_distance_qubit(n: usize) -> f64 {
    let n = n as f64;
    8.0 * (n + 1.0) / ((n + 2.0) * (n + 3.0))
}

/// `8(n+1)(d−1)/((n+d+1)(n+d))`.
pub fn mr_lower_bound(n: usize, d: usize) -> f64 {
    let (n, d) = (n as f64, d as f64);
    8.0 * (n + 1.0) * (d - 1.0) / ((n + d + 1.0) * (n + d))
}

/// Limit of `n·distance`: `4(d + √(d(d−2)+1) − 1)`.
pub fn mr_asymptote(d: usize) -> f64 {
    let d = d as f64;
    4.0 * (d + (d * (d - 2.0) + 1.0).sqrt() - 1.0)
}

/// `R_{ψ}^{⊗k}` as a dense matrix.
pub fn reflection_power(psi: &PureState, k: usize) -> Result<CMatrix> {
    let r = DenseOperator::single(crate::channels::rotation_unitary(psi, PI))?;
    let mut acc = DenseOperator::identity(psi.dim(), 0)?;
    for _ in 0..k {
        acc = acc.kron(&r)?;
    }
    Ok(acc.into_entries())
}
