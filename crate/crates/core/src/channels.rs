//! Channels on `C^d`: the target rotation, approximate reflection channels
//! (dense and five-scalar closed form), the sequential partial-swap protocol
//! and the measure-and-reflect baseline.

use crate::budget;
use crate::cyclic_algebra::{apply_element, CyclicElement};
use crate::error::{Error, Result};
use crate::tensor_core::{orthonormal_frame, CMatrix, CVector, DenseOperator, PureState, C64, I, ONE, ZERO};
use serde::{Deserialize, Serialize};

/// A linear map on `d × d` matrices.
pub trait Channel: Send + Sync {
    fn dim(&self) -> usize;
    fn apply(&self, x: &CMatrix) -> CMatrix;
}

/// `(I_R ⊗ E)(Y)` for `Y` on `C^r ⊗ C^d` with the reference register first.
pub fn apply_extended<E: Channel + ?Sized>(channel: &E, y: &CMatrix) -> CMatrix {
    let d = channel.dim();
    let r = y.nrows() / d;
    let mut out = CMatrix::zeros(r * d, r * d);
    for a in 0..r {
        for b in 0..r {
            let block = y.view((a * d, b * d), (d, d)).into_owned();
            out.view_mut((a * d, b * d), (d, d)).copy_from(&channel.apply(&block));
        }
    }
    out
}

/// Choi matrix `Σ_{ij} |i⟩⟨j| ⊗ E(|i⟩⟨j|)`.
pub fn choi_of<E: Channel + ?Sized>(channel: &E) -> DenseOperator {
    let d = channel.dim();
    let mut out = CMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            let mut e = CMatrix::zeros(d, d);
            e[(i, j)] = ONE;
            out.view_mut((i * d, j * d), (d, d)).copy_from(&channel.apply(&e));
        }
    }
    DenseOperator::new(out, d, 2).expect("choi shape")
}

/// `U X U†`.
#[derive(Debug, Clone)]
pub struct UnitaryChannel {
    u: CMatrix,
}

impl UnitaryChannel {
    pub fn new(u: CMatrix) -> Self {
        Self { u }
    }

    pub fn unitary(&self) -> &CMatrix {
        &self.u
    }
}

impl Channel for UnitaryChannel {
    fn dim(&self) -> usize {
        self.u.nrows()
    }

    fn apply(&self, x: &CMatrix) -> CMatrix {
        &self.u * x * self.u.adjoint()
    }
}

/// `e^{iαψ} = I + (e^{iα} − 1)|ψ⟩⟨ψ|`.
pub fn rotation_unitary(psi: &PureState, alpha: f64) -> CMatrix {
    let d = psi.dim();
    let v = psi.to_vector();
    CMatrix::identity(d, d) + &v * v.adjoint() * (C64::from_polar(1.0, alpha) - ONE)
}

/// The exact rotation channel `X ↦ e^{iαψ} X e^{−iαψ}`.
pub fn rotation_channel(psi: &PureState, alpha: f64, x: &DenseOperator) -> Result<DenseOperator> {
    if x.dim() != psi.dim() {
        return Err(Error::InvalidArgument("operator and state dimensions differ".into()));
    }
    let ch = UnitaryChannel::new(rotation_unitary(psi, alpha));
    DenseOperator::single(ch.apply(x.entries()))
}

pub fn rotation(psi: &PureState, alpha: f64) -> UnitaryChannel {
    UnitaryChannel::new(rotation_unitary(psi, alpha))
}

/// `E(X) = a_X X + a_PX PX + a_XP XP + a_tr tr(X) P + a_trP tr(PX) P` with `P = |ψ⟩⟨ψ|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectiveChannel {
    pub d: usize,
    pub psi: PureState,
    pub a_x: C64,
    pub a_px: C64,
    pub a_xp: C64,
    pub a_tr: C64,
    pub a_trp: C64,
}

impl EffectiveChannel {
    pub fn projector(&self) -> CMatrix {
        self.psi.projector().into_entries()
    }
}

impl Channel for EffectiveChannel {
    fn dim(&self) -> usize {
        self.d
    }

    fn apply(&self, x: &CMatrix) -> CMatrix {
        let v = self.psi.to_vector();
        let p = &v * v.adjoint();
        let px = &p * x;
        let xp = x * &p;
        let tr_x = x.trace();
        let tr_px = px.trace();
        x * self.a_x + px * self.a_px + xp * self.a_xp + &p * (self.a_tr * tr_x + self.a_trp * tr_px)
    }
}

/// Closed-form channel of `Σ c_ℓ C^ℓ` with program `ψ^{⊗n}`.
pub fn effective_channel(e: &CyclicElement, psi: &PureState) -> Result<EffectiveChannel> {
    e.require_channel()?;
    let c0 = e.c0();
    let s = e.c_tilde0() - c0;
    let q = e.tail_weight();
    Ok(EffectiveChannel {
        d: psi.dim(),
        psi: psi.clone(),
        a_x: C64::from(c0.norm_sqr()),
        a_px: c0.conj() * s,
        a_xp: c0 * s.conj(),
        a_tr: C64::from(q),
        a_trp: C64::from(s.norm_sqr() - q),
    })
}

/// `tr_P[V (X ⊗ ψ^{⊗n}) V†]` by explicit state-vector simulation.
///
/// Each column `W_a = V(|a⟩ ⊗ ψ^{⊗n})` is reshaped to `d × d^n`, so that
/// `E(|a⟩⟨b|) = W_a W_b†`. Only `d^{n+1}`-length vectors are allocated.
pub fn dense_reflection_channel(e: &CyclicElement, psi: &PureState, x: &DenseOperator) -> Result<DenseOperator> {
    let ch = DenseReflectionChannel::new(e, psi)?;
    if x.dim() != ch.dim() {
        return Err(Error::InvalidArgument("operator and state dimensions differ".into()));
    }
    DenseOperator::single(ch.apply(x.entries()))
}

/// Precomputed state-vector form of the reflection channel.
#[derive(Debug, Clone)]
pub struct DenseReflectionChannel {
    d: usize,
    w: Vec<CMatrix>,
}

impl DenseReflectionChannel {
    pub fn new(e: &CyclicElement, psi: &PureState) -> Result<Self> {
        e.require_channel()?;
        let d = psi.dim();
        let n = e.n();
        budget::check_vector(d, n + 1)?;
        let prog = psi.tensor_power(n)?;
        let m = prog.dim();
        let mut w = Vec::with_capacity(d);
        for a in 0..d {
            let mut input = vec![ZERO; d * m];
            input[a * m..(a + 1) * m].copy_from_slice(prog.amplitudes());
            let out = apply_element(e, &input, d)?;
            w.push(CMatrix::from_row_slice(d, m, &out));
        }
        Ok(Self { d, w })
    }
}

impl Channel for DenseReflectionChannel {
    fn dim(&self) -> usize {
        self.d
    }

    fn apply(&self, x: &CMatrix) -> CMatrix {
        let d = self.d;
        let mut out = CMatrix::zeros(d, d);
        for a in 0..d {
            for b in 0..d {
                if x[(a, b)] != ZERO {
                    out += &self.w[a] * self.w[b].adjoint() * x[(a, b)];
                }
            }
        }
        out
    }
}

/// `e^{iθ SWAP} = cos θ I + i sin θ SWAP` on `C^d ⊗ C^d`.
pub fn partial_swap(d: usize, theta: f64) -> CMatrix {
    let mut m = CMatrix::identity(d * d, d * d) * C64::from(theta.cos());
    for a in 0..d {
        for b in 0..d {
            m[(b * d + a, a * d + b)] += I * theta.sin();
        }
    }
    m
}

/// Sequential protocol: for each `θ_k`, couple the system to a fresh copy of
/// `ψ` with `e^{iθ_k SWAP}` and discard the copy.
pub fn lmr_sequential_dense(thetas: &[f64], psi: &PureState, x: &DenseOperator) -> Result<DenseOperator> {
    let d = psi.dim();
    if x.dim() != d {
        return Err(Error::InvalidArgument("operator and state dimensions differ".into()));
    }
    let p = psi.projector();
    let mut rho = x.clone();
    for &t in thetas {
        let u = DenseOperator::new(partial_swap(d, t), d, 2)?;
        let joint = rho.kron(&p)?;
        let evolved = DenseOperator::new(u.entries() * joint.entries() * u.entries().adjoint(), d, 2)?;
        rho = crate::tensor_core::partial_trace(&evolved, &[0])?;
    }
    Ok(rho)
}

/// Sequential protocol as a reusable channel.
#[derive(Debug, Clone)]
pub struct LmrSequentialChannel {
    thetas: Vec<f64>,
    psi: PureState,
}

impl LmrSequentialChannel {
    pub fn new(thetas: Vec<f64>, psi: PureState) -> Self {
        Self { thetas, psi }
    }
}

impl Channel for LmrSequentialChannel {
    fn dim(&self) -> usize {
        self.psi.dim()
    }

    fn apply(&self, x: &CMatrix) -> CMatrix {
        let op = DenseOperator::single(x.clone()).expect("square input");
        lmr_sequential_dense(&self.thetas, &self.psi, &op)
            .expect("shapes checked")
            .into_entries()
    }
}

/// Measure-and-reflect channel, expressed in the frame `{ψ, ψ_1, …, ψ_{d−1}}`.
#[derive(Debug, Clone)]
pub struct MrChannel {
    d: usize,
    basis: CMatrix,
    diag_psi: f64,
    diag_to_perp: f64,
    coherence: f64,
    perp_self: f64,
    perp_to_perp: f64,
    off_perp: f64,
}

impl MrChannel {
    pub fn new(psi: &PureState, n: usize) -> Result<Self> {
        let d = psi.dim();
        if d < 2 || n < 1 {
            return Err(Error::InvalidArgument("need d >= 2 and n >= 1".into()));
        }
        let nf = n as f64;
        let df = d as f64;
        // tr P_n / tr P_{n+1} and tr P_n / tr P_{n+2}
        let a = (nf + 1.0) / (nf + df);
        let b = (nf + 1.0) * (nf + 2.0) / ((nf + df) * (nf + df + 1.0));
        let mut basis = CMatrix::zeros(d, d);
        basis.set_column(0, &psi.to_vector());
        for (j, f) in orthonormal_frame(psi).iter().enumerate() {
            basis.set_column(j + 1, f);
        }
        Ok(Self {
            d,
            basis,
            diag_psi: 1.0 - 4.0 * a + 4.0 * b,
            diag_to_perp: 4.0 * b / (nf + 2.0),
            coherence: 1.0 - 2.0 * (nf + 2.0) * a / (nf + 1.0) + 4.0 * b / (nf + 2.0),
            perp_self: 1.0 - 4.0 * a / (nf + 1.0) + 4.0 * b / ((nf + 2.0) * (nf + 1.0)),
            perp_to_perp: 4.0 * b / ((nf + 1.0) * (nf + 2.0)),
            off_perp: 1.0 - 4.0 * a / (nf + 1.0) + 4.0 * b / ((nf + 1.0) * (nf + 2.0)),
        })
    }

    /// Columns are `ψ, ψ_1, …, ψ_{d−1}`.
    pub fn frame(&self) -> &CMatrix {
        &self.basis
    }
}

impl Channel for MrChannel {
    fn dim(&self) -> usize {
        self.d
    }

    fn apply(&self, x: &CMatrix) -> CMatrix {
        let d = self.d;
        let xf = self.basis.adjoint() * x * &self.basis;
        let mut y = CMatrix::zeros(d, d);
        let perp_trace: C64 = (1..d).map(|i| xf[(i, i)]).sum();
        y[(0, 0)] = xf[(0, 0)] * self.diag_psi + perp_trace * self.diag_to_perp;
        for j in 1..d {
            y[(0, j)] = xf[(0, j)] * self.coherence;
            y[(j, 0)] = xf[(j, 0)] * self.coherence;
            y[(j, j)] = xf[(j, j)] * self.perp_self + xf[(0, 0)] * self.diag_to_perp + perp_trace * self.perp_to_perp;
            for i in 1..d {
                if i != j {
                    y[(i, j)] = xf[(i, j)] * self.off_perp;
                }
            }
        }
        &self.basis * y * self.basis.adjoint()
    }
}

pub fn mr_channel(psi: &PureState, n: usize, x: &DenseOperator) -> Result<DenseOperator> {
    let ch = MrChannel::new(psi, n)?;
    if x.dim() != ch.dim() {
        return Err(Error::InvalidArgument("operator and state dimensions differ".into()));
    }
    DenseOperator::single(ch.apply(x.entries()))
}

/// `E_k ∘ … ∘ E_1`.
pub struct ComposedChannel {
    d: usize,
    stages: Vec<Box<dyn Channel>>,
}

impl ComposedChannel {
    pub fn new(d: usize, stages: Vec<Box<dyn Channel>>) -> Result<Self> {
        if stages.iter().any(|s| s.dim() != d) {
            return Err(Error::InvalidArgument("stage dimensions differ".into()));
        }
        Ok(Self { d, stages })
    }

    pub fn len(&self) -> usize {
        self.stages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stages.is_empty()
    }
}

impl Channel for ComposedChannel {
    fn dim(&self) -> usize {
        self.d
    }

    fn apply(&self, x: &CMatrix) -> CMatrix {
        self.stages.iter().fold(x.clone(), |acc, s| s.apply(&acc))
    }
}

/// Choi matrix of an effective channel.
pub fn choi(channel: &EffectiveChannel) -> DenseOperator {
    choi_of(channel)
}

/// `tr(Πρ)Π + tr(Π^⊥ρ) Π^⊥/(d − 1)`.
pub fn group_twirl_state(rho: &DenseOperator, psi: &PureState) -> Result<DenseOperator> {
    let d = psi.dim();
    if rho.dim() != d || d < 2 {
        return Err(Error::InvalidArgument("need a d x d state with d >= 2".into()));
    }
    let p = psi.projector().into_entries();
    let perp = CMatrix::identity(d, d) - &p;
    let in_psi = (&p * rho.entries()).trace();
    let in_perp = (&perp * rho.entries()).trace();
    DenseOperator::single(p * in_psi + perp * (in_perp / (d as f64 - 1.0)))
}

/// Random `d × d` density matrix from a Ginibre draw.
pub fn random_density<R: rand::Rng + ?Sized>(rng: &mut R, d: usize) -> CMatrix {
    use rand_distr::StandardNormal;
    let g = CMatrix::from_fn(d, d, |_, _| {
        C64::new(
            rng.sample::<f64, _>(StandardNormal),
            rng.sample::<f64, _>(StandardNormal),
        )
    });
    let rho = &g * g.adjoint();
    let t = rho.trace();
    rho / t
}

/// Random complex `d × d` matrix with Gaussian entries.
pub fn random_matrix<R: rand::Rng + ?Sized>(rng: &mut R, d: usize) -> CMatrix {
    use rand_distr::StandardNormal;
    CMatrix::from_fn(d, d, |_, _| {
        C64::new(
            rng.sample::<f64, _>(StandardNormal),
            rng.sample::<f64, _>(StandardNormal),
        )
    })
}

pub fn outer(v: &CVector) -> CMatrix {
    v * v.adjoint()
}
