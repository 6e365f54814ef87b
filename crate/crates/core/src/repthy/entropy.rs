//! Entropy of the twirled reflection ensemble and its maximization over probe weights.

use super::commutant::{commutant_basis, CommutantBasis};
use super::probe::{build_probe, partitions, ProbeSpec};
use crate::budget;
use crate::error::{Error, Result};
use crate::tensor_core::{binomial_big, hermitian_eigenvalues, rng_from_seed, PureState, C64};
use num_traits::ToPrimitive;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Eigenvalues at or below this are dropped from the entropy sum.
pub const EIGEN_FLOOR: f64 = 1e-12;
/// Eigenvalues above this count toward the rank.
pub const RANK_TOL: f64 = 1e-10;
/// Relative shortfall below the target that raises the flag.
pub const TARGET_REL_TOL: f64 = 1e-4;

/// Spectrum summary of `ρ = twirl((R^{⊗n}⊗I) Φ Φ† (R^{⊗n}⊗I)†)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnsembleSpectrum {
    pub entropy: f64,
    pub rank: usize,
    pub eigenvalues: Vec<f64>,
}

/// `2 log₂ binom(n+d−1, d−1)` for `d ≥ 3`, `log₂ binom(n+2, 2)` for `d = 2`.
pub fn entropy_target(n: usize, d: usize) -> f64 {
    if d == 2 {
        binomial_big(n as u64 + 2, 2).to_f64().expect("finite").log2()
    } else {
        2.0 * binomial_big((n + d - 1) as u64, (d - 1) as u64)
            .to_f64()
            .expect("finite")
            .log2()
    }
}

/// Support bound `binom(n+d−1, d−1)²` on the rank.
pub fn support_dimension(n: usize, d: usize) -> usize {
    let b = binomial_big((n + d - 1) as u64, (d - 1) as u64)
        .to_usize()
        .expect("small");
    b * b
}

/// Reflection `I − 2|d−1⟩⟨d−1|` applied to every factor of the first half.
fn reflect_first_half(probe: &PureState, n: usize, d: usize) -> Vec<C64> {
    let half = budget::pow(d, n) as usize;
    probe
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(idx, &a)| {
            let mut first = idx / half;
            let mut flips = 0;
            for _ in 0..n {
                if first % d == d - 1 {
                    flips += 1;
                }
                first /= d;
            }
            if flips % 2 == 1 {
                -a
            } else {
                a
            }
        })
        .collect()
}

pub fn von_neumann_entropy(eigenvalues: &[f64]) -> f64 {
    eigenvalues
        .iter()
        .filter(|&&x| x > EIGEN_FLOOR)
        .map(|&x| -x * x.log2())
        .sum()
}

pub fn ensemble_spectrum_with(basis: &CommutantBasis, probe: &PureState) -> Result<EnsembleSpectrum> {
    let (n, d) = (basis.n(), basis.d());
    if probe.local_dim() != d || probe.factors() != 2 * n {
        return Err(Error::InvalidArgument("probe does not live on (C^d)^(2n)".into()));
    }
    let v = reflect_first_half(probe, n, d);
    let rho = basis.twirl_pure(&v)?;
    let eigenvalues = hermitian_eigenvalues(&rho);
    let rank = eigenvalues.iter().filter(|&&x| x > RANK_TOL).count();
    Ok(EnsembleSpectrum {
        entropy: von_neumann_entropy(&eigenvalues),
        rank,
        eigenvalues,
    })
}

pub fn ensemble_spectrum(n: usize, d: usize, probe: &PureState) -> Result<EnsembleSpectrum> {
    ensemble_spectrum_with(&commutant_basis(n, d)?, probe)
}

/// Von Neumann entropy (bits) of the twirled ensemble.
pub fn ensemble_entropy(n: usize, d: usize, probe: &PureState) -> Result<f64> {
    Ok(ensemble_spectrum(n, d, probe)?.entropy)
}

/// Outcome of the weight search.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EntropyMaximum {
    pub spec: ProbeSpec,
    pub entropy: f64,
    pub target: f64,
    pub gap: f64,
    pub rank: usize,
    pub support_dimension: usize,
    /// Set when the best entropy stays more than `1e−4·target` below the target.
    pub below_target: bool,
    pub block_basis: String,
    pub restarts: usize,
}

fn softmax(z: &[f64]) -> Vec<f64> {
    let mut logits = z.to_vec();
    logits.push(0.0);
    let top = logits.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    let ex: Vec<f64> = logits.iter().map(|x| (x - top).exp()).collect();
    let s: f64 = ex.iter().sum();
    ex.into_iter().map(|x| x / s).collect()
}

/// Nelder–Mead minimization from `start` with initial step `step`.
pub fn nelder_mead<F: Fn(&[f64]) -> f64>(
    f: &F,
    start: &[f64],
    step: f64,
    tol: f64,
    max_iter: usize,
) -> (Vec<f64>, f64) {
    let m = start.len();
    if m == 0 {
        return (Vec::new(), f(start));
    }
    let mut simplex: Vec<(Vec<f64>, f64)> = (0..=m)
        .map(|k| {
            let mut x = start.to_vec();
            if k > 0 {
                x[k - 1] += step;
            }
            let v = f(&x);
            (x, v)
        })
        .collect();
    for _ in 0..max_iter {
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
        if (simplex[m].1 - simplex[0].1).abs() < tol {
            break;
        }
        let centroid: Vec<f64> = (0..m)
            .map(|i| simplex[..m].iter().map(|(x, _)| x[i]).sum::<f64>() / m as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            (0..m)
                .map(|i| centroid[i] + t * (simplex[m].0[i] - centroid[i]))
                .collect()
        };
        let reflected = along(-1.0);
        let fr = f(&reflected);
        if fr < simplex[0].1 {
            let expanded = along(-2.0);
            let fe = f(&expanded);
            simplex[m] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
        } else if fr < simplex[m - 1].1 {
            simplex[m] = (reflected, fr);
        } else {
            let contracted = if fr < simplex[m].1 { along(-0.5) } else { along(0.5) };
            let fc = f(&contracted);
            if fc < simplex[m].1.min(fr) {
                simplex[m] = (contracted, fc);
            } else {
                let best = simplex[0].0.clone();
                for entry in simplex.iter_mut().skip(1) {
                    let x: Vec<f64> = (0..m).map(|i| best[i] + 0.5 * (entry.0[i] - best[i])).collect();
                    let v = f(&x);
                    *entry = (x, v);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
    simplex.swap_remove(0)
}

/// Maximizes the ensemble entropy over weights on all partitions of `n` with
/// at most `d` rows, using Young-symmetrizer blocks. Weights are parametrized
/// by a softmax so they stay on the simplex.
pub fn maximize_entropy_over_q(n: usize, d: usize, restarts: usize, seed: u64) -> Result<EntropyMaximum> {
    let basis = commutant_basis(n, d)?;
    let lambdas = partitions(n, d);
    let blocks_spec = |q: &[f64]| ProbeSpec::new(n, d, lambdas.iter().cloned().zip(q.iter().copied()).collect());
    let evaluate = |z: &[f64]| -> f64 {
        let q = softmax(z);
        blocks_spec(&q)
            .and_then(|s| build_probe(&s))
            .and_then(|p| ensemble_spectrum_with(&basis, &p))
            .map_or(f64::INFINITY, |s| -s.entropy)
    };
    let dims = lambdas.len() - 1;
    let starts: Vec<Vec<f64>> = {
        let mut rng = rng_from_seed(seed);
        (0..restarts.max(1))
            .map(|_| (0..dims).map(|_| 2.0 * rng.sample::<f64, _>(StandardNormal)).collect())
            .collect()
    };
    let results: Vec<(Vec<f64>, f64)> = starts
        .par_iter()
        .map(|s| nelder_mead(&evaluate, s, 1.0, 1e-13, 400))
        .collect();
    let (best_z, _) = results
        .into_iter()
        .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal))
        .expect("at least one restart");
    let spec = blocks_spec(&softmax(&best_z))?;
    let spectrum = ensemble_spectrum_with(&basis, &build_probe(&spec)?)?;
    let target = entropy_target(n, d);
    let gap = target - spectrum.entropy;
    Ok(EntropyMaximum {
        spec,
        entropy: spectrum.entropy,
        target,
        gap,
        rank: spectrum.rank,
        support_dimension: support_dimension(n, d),
        below_target: gap > TARGET_REL_TOL * target,
        block_basis: "young-symmetrizer".into(),
        restarts: restarts.max(1),
    })
}
