//! Optimization sweeps: the `(r, u)` distance landscape for reflections, the
//! optimal angle `θ*(α)`, domain classification and the improved angle for
//! the sequential protocol.

use crate::cyclic_algebra::{lmr_coeffs, r_theta_coeffs, CyclicElement};
use crate::distances::{branch_of, closed_form_rotation_distance, closed_form_value, Branch};
use crate::error::{Error, Result};
use crate::tensor_core::C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub type Domain = Branch;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LandscapePoint {
    pub r: f64,
    pub u: f64,
    pub value: f64,
}

/// Grid evaluation plus the Domain A/B boundary curve.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Landscape {
    pub n: usize,
    pub points: Vec<LandscapePoint>,
    pub boundary: Vec<(f64, f64)>,
}

/// `(gap, z)` for `c̃_0 = e^{iu}`, `(1/n)Σ_{k≥1} c̃_k = r`, target `α = π`.
fn landscape_parameters(n: usize, r: f64, u: f64) -> (f64, f64) {
    let nf = n as f64;
    let ct0 = C64::from_polar(1.0, u);
    let c0 = (ct0 + nf * r) / (nf + 1.0);
    let gap = 1.0 - c0.norm_sqr();
    let z = (ct0 * c0.conj() + 1.0).norm();
    (gap, z)
}

/// Reflection distance at landscape coordinates `(r, u)`.
pub fn landscape_value(n: usize, r: f64, u: f64) -> f64 {
    let (gap, z) = landscape_parameters(n, r, u);
    closed_form_value(gap, z)
}

/// Domain-B expression written directly in `(r, u)`.
pub fn landscape_domain_b_expression(n: usize, r: f64, u: f64) -> f64 {
    let nf = n as f64;
    let (s, c) = u.sin_cos();
    let a = (nf + 2.0 + nf * r * c).powi(2) + (nf * r * s).powi(2);
    let b = (1.0 + nf * r * c).powi(2) + (nf * r * s).powi(2);
    2.0 * a / (b + 2.0 * (nf + 1.0) * a.sqrt() - (nf + 1.0).powi(2))
}

/// Critical line `u*(r)`.
pub fn critical_u(n: usize, r: f64) -> f64 {
    let nf = n as f64;
    let arg = (nf.powi(3) * (r.powi(3) - 3.0 * r) - 12.0 * nf * nf * r - 12.0 * nf * r) / (2.0 * (nf + 2.0).powi(3));
    arg.clamp(-1.0, 1.0).acos()
}

fn grid(count: usize, hi: f64, inclusive: bool) -> Vec<f64> {
    if count <= 1 {
        return vec![0.0];
    }
    let denom = if inclusive { (count - 1) as f64 } else { count as f64 };
    (0..count).map(|i| hi * i as f64 / denom).collect()
}

/// `r ∈ [0, 1]` inclusive, `u ∈ [0, 2π)`; rows ordered by `r` then `u`.
pub fn landscape(n: usize, grid_r: usize, grid_u: usize) -> Result<Landscape> {
    if n == 0 || grid_r == 0 || grid_u == 0 {
        return Err(Error::InvalidArgument("n and grid sizes must be positive".into()));
    }
    let rs = grid(grid_r, 1.0, true);
    let us = grid(grid_u, 2.0 * PI, false);
    let points: Vec<LandscapePoint> = rs
        .par_iter()
        .flat_map_iter(|&r| {
            us.iter().map(move |&u| LandscapePoint {
                r,
                u,
                value: landscape_value(n, r, u),
            })
        })
        .collect();
    let boundary = us.iter().filter_map(|&u| boundary_r(n, u).map(|r| (r, u))).collect();
    Ok(Landscape { n, points, boundary })
}

/// Radius where `gap = z` along a fixed `u`, if the sign changes on `[0, 1]`.
pub fn boundary_r(n: usize, u: f64) -> Option<f64> {
    let h = |r: f64| {
        let (gap, z) = landscape_parameters(n, r, u);
        gap - z
    };
    let samples = 200;
    let mut prev_r = 0.0;
    let mut prev = h(0.0);
    for i in 1..=samples {
        let r = i as f64 / samples as f64;
        let cur = h(r);
        if prev == 0.0 {
            return Some(prev_r);
        }
        if prev.signum() != cur.signum() {
            let (mut lo, mut hi) = (prev_r, r);
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if h(mid).signum() == prev.signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Some(0.5 * (lo + hi));
        }
        prev_r = r;
        prev = cur;
    }
    None
}

fn golden_min<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut iters = 0;
    while hi - lo > tol && iters < 200 {
        if f1 > f2 {
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
        iters += 1;
    }
    let candidates = [(lo, f(lo)), (x1, f1), (x2, f2), (hi, f(hi))];
    candidates
        .into_iter()
        .fold((lo, f64::INFINITY), |best, c| if c.1 < best.1 { c } else { best })
}

/// `argmin_{θ ∈ [0, π]}` of the distance of `r_theta_coeffs(n, θ)` to `R_ψ(α)`.
pub fn theta_star(n: usize, alpha: f64, tolerance: f64) -> Result<f64> {
    Ok(theta_star_with_value(n, alpha, tolerance)?.0)
}

/// `(θ*, distance at θ*)`.
pub fn theta_star_with_value(n: usize, alpha: f64, tolerance: f64) -> Result<(f64, f64)> {
    if !(0.0..=PI).contains(&alpha) {
        return Err(Error::Domain(format!("alpha = {alpha} outside [0, pi]")));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let f = |t: f64| closed_form_rotation_distance(&r_theta_coeffs(n, t), alpha).unwrap_or(f64::INFINITY);
    let brackets = [(0.0, PI / 3.0), (PI / 3.0, 2.0 * PI / 3.0), (2.0 * PI / 3.0, PI)];
    let mut best = (0.0, f(0.0));
    for (lo, hi) in brackets {
        let cand = golden_min(&f, lo, hi, tolerance.max(1e-14));
        if cand.1 < best.1 {
            best = cand;
        }
    }
    Ok(best)
}

/// Rows `(α, θ*(α), distance)` over `alphas`.
pub fn theta_star_curve(n: usize, alphas: &[f64], tolerance: f64) -> Result<Vec<(f64, f64, f64)>> {
    alphas
        .par_iter()
        .map(|&a| theta_star_with_value(n, a, tolerance).map(|(t, v)| (a, t, v)))
        .collect()
}

pub fn domain_classify(e: &CyclicElement, alpha: f64) -> Result<Domain> {
    e.require_channel()?;
    let gap = 1.0 - e.c0().norm_sqr();
    let z = (e.c_tilde0() * e.c0().conj() - C64::from_polar(1.0, alpha)).norm();
    Ok(branch_of(gap, z))
}

/// `θ′ = α/(n + α√3/2)`.
pub fn lmr_improved_angle(n: usize, alpha: f64) -> Result<f64> {
    if n <= 2 {
        return Err(Error::InvalidArgument(format!("improved angle needs n > 2, got {n}")));
    }
    Ok(alpha / (n as f64 + alpha * 3f64.sqrt() / 2.0))
}

/// Distance of the equal-angle sequential protocol with per-step angle `θ`.
pub fn lmr_distance(n: usize, theta: f64, alpha: f64) -> Result<f64> {
    closed_form_rotation_distance(&lmr_coeffs(&vec![theta; n])?, alpha)
}

/// `D(E_{α/n}) − D(E_{θ′})`.
pub fn lmr_improvement(n: usize, alpha: f64) -> Result<f64> {
    let improved = lmr_improved_angle(n, alpha)?;
    Ok(lmr_distance(n, alpha / n as f64, alpha)? - lmr_distance(n, improved, alpha)?)
}

/// `2√3 α³/n²`.
pub fn lmr_improvement_asymptote(n: usize, alpha: f64) -> f64 {
    2.0 * 3f64.sqrt() * alpha.powi(3) / (n as f64).powi(2)
}
