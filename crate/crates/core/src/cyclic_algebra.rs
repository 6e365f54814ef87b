//! Elements `Σ_ℓ c_ℓ C^ℓ` of the cyclic subalgebra of `C[S_{n+1}]`.
//!
//! The forward transform is unnormalized, `c̃_k = Σ_ℓ e^{2πiℓk/(n+1)} c_ℓ`,
//! and the inverse carries the `1/(n+1)`, so `c̃_0 = Σ_ℓ c_ℓ` literally.

use crate::budget;
use crate::error::{Error, Result};
use crate::tensor_core::{permuted_index, CMatrix, DenseOperator, C64, I, ONE, ZERO};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub const UNITARY_TOL: f64 = 1e-10;

/// Coefficients `(c_0, …, c_n)` of `Σ_ℓ c_ℓ C^ℓ` acting on `n + 1` factors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CyclicElement {
    n: usize,
    coeffs: Vec<C64>,
}

impl CyclicElement {
    pub fn new(coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidArgument("need at least one coefficient".into()));
        }
        Ok(Self {
            n: coeffs.len() - 1,
            coeffs,
        })
    }

    pub fn identity(n: usize) -> Self {
        let mut coeffs = vec![ZERO; n + 1];
        coeffs[0] = ONE;
        Self { n, coeffs }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn c0(&self) -> C64 {
        self.coeffs[0]
    }

    /// `c̃_0 = Σ_ℓ c_ℓ`.
    pub fn c_tilde0(&self) -> C64 {
        self.coeffs.iter().sum()
    }

    /// `Σ_{ℓ≥1} |c_ℓ|²`.
    pub fn tail_weight(&self) -> f64 {
        self.coeffs[1..].iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn fourier(&self) -> Vec<C64> {
        fourier(&self.coeffs)
    }

    /// `max_k ||c̃_k| − 1|`.
    pub fn unitarity_deviation(&self) -> f64 {
        self.fourier()
            .iter()
            .map(|c| (c.norm() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    pub fn is_unitary(&self) -> bool {
        self.unitarity_deviation() <= UNITARY_TOL
    }

    /// `max(||c̃_0| − 1|, |Σ_ℓ |c_ℓ|² − 1|)`: failure of `V` to preserve norms on `φ ⊗ ψ^{⊗n}`.
    pub fn channel_deviation(&self) -> f64 {
        let weight: f64 = self.coeffs.iter().map(|c| c.norm_sqr()).sum();
        (self.c_tilde0().norm() - 1.0).abs().max((weight - 1.0).abs())
    }

    /// Accepts every element whose reflection channel is trace preserving,
    /// which includes all unitary elements and the sequential-protocol family.
    pub fn require_channel(&self) -> Result<()> {
        let deviation = self.channel_deviation();
        if deviation > UNITARY_TOL {
            Err(Error::NonUnitary { deviation })
        } else {
            Ok(())
        }
    }

    pub fn require_unitary(&self) -> Result<()> {
        let deviation = self.unitarity_deviation();
        if deviation > UNITARY_TOL {
            Err(Error::NonUnitary { deviation })
        } else {
            Ok(())
        }
    }
}

/// `c̃_k = Σ_ℓ e^{2πiℓk/(n+1)} c_ℓ`.
pub fn fourier(c: &[C64]) -> Vec<C64> {
    let m = c.len();
    (0..m)
        .map(|k| {
            c.iter()
                .enumerate()
                .map(|(l, &cl)| cl * C64::from_polar(1.0, 2.0 * PI * ((l * k) % m) as f64 / m as f64))
                .sum()
        })
        .collect()
}

/// `c_ℓ = (1/(n+1)) Σ_k e^{−2πiℓk/(n+1)} c̃_k`.
pub fn inverse_fourier(ct: &[C64]) -> Vec<C64> {
    let m = ct.len();
    (0..m)
        .map(|l| {
            ct.iter()
                .enumerate()
                .map(|(k, &ck)| ck * C64::from_polar(1.0, -2.0 * PI * ((l * k) % m) as f64 / m as f64))
                .sum::<C64>()
                / m as f64
        })
        .collect()
}

pub fn is_unitary_element(e: &CyclicElement) -> bool {
    e.is_unitary()
}

/// `c_0 = (n + e^{iθ})/(n+1)`, `c_ℓ = (e^{iθ} − 1)/(n+1)`.
pub fn r_theta_coeffs(n: usize, theta: f64) -> CyclicElement {
    let e = C64::from_polar(1.0, theta);
    let m = (n + 1) as f64;
    let mut coeffs = vec![(e - ONE) / m; n + 1];
    coeffs[0] = (C64::from(n as f64) + e) / m;
    CyclicElement { n, coeffs }
}

/// `f(n) = −(n³ + 6n² + 6n)/(n + 2)³`.
pub fn optimal_f(n: usize) -> f64 {
    let n = n as f64;
    -(n * n * n + 6.0 * n * n + 6.0 * n) / (n + 2.0).powi(3)
}

/// `arccos f(n)` in `[0, π]`.
pub fn optimal_angle(n: usize) -> f64 {
    optimal_f(n).acos()
}

/// The optimal approximate reflection, `r_theta_coeffs(n, ±arccos f(n))`.
pub fn optimal_reflection_coeffs(n: usize, sign: i8) -> CyclicElement {
    let s = if sign < 0 { -1.0 } else { 1.0 };
    r_theta_coeffs(n, s * optimal_angle(n))
}

/// Coefficients of the sequential partial-swap protocol with angles `θ_1..θ_n`.
pub fn lmr_coeffs(thetas: &[f64]) -> Result<CyclicElement> {
    let n = thetas.len();
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one angle".into()));
    }
    let mut coeffs = vec![ZERO; n + 1];
    coeffs[0] = C64::from(thetas.iter().map(|t| t.cos()).product::<f64>());
    let mut cos_prefix = 1.0;
    for l in 1..=n {
        let phase_suffix: f64 = thetas[l..].iter().sum();
        coeffs[l] = C64::from_polar(1.0, phase_suffix) * I * thetas[l - 1].sin() * cos_prefix;
        cos_prefix *= thetas[l - 1].cos();
    }
    Ok(CyclicElement { n, coeffs })
}

/// Shift permutation `C^ℓ` on `k` factors.
pub fn shift_perm(k: usize, l: usize) -> Vec<usize> {
    (0..k).map(|a| (a + l) % k).collect()
}

/// Dense `Σ_ℓ c_ℓ C^ℓ` on `(C^d)^{⊗(n+1)}`.
pub fn dense_element(e: &CyclicElement, d: usize) -> Result<DenseOperator> {
    let k = e.n + 1;
    let dim = budget::check_operator(d, k)?;
    let mut m = CMatrix::zeros(dim, dim);
    for (l, &c) in e.coeffs.iter().enumerate() {
        if c == ZERO {
            continue;
        }
        let perm = shift_perm(k, l);
        for col in 0..dim {
            m[(permuted_index(col, &perm, d), col)] += c;
        }
    }
    DenseOperator::new(m, d, k)
}

/// `(Σ_ℓ c_ℓ C^ℓ) v` for a vector on `(C^d)^{⊗(n+1)}`, without forming the matrix.
pub fn apply_element(e: &CyclicElement, v: &[C64], d: usize) -> Result<Vec<C64>> {
    let k = e.n + 1;
    if v.len() as u128 != budget::pow(d, k) {
        return Err(Error::InvalidArgument("vector length is not d^(n+1)".into()));
    }
    let maps: Vec<Vec<usize>> = e
        .coeffs
        .iter()
        .enumerate()
        .map(|(l, _)| {
            let perm = shift_perm(k, l);
            (0..v.len()).map(|i| permuted_index(i, &perm, d)).collect()
        })
        .collect();
    let mut out = vec![ZERO; v.len()];
    for (l, &c) in e.coeffs.iter().enumerate() {
        if c == ZERO {
            continue;
        }
        for (i, &x) in v.iter().enumerate() {
            out[maps[l][i]] += c * x;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn fourier_of_identity_is_flat() {
        let ct = CyclicElement::identity(4).fourier();
        assert!(ct.iter().all(|&c| close(c, ONE, 1e-14)));
    }

    #[test]
    fn two_point_fourier() {
        let ct = fourier(&[ZERO, ONE]);
        assert!(close(ct[0], ONE, 1e-14));
        assert!(close(ct[1], -ONE, 1e-14));
    }

    #[test]
    fn half_half_is_not_unitary() {
        let e = CyclicElement::new(vec![C64::from(0.5), C64::from(0.5)]).unwrap();
        assert!(!e.is_unitary());
        assert!(CyclicElement::identity(3).is_unitary());
    }

    #[test]
    fn r_theta_values() {
        let e = r_theta_coeffs(3, PI);
        assert!(close(e.c0(), C64::from(0.5), 1e-15));
        assert!(e.coeffs()[1..].iter().all(|&c| close(c, C64::from(-0.5), 1e-15)));
        assert_eq!(r_theta_coeffs(5, 0.0), CyclicElement::identity(5));
        let ct = r_theta_coeffs(6, 1.1).fourier();
        assert!(close(ct[0], C64::from_polar(1.0, 1.1), 1e-13));
        assert!(ct[1..].iter().all(|&c| close(c, ONE, 1e-13)));
    }

    #[test]
    fn optimal_f_values() {
        assert!((optimal_f(2) + 0.6875).abs() < 1e-15);
        assert!((optimal_f(1) + 13.0 / 27.0).abs() < 1e-15);
        assert!(optimal_reflection_coeffs(3, 1).is_unitary());
        assert!(optimal_reflection_coeffs(3, -1).is_unitary());
    }

    #[test]
    fn lmr_single_swap() {
        let e = lmr_coeffs(&[PI / 2.0]).unwrap();
        assert!(close(e.c0(), ZERO, 1e-15));
        assert!(close(e.coeffs()[1], I, 1e-15));
        let z = lmr_coeffs(&[0.0; 4]).unwrap();
        assert_eq!(z, CyclicElement::identity(4));
    }

    #[test]
    fn lmr_equal_angle_ratio() {
        let t = 0.4;
        let e = lmr_coeffs(&[t; 6]).unwrap();
        let want = C64::from_polar(1.0, -t) * t.cos();
        for l in 1..6 {
            assert!(close(e.coeffs()[l + 1] / e.coeffs()[l], want, 1e-13));
        }
        assert!(!e.is_unitary());
        assert!(e.channel_deviation() < 1e-13);
    }

    #[test]
    fn lmr_phase_sum() {
        let thetas = [0.3, -1.2, 2.0, 0.7];
        let e = lmr_coeffs(&thetas).unwrap();
        let want = C64::from_polar(1.0, thetas.iter().sum());
        assert!(close(e.c_tilde0(), want, 1e-13));
    }

    #[test]
    fn non_channel_rejected() {
        let e = CyclicElement::new(vec![C64::from(0.5), C64::from(0.5)]).unwrap();
        assert!(e.require_channel().is_err());
        assert!(r_theta_coeffs(4, 2.2).require_channel().is_ok());
    }

    #[test]
    fn dense_r_pi_single_copy() {
        let v = dense_element(&r_theta_coeffs(1, PI), 2).unwrap();
        let swap = crate::tensor_core::permutation_operator(&[1, 0], 2).unwrap();
        let want = CMatrix::identity(4, 4) - (CMatrix::identity(4, 4) + swap.entries());
        assert!(crate::tensor_core::max_abs_diff(v.entries(), &want) < 1e-15);
    }

    #[test]
    fn apply_matches_dense() {
        let e = r_theta_coeffs(2, 0.9);
        let dense = dense_element(&e, 2).unwrap();
        let v: Vec<C64> = (0..8).map(|i| C64::new(i as f64, 1.0 - i as f64)).collect();
        let a = apply_element(&e, &v, 2).unwrap();
        let b = dense.entries() * crate::tensor_core::CVector::from_column_slice(&v);
        for i in 0..8 {
            assert!(close(a[i], b[i], 1e-13));
        }
    }
}
