use proptest::prelude::*;
use rand::Rng;
use reflectron::channels::{
    choi_of, effective_channel, lmr_sequential_dense, random_density, random_matrix, Channel, MrChannel,
};
use reflectron::circuits::{build_rotation_circuit, export_circuit, parse_circuit, projected_block};
use reflectron::cyclic_algebra::{
    apply_element, dense_element, fourier, inverse_fourier, lmr_coeffs, r_theta_coeffs, CyclicElement,
};
use reflectron::distances::{linear_bound, tensor_power_trace_distance, tensor_power_trace_distance_formula};
use reflectron::optima::landscape_value;
use reflectron::repthy::lambert_w0;
use reflectron::tensor_core::{
    haar_state_with, hermitian_eigenvalues, max_abs_diff, permutation_operator, rng_from_seed, stabilizer_unitary_with,
    symmetric_projector, DenseOperator, PureState, C64,
};
use reflectron::universal::{binary_angle, budget, covariance_defect};
use std::f64::consts::PI;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

fn random_perm<R: Rng>(rng: &mut R, k: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..k).collect();
    for i in (1..k).rev() {
        p.swap(i, rng.random_range(0..=i));
    }
    p
}

fn random_coeffs<R: Rng>(rng: &mut R, n: usize) -> Vec<C64> {
    (0..=n)
        .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect()
}

fn random_unitary_element<R: Rng>(rng: &mut R, n: usize) -> CyclicElement {
    let phases: Vec<C64> = (0..=n)
        .map(|_| C64::from_polar(1.0, rng.random_range(-PI..PI)))
        .collect();
    CyclicElement::new(inverse_fourier(&phases)).unwrap()
}

proptest! {
    #![proptest_config(config(48))]

    #[test]
    fn permutation_operator_is_homomorphism(seed in any::<u64>(), k in 1usize..=5, d in 2usize..=3) {
        prop_assume!(d.pow(k as u32) <= 243);
        let mut rng = rng_from_seed(seed);
        let s = random_perm(&mut rng, k);
        let t = random_perm(&mut rng, k);
        let st: Vec<usize> = (0..k).map(|i| s[t[i]]).collect();
        let lhs = permutation_operator(&s, d).unwrap().matmul(&permutation_operator(&t, d).unwrap()).unwrap();
        let rhs = permutation_operator(&st, d).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-12);
    }

    #[test]
    fn tensor_power_trace_distance_matches_formula(seed in any::<u64>(), n in 1usize..=4, d in 2usize..=3) {
        let mut rng = rng_from_seed(seed);
        let a = haar_state_with(&mut rng, d);
        let b = haar_state_with(&mut rng, d);
        let dense = tensor_power_trace_distance(&a, &b, n).unwrap();
        prop_assert!((dense - tensor_power_trace_distance_formula(&a, &b, n)).abs() < 1e-9);
    }

    #[test]
    fn fourier_roundtrip(seed in any::<u64>(), n in 0usize..64) {
        let c = random_coeffs(&mut rng_from_seed(seed), n);
        let back = inverse_fourier(&fourier(&c));
        let err = c.iter().zip(&back).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        prop_assert!(err < 1e-12);
    }

    #[test]
    fn unitary_elements_preserve_norm_on_product_inputs(seed in any::<u64>(), n in 1usize..=4, d in 2usize..=3) {
        let mut rng = rng_from_seed(seed);
        let e = random_unitary_element(&mut rng, n);
        let phi = haar_state_with(&mut rng, d);
        let psi = haar_state_with(&mut rng, d);
        let input = phi.tensor(&psi.tensor_power(n).unwrap()).unwrap();
        let out = apply_element(&e, input.amplitudes(), d).unwrap();
        let norm: f64 = out.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        prop_assert!((norm - 1.0).abs() < 1e-10);
    }

    #[test]
    fn channels_are_covariant(seed in any::<u64>(), n in 1usize..=6, d in 2usize..=4, gamma in -PI..PI) {
        let mut rng = rng_from_seed(seed);
        let psi = haar_state_with(&mut rng, d);
        let e = random_unitary_element(&mut rng, n);
        let w = stabilizer_unitary_with(&mut rng, &psi, gamma);
        let x = random_matrix(&mut rng, d);
        let effective = effective_channel(&e, &psi).unwrap();
        prop_assert!(covariance_defect(&effective, &w, &x) < 1e-10);
        let mr = MrChannel::new(&psi, n).unwrap();
        prop_assert!(covariance_defect(&mr, &w, &x) < 1e-10);
    }

    #[test]
    fn channels_are_trace_preserving_and_cp(seed in any::<u64>(), n in 1usize..=6, d in 2usize..=3) {
        let mut rng = rng_from_seed(seed);
        let psi = haar_state_with(&mut rng, d);
        let e = random_unitary_element(&mut rng, n);
        let x = random_matrix(&mut rng, d);
        let effective = effective_channel(&e, &psi).unwrap();
        let mr = MrChannel::new(&psi, n).unwrap();
        let channels: [&dyn Channel; 2] = [&effective, &mr];
        for ch in channels {
            prop_assert!((ch.apply(&x).trace() - x.trace()).norm() < 1e-11);
            let choi = choi_of(ch);
            let min = hermitian_eigenvalues(choi.entries()).into_iter().fold(f64::INFINITY, f64::min);
            prop_assert!(min > -1e-9);
        }
    }

    #[test]
    fn lmr_sequential_matches_coefficients(seed in any::<u64>(), n in 1usize..=6, d in 2usize..=3) {
        prop_assume!(d.pow(n as u32 + 1) <= 729);
        let mut rng = rng_from_seed(seed);
        let thetas: Vec<f64> = (0..n).map(|_| rng.random_range(-PI..PI)).collect();
        let psi = haar_state_with(&mut rng, d);
        let rho = DenseOperator::single(random_density(&mut rng, d)).unwrap();
        let dense = lmr_sequential_dense(&thetas, &psi, &rho).unwrap();
        let effective = effective_channel(&lmr_coeffs(&thetas).unwrap(), &psi).unwrap();
        prop_assert!(max_abs_diff(dense.entries(), &effective.apply(rho.entries())) < 1e-10);
    }

    #[test]
    fn landscape_is_symmetric(n in 1usize..=32, r in 0.0f64..1.0, u in 0.0f64..(2.0 * PI)) {
        prop_assert!((landscape_value(n, r, u) - landscape_value(n, r, 2.0 * PI - u)).abs() < 1e-10);
    }

    #[test]
    fn binary_angle_is_within_one_ulp_of_k_bits(theta in -PI..=PI, k in 1usize..=40) {
        let a = binary_angle(theta, k).unwrap();
        let approx = PI * a.value();
        prop_assert!((theta - approx).abs() <= PI * 0.5f64.powi(k as i32) + 1e-15);
        prop_assert!(approx.abs() <= theta.abs() + 1e-15);
    }

    #[test]
    fn per_rotation_linear_bound_holds(seed in any::<u64>(), d in 2usize..=4, log_inv_eps in 1u32..=12) {
        let eps = 0.5f64.powi(log_inv_eps as i32);
        let mut rng = rng_from_seed(seed);
        let rotations: Vec<(PureState, f64)> = (0..d).map(|_| (haar_state_with(&mut rng, d), rng.random_range(-PI..PI))).collect();
        let program = budget(d, eps, &rotations).unwrap();
        for rec in &program.rotations {
            prop_assert!(rec.n == 0 || linear_bound(rec.n, rec.alpha.abs()) <= eps / (3.0 * (d - 1) as f64) + 1e-12);
        }
    }

    #[test]
    fn lambert_w_inverts(x in 0.0f64..1e12) {
        let w = lambert_w0(x).unwrap();
        prop_assert!((w * w.exp() - x).abs() <= 1e-10 * x.max(1.0));
    }
}

proptest! {
    #![proptest_config(config(12))]

    #[test]
    fn circuit_text_roundtrips(n in prop::sample::select(vec![1usize, 3, 7, 15, 31]), theta in -PI..PI) {
        let g = build_rotation_circuit(n, theta).unwrap();
        let text = export_circuit(&g);
        let parsed = parse_circuit(&text).unwrap();
        prop_assert_eq!(export_circuit(&parsed), text);
        prop_assert_eq!(parsed.len(), g.len());
    }

    #[test]
    fn projected_circuit_equals_r_theta(n in prop::sample::select(vec![1usize, 3]), theta in -PI..PI) {
        let g = build_rotation_circuit(n, theta).unwrap();
        let block = projected_block(&g).unwrap();
        let dense = dense_element(&r_theta_coeffs(n, theta), 2).unwrap();
        prop_assert!(max_abs_diff(&block, dense.entries()) < 1e-10);
    }
}

#[test]
fn symmetric_projector_is_permutation_average() {
    for d in 2usize..=3 {
        for n in 1..=4 {
            let perms = reflectron::repthy::commutant::all_permutations(n);
            let dim = d.pow(n as u32);
            let mut sum = DenseOperator::zeros(d, n).unwrap();
            for p in &perms {
                sum = sum.add(&permutation_operator(p, d).unwrap()).unwrap();
            }
            let avg = sum.scale(C64::from(1.0 / perms.len() as f64));
            let proj = symmetric_projector(n, d).unwrap();
            assert_eq!(proj.dim(), dim);
            assert!(proj.max_abs_diff(&avg) < 1e-11, "n={n} d={d}");
        }
    }
}

#[test]
fn equal_angle_coefficients_have_constant_ratio() {
    for theta in [0.1, 0.5, 1.0, 1.5] {
        let e = lmr_coeffs(&[theta; 6]).unwrap();
        let expected = C64::from_polar(1.0, -theta) * theta.cos();
        for l in 1..6 {
            let ratio = e.coeffs()[l + 1] / e.coeffs()[l];
            assert!((ratio - expected).norm() < 1e-12);
            assert!((ratio - 1.0).norm() > 1e-3);
        }
    }
}
