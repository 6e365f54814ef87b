//! Acceptance criteria 1–11, one PASS/FAIL line each.

use rand::Rng;
use reflectron::channels::{effective_channel, lmr_sequential_dense, random_density, Channel, DenseReflectionChannel};
use reflectron::circuits::{cswap_count, verify_circuit};
use reflectron::cyclic_algebra::{lmr_coeffs, optimal_angle, optimal_f, optimal_reflection_coeffs, r_theta_coeffs};
use reflectron::distances::{
    closed_form_rotation_distance, dense_distance_at_p, diamond_covariant, equal_angle_distance, linear_bound,
    mr_asymptote, mr_distance, mr_distance_qubit, mr_lower_bound, optimal_reflection_distance, theta_pi_distance,
    CovariantPair,
};
use reflectron::optima::{landscape, lmr_improvement, lmr_improvement_asymptote, theta_star, theta_star_curve};
use reflectron::repthy::entropy::{entropy_target, support_dimension};
use reflectron::repthy::{build_probe_d2, ensemble_spectrum, lambert_w0, maximize_entropy_over_q, solve_q_d2};
use reflectron::tensor_core::{haar_state_with, max_abs_diff, rng_from_seed, DenseOperator};
use reflectron::universal::{fitted_constant, verify_budget, worst_case_budget};
use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

type Outcome = Result<(bool, String), String>;

fn e<T: std::fmt::Display>(x: T) -> String {
    x.to_string()
}

fn slope(points: &[(f64, f64)]) -> f64 {
    let m = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / m;
    let my = points.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

fn criterion_1() -> Outcome {
    let mut worst_formula = 0.0f64;
    let mut worst_dense = 0.0f64;
    let mut rng = rng_from_seed(1);
    for d in [2, 3] {
        for n in 1..=6 {
            let element = optimal_reflection_coeffs(n, 1);
            let pair = CovariantPair::new(element.clone(), PI, d).map_err(e)?;
            let (value, p) = diamond_covariant(&pair).map_err(e)?;
            worst_formula = worst_formula.max((value - optimal_reflection_distance(n)).abs());
            let dense = DenseReflectionChannel::new(&element, pair.psi()).map_err(e)?;
            let dv = dense_distance_at_p(PI, pair.psi(), &dense, p).map_err(e)?;
            worst_dense = worst_dense.max((dv - value).abs());
            for _ in 0..3 {
                let x = random_density(&mut rng, d);
                worst_dense = worst_dense.max(max_abs_diff(&dense.apply(&x), &pair.channel.apply(&x)));
            }
        }
    }
    Ok((
        worst_formula <= 1e-9 && worst_dense <= 1e-9,
        format!("max |D - 8(n+2)/(8+4n+n^2)| = {worst_formula:.2e}, dense vs effective {worst_dense:.2e}"),
    ))
}

fn criterion_2() -> Outcome {
    let mut worst = 0.0f64;
    for n in 1..=16 {
        let pair = CovariantPair::new(r_theta_coeffs(n, PI), PI, 2).map_err(e)?;
        worst = worst.max((diamond_covariant(&pair).map_err(e)?.0 - theta_pi_distance(n)).abs());
    }
    let mut pts = Vec::new();
    for n in [8usize, 12, 16, 24, 32, 48, 64, 96, 128, 192, 256] {
        let a = diamond_covariant(&CovariantPair::new(r_theta_coeffs(n, PI), PI, 2).map_err(e)?)
            .map_err(e)?
            .0;
        let b = diamond_covariant(&CovariantPair::new(optimal_reflection_coeffs(n, 1), PI, 2).map_err(e)?)
            .map_err(e)?
            .0;
        pts.push(((n as f64).ln(), (a - b).ln()));
    }
    let exponent = -slope(&pts);
    Ok((
        worst <= 1e-9 && (exponent - 3.0).abs() <= 0.2,
        format!("max |D - 8n/(n+1)^2| = {worst:.2e}, gap exponent {exponent:.3}"),
    ))
}

fn criterion_3() -> Outcome {
    let mut worst = 0.0f64;
    let mut over = 0usize;
    for n in 1..=50 {
        for k in 1..=50 {
            let alpha = PI * k as f64 / 50.0;
            let pair = CovariantPair::new(r_theta_coeffs(n, alpha), alpha, 2).map_err(e)?;
            let numeric = diamond_covariant(&pair).map_err(e)?.0;
            let closed = equal_angle_distance(n, alpha).map_err(e)?;
            worst = worst.max((numeric - closed).abs());
            if closed > linear_bound(n, alpha) + 1e-12 {
                over += 1;
            }
        }
    }
    Ok((
        worst <= 1e-8 && over == 0,
        format!("max deviation {worst:.2e} on 50x50 grid, {over} points above 3a/n"),
    ))
}

fn criterion_4() -> Outcome {
    let mut rng = rng_from_seed(4);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let n = rng.random_range(1..=8usize);
        let d = rng.random_range(2..=3usize);
        let thetas: Vec<f64> = (0..n).map(|_| rng.random_range(-PI..PI)).collect();
        let psi = haar_state_with(&mut rng, d);
        let x = DenseOperator::single(random_density(&mut rng, d)).map_err(e)?;
        let seq = lmr_sequential_dense(&thetas, &psi, &x).map_err(e)?;
        let eff = effective_channel(&lmr_coeffs(&thetas).map_err(e)?, &psi).map_err(e)?;
        worst = worst.max(max_abs_diff(seq.entries(), &eff.apply(x.entries())));
    }
    let mut closed_worst = 0.0f64;
    for alpha in [PI / 2.0, PI] {
        for n in 2..=32usize {
            let pair = CovariantPair::new(lmr_coeffs(&vec![alpha / n as f64; n]).map_err(e)?, alpha, 2).map_err(e)?;
            let v = diamond_covariant(&pair).map_err(e)?.0;
            let want = 2.0 * (1.0 - (alpha / n as f64).cos().powi(2 * n as i32));
            closed_worst = closed_worst.max((v - want).abs());
        }
    }
    let mut all_positive = true;
    for n in 3..=128 {
        all_positive &= lmr_improvement(n, PI).map_err(e)? > 0.0;
    }
    let ratio = lmr_improvement(64, PI).map_err(e)? / lmr_improvement_asymptote(64, PI);
    let within = (ratio - 1.0).abs() <= 0.2;
    Ok((
        worst <= 1e-10 && closed_worst <= 1e-9 && all_positive && within,
        format!(
            "sequential vs coefficients {worst:.2e}, 2(1-cos^2n) deviation {closed_worst:.2e}, \
             gap positive n=3..128: {all_positive}, gap/(2*sqrt3*a^3/n^2) at n=64 = {ratio:.4} (needs 0.8..1.2)"
        ),
    ))
}

fn criterion_5() -> Outcome {
    let grid = 257;
    let l = landscape(4, grid, grid).map_err(e)?;
    let best = l
        .points
        .iter()
        .fold(l.points[0], |a, &b| if b.value < a.value { b } else { a });
    let spacing = 2.0 * PI / grid as f64;
    let steepest = l
        .points
        .windows(2)
        .filter(|w| w[0].r == w[1].r)
        .map(|w| (w[1].value - w[0].value).abs())
        .fold(0.0, f64::max);
    let u_star = optimal_angle(4);
    let u_dist = (best.u - u_star).abs().min((best.u - (2.0 * PI - u_star)).abs());
    let landscape_ok = best.r == 1.0 && best.value >= 1.2 - 1e-9 && best.value - 1.2 <= steepest && u_dist <= spacing;
    let mut theta_worst = 0.0f64;
    for n in [1, 4, 16] {
        theta_worst = theta_worst.max((theta_star(n, PI, 1e-12).map_err(e)? - optimal_f(n).acos()).abs());
    }
    let alphas: Vec<f64> = (1..=300).map(|k| PI * k as f64 / 300.0).collect();
    let curve = theta_star_curve(4, &alphas, 1e-12).map_err(e)?;
    let crossing = curve
        .windows(2)
        .find(|w| (w[0].1 - w[0].0).signum() != (w[1].1 - w[1].0).signum());
    let (crossing_ok, crossing_text) = match crossing {
        Some(w) => (w[0].0 > 1.0 && w[1].0 < 1.2, format!("[{:.4}, {:.4}]", w[0].0, w[1].0)),
        None => (false, "none".into()),
    };
    Ok((
        landscape_ok && theta_worst <= 1e-6 && crossing_ok,
        format!(
            "grid min {:.6} at (r={}, u={:.4}), u*={u_star:.4}, grid step {spacing:.4}; \
             max |theta*(pi) - arccos f(n)| = {theta_worst:.2e}; theta*(a)=a crossing in {crossing_text}",
            best.value, best.r, best.u
        ),
    ))
}

fn criterion_6() -> Outcome {
    let mut mismatches = Vec::new();
    for l in 1..=10u32 {
        let n = (1usize << l) - 1;
        let stated = 2 * n * l as usize;
        let got = cswap_count(n).map_err(e)?;
        if got != stated {
            mismatches.push(format!("n={n}: {got} vs {stated}"));
        }
    }
    let mut worst = 0.0f64;
    let mut ancilla = 1.0f64;
    for n in [1, 3, 7] {
        let r = verify_circuit(n, &[PI, 0.7, -1.9, 2.4], 3, 6).map_err(e)?;
        worst = worst.max(r.max_diff);
        ancilla = ancilla.min(r.min_ancilla_overlap);
    }
    let dense_ok = worst <= 1e-10 && (1.0 - ancilla).abs() <= 1e-10;
    Ok((
        mismatches.is_empty() && dense_ok,
        format!(
            "dense equivalence {worst:.2e}, ancilla overlap {ancilla:.12}; cswap count vs 2nL mismatches: {}",
            if mismatches.is_empty() {
                "none".to_string()
            } else {
                mismatches.join(", ")
            }
        ),
    ))
}

fn criterion_7() -> Outcome {
    let mut worst = 0.0f64;
    for n in 1..=10 {
        worst = worst.max((mr_distance(n, 2).map_err(e)?.0 - mr_distance_qubit(n)).abs());
    }
    let mut below = 0;
    for n in 1..=10 {
        if mr_distance(n, 3).map_err(e)?.0 < mr_lower_bound(n, 3) - 1e-12 {
            below += 1;
        }
    }
    let mut rel = Vec::new();
    for d in [2, 3] {
        let v = 512.0 * mr_distance(512, d).map_err(e)?.0;
        rel.push((v - mr_asymptote(d)).abs() / mr_asymptote(d));
    }
    let rel_max = rel.iter().copied().fold(0.0, f64::max);
    Ok((
        worst <= 1e-9 && below == 0 && rel_max <= 0.02,
        format!("d=2 deviation {worst:.2e}, d=3 points below bound {below}, n*D at n=512 relative error {rel:.4?}"),
    ))
}

fn criterion_8() -> Outcome {
    let mut worst = 0.0f64;
    let mut simplex = true;
    for n in 1..=40 {
        let s = solve_q_d2(n).map_err(e)?;
        worst = worst.max(s.residual);
        simplex &= s.q.iter().all(|&q| (0.0..=1.0).contains(&q));
    }
    let mut entropy_worst = 0.0f64;
    for n in 1..=3 {
        let spec = solve_q_d2(n).map_err(e)?.probe_spec().map_err(e)?;
        let s = ensemble_spectrum(n, 2, &build_probe_d2(n, &spec).map_err(e)?).map_err(e)?;
        entropy_worst = entropy_worst.max((s.entropy - entropy_target(n, 2)).abs());
    }
    Ok((
        worst < 1e-8 && simplex && entropy_worst <= 1e-6,
        format!("max residual {worst:.2e}, q in [0,1]: {simplex}, entropy deviation {entropy_worst:.2e}"),
    ))
}

fn criterion_9() -> Outcome {
    let m = maximize_entropy_over_q(2, 3, 20, 0).map_err(e)?;
    let rank_ok = m.rank <= support_dimension(2, 3);
    let reached = m.gap <= 1e-3 * m.target;
    let detail = format!(
        "rank {} <= {}: {rank_ok}; entropy {:.6} vs target {:.6}{}",
        m.rank,
        support_dimension(2, 3),
        m.entropy,
        m.target,
        if reached {
            String::new()
        } else {
            format!(" (flagged below target, gap {:.4})", m.gap)
        }
    );
    Ok((rank_ok && (reached || m.below_target), detail))
}

fn criterion_10() -> Outcome {
    let a = verify_budget(2, 0.2, 20, 2000, 10).map_err(e)?;
    let b = verify_budget(3, 0.5, 10, 2000, 11).map_err(e)?;
    let worst = |r: &reflectron::universal::VerifyReport| r.targets.iter().map(|t| t.measured).fold(0.0, f64::max);
    let ks: Vec<u32> = (4..=40).collect();
    let mut constants = Vec::new();
    for d in [2, 3, 4] {
        constants.push(fitted_constant(d, &ks).map_err(e)?);
    }
    let mut per_term = true;
    for d in [2, 3, 4] {
        for k in [3, 10, 20] {
            let eps = 0.5f64.powi(k);
            let p = worst_case_budget(d, eps).map_err(e)?;
            per_term &= p
                .rotations
                .iter()
                .all(|r| r.linear_bound <= eps / (3.0 * (d - 1) as f64) + 1e-12);
        }
    }
    let constants_ok = constants.iter().all(|c| (0.8..=1.5).contains(c));
    Ok((
        a.pass && b.pass && constants_ok && per_term,
        format!(
            "d=2 worst {:.4} <= 0.2: {}, d=3 worst {:.4} <= 0.5: {}, fitted constants {constants:.3?}",
            worst(&a),
            a.pass,
            worst(&b),
            b.pass
        ),
    ))
}

fn criterion_11() -> Outcome {
    let mut worst = 0.0f64;
    for n in 1..=64 {
        worst = worst.max((equal_angle_distance(n, PI).map_err(e)? - theta_pi_distance(n)).abs());
        let v = closed_form_rotation_distance(&optimal_reflection_coeffs(n, 1), PI).map_err(e)?;
        worst = worst.max((v - optimal_reflection_distance(n)).abs());
    }
    let mut sandwich = true;
    for k in 0..=400 {
        let x = std::f64::consts::E * (1e12 / std::f64::consts::E).powf(k as f64 / 400.0);
        let w = lambert_w0(x).map_err(e)?;
        let (l1, l2) = (x.ln(), x.ln().ln());
        sandwich &= l1 - l2 <= w + 1e-12 && w <= l1 - 0.5 * l2 + 1e-12;
    }
    Ok((
        worst <= 1e-9 && sandwich,
        format!("formula deviation {worst:.2e}, Lambert sandwich on [e, 1e12]: {sandwich}"),
    ))
}

fn main() {
    let criteria: [(fn() -> Outcome, Duration); 11] = [
        (criterion_1, Duration::from_secs(10)),
        (criterion_2, Duration::from_secs(5)),
        (criterion_3, Duration::from_secs(60)),
        (criterion_4, Duration::from_secs(60)),
        (criterion_5, Duration::from_secs(120)),
        (criterion_6, Duration::from_secs(60)),
        (criterion_7, Duration::from_secs(30)),
        (criterion_8, Duration::from_secs(120)),
        (criterion_9, Duration::from_secs(600)),
        (criterion_10, Duration::from_secs(300)),
        (criterion_11, Duration::from_secs(10)),
    ];
    let mut failed = 0;
    for (i, (f, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let in_time = elapsed <= *limit;
        let (pass, detail) = match outcome {
            Ok((p, d)) => (p && in_time, d),
            Err(msg) => (false, format!("error: {msg}")),
        };
        let flagged = i == 8 && detail.contains("flagged");
        let label = match (pass, flagged) {
            (true, true) => "PASS (flagged)",
            (true, false) => "PASS",
            _ => "FAIL",
        };
        println!(
            "criterion {:>2}: {label} [{:.2}s, limit {}s] {detail}",
            i + 1,
            elapsed.as_secs_f64(),
            limit.as_secs()
        );
        if !pass {
            failed += 1;
        }
    }
    println!("acceptance: {} of 11 criteria passed", 11 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
