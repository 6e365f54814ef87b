//! Subcommand implementations.

use crate::output::{object, table, Output};
use crate::{Algo, CircuitCommand, Command, LowerboundCommand, UniversalCommand};
use rand::Rng;
use reflectron::channels::{effective_channel, random_density, Channel, DenseReflectionChannel, LmrSequentialChannel};
use reflectron::cyclic_algebra::{lmr_coeffs, optimal_angle, optimal_reflection_coeffs, r_theta_coeffs};
use reflectron::distances::{
    branch_of, dense_distance_at_p, diamond_covariant, mr_asymptote, mr_distance, mr_distance_qubit, mr_lower_bound,
    optimal_reflection_distance, reduce_angle, theta_pi_distance, CovariantPair,
};
use reflectron::repthy::{
    build_probe_d2, ensemble_spectrum, final_bound, lambert_w0, lower_bound_fd, maximize_entropy_over_q, n_of_eps,
    solve_q_d2,
};
use reflectron::tensor_core::{haar_state_with, max_abs_diff, rng_from_seed, PureState};
use reflectron::{circuits, optima, universal};
use serde_json::{json, Value};
use std::f64::consts::PI;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Consistency(String),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Validation(_) => "validation",
            CliError::Consistency(_) => "consistency",
        }
    }

    pub fn code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Consistency(_) => 2,
        }
    }
}

impl From<reflectron::Error> for CliError {
    fn from(e: reflectron::Error) -> Self {
        if e.is_consistency() {
            CliError::Consistency(e.to_string())
        } else {
            CliError::Validation(e.to_string())
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Output plus an optional assertion failure that maps to exit code 2.
pub type Outcome = (Output, Option<String>);

fn require(cond: bool, msg: &str) -> CliResult<()> {
    if cond {
        Ok(())
    } else {
        Err(CliError::Validation(msg.into()))
    }
}

pub fn run(cmd: &Command) -> CliResult<Outcome> {
    match cmd {
        Command::Distance {
            n,
            d,
            alpha,
            algo,
            theta,
            dense,
        } => distance(*n, *d, *alpha, *algo, *theta, *dense).map(|o| (o, None)),
        Command::Landscape {
            n,
            grid,
            grid_r,
            grid_u,
            boundary,
        } => landscape(*n, grid_r.unwrap_or(*grid), grid_u.unwrap_or(*grid), *boundary).map(|o| (o, None)),
        Command::ThetaStar { n, alpha, points, tol } => {
            theta_star(*n, alpha.as_ref().map(|a| a.0.as_slice()), *points, *tol).map(|o| (o, None))
        }
        Command::Lmr {
            n,
            alpha,
            d,
            instances,
            seed,
        } => lmr(*n, *alpha, *d, *instances, *seed),
        Command::Mr { n, d } => mr(*n, *d).map(|o| (o, None)),
        Command::Lowerbound { command } => lowerbound(command).map(|o| (o, None)),
        Command::Universal { command } => universal_cmd(command),
        Command::Circuit { command } => circuit(command),
        Command::Selftest => selftest(),
    }
}

fn distance(n: usize, d: usize, alpha: f64, algo: Algo, theta: Option<f64>, dense: bool) -> CliResult<Output> {
    require(n >= 1, "n must be at least 1")?;
    require(d >= 2, "d must be at least 2")?;
    let a = reduce_angle(alpha);
    let is_reflection = (a - PI).abs() < 1e-15;
    if algo == Algo::Mr {
        require(is_reflection, "measure-and-reflect targets alpha = pi")?;
        let (value, p) = mr_distance(n, d)?;
        return Ok(object(json!({
            "algo": "mr", "n": n, "d": d, "alpha": a, "theta": Value::Null,
            "value": value, "argmax_p": p, "branch": Value::Null, "dense_value": Value::Null,
        })));
    }
    let (element, th) = match algo {
        Algo::Optimal if is_reflection => (optimal_reflection_coeffs(n, 1), optimal_angle(n)),
        Algo::Optimal => {
            let t = optima::theta_star(n, a, 1e-12)?;
            (r_theta_coeffs(n, t), t)
        }
        Algo::ThetaPi => (r_theta_coeffs(n, PI), PI),
        Algo::EqualAngle => (r_theta_coeffs(n, a), a),
        Algo::RTheta => {
            let t = theta.ok_or_else(|| CliError::Validation("--algo r-theta needs --theta".into()))?;
            (r_theta_coeffs(n, t), t)
        }
        Algo::Lmr => (lmr_coeffs(&vec![a / n as f64; n])?, a / n as f64),
        Algo::LmrImproved => {
            let t = optima::lmr_improved_angle(n, a)?;
            (lmr_coeffs(&vec![t; n])?, t)
        }
        Algo::Mr => unreachable!("handled above"),
    };
    let pair = CovariantPair::new(element.clone(), a, d)?;
    let (value, p) = diamond_covariant(&pair)?;
    let branch = branch_of(pair.gap(), pair.deviation());
    let dense_value = if dense {
        let ch = DenseReflectionChannel::new(&element, pair.psi())?;
        let dv = dense_distance_at_p(a, pair.psi(), &ch, p)?;
        if (dv - value).abs() > 1e-9 {
            return Err(CliError::Consistency(format!("dense path {dv} vs closed form {value}")));
        }
        json!(dv)
    } else {
        Value::Null
    };
    let name = match algo {
        Algo::Optimal => "optimal",
        Algo::ThetaPi => "theta-pi",
        Algo::EqualAngle => "equal-angle",
        Algo::RTheta => "r-theta",
        Algo::Lmr => "lmr",
        Algo::LmrImproved => "lmr-improved",
        Algo::Mr => "mr",
    };
    Ok(object(json!({
        "algo": name, "n": n, "d": d, "alpha": a, "theta": th, "value": value,
        "argmax_p": p, "branch": branch.as_str(), "dense_value": dense_value,
    })))
}

fn landscape(n: usize, grid_r: usize, grid_u: usize, boundary: bool) -> CliResult<Output> {
    let l = optima::landscape(n, grid_r, grid_u)?;
    if boundary {
        Ok(table(
            &["r", "u"],
            l.boundary.iter().map(|&(r, u)| vec![r, u]).collect(),
        ))
    } else {
        Ok(table(
            &["r", "u", "value"],
            l.points.iter().map(|p| vec![p.r, p.u, p.value]).collect(),
        ))
    }
}

fn theta_star(n: usize, alphas: Option<&[f64]>, points: usize, tol: f64) -> CliResult<Output> {
    let grid: Vec<f64> = match alphas {
        Some(a) => a.iter().map(|&x| reduce_angle(x)).collect(),
        None => {
            require(points >= 1, "points must be positive")?;
            (1..=points).map(|k| PI * k as f64 / points as f64).collect()
        }
    };
    let rows = optima::theta_star_curve(n, &grid, tol)?;
    Ok(table(
        &["alpha", "theta_star", "distance"],
        rows.into_iter().map(|(a, t, v)| vec![a, t, v]).collect(),
    ))
}

/// Largest deviation between the sequential protocol and its coefficient channel.
pub fn lmr_dense_check(n: usize, d: usize, instances: usize, seed: u64) -> CliResult<f64> {
    let mut rng = rng_from_seed(seed);
    let mut worst = 0.0f64;
    for _ in 0..instances {
        let thetas: Vec<f64> = (0..n).map(|_| rng.random_range(-PI..PI)).collect();
        let psi = haar_state_with(&mut rng, d);
        let x = random_density(&mut rng, d);
        let seq = LmrSequentialChannel::new(thetas.clone(), psi.clone());
        let eff = effective_channel(&lmr_coeffs(&thetas)?, &psi)?;
        worst = worst.max(max_abs_diff(&seq.apply(&x), &eff.apply(&x)));
    }
    Ok(worst)
}

fn lmr(n: usize, alpha: f64, d: usize, instances: usize, seed: u64) -> CliResult<Outcome> {
    require(n >= 1, "n must be at least 1")?;
    let a = reduce_angle(alpha);
    let equal = optima::lmr_distance(n, a / n as f64, a)?;
    let closed = 2.0 * (1.0 - (a / n as f64).cos().powi(2 * n as i32));
    let (improved_angle, improved_distance, improvement) = if n > 2 {
        let t = optima::lmr_improved_angle(n, a)?;
        (
            json!(t),
            json!(optima::lmr_distance(n, t, a)?),
            json!(optima::lmr_improvement(n, a)?),
        )
    } else {
        (Value::Null, Value::Null, Value::Null)
    };
    let asymptote = optima::lmr_improvement_asymptote(n, a);
    let (dense, failure) = if instances > 0 {
        let worst = lmr_dense_check(n, d, instances, seed)?;
        let failure = (worst > 1e-10).then(|| format!("sequential and coefficient channels differ by {worst}"));
        (json!(worst), failure)
    } else {
        (Value::Null, None)
    };
    let ratio = improvement.as_f64().map(|x| x / asymptote);
    Ok((
        object(json!({
            "n": n, "d": d, "alpha": a, "equal_angle_distance": equal, "closed_form": closed,
            "improved_angle": improved_angle, "improved_distance": improved_distance,
            "improvement": improvement, "asymptote": asymptote, "improvement_ratio": ratio,
            "dense_max_diff": dense,
        })),
        failure,
    ))
}

fn mr(n: usize, d: usize) -> CliResult<Output> {
    require(d >= 2, "d must be at least 2")?;
    let (value, p) = mr_distance(n, d)?;
    let qubit = if d == 2 {
        json!(mr_distance_qubit(n))
    } else {
        Value::Null
    };
    Ok(object(json!({
        "n": n, "d": d, "value": value, "argmax_p": p, "lower_bound": mr_lower_bound(n, d),
        "qubit_formula": qubit, "n_times_value": n as f64 * value, "asymptote": mr_asymptote(d),
    })))
}

fn lowerbound(cmd: &LowerboundCommand) -> CliResult<Output> {
    match cmd {
        LowerboundCommand::SolveQ { n } => {
            require(*n >= 1, "n must be at least 1")?;
            let s = solve_q_d2(*n)?;
            Ok(object(json!({
                "n": s.n, "two_j": s.two_j, "q": s.q, "residual": s.residual, "within_simplex": s.within_simplex,
            })))
        }
        LowerboundCommand::Twirl { n, d, restarts, seed } => {
            require(*d >= 2, "d must be at least 2")?;
            if *d == 2 {
                let s = solve_q_d2(*n)?;
                let spec = s.probe_spec()?;
                let spectrum = ensemble_spectrum(*n, 2, &build_probe_d2(*n, &spec)?)?;
                let target = reflectron::repthy::entropy::entropy_target(*n, 2);
                Ok(object(json!({
                    "n": n, "d": d, "entropy": spectrum.entropy, "target": target,
                    "gap": target - spectrum.entropy, "rank": spectrum.rank,
                    "support_dimension": reflectron::repthy::entropy::support_dimension(*n, 2),
                    "q": s.q, "method": "solved", "below_target": false,
                })))
            } else {
                let m = maximize_entropy_over_q(*n, *d, *restarts, *seed)?;
                let q: Vec<Value> = m
                    .spec
                    .weights
                    .iter()
                    .map(|(l, q)| json!({ "partition": l, "q": q }))
                    .collect();
                Ok(object(json!({
                    "n": n, "d": d, "entropy": m.entropy, "target": m.target, "gap": m.gap, "rank": m.rank,
                    "support_dimension": m.support_dimension, "q": q, "method": "maximized",
                    "below_target": m.below_target, "restarts": m.restarts, "block_basis": m.block_basis,
                })))
            }
        }
        LowerboundCommand::Fd { eps, d, n } => {
            require(*eps > 0.0, "eps must be positive")?;
            require(*d >= 2, "d must be at least 2")?;
            let n_star = n_of_eps(*eps, *d)?;
            let at = n.unwrap_or(n_star);
            let fb = final_bound(*eps, *d)?;
            Ok(object(json!({
                "d": d, "epsilon": eps, "n_star": n_star, "n": at, "f_d": lower_bound_fd(*eps, at, *d),
                "final_bound": fb, "universal_bound_bits": universal::lower_bound_via_universal(*d, *eps, 1.0),
            })))
        }
    }
}

fn universal_cmd(cmd: &UniversalCommand) -> CliResult<Outcome> {
    match cmd {
        UniversalCommand::Budget {
            d,
            eps,
            alphas,
            constant,
        } => {
            require(*d >= 2, "d must be at least 2")?;
            let program = match alphas {
                Some(crate::angle::AngleList(a)) => {
                    require(a.len() + 1 == *d, "need exactly d - 1 angles")?;
                    let rot: Vec<(PureState, f64)> = a
                        .iter()
                        .enumerate()
                        .map(|(j, &x)| (PureState::basis(*d, j + 1), x))
                        .collect();
                    universal::budget(*d, *eps, &rot)?
                }
                None => universal::worst_case_budget(*d, *eps)?,
            };
            let rotations: Vec<Value> = program
                .rotations
                .iter()
                .map(|r| {
                    let bits: String = r.a.bits.iter().map(|b| char::from(b'0' + b)).collect();
                    json!({
                        "alpha": r.alpha, "theta": r.theta, "negative": r.a.negative, "bits": bits,
                        "n": r.n, "linear_bound": r.linear_bound,
                    })
                })
                .collect();
            let ks: Vec<u32> = (4..=40).collect();
            let cmp = universal::compare_lower_bounds(*d, *eps, *constant)?;
            Ok((
                object(json!({
                    "d": d, "epsilon": eps, "k_bits": program.k_bits, "delta": program.delta,
                    "rotations": rotations, "angle_qubits": program.angle_qubits,
                    "count_qubits": program.count_qubits, "symmetric_qubits": program.symmetric_qubits,
                    "total_qubits": program.total_qubits,
                    "fitted_constant": universal::fitted_constant(*d, &ks)?,
                    "lower_bound_universal_bits": cmp.universal_bits,
                    "lower_bound_repthy_bits": cmp.repthy_bits,
                    "lower_bound_ratio": cmp.ratio,
                })),
                None,
            ))
        }
        UniversalCommand::Verify {
            d,
            eps,
            trials,
            targets,
            seed,
        } => {
            require(*d >= 2, "d must be at least 2")?;
            require(*trials >= 1 && *targets >= 1, "trials and targets must be positive")?;
            let r = universal::verify_budget(*d, *eps, *targets, *trials, *seed)?;
            let worst = r.targets.iter().map(|t| t.measured).fold(0.0, f64::max);
            let failure = (!r.pass).then(|| format!("sampled distance {worst} exceeds epsilon {eps}"));
            let v = serde_json::to_value(&r).map_err(|e| CliError::Validation(e.to_string()))?;
            let mut out = v.as_object().cloned().unwrap_or_default();
            out.insert("max_measured".into(), json!(worst));
            out.insert("min_slack".into(), json!(eps - worst));
            Ok((object(Value::Object(out)), failure))
        }
    }
}

fn circuit(cmd: &CircuitCommand) -> CliResult<Outcome> {
    match cmd {
        CircuitCommand::Emit { n, theta } => {
            let g = circuits::build_rotation_circuit(*n, *theta)?;
            Ok((Output::Text(circuits::export_circuit(&g)), None))
        }
        CircuitCommand::Verify {
            n,
            thetas,
            inputs,
            seed,
        } => {
            let r = circuits::verify_circuit(*n, &thetas.0, *inputs, *seed)?;
            let failure = (!r.pass).then(|| format!("circuit deviates by {}", r.max_diff));
            let v = serde_json::to_value(&r).map_err(|e| CliError::Validation(e.to_string()))?;
            Ok((object(v), failure))
        }
    }
}

struct Check {
    name: &'static str,
    pass: bool,
    detail: String,
}

fn check(name: &'static str, f: impl FnOnce() -> CliResult<(bool, String)>) -> Check {
    match f() {
        Ok((pass, detail)) => Check { name, pass, detail },
        Err(e) => Check {
            name,
            pass: false,
            detail: e.to_string(),
        },
    }
}

fn selftest() -> CliResult<Outcome> {
    let checks = vec![
        check("optimal_reflection", || {
            let mut worst = 0.0f64;
            for d in [2, 3] {
                for n in 1..=6 {
                    let pair = CovariantPair::new(optimal_reflection_coeffs(n, 1), PI, d)?;
                    worst = worst.max((diamond_covariant(&pair)?.0 - optimal_reflection_distance(n)).abs());
                }
            }
            Ok((worst < 1e-9, format!("max deviation {worst:e}")))
        }),
        check("theta_pi", || {
            let mut worst = 0.0f64;
            for n in 1..=16 {
                let pair = CovariantPair::new(r_theta_coeffs(n, PI), PI, 2)?;
                worst = worst.max((diamond_covariant(&pair)?.0 - theta_pi_distance(n)).abs());
            }
            Ok((worst < 1e-9, format!("max deviation {worst:e}")))
        }),
        check("lmr_dense", || {
            let worst = lmr_dense_check(4, 3, 20, 0)?;
            Ok((worst < 1e-10, format!("max deviation {worst:e}")))
        }),
        check("measure_and_reflect", || {
            let mut worst = 0.0f64;
            for n in 1..=6 {
                worst = worst.max((mr_distance(n, 2)?.0 - mr_distance_qubit(n)).abs());
            }
            Ok((worst < 1e-9, format!("max deviation {worst:e}")))
        }),
        check("solve_q", || {
            let mut worst = 0.0f64;
            let mut simplex = true;
            for n in 1..=20 {
                let s = solve_q_d2(n)?;
                worst = worst.max(s.residual);
                simplex &= s.within_simplex;
            }
            Ok((worst < 1e-8 && simplex, format!("max residual {worst:e}")))
        }),
        check("qubit_entropy", || {
            let mut worst = 0.0f64;
            for n in 1..=2 {
                let spec = solve_q_d2(n)?.probe_spec()?;
                let s = ensemble_spectrum(n, 2, &build_probe_d2(n, &spec)?)?;
                worst = worst.max((s.entropy - reflectron::repthy::entropy::entropy_target(n, 2)).abs());
            }
            Ok((worst < 1e-6, format!("max deviation {worst:e}")))
        }),
        check("circuit", || {
            let mut ok = true;
            for n in [1, 3] {
                ok &= circuits::verify_circuit(n, &[PI, 0.7], 2, 0)?.pass;
            }
            Ok((ok, "n = 1, 3".into()))
        }),
        check("universal", || {
            let r = universal::verify_budget(2, 0.2, 4, 400, 0)?;
            Ok((r.pass, format!("{} targets", r.targets.len())))
        }),
        check("lambert", || {
            let x = 1e6f64;
            let w = lambert_w0(x)?;
            Ok(((w * w.exp() - x).abs() < 1e-6, format!("W(1e6) = {w}")))
        }),
    ];
    let pass = checks.iter().all(|c| c.pass);
    let rows: Vec<Value> = checks
        .iter()
        .map(|c| json!({ "name": c.name, "pass": c.pass, "detail": c.detail }))
        .collect();
    let failure = (!pass).then(|| "selftest failed".to_string());
    Ok((object(json!({ "checks": rows, "pass": pass })), failure))
}
