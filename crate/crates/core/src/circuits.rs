//! Qubit circuits for the approximate rotation `I + ((e^{iθ}−1)/(n+1)) Σ_ℓ C^ℓ`:
//! controlled cyclic shifts as controlled-SWAPs plus an ancilla phase.

use crate::budget;
use crate::error::{Error, Result};
use crate::tensor_core::{CMatrix, DenseOperator, C64, ZERO};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt::Write as _;

/// Largest register handled by the simulator.
pub const MAX_QUBITS: usize = 20;

/// Gate on qubits indexed from 0; qubit 0 is the most significant bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Gate {
    Cswap {
        control: usize,
        a: usize,
        b: usize,
    },
    Swap {
        a: usize,
        b: usize,
    },
    H {
        q: usize,
    },
    /// `diag(1, e^{iθ})`.
    Phase {
        q: usize,
        theta: f64,
    },
    /// Phase `e^{iθ}` on the all-zero state of `qubits`.
    Mcphase {
        theta: f64,
        qubits: Vec<usize>,
    },
}

impl Gate {
    pub fn kind(&self) -> &'static str {
        match self {
            Gate::Cswap { .. } => "cswap",
            Gate::Swap { .. } => "swap",
            Gate::H { .. } => "h",
            Gate::Phase { .. } => "phase",
            Gate::Mcphase { .. } => "mcphase",
        }
    }

    fn qubits(&self) -> Vec<usize> {
        match self {
            Gate::Cswap { control, a, b } => vec![*control, *a, *b],
            Gate::Swap { a, b } => vec![*a, *b],
            Gate::H { q } | Gate::Phase { q, .. } => vec![*q],
            Gate::Mcphase { qubits, .. } => qubits.clone(),
        }
    }
}

/// Registers `ancilla` (qubits `0..L`), one system qubit, then `program` qubits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateList {
    pub ancilla: usize,
    pub program: usize,
    pub gates: Vec<Gate>,
}

impl GateList {
    pub fn new(ancilla: usize, program: usize) -> Self {
        Self {
            ancilla,
            program,
            gates: Vec::new(),
        }
    }

    pub fn total_qubits(&self) -> usize {
        self.ancilla + 1 + self.program
    }

    pub fn system_qubit(&self) -> usize {
        self.ancilla
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        let total = self.total_qubits();
        let qs = gate.qubits();
        if let Some(&bad) = qs.iter().find(|&&q| q >= total) {
            return Err(Error::InvalidFactor {
                index: bad,
                factors: total,
            });
        }
        let mut sorted = qs.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != qs.len() || qs.is_empty() {
            return Err(Error::InvalidArgument(format!("gate {gate:?} repeats a qubit")));
        }
        self.gates.push(gate);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }
}

/// Slot `a ∈ 0..=n` of the system/program block as a qubit index.
fn slot_qubit(ancilla: usize, slot: usize) -> usize {
    ancilla + slot
}

/// Transpositions realizing the content shift `a ↦ a + k mod m`, one cycle at a time.
pub fn shift_swaps(m: usize, k: usize) -> Vec<(usize, usize)> {
    let mut seen = vec![false; m];
    let mut out = Vec::new();
    for start in 0..m {
        if seen[start] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut a = start;
        while !seen[a] {
            seen[a] = true;
            cycle.push(a);
            a = (a + k) % m;
        }
        for w in (0..cycle.len().saturating_sub(1)).rev() {
            out.push((cycle[w], cycle[w + 1]));
        }
    }
    out
}

/// `L = log₂(n+1)` when `n+1` is a power of two.
pub fn ancilla_qubits(n: usize) -> Result<usize> {
    let m = n + 1;
    if n == 0 || !m.is_power_of_two() {
        return Err(Error::InvalidArgument(format!(
            "n + 1 = {m} is not a power of two >= 2"
        )));
    }
    Ok(m.trailing_zeros() as usize)
}

/// Full rotation circuit: ancilla preparation, controlled shifts `C^{2^j}`
/// (ancilla qubit `L−1−j` carries bit `j`), `H^{⊗L}·MCPHASE(θ)·H^{⊗L}`,
/// inverse shifts, ancilla uncompute.
pub fn build_rotation_circuit(n: usize, theta: f64) -> Result<GateList> {
    let l = ancilla_qubits(n)?;
    let m = n + 1;
    let mut g = GateList::new(l, n);
    let hadamards = |g: &mut GateList| -> Result<()> { (0..l).try_for_each(|q| g.push(Gate::H { q })) };
    let control_of = |j: usize| l - 1 - j;
    hadamards(&mut g)?;
    let mut forward = Vec::new();
    for j in 0..l {
        for (a, b) in shift_swaps(m, 1 << j) {
            forward.push(Gate::Cswap {
                control: control_of(j),
                a: slot_qubit(l, a),
                b: slot_qubit(l, b),
            });
        }
    }
    for gate in &forward {
        g.push(gate.clone())?;
    }
    hadamards(&mut g)?;
    g.push(Gate::Mcphase {
        theta,
        qubits: (0..l).collect(),
    })?;
    hadamards(&mut g)?;
    for gate in forward.iter().rev() {
        g.push(gate.clone())?;
    }
    hadamards(&mut g)?;
    Ok(g)
}

/// Controlled-SWAP count of `build_rotation_circuit(n, ·)` without building it.
pub fn cswap_count(n: usize) -> Result<usize> {
    let l = ancilla_qubits(n)?;
    Ok(2 * (0..l).map(|j| shift_swaps(n + 1, 1 << j).len()).sum::<usize>())
}

/// Applies every gate to a state vector over `qubits` qubits.
pub fn apply_gates(gates: &[Gate], state: &mut [C64], qubits: usize) {
    let bit = |q: usize| 1usize << (qubits - 1 - q);
    let dim = state.len();
    for gate in gates {
        match gate {
            Gate::Swap { a, b } | Gate::Cswap { a, b, .. } => {
                let (ma, mb) = (bit(*a), bit(*b));
                let mc = if let Gate::Cswap { control, .. } = gate {
                    bit(*control)
                } else {
                    0
                };
                for idx in 0..dim {
                    if idx & mc == mc && idx & ma != 0 && idx & mb == 0 {
                        state.swap(idx, idx ^ ma ^ mb);
                    }
                }
            }
            Gate::H { q } => {
                let mq = bit(*q);
                for idx in 0..dim {
                    if idx & mq == 0 {
                        let (x, y) = (state[idx], state[idx | mq]);
                        state[idx] = (x + y) * FRAC_1_SQRT_2;
                        state[idx | mq] = (x - y) * FRAC_1_SQRT_2;
                    }
                }
            }
            Gate::Phase { q, theta } => {
                let (mq, ph) = (bit(*q), C64::from_polar(1.0, *theta));
                for (idx, amp) in state.iter_mut().enumerate() {
                    if idx & mq != 0 {
                        *amp *= ph;
                    }
                }
            }
            Gate::Mcphase { theta, qubits: qs } => {
                let mask = qs.iter().fold(0, |acc, &q| acc | bit(q));
                let ph = C64::from_polar(1.0, *theta);
                for (idx, amp) in state.iter_mut().enumerate() {
                    if idx & mask == 0 {
                        *amp *= ph;
                    }
                }
            }
        }
    }
}

/// Product of the gate matrices, built column by column.
pub fn circuit_to_dense(g: &GateList, total_qubits: usize) -> Result<DenseOperator> {
    if total_qubits > MAX_QUBITS || total_qubits < g.total_qubits() {
        return Err(Error::InvalidArgument(format!(
            "circuit needs between {} and {MAX_QUBITS} qubits, got {total_qubits}",
            g.total_qubits()
        )));
    }
    let dim = budget::check_operator(2, total_qubits)?;
    let columns: Vec<Vec<C64>> = (0..dim)
        .into_par_iter()
        .map(|col| {
            let mut v = vec![ZERO; dim];
            v[col] = C64::from(1.0);
            apply_gates(&g.gates, &mut v, total_qubits);
            v
        })
        .collect();
    let m = CMatrix::from_fn(dim, dim, |r, c| columns[c][r]);
    DenseOperator::new(m, 2, total_qubits)
}

/// Tally per gate kind; `single_qubit` sums `h` and `phase`.
pub fn gate_counts(g: &GateList) -> BTreeMap<String, usize> {
    let mut out: BTreeMap<String, usize> = ["cswap", "swap", "h", "phase", "mcphase", "single_qubit"]
        .iter()
        .map(|k| (k.to_string(), 0))
        .collect();
    for gate in &g.gates {
        *out.get_mut(gate.kind()).expect("known kind") += 1;
        if matches!(gate, Gate::H { .. } | Gate::Phase { .. }) {
            *out.get_mut("single_qubit").expect("known kind") += 1;
        }
    }
    out
}

/// Line-per-gate text with a register header.
pub fn export_circuit(g: &GateList) -> String {
    let mut s = format!("# registers: ancilla={} system=1 program={}\n", g.ancilla, g.program);
    for gate in &g.gates {
        match gate {
            Gate::Cswap { control, a, b } => writeln!(s, "CSWAP {control} {a} {b}"),
            Gate::Swap { a, b } => writeln!(s, "SWAP {a} {b}"),
            Gate::H { q } => writeln!(s, "H {q}"),
            Gate::Phase { q, theta } => writeln!(s, "P {theta:?} {q}"),
            Gate::Mcphase { theta, qubits } => {
                let list: Vec<String> = qubits.iter().map(|q| q.to_string()).collect();
                writeln!(s, "MCPHASE {theta:?} {}", list.join(" "))
            }
        }
        .expect("writing to a String");
    }
    s
}

/// Inverse of [`export_circuit`].
pub fn parse_circuit(text: &str) -> Result<GateList> {
    let bad = |line: &str| Error::InvalidArgument(format!("cannot parse circuit line {line:?}"));
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| bad(""))?;
    let fields: BTreeMap<&str, &str> = header
        .strip_prefix("# registers:")
        .ok_or_else(|| bad(header))?
        .split_whitespace()
        .filter_map(|kv| kv.split_once('='))
        .collect();
    let get = |k: &str| -> Result<usize> { fields.get(k).and_then(|v| v.parse().ok()).ok_or_else(|| bad(header)) };
    if get("system")? != 1 {
        return Err(bad(header));
    }
    let mut g = GateList::new(get("ancilla")?, get("program")?);
    for line in lines {
        let tok: Vec<&str> = line.split_whitespace().collect();
        let us = |i: usize| -> Result<usize> { tok.get(i).and_then(|t| t.parse().ok()).ok_or_else(|| bad(line)) };
        let fl = |i: usize| -> Result<f64> { tok.get(i).and_then(|t| t.parse().ok()).ok_or_else(|| bad(line)) };
        let gate = match (tok[0], tok.len()) {
            ("CSWAP", 4) => Gate::Cswap {
                control: us(1)?,
                a: us(2)?,
                b: us(3)?,
            },
            ("SWAP", 3) => Gate::Swap { a: us(1)?, b: us(2)? },
            ("H", 2) => Gate::H { q: us(1)? },
            ("P", 3) => Gate::Phase {
                theta: fl(1)?,
                q: us(2)?,
            },
            ("MCPHASE", k) if k >= 3 => Gate::Mcphase {
                theta: fl(1)?,
                qubits: (2..k).map(us).collect::<Result<_>>()?,
            },
            _ => return Err(bad(line)),
        };
        g.push(gate)?;
    }
    Ok(g)
}

/// Block of the circuit unitary with every ancilla qubit in `|0⟩` on both sides.
pub fn projected_block(g: &GateList) -> Result<CMatrix> {
    let full = circuit_to_dense(g, g.total_qubits())?;
    let side = 1usize << (g.program + 1);
    Ok(full.entries().view((0, 0), (side, side)).into_owned())
}

/// Norm of the ancilla-`|0…0⟩` component after running `g` on `|0…0⟩ ⊗ v`.
pub fn ancilla_return_overlap(g: &GateList, v: &[C64]) -> Result<f64> {
    let total = g.total_qubits();
    let dim = budget::check_vector(2, total)?;
    let side = 1usize << (g.program + 1);
    if v.len() != side {
        return Err(Error::InvalidArgument(format!("input must have length {side}")));
    }
    let mut state = vec![ZERO; dim];
    state[..side].copy_from_slice(v);
    apply_gates(&g.gates, &mut state, total);
    Ok(state[..side].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
}

/// Dense equivalence and gate tallies for one `n`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CircuitReport {
    pub n: usize,
    pub thetas: Vec<f64>,
    pub cswap: usize,
    /// `2 n log₂(n+1)`.
    pub cswap_stated: usize,
    pub single_qubit: usize,
    pub mcphase: usize,
    /// Largest entry difference between the projected block and the cyclic element.
    pub max_diff: f64,
    /// Smallest ancilla return overlap over the tested inputs.
    pub min_ancilla_overlap: f64,
    pub pass: bool,
}

/// Checks the projected circuit against `dense_element(r_theta_coeffs(n, θ), 2)` for each `θ`.
pub fn verify_circuit(n: usize, thetas: &[f64], inputs: usize, seed: u64) -> Result<CircuitReport> {
    use crate::cyclic_algebra::{dense_element, r_theta_coeffs};
    use crate::tensor_core::{haar_state_with, max_abs_diff, rng_from_seed};
    let l = ancilla_qubits(n)?;
    let mut rng = rng_from_seed(seed);
    let states: Vec<Vec<C64>> = (0..inputs)
        .map(|_| haar_state_with(&mut rng, 1 << (n + 1)).amplitudes().to_vec())
        .collect();
    let mut max_diff = 0.0f64;
    let mut min_overlap = 1.0f64;
    let mut counts = BTreeMap::new();
    for &theta in thetas {
        let g = build_rotation_circuit(n, theta)?;
        let block = projected_block(&g)?;
        let want = dense_element(&r_theta_coeffs(n, theta), 2)?;
        max_diff = max_diff.max(max_abs_diff(&block, want.entries()));
        for v in &states {
            min_overlap = min_overlap.min(ancilla_return_overlap(&g, v)?);
        }
        counts = gate_counts(&g);
    }
    let pass = max_diff <= 1e-10 && (1.0 - min_overlap).abs() <= 1e-10;
    Ok(CircuitReport {
        n,
        thetas: thetas.to_vec(),
        cswap: counts.get("cswap").copied().unwrap_or(0),
        cswap_stated: 2 * n * l,
        single_qubit: counts.get("single_qubit").copied().unwrap_or(0),
        mcphase: counts.get("mcphase").copied().unwrap_or(0),
        max_diff,
        min_ancilla_overlap: min_overlap,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclic_algebra::{dense_element, r_theta_coeffs};
    use crate::tensor_core::max_abs_diff;

    #[test]
    fn shift_decomposition_sizes() {
        assert_eq!(shift_swaps(4, 1).len(), 3);
        assert_eq!(shift_swaps(4, 2).len(), 2);
        assert_eq!(shift_swaps(2, 1), vec![(0, 1)]);
    }

    #[test]
    fn minimal_counts() {
        assert_eq!(cswap_count(1).unwrap(), 2);
        assert_eq!(cswap_count(3).unwrap(), 10);
        assert!(cswap_count(4).is_err());
        assert_eq!(
            cswap_count(3).unwrap(),
            gate_counts(&build_rotation_circuit(3, 0.3).unwrap())["cswap"]
        );
    }

    #[test]
    fn single_swap() {
        let mut g = GateList::new(0, 1);
        g.push(Gate::Swap { a: 0, b: 1 }).unwrap();
        let u = circuit_to_dense(&g, 2).unwrap();
        let mut want = CMatrix::zeros(4, 4);
        for (r, c) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
            want[(r, c)] = C64::from(1.0);
        }
        assert_eq!(u.entries(), &want);
    }

    #[test]
    fn empty_is_identity() {
        let g = GateList::new(1, 1);
        assert_eq!(circuit_to_dense(&g, 3).unwrap().entries(), &CMatrix::identity(8, 8));
        assert_eq!(export_circuit(&g), "# registers: ancilla=1 system=1 program=1\n");
    }

    #[test]
    fn matches_cyclic_element() {
        for (n, theta) in [(1, std::f64::consts::PI), (3, 0.83)] {
            let g = build_rotation_circuit(n, theta).unwrap();
            let block = projected_block(&g).unwrap();
            let want = dense_element(&r_theta_coeffs(n, theta), 2).unwrap();
            assert!(max_abs_diff(&block, want.entries()) < 1e-12);
        }
    }

    #[test]
    fn roundtrip() {
        let mut g = build_rotation_circuit(3, -1.234567890123).unwrap();
        g.push(Gate::Phase { q: 2, theta: 0.1 }).unwrap();
        g.push(Gate::Swap { a: 3, b: 4 }).unwrap();
        assert_eq!(parse_circuit(&export_circuit(&g)).unwrap(), g);
        assert!(parse_circuit("CSWAP 0 1 2").is_err());
    }

    #[test]
    fn rejects_bad_indices() {
        let mut g = GateList::new(1, 1);
        assert!(g.push(Gate::H { q: 3 }).is_err());
        assert!(g.push(Gate::Cswap { control: 0, a: 1, b: 1 }).is_err());
    }

    #[test]
    fn verification_report() {
        let r = verify_circuit(3, &[0.4, -2.0], 3, 1).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.cswap_stated, 12);
    }
}
