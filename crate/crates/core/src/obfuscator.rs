//! End-to-end pipeline: plan, build the 3n+5 qubit Grover circuit, simulate,
//! sample the input registers and decode `(x, y, z)` triplets.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;

use crate::arithmetic::SumLayout;
use crate::circuit::{Circuit, GateOp};
use crate::error::{QobfError, Result};
use crate::grover::{build_diffuser, build_oracle, max_sum, GroverPlan};
use crate::statevector::{bitstring, parse_bitstring, StateVector, DEFAULT_MAX_QUBITS};

pub const DEFAULT_SHOTS: u64 = 1024;

/// Named qubit positions of the full circuit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QubitMap {
    pub x: Vec<usize>,
    pub y: Vec<usize>,
    pub z: Vec<usize>,
    pub cout0: usize,
    pub shared_ancilla: usize,
    pub cout1: usize,
    pub adder2_ancilla: usize,
    pub grover_ancilla: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObfuscationPlan {
    pub grover: GroverPlan,
    pub qubit_map: QubitMap,
    pub total_qubits: usize,
}

impl ObfuscationPlan {
    pub fn target(&self) -> u64 {
        self.grover.target
    }

    pub fn bits(&self) -> usize {
        self.grover.bits
    }

    pub fn iterations(&self) -> u64 {
        self.grover.iterations
    }

    /// The 3n measured qubits, x then y then z.
    pub fn input_qubits(&self) -> Vec<usize> {
        let m = &self.qubit_map;
        m.x.iter().chain(&m.y).chain(&m.z).copied().collect()
    }

    /// Same plan with a different iteration count.
    pub fn with_iterations(&self, iterations: u64) -> Self {
        let mut plan = self.clone();
        plan.grover.iterations = iterations;
        plan.grover.theoretical_success =
            crate::grover::theoretical_success(plan.grover.search_space, plan.grover.solutions, iterations);
        plan
    }
}

/// Smallest n with 3·(2^n − 1) ≥ N.
pub fn minimal_bits(target: u64) -> usize {
    (1..)
        .find(|&n| max_sum(n) >= target)
        .expect("u64 target always fits below n = 63")
}

pub fn plan(target: u64, bits: Option<usize>) -> Result<ObfuscationPlan> {
    if target == 0 {
        return Err(QobfError::Constraint("N must be a natural number (N ≥ 1)".into()));
    }
    let bits = match bits {
        Some(0) => {
            return Err(QobfError::Constraint(
                "register width n must be at least 1".into(),
            ))
        }
        Some(n) if n <= 21 && max_sum(n) < target => {
            return Err(QobfError::Constraint(format!(
                "N = {target} exceeds 3·(2^{n} − 1) = {}; need n ≥ {}",
                max_sum(n),
                minimal_bits(target)
            )))
        }
        Some(n) => n,
        None => minimal_bits(target),
    };
    let grover = GroverPlan::new(target, bits)?;
    let layout = SumLayout::new(bits);
    let qubit_map = QubitMap {
        x: layout.x_qubits,
        y: layout.y_qubits,
        z: layout.z_qubits,
        cout0: layout.cout0,
        shared_ancilla: layout.shared_ancilla,
        cout1: layout.cout1,
        adder2_ancilla: layout.adder2_ancilla,
        grover_ancilla: 3 * bits + 4,
    };
    Ok(ObfuscationPlan {
        grover,
        qubit_map,
        total_qubits: 3 * bits + 5,
    })
}

/// One Grover round: oracle followed by diffuser.
pub fn build_grover_iteration(plan: &ObfuscationPlan) -> Result<Circuit> {
    let oracle = build_oracle(plan.bits(), plan.target())?;
    let diffuser = build_diffuser(&plan.input_qubits(), plan.qubit_map.grover_ancilla)?;
    oracle.compose(&diffuser)
}

/// Hadamards on the inputs, |−⟩ on the Grover ancilla, then R rounds.
pub fn build_full_circuit(plan: &ObfuscationPlan) -> Result<Circuit> {
    let mut circuit = Circuit::new(plan.total_qubits);
    circuit.extend(plan.input_qubits().into_iter().map(GateOp::h))?;
    let ancilla = plan.qubit_map.grover_ancilla;
    circuit.extend([GateOp::x(ancilla), GateOp::h(ancilla)])?;
    if plan.iterations() > 0 {
        let round = build_grover_iteration(plan)?;
        for _ in 0..plan.iterations() {
            circuit.extend(round.ops().iter().cloned())?;
        }
    }
    let m = &plan.qubit_map;
    circuit.set_label("x", m.x.clone())?;
    circuit.set_label("y", m.y.clone())?;
    let mut sum = m.z.clone();
    sum.extend([m.shared_ancilla, m.cout1]);
    circuit.set_label("sum", sum)?;
    circuit.set_label("grover", vec![ancilla])?;
    Ok(circuit)
}

/// Split a 3n-character measurement (qubit 0 rightmost) into `(x, y, z)`.
pub fn decode(bits: &str, plan: &ObfuscationPlan) -> Result<(u64, u64, u64)> {
    decode_bits(bits, plan.bits())
}

pub fn decode_bits(bits: &str, n: usize) -> Result<(u64, u64, u64)> {
    if bits.len() != 3 * n {
        return Err(QobfError::InvalidArgument(format!(
            "bitstring has {} characters, expected {}",
            bits.len(),
            3 * n
        )));
    }
    let value = parse_bitstring(bits)? as u64;
    Ok(split_index(value, n))
}

fn split_index(value: u64, n: usize) -> (u64, u64, u64) {
    let mask = (1u64 << n) - 1;
    (value & mask, (value >> n) & mask, (value >> (2 * n)) & mask)
}

pub fn encode(triplet: (u64, u64, u64), n: usize) -> String {
    let (x, y, z) = triplet;
    bitstring((x | (y << n) | (z << (2 * n))) as usize, 3 * n)
}

/// Shot counts per decoded triplet.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodedHistogram {
    pub target: u64,
    pub entries: BTreeMap<(u64, u64, u64), u64>,
    pub shots: u64,
    pub valid_fraction: f64,
}

impl DecodedHistogram {
    /// Entries by count descending, ties by `(x, y, z)` ascending.
    pub fn ranked(&self) -> Vec<((u64, u64, u64), u64)> {
        let mut rows: Vec<_> = self.entries.iter().map(|(k, v)| (*k, *v)).collect();
        rows.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        rows
    }

    pub fn valid_shots(&self) -> u64 {
        self.entries
            .iter()
            .filter(|((x, y, z), _)| x + y + z == self.target)
            .map(|(_, c)| c)
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub histogram: DecodedHistogram,
    /// Exact probability mass on valid triplets before sampling.
    pub exact_success: f64,
    /// Wall-clock of simulation and sampling, excluding circuit construction.
    pub simulate_seconds: f64,
}

#[derive(Debug, Serialize)]
struct CountJson {
    x: u64,
    y: u64,
    z: u64,
    count: u64,
}

#[derive(Debug, Serialize)]
struct ReportJson {
    n_value: u64,
    bits: usize,
    iterations: u64,
    shots: u64,
    valid_fraction: f64,
    exact_success: f64,
    counts: Vec<CountJson>,
}

impl RunOutcome {
    pub fn to_json(&self, plan: &ObfuscationPlan) -> String {
        let report = ReportJson {
            n_value: plan.target(),
            bits: plan.bits(),
            iterations: plan.iterations(),
            shots: self.histogram.shots,
            valid_fraction: self.histogram.valid_fraction,
            exact_success: self.exact_success,
            counts: self
                .histogram
                .ranked()
                .into_iter()
                .map(|((x, y, z), count)| CountJson { x, y, z, count })
                .collect(),
        };
        serde_json::to_string_pretty(&report).expect("report serializes")
    }
}

/// Final statevector of the full circuit.
pub fn simulate(plan: &ObfuscationPlan, max_qubits: usize) -> Result<StateVector> {
    let circuit = build_full_circuit(plan)?;
    let mut state = StateVector::zero_state_with_limit(plan.total_qubits, max_qubits)?;
    state.run_circuit(&circuit)?;
    Ok(state)
}

/// Exact probability, per triplet index `x | y<<n | z<<2n`, from a final state.
pub fn triplet_distribution(state: &StateVector, plan: &ObfuscationPlan) -> Result<Vec<f64>> {
    state.marginal(&plan.input_qubits())
}

/// Sum of `distribution` over triplets that add up to N.
pub fn solution_mass(distribution: &[f64], plan: &ObfuscationPlan) -> f64 {
    distribution
        .iter()
        .enumerate()
        .filter(|(i, _)| {
            let (x, y, z) = split_index(*i as u64, plan.bits());
            x + y + z == plan.target()
        })
        .map(|(_, p)| p)
        .sum()
}

pub fn run(plan: &ObfuscationPlan, shots: u64, seed: u64) -> Result<RunOutcome> {
    run_with_max_qubits(plan, shots, seed, DEFAULT_MAX_QUBITS)
}

pub fn run_with_max_qubits(
    plan: &ObfuscationPlan,
    shots: u64,
    seed: u64,
    max_qubits: usize,
) -> Result<RunOutcome> {
    if shots == 0 {
        return Err(QobfError::InvalidArgument("shots must be at least 1".into()));
    }
    let circuit = build_full_circuit(plan)?;
    let started = Instant::now();
    let mut state = StateVector::zero_state_with_limit(plan.total_qubits, max_qubits)?;
    state.run_circuit(&circuit)?;
    let distribution = triplet_distribution(&state, plan)?;
    drop(state);
    let samples = crate::statevector::sample_indices(&distribution, shots, seed);
    let simulate_seconds = started.elapsed().as_secs_f64();

    let entries: BTreeMap<(u64, u64, u64), u64> = samples
        .into_iter()
        .map(|(idx, count)| (split_index(idx as u64, plan.bits()), count))
        .collect();
    let mut histogram = DecodedHistogram {
        target: plan.target(),
        entries,
        shots,
        valid_fraction: 0.0,
    };
    histogram.valid_fraction = histogram.valid_shots() as f64 / shots as f64;
    Ok(RunOutcome {
        histogram,
        exact_success: solution_mass(&distribution, plan),
        simulate_seconds,
    })
}
