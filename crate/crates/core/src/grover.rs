//! Grover planning math and the oracle/diffuser circuits for `x + y + z = N`.

use std::f64::consts::FRAC_PI_4;

use serde::Serialize;

use crate::arithmetic::{build_triple_sum, SumLayout};
use crate::circuit::{Circuit, GateOp};
use crate::error::{QobfError, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroverPlan {
    #[serde(rename = "n")]
    pub bits: usize,
    #[serde(rename = "N")]
    pub target: u64,
    /// 2^(3n).
    #[serde(rename = "T")]
    pub search_space: u64,
    #[serde(rename = "M")]
    pub solutions: u64,
    #[serde(rename = "R")]
    pub iterations: u64,
    pub theoretical_success: f64,
}

impl GroverPlan {
    pub fn new(target: u64, bits: usize) -> Result<Self> {
        let search_space = search_space(bits)?;
        let solutions = count_solutions(target, bits);
        let iterations = optimal_iterations(search_space, solutions)?;
        Ok(GroverPlan {
            bits,
            target,
            search_space,
            solutions,
            iterations,
            theoretical_success: theoretical_success(search_space, solutions, iterations),
        })
    }
}

/// T = 2^(3n).
pub fn search_space(bits: usize) -> Result<u64> {
    if bits == 0 || 3 * bits > 63 {
        return Err(QobfError::InvalidArgument(format!(
            "register width {bits} must be in 1..=21"
        )));
    }
    Ok(1u64 << (3 * bits))
}

/// Largest representable sum, 3·(2^n − 1).
pub fn max_sum(bits: usize) -> u64 {
    3 * ((1u64 << bits) - 1)
}

/// C(k, 2), zero below k = 2.
fn choose2(k: i128) -> i128 {
    if k < 2 {
        0
    } else {
        k * (k - 1) / 2
    }
}

/// Number of triples `0 ≤ x, y, z < 2^n` with `x + y + z = N`, by
/// inclusion–exclusion over the components that exceed the bound.
pub fn count_solutions(target: u64, bits: usize) -> u64 {
    let cap = 1i128 << bits;
    let target = i128::from(target);
    const BINOM3: [i128; 4] = [1, 3, 3, 1];
    let total: i128 = (0..4)
        .map(|j| (j, target - j as i128 * cap))
        .filter(|&(_, rest)| rest >= 0)
        .map(|(j, rest)| if j % 2 == 0 { 1 } else { -1 } * BINOM3[j] * choose2(rest + 2))
        .sum();
    total.max(0) as u64
}

/// R = round((π/4)·√(T/M)), ties away from zero.
pub fn optimal_iterations(search_space: u64, solutions: u64) -> Result<u64> {
    if solutions == 0 {
        return Err(QobfError::NoSolutions);
    }
    if solutions > search_space {
        return Err(QobfError::InvalidArgument(format!(
            "solution count {solutions} exceeds search space {search_space}"
        )));
    }
    let ratio = search_space as f64 / solutions as f64;
    Ok((FRAC_PI_4 * ratio.sqrt()).round() as u64)
}

/// sin²((2R+1)·θ) with sin θ = √(M/T).
pub fn theoretical_success(search_space: u64, solutions: u64, iterations: u64) -> f64 {
    let theta = (solutions as f64 / search_space as f64).sqrt().asin();
    ((2 * iterations + 1) as f64 * theta).sin().powi(2)
}

/// Equality test `sum == N` kicked back onto `grover_ancilla`: X on the sum bits
/// where N has a 0, one MCX over all sum bits, then the X gates again.
pub fn build_query(layout: &SumLayout, target: u64, grover_ancilla: usize) -> Result<Circuit> {
    let sum = &layout.sum_qubits;
    if sum.len() < 64 && target >> sum.len() != 0 {
        return Err(QobfError::Constraint(format!(
            "target {target} does not fit the {}-bit sum register",
            sum.len()
        )));
    }
    if sum.contains(&grover_ancilla) || grover_ancilla < layout.width() {
        return Err(QobfError::Construction(format!(
            "grover ancilla {grover_ancilla} collides with the adder layout"
        )));
    }
    let flips: Vec<GateOp> = sum
        .iter()
        .enumerate()
        .filter(|(bit, _)| (target >> bit) & 1 == 0)
        .map(|(_, &q)| GateOp::x(q))
        .collect();
    let mut circuit = Circuit::new(grover_ancilla + 1);
    circuit.extend(flips.iter().cloned())?;
    circuit.push(GateOp::controlled_x(sum, grover_ancilla)?)?;
    circuit.extend(flips)?;
    Ok(circuit)
}

/// Phase oracle on 3n+5 qubits: adder, equality query, inverse adder.
pub fn build_oracle(bits: usize, target: u64) -> Result<Circuit> {
    if bits == 0 {
        return Err(QobfError::Constraint("register width must be at least 1".into()));
    }
    if target > max_sum(bits) {
        return Err(QobfError::Constraint(format!(
            "N = {target} is unreachable: 3·(2^{bits} − 1) = {}",
            max_sum(bits)
        )));
    }
    let (adder, layout) = build_triple_sum(bits)?;
    let ancilla = layout.width();
    let adder = adder.widened(ancilla + 1)?;
    let query = build_query(&layout, target, ancilla)?;
    let mut oracle = adder.compose(&query)?.compose(&adder.inverse())?;
    oracle.set_label("grover", vec![ancilla])?;
    Ok(oracle)
}

/// Inversion about the mean over `input_qubits`, via H, X, MCX onto the
/// |−⟩ ancilla, X, H. Width is the largest index plus one.
pub fn build_diffuser(input_qubits: &[usize], grover_ancilla: usize) -> Result<Circuit> {
    let width = input_qubits
        .iter()
        .copied()
        .chain([grover_ancilla])
        .max()
        .unwrap_or(0)
        + 1;
    let mut circuit = Circuit::new(width);
    let h: Vec<GateOp> = input_qubits.iter().map(|&q| GateOp::h(q)).collect();
    let x: Vec<GateOp> = input_qubits.iter().map(|&q| GateOp::x(q)).collect();
    circuit.extend(h.iter().cloned())?;
    circuit.extend(x.iter().cloned())?;
    circuit.push(GateOp::controlled_x(input_qubits, grover_ancilla)?)?;
    circuit.extend(x)?;
    circuit.extend(h)?;
    Ok(circuit)
}
