#![allow(dead_code)]

use num_complex::Complex64;
use qobf::{Circuit, GateOp, StateVector};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

/// Normalized state with Gaussian-ish random complex amplitudes.
pub fn random_state(width: usize, seed: u64) -> StateVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let amps: Vec<Complex64> = (0..1usize << width)
        .map(|_| Complex64::new(uniform(&mut rng) - 0.5, uniform(&mut rng) - 0.5))
        .collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    StateVector::from_amplitudes(amps.into_iter().map(|a| a / norm).collect()).unwrap()
}

/// Copy `state` into a wider register with the extra qubits at |0⟩.
pub fn embed(state: &StateVector, width: usize) -> StateVector {
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << width];
    amps[..state.amplitudes().len()].copy_from_slice(state.amplitudes());
    StateVector::from_amplitudes(amps).unwrap()
}

pub fn run(circuit: &Circuit, state: &StateVector) -> StateVector {
    let mut out = state.clone();
    out.run_circuit(circuit).unwrap();
    out
}

pub fn max_diff(a: &StateVector, b: &StateVector) -> f64 {
    a.amplitudes()
        .iter()
        .zip(b.amplitudes())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Basis input on the low qubits with the Grover ancilla prepared in |−⟩.
pub fn basis_with_minus(width: usize, index: usize, ancilla: usize) -> StateVector {
    let mut s = StateVector::basis_state(width, index).unwrap();
    s.apply_gate(&GateOp::x(ancilla)).unwrap();
    s.apply_gate(&GateOp::h(ancilla)).unwrap();
    s
}

/// ⟨a|b⟩.
pub fn inner(a: &StateVector, b: &StateVector) -> Complex64 {
    a.amplitudes()
        .iter()
        .zip(b.amplitudes())
        .map(|(x, y)| x.conj() * y)
        .sum()
}

/// Probability mass on the solution set, straight from full amplitudes.
pub fn solution_probability(state: &StateVector, n: usize, target: u64) -> f64 {
    let mask = (1usize << n) - 1;
    state
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(i, _)| ((i & mask) + ((i >> n) & mask) + ((i >> (2 * n)) & mask)) as u64 == target)
        .map(|(_, a)| a.norm_sqr())
        .sum()
}
