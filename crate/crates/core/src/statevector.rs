//! Dense statevector simulation.
//!
//! Basis index bit `k` is qubit `k` (little-endian). Bitstrings render qubit 0
//! as the rightmost character.
//!
//! Sampling uses inverse-CDF lookup over the marginal distribution. The random
//! source is ChaCha8 (`rand_chacha::ChaCha8Rng`, 8 rounds) seeded with
//! `SeedableRng::seed_from_u64(seed)`; each shot consumes one `next_u64()`
//! word `w`, mapped to `u = (w >> 11) * 2^-53` in `[0, 1)`. The selected
//! outcome is the first sub-index whose cumulative probability exceeds
//! `u * total`. ChaCha output is specified bit-for-bit, so histograms are
//! identical across platforms for the same inputs.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::circuit::{Circuit, GateKind, GateOp};
use crate::error::{QobfError, Result};

/// Default cap on simulated width: 2^26 amplitudes, 1 GiB of `Complex64`.
pub const DEFAULT_MAX_QUBITS: usize = 26;

/// Hard ceiling regardless of overrides; indices must fit comfortably in `usize`.
const ABSOLUTE_MAX_QUBITS: usize = 40;

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    width: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// |0…0⟩ on `width` qubits, capped at [`DEFAULT_MAX_QUBITS`].
    pub fn zero_state(width: usize) -> Result<Self> {
        Self::zero_state_with_limit(width, DEFAULT_MAX_QUBITS)
    }

    pub fn zero_state_with_limit(width: usize, max_qubits: usize) -> Result<Self> {
        Self::basis_state_with_limit(width, 0, max_qubits)
    }

    pub fn basis_state(width: usize, index: usize) -> Result<Self> {
        Self::basis_state_with_limit(width, index, DEFAULT_MAX_QUBITS)
    }

    fn basis_state_with_limit(width: usize, index: usize, max_qubits: usize) -> Result<Self> {
        check_width(width, max_qubits)?;
        let dim = 1usize << width;
        if index >= dim {
            return Err(QobfError::InvalidArgument(format!(
                "basis index {index} out of range for {width} qubits"
            )));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector { width, amplitudes })
    }

    /// Wrap an explicit amplitude vector. Its length must be a power of two;
    /// normalization is the caller's business.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(QobfError::InvalidArgument(format!(
                "amplitude count {len} is not a power of two ≥ 2"
            )));
        }
        Ok(StateVector {
            width: len.trailing_zeros() as usize,
            amplitudes,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amplitudes[index]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// |⟨self|other⟩|².
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        if self.width != other.width {
            return Err(QobfError::WidthMismatch {
                expected: self.width,
                actual: other.width,
            });
        }
        let inner: Complex64 = self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(inner.norm_sqr())
    }

    pub fn apply_gate(&mut self, gate: &GateOp) -> Result<()> {
        gate.validate(self.width)?;
        let t = gate.target();
        match gate.kind() {
            GateKind::H => self.apply_h(t),
            GateKind::Z => self.apply_z(t),
            GateKind::X => self.apply_x(t),
            GateKind::CX | GateKind::CCX | GateKind::MCX => self.apply_controlled_x(gate.controls(), t),
        }
        Ok(())
    }

    pub fn run_circuit(&mut self, circuit: &Circuit) -> Result<()> {
        if circuit.width() != self.width {
            return Err(QobfError::WidthMismatch {
                expected: self.width,
                actual: circuit.width(),
            });
        }
        for op in circuit.ops() {
            self.apply_gate(op)?;
        }
        Ok(())
    }

    fn apply_h(&mut self, t: usize) {
        let stride = 1usize << t;
        for block in self.amplitudes.chunks_exact_mut(stride << 1) {
            let (lo, hi) = block.split_at_mut(stride);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = (x + y) * FRAC_1_SQRT_2;
                *b = (x - y) * FRAC_1_SQRT_2;
            }
        }
    }

    fn apply_z(&mut self, t: usize) {
        let stride = 1usize << t;
        for block in self.amplitudes.chunks_exact_mut(stride << 1) {
            for b in &mut block[stride..] {
                *b = -*b;
            }
        }
    }

    fn apply_x(&mut self, t: usize) {
        let stride = 1usize << t;
        for block in self.amplitudes.chunks_exact_mut(stride << 1) {
            let (lo, hi) = block.split_at_mut(stride);
            lo.swap_with_slice(hi);
        }
    }

    /// Swap the target pairing on every basis index whose control bits are all 1.
    /// Only the 2^(w−k−1) matching pairs are visited: a free counter is
    /// deposited around the fixed bit positions, and indices below the lowest
    /// fixed bit form contiguous runs that are swapped as slices.
    fn apply_controlled_x(&mut self, controls: &[usize], t: usize) {
        let mut fixed: Vec<usize> = controls.iter().copied().chain(std::iter::once(t)).collect();
        fixed.sort_unstable();
        let control_mask: usize = controls.iter().map(|&c| 1usize << c).sum();
        let target_bit = 1usize << t;
        let free = 1usize << (self.width - fixed.len());
        let run = 1usize << fixed[0];
        let amps = &mut self.amplitudes;
        for i in (0..free).step_by(run) {
            let mut idx = i;
            for &p in &fixed {
                let low = idx & ((1usize << p) - 1);
                idx = ((idx >> p) << (p + 1)) | low;
            }
            let lo = idx | control_mask;
            let hi = lo | target_bit;
            let (head, tail) = amps.split_at_mut(hi);
            head[lo..lo + run].swap_with_slice(&mut tail[..run]);
        }
    }

    /// Marginal distribution over `qubits`, indexed by the sub-index whose bit
    /// `j` is the value of `qubits[j]`.
    pub fn marginal(&self, qubits: &[usize]) -> Result<Vec<f64>> {
        check_subset(qubits, self.width)?;
        let mut probs = vec![0.0f64; 1usize << qubits.len()];
        let is_prefix = qubits.iter().enumerate().all(|(j, &q)| j == q);
        if is_prefix {
            let mask = probs.len() - 1;
            for (i, a) in self.amplitudes.iter().enumerate() {
                probs[i & mask] += a.norm_sqr();
            }
        } else {
            for (i, a) in self.amplitudes.iter().enumerate() {
                let p = a.norm_sqr();
                if p == 0.0 {
                    continue;
                }
                let sub = qubits
                    .iter()
                    .enumerate()
                    .fold(0usize, |acc, (j, &q)| acc | (((i >> q) & 1) << j));
                probs[sub] += p;
            }
        }
        Ok(probs)
    }

    /// Marginal keyed by bitstring (first listed qubit rightmost). Outcomes of
    /// probability exactly zero are omitted.
    pub fn probabilities_of_subset(&self, qubits: &[usize]) -> Result<BTreeMap<String, f64>> {
        let probs = self.marginal(qubits)?;
        Ok(probs
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(|(i, &p)| (bitstring(i, qubits.len()), p))
            .collect())
    }

    /// Draw `shots` terminal measurements of `qubits`. See the module docs for
    /// the generator and the inverse-CDF rule.
    pub fn sample(&self, qubits: &[usize], shots: u64, seed: u64) -> Result<Histogram> {
        if shots == 0 {
            return Err(QobfError::InvalidArgument("shots must be at least 1".into()));
        }
        let probs = self.marginal(qubits)?;
        let outcomes = sample_indices(&probs, shots, seed);
        let mut counts = BTreeMap::new();
        for (idx, count) in outcomes {
            counts.insert(bitstring(idx, qubits.len()), count);
        }
        Ok(Histogram {
            width: qubits.len(),
            shots,
            counts,
        })
    }
}

/// Inverse-CDF sampling over an unnormalized discrete distribution. Returns
/// `(index, count)` pairs in ascending index order.
pub fn sample_indices(probs: &[f64], shots: u64, seed: u64) -> BTreeMap<usize, u64> {
    let mut cdf = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for p in probs {
        acc += p;
        cdf.push(acc);
    }
    let total = acc;
    let last_nonzero = probs.iter().rposition(|&p| p > 0.0).unwrap_or(0);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = BTreeMap::new();
    for _ in 0..shots {
        let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        let threshold = u * total;
        let idx = cdf.partition_point(|&c| c <= threshold).min(last_nonzero);
        *counts.entry(idx).or_insert(0) += 1;
    }
    counts
}

/// Render `value` as a `width`-character bitstring, bit 0 rightmost.
pub fn bitstring(value: usize, width: usize) -> String {
    (0..width)
        .rev()
        .map(|b| if (value >> b) & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// Inverse of [`bitstring`].
pub fn parse_bitstring(s: &str) -> Result<usize> {
    s.chars().try_fold(0usize, |acc, ch| match ch {
        '0' => Ok(acc << 1),
        '1' => Ok((acc << 1) | 1),
        _ => Err(QobfError::InvalidArgument(format!(
            "bad bitstring character {ch:?} in {s:?}"
        ))),
    })
}

fn check_width(width: usize, max_qubits: usize) -> Result<()> {
    let max = max_qubits.min(ABSOLUTE_MAX_QUBITS);
    if width == 0 || width > max {
        let bytes = if width < 128 {
            (1u128 << width) * std::mem::size_of::<Complex64>() as u128
        } else {
            u128::MAX
        };
        return Err(QobfError::Resource { width, max, bytes });
    }
    Ok(())
}

fn check_subset(qubits: &[usize], width: usize) -> Result<()> {
    let mut seen = vec![false; width];
    for &q in qubits {
        if q >= width {
            return Err(QobfError::InvalidArgument(format!(
                "qubit {q} out of range for width {width}"
            )));
        }
        if std::mem::replace(&mut seen[q], true) {
            return Err(QobfError::InvalidArgument(format!("qubit {q} listed twice")));
        }
    }
    Ok(())
}

/// Shot counts keyed by measured bitstring.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Histogram {
    pub width: usize,
    pub shots: u64,
    pub counts: BTreeMap<String, u64>,
}

impl Histogram {
    pub fn get(&self, key: &str) -> u64 {
        self.counts.get(key).copied().unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn close(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).norm() <= tol)
    }

    #[test]
    fn zero_state_shapes() {
        let s = StateVector::zero_state(1).unwrap();
        assert_eq!(s.amplitudes(), &[c(1.0), c(0.0)]);
        let s = StateVector::zero_state(3).unwrap();
        assert_eq!(s.amplitudes().len(), 8);
        assert_eq!(s.amplitude(0), c(1.0));
        assert!(s.amplitudes()[1..].iter().all(|a| a.norm() == 0.0));
    }

    #[test]
    fn zero_state_limits() {
        let err = StateVector::zero_state(27).unwrap_err();
        assert_eq!(
            err,
            QobfError::Resource {
                width: 27,
                max: 26,
                bytes: 16 << 27
            }
        );
        assert!(err.to_string().contains("2147483648 bytes"));
        assert!(StateVector::zero_state(0).is_err());
        assert!(StateVector::zero_state_with_limit(5, 4).is_err());
    }

    #[test]
    fn single_qubit_gates() {
        let mut s = StateVector::zero_state(1).unwrap();
        s.apply_gate(&GateOp::x(0)).unwrap();
        assert_eq!(s.amplitudes(), &[c(0.0), c(1.0)]);

        let mut s = StateVector::zero_state(1).unwrap();
        s.apply_gate(&GateOp::h(0)).unwrap();
        assert!(close(
            s.amplitudes(),
            &[c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2)],
            1e-15
        ));
        s.apply_gate(&GateOp::z(0)).unwrap();
        assert!(close(
            s.amplitudes(),
            &[c(FRAC_1_SQRT_2), c(-FRAC_1_SQRT_2)],
            1e-15
        ));
    }

    #[test]
    fn toffoli_truth_table() {
        let gate = GateOp::controlled_x(&[0, 1], 2).unwrap();
        for input in 0..8usize {
            let mut s = StateVector::basis_state(3, input).unwrap();
            s.apply_gate(&gate).unwrap();
            let expected = if input & 3 == 3 { input ^ 4 } else { input };
            assert_eq!(s.amplitude(expected), c(1.0), "input {input}");
        }
    }

    #[test]
    fn mcx_on_high_and_low_targets() {
        // Target below the controls exercises the deposit order.
        let gate = GateOp::controlled_x(&[1, 3, 4], 0).unwrap();
        for input in 0..32usize {
            let mut s = StateVector::basis_state(5, input).unwrap();
            s.apply_gate(&gate).unwrap();
            let expected = if input & 0b11010 == 0b11010 {
                input ^ 1
            } else {
                input
            };
            assert_eq!(s.amplitude(expected), c(1.0));
        }
    }

    #[test]
    fn gate_index_errors() {
        let mut s = StateVector::zero_state(2).unwrap();
        assert!(s.apply_gate(&GateOp::h(2)).is_err());
        assert!(s.run_circuit(&Circuit::new(3)).is_err());
    }

    #[test]
    fn run_circuit_identities() {
        let mut s = StateVector::zero_state(2).unwrap();
        s.apply_gate(&GateOp::h(0)).unwrap();
        let before = s.clone();
        s.run_circuit(&Circuit::new(2)).unwrap();
        assert_eq!(s, before);
        s.run_circuit(&Circuit::from_ops(2, [GateOp::x(0), GateOp::x(0)]).unwrap())
            .unwrap();
        assert!((s.fidelity(&before).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn marginals() {
        let s = StateVector::basis_state(2, 0b01).unwrap();
        let m = s.probabilities_of_subset(&[0, 1]).unwrap();
        assert_eq!(m.into_iter().collect::<Vec<_>>(), vec![("01".to_string(), 1.0)]);

        let mut bell = StateVector::zero_state(2).unwrap();
        bell.apply_gate(&GateOp::h(0)).unwrap();
        bell.apply_gate(&GateOp::cx(0, 1).unwrap()).unwrap();
        let m = bell.probabilities_of_subset(&[0]).unwrap();
        assert!((m["0"] - 0.5).abs() < 1e-12 && (m["1"] - 0.5).abs() < 1e-12);

        // Listed order defines bit order of the key.
        let s = StateVector::basis_state(3, 0b100).unwrap();
        let m = s.probabilities_of_subset(&[2, 0]).unwrap();
        assert_eq!(m.keys().collect::<Vec<_>>(), vec!["01"]);

        assert!(s.marginal(&[0, 0]).is_err());
        assert!(s.marginal(&[3]).is_err());
    }

    #[test]
    fn sampling() {
        let s = StateVector::basis_state(1, 1).unwrap();
        let h = s.sample(&[0], 100, 3).unwrap();
        assert_eq!(h.get("1"), 100);
        assert_eq!(h.counts.len(), 1);

        let mut plus = StateVector::zero_state(1).unwrap();
        plus.apply_gate(&GateOp::h(0)).unwrap();
        let h = plus.sample(&[0], 1024, 42).unwrap();
        assert_eq!(h.get("0") + h.get("1"), 1024);
        assert!((412..=612).contains(&h.get("0")), "{h:?}");
        assert!((412..=612).contains(&h.get("1")), "{h:?}");
        assert_eq!(plus.sample(&[0], 1024, 42).unwrap(), h);

        assert!(plus.sample(&[0], 0, 1).is_err());
    }

    #[test]
    fn zero_probability_outcomes_never_drawn() {
        let probs = [0.0, 0.25, 0.0, 0.75, 0.0];
        let counts = sample_indices(&probs, 5000, 9);
        assert!(counts.keys().all(|&k| k == 1 || k == 3));
    }

    #[test]
    fn bitstrings() {
        assert_eq!(bitstring(0b011, 3), "011");
        assert_eq!(bitstring(1, 4), "0001");
        assert_eq!(parse_bitstring("10011").unwrap(), 19);
        assert!(parse_bitstring("1x").is_err());
    }
}
