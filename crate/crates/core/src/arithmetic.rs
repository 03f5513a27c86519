//! Reversible ripple-carry addition built from MAJ/UMA columns.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::circuit::{Circuit, GateOp};
use crate::error::{QobfError, Result};

/// Qubit assignment for one half adder: `b ← a + b` with the high bit on
/// `carry_out`. `ancilla` is the carry-in wire and must start (and ends) at |0⟩.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AdderLayout {
    pub a_qubits: Vec<usize>,
    pub b_qubits: Vec<usize>,
    pub ancilla: usize,
    pub carry_out: usize,
}

impl AdderLayout {
    pub fn bits(&self) -> usize {
        self.a_qubits.len()
    }

    fn validate(&self) -> Result<()> {
        if self.a_qubits.is_empty() {
            return Err(QobfError::Construction("adder needs at least one bit".into()));
        }
        if self.a_qubits.len() != self.b_qubits.len() {
            return Err(QobfError::Construction(format!(
                "operand lengths differ: {} vs {}",
                self.a_qubits.len(),
                self.b_qubits.len()
            )));
        }
        let all: Vec<usize> = self.qubits().collect();
        let distinct: BTreeSet<usize> = all.iter().copied().collect();
        if distinct.len() != all.len() {
            return Err(QobfError::Construction(format!(
                "adder layout reuses a qubit: {self:?}"
            )));
        }
        Ok(())
    }

    fn qubits(&self) -> impl Iterator<Item = usize> + '_ {
        self.a_qubits
            .iter()
            .chain(&self.b_qubits)
            .copied()
            .chain([self.ancilla, self.carry_out])
    }
}

/// Qubit assignment of the cascaded `x + y + z` circuit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SumLayout {
    pub x_qubits: Vec<usize>,
    pub y_qubits: Vec<usize>,
    pub z_qubits: Vec<usize>,
    pub cout0: usize,
    pub shared_ancilla: usize,
    pub cout1: usize,
    pub adder2_ancilla: usize,
    /// `z ++ [shared_ancilla, cout1]`, little-endian, n+2 bits.
    pub sum_qubits: Vec<usize>,
}

impl SumLayout {
    /// Standard placement for `n`-bit registers: x, y, z, then
    /// `cout0, shared_ancilla, cout1, adder2_ancilla`.
    pub fn new(n: usize) -> Self {
        let x_qubits: Vec<usize> = (0..n).collect();
        let y_qubits: Vec<usize> = (n..2 * n).collect();
        let z_qubits: Vec<usize> = (2 * n..3 * n).collect();
        let (cout0, shared_ancilla, cout1, adder2_ancilla) = (3 * n, 3 * n + 1, 3 * n + 2, 3 * n + 3);
        let mut sum_qubits = z_qubits.clone();
        sum_qubits.extend([shared_ancilla, cout1]);
        SumLayout {
            x_qubits,
            y_qubits,
            z_qubits,
            cout0,
            shared_ancilla,
            cout1,
            adder2_ancilla,
            sum_qubits,
        }
    }

    pub fn bits(&self) -> usize {
        self.x_qubits.len()
    }

    /// 3n + 4.
    pub fn width(&self) -> usize {
        3 * self.bits() + 4
    }

    pub fn input_qubits(&self) -> Vec<usize> {
        self.x_qubits
            .iter()
            .chain(&self.y_qubits)
            .chain(&self.z_qubits)
            .copied()
            .collect()
    }

    pub fn first_adder(&self) -> AdderLayout {
        AdderLayout {
            a_qubits: self.x_qubits.clone(),
            b_qubits: self.y_qubits.clone(),
            ancilla: self.shared_ancilla,
            carry_out: self.cout0,
        }
    }

    /// Adds the (n+1)-bit partial sum `y ++ [cout0]` into `z ++ [shared_ancilla]`.
    pub fn second_adder(&self) -> AdderLayout {
        let mut a_qubits = self.y_qubits.clone();
        a_qubits.push(self.cout0);
        let mut b_qubits = self.z_qubits.clone();
        b_qubits.push(self.shared_ancilla);
        AdderLayout {
            a_qubits,
            b_qubits,
            ancilla: self.adder2_ancilla,
            carry_out: self.cout1,
        }
    }
}

/// Majority column: afterwards `a` holds maj(a, b, c), `b` holds a⊕b, `c` holds a⊕c.
pub fn maj(c: usize, b: usize, a: usize) -> Result<Vec<GateOp>> {
    distinct3(c, b, a)?;
    Ok(vec![GateOp::cx(a, b)?, GateOp::cx(a, c)?, GateOp::ccx(c, b, a)?])
}

/// Unmajority-and-sum column: restores `a` and `c` after [`maj`] and leaves
/// the sum bit a⊕b⊕c on `b`.
pub fn uma(c: usize, b: usize, a: usize) -> Result<Vec<GateOp>> {
    distinct3(c, b, a)?;
    Ok(vec![GateOp::ccx(c, b, a)?, GateOp::cx(a, c)?, GateOp::cx(c, b)?])
}

fn distinct3(c: usize, b: usize, a: usize) -> Result<()> {
    if c == b || b == a || a == c {
        return Err(QobfError::Construction(format!(
            "MAJ/UMA indices must be distinct: ({c}, {b}, {a})"
        )));
    }
    Ok(())
}

/// Half adder (no carry-in, explicit carry-out):
/// |a⟩|b⟩|0⟩|0⟩ ↦ |a⟩|(a+b) mod 2^n⟩|0⟩|msb(a+b)⟩.
///
/// The circuit is as wide as the largest index in the layout plus one.
pub fn build_half_adder(n: usize, layout: &AdderLayout) -> Result<Circuit> {
    if n == 0 {
        return Err(QobfError::Construction(
            "adder bit width must be at least 1".into(),
        ));
    }
    layout.validate()?;
    if layout.bits() != n {
        return Err(QobfError::Construction(format!(
            "layout has {} bits, expected {n}",
            layout.bits()
        )));
    }
    let width = layout.qubits().max().unwrap_or(0) + 1;
    let mut circuit = Circuit::new(width);
    circuit.extend(half_adder_ops(layout)?)?;
    Ok(circuit)
}

fn half_adder_ops(layout: &AdderLayout) -> Result<Vec<GateOp>> {
    let (a, b) = (&layout.a_qubits, &layout.b_qubits);
    let n = a.len();
    // Carry wire entering column i.
    let carry_in = |i: usize| if i == 0 { layout.ancilla } else { a[i - 1] };
    let mut ops = Vec::with_capacity(6 * n + 1);
    for i in 0..n {
        ops.extend(maj(carry_in(i), b[i], a[i])?);
    }
    ops.push(GateOp::cx(a[n - 1], layout.carry_out)?);
    for i in (0..n).rev() {
        ops.extend(uma(carry_in(i), b[i], a[i])?);
    }
    Ok(ops)
}

/// Two cascaded half adders computing `s = x + y + z` onto
/// [`SumLayout::sum_qubits`]. Width is exactly 3n+4.
pub fn build_triple_sum(n: usize) -> Result<(Circuit, SumLayout)> {
    if n == 0 {
        return Err(QobfError::Construction(
            "register bit width must be at least 1".into(),
        ));
    }
    let layout = SumLayout::new(n);
    let mut circuit = Circuit::new(layout.width());
    circuit.extend(half_adder_ops(&layout.first_adder())?)?;
    circuit.extend(half_adder_ops(&layout.second_adder())?)?;
    circuit.set_label("x", layout.x_qubits.clone())?;
    circuit.set_label("y", layout.y_qubits.clone())?;
    circuit.set_label("sum", layout.sum_qubits.clone())?;
    Ok((circuit, layout))
}

/// Toffoli/CNOT counts of the reference Cuccaro ripple-carry adder
/// (2n−1 Toffolis, 5n−3 CNOTs), for side-by-side reporting only.
pub fn cuccaro_reference_counts(n: usize) -> (usize, usize) {
    (2 * n - 1, 5 * n - 3)
}
