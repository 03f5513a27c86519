//! Benchmark-table rows: plan columns, our own depth and gate metrics, and
//! simulation wall-clock.

use std::fmt::Write as _;

use crate::circuit::AncillaPolicy;
use crate::error::Result;
use crate::obfuscator::{build_full_circuit, plan, run_with_max_qubits, DEFAULT_SHOTS};

pub const CSV_HEADER: &str = "N,n,iterations,qubits,depth,gates,run_time_s,valid_solutions";

/// Targets that simulate in well under a minute.
pub const DEFAULT_TARGETS: [u64; 4] = [7, 15, 31, 63];

/// Widths above this are opt-in (`--heavy`).
pub const LIGHT_MAX_QUBITS: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub target: u64,
    pub bits: usize,
    pub iterations: u64,
    pub qubits: usize,
    /// Layer depth after MCX decomposition.
    pub depth: usize,
    /// Gate total after MCX decomposition.
    pub gate_total: usize,
    /// `None` when simulation was skipped.
    pub run_time_seconds: Option<f64>,
    pub valid_solutions: u64,
}

impl BenchRow {
    pub fn to_csv(&self) -> String {
        let time = self
            .run_time_seconds
            .map_or_else(|| "NA".to_string(), |t| format!("{t:.2}"));
        format!(
            "{},{},{},{},{},{},{},{}",
            self.target,
            self.bits,
            self.iterations,
            self.qubits,
            self.depth,
            self.gate_total,
            time,
            self.valid_solutions
        )
    }
}

/// Bytes needed to simulate a target: the statevector plus the marginal
/// and its CDF over the 3n input qubits.
pub fn memory_budget_bytes(total_qubits: usize, bits: usize) -> u128 {
    16u128 * (1u128 << total_qubits) + 16u128 * (1u128 << (3 * bits))
}

/// Documented peak-memory ceiling for a simulated target: the working set
/// above plus 256 MiB for the process, circuit and decomposition.
pub fn memory_ceiling_bytes(total_qubits: usize, bits: usize) -> u128 {
    memory_budget_bytes(total_qubits, bits) + (256u128 << 20)
}

pub fn is_heavy(target: u64) -> Result<bool> {
    Ok(plan(target, None)?.total_qubits > LIGHT_MAX_QUBITS)
}

/// Plan and measure one target; simulate (1024 shots, seed 0) when `simulate`.
pub fn bench_row(target: u64, simulate: bool, max_qubits: usize) -> Result<BenchRow> {
    let plan = plan(target, None)?;
    let circuit = build_full_circuit(&plan)?;
    let decomposed = circuit.decompose_mcx(&AncillaPolicy::Allocate)?;
    drop(circuit);
    let run_time_seconds = if simulate {
        Some(run_with_max_qubits(&plan, DEFAULT_SHOTS, 0, max_qubits)?.simulate_seconds)
    } else {
        None
    };
    Ok(BenchRow {
        target,
        bits: plan.bits(),
        iterations: plan.iterations(),
        qubits: plan.total_qubits,
        depth: decomposed.depth(),
        gate_total: decomposed.gate_counts().total,
        run_time_seconds,
        valid_solutions: plan.grover.solutions,
    })
}

pub fn to_csv(rows: &[BenchRow]) -> String {
    let mut out = String::new();
    writeln!(out, "{CSV_HEADER}").unwrap();
    for row in rows {
        writeln!(out, "{}", row.to_csv()).unwrap();
    }
    out
}
