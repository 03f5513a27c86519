//! Gate-level circuit representation.
//!
//! The gate set is exactly what the obfuscation pipeline needs: `H`, `X`, `Z`
//! and the NOT family `CX`, `CCX`, `MCX`. Every gate is self-inverse.
//!
//! Circuits serialize to a line-oriented text format:
//!
//! ```text
//! # comment
//! width 14
//! label x 0 1 2
//! h 0
//! cx 0 1
//! ccx 0 1 2
//! mcx 0 1 2 3
//! ```
//!
//! Controls come before the target; indices are little-endian qubit numbers.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{QobfError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GateKind {
    H,
    X,
    Z,
    CX,
    CCX,
    MCX,
}

impl GateKind {
    pub const ALL: [GateKind; 6] = [
        GateKind::H,
        GateKind::X,
        GateKind::Z,
        GateKind::CX,
        GateKind::CCX,
        GateKind::MCX,
    ];

    pub fn mnemonic(self) -> &'static str {
        match self {
            GateKind::H => "h",
            GateKind::X => "x",
            GateKind::Z => "z",
            GateKind::CX => "cx",
            GateKind::CCX => "ccx",
            GateKind::MCX => "mcx",
        }
    }

    fn from_mnemonic(s: &str) -> Option<GateKind> {
        GateKind::ALL.into_iter().find(|k| k.mnemonic() == s)
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.mnemonic())
    }
}

/// A single gate in canonical form: controls sorted ascending and the kind
/// determined by the control count.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GateOp {
    kind: GateKind,
    controls: Vec<usize>,
    target: usize,
}

impl GateOp {
    pub fn h(target: usize) -> Self {
        GateOp {
            kind: GateKind::H,
            controls: Vec::new(),
            target,
        }
    }

    pub fn x(target: usize) -> Self {
        GateOp {
            kind: GateKind::X,
            controls: Vec::new(),
            target,
        }
    }

    pub fn z(target: usize) -> Self {
        GateOp {
            kind: GateKind::Z,
            controls: Vec::new(),
            target,
        }
    }

    pub fn cx(control: usize, target: usize) -> Result<Self> {
        Self::controlled_x(&[control], target)
    }

    pub fn ccx(c0: usize, c1: usize, target: usize) -> Result<Self> {
        Self::controlled_x(&[c0, c1], target)
    }

    /// Multi-controlled NOT. Zero, one and two controls normalize to `X`,
    /// `CX` and `CCX`.
    pub fn controlled_x(controls: &[usize], target: usize) -> Result<Self> {
        let mut sorted = controls.to_vec();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(QobfError::Construction(format!(
                "duplicate control index in {controls:?}"
            )));
        }
        if sorted.binary_search(&target).is_ok() {
            return Err(QobfError::Construction(format!(
                "target {target} is also a control"
            )));
        }
        let kind = match sorted.len() {
            0 => GateKind::X,
            1 => GateKind::CX,
            2 => GateKind::CCX,
            _ => GateKind::MCX,
        };
        Ok(GateOp {
            kind,
            controls: sorted,
            target,
        })
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn controls(&self) -> &[usize] {
        &self.controls
    }

    pub fn target(&self) -> usize {
        self.target
    }

    /// Every qubit the gate touches, controls first.
    pub fn qubits(&self) -> impl Iterator<Item = usize> + '_ {
        self.controls.iter().copied().chain(std::iter::once(self.target))
    }

    pub fn max_qubit(&self) -> usize {
        self.qubits().max().unwrap_or(self.target)
    }

    /// Re-check the gate against a register width.
    pub fn validate(&self, width: usize) -> Result<()> {
        if let Some(q) = self.qubits().find(|&q| q >= width) {
            return Err(QobfError::Construction(format!(
                "qubit index {q} out of range for width {width} in `{self}`"
            )));
        }
        let distinct: BTreeSet<usize> = self.qubits().collect();
        if distinct.len() != self.controls.len() + 1 {
            return Err(QobfError::Construction(format!("index collision in `{self}`")));
        }
        Ok(())
    }

    /// Apply an index relabelling to every qubit of the gate.
    pub fn remap(&self, map: impl Fn(usize) -> usize) -> Result<Self> {
        match self.kind {
            GateKind::H => Ok(GateOp::h(map(self.target))),
            GateKind::Z => Ok(GateOp::z(map(self.target))),
            _ => {
                let controls: Vec<usize> = self.controls.iter().map(|&c| map(c)).collect();
                GateOp::controlled_x(&controls, map(self.target))
            }
        }
    }
}

impl fmt::Display for GateOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.kind.mnemonic())?;
        for q in self.qubits() {
            write!(f, " {q}")?;
        }
        Ok(())
    }
}

/// Per-kind gate tally.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GateCounts {
    pub counts: BTreeMap<GateKind, usize>,
    pub total: usize,
}

impl GateCounts {
    pub fn get(&self, kind: GateKind) -> usize {
        self.counts.get(&kind).copied().unwrap_or(0)
    }
}

/// Where `decompose_mcx` may take its scratch qubits from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AncillaPolicy {
    /// Only these indices may be used; they must be |0⟩ wherever an MCX occurs.
    Clean(Vec<usize>),
    /// Append fresh zeroed qubits above the current width as needed.
    Allocate,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Circuit {
    width: usize,
    ops: Vec<GateOp>,
    labels: BTreeMap<String, Vec<usize>>,
}

impl Circuit {
    pub fn new(width: usize) -> Self {
        Circuit {
            width,
            ops: Vec::new(),
            labels: BTreeMap::new(),
        }
    }

    pub fn from_ops(width: usize, ops: impl IntoIterator<Item = GateOp>) -> Result<Self> {
        let mut c = Circuit::new(width);
        for op in ops {
            c.push(op)?;
        }
        Ok(c)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn ops(&self) -> &[GateOp] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn labels(&self) -> &BTreeMap<String, Vec<usize>> {
        &self.labels
    }

    pub fn label(&self, name: &str) -> Option<&[usize]> {
        self.labels.get(name).map(Vec::as_slice)
    }

    pub fn push(&mut self, op: GateOp) -> Result<()> {
        op.validate(self.width)?;
        self.ops.push(op);
        Ok(())
    }

    pub fn extend(&mut self, ops: impl IntoIterator<Item = GateOp>) -> Result<()> {
        for op in ops {
            self.push(op)?;
        }
        Ok(())
    }

    /// Builder-style `push`.
    pub fn append(mut self, op: GateOp) -> Result<Self> {
        self.push(op)?;
        Ok(self)
    }

    /// Name a register. Label sets must be in range and pairwise disjoint.
    pub fn set_label(&mut self, name: &str, qubits: Vec<usize>) -> Result<()> {
        if name.is_empty() || name.chars().any(|c| c.is_whitespace() || c == '#') {
            return Err(QobfError::Construction(format!("invalid label name {name:?}")));
        }
        if let Some(&q) = qubits.iter().find(|&&q| q >= self.width) {
            return Err(QobfError::Construction(format!(
                "label {name} index {q} out of range for width {}",
                self.width
            )));
        }
        let mut seen = BTreeSet::new();
        if !qubits.iter().all(|q| seen.insert(*q)) {
            return Err(QobfError::Construction(format!("label {name} repeats an index")));
        }
        for (other, idx) in &self.labels {
            if other != name && idx.iter().any(|q| seen.contains(q)) {
                return Err(QobfError::Construction(format!(
                    "label {name} overlaps label {other}"
                )));
            }
        }
        self.labels.insert(name.to_string(), qubits);
        Ok(())
    }

    /// Same ops on a wider register.
    pub fn widened(&self, width: usize) -> Result<Self> {
        if width < self.width {
            return Err(QobfError::WidthMismatch {
                expected: self.width,
                actual: width,
            });
        }
        let mut c = self.clone();
        c.width = width;
        Ok(c)
    }

    /// `self` followed by `other`. Labels of `self` win on a name clash.
    pub fn compose(&self, other: &Circuit) -> Result<Self> {
        if self.width != other.width {
            return Err(QobfError::WidthMismatch {
                expected: self.width,
                actual: other.width,
            });
        }
        let mut c = self.clone();
        c.ops.extend(other.ops.iter().cloned());
        for (name, idx) in &other.labels {
            if !c.labels.contains_key(name) {
                // Disjointness may fail when the two circuits label the same wires differently.
                let _ = c.set_label(name, idx.clone());
            }
        }
        Ok(c)
    }

    /// Reversed op list. Every gate in the set is its own inverse.
    pub fn inverse(&self) -> Self {
        Circuit {
            width: self.width,
            ops: self.ops.iter().rev().cloned().collect(),
            labels: self.labels.clone(),
        }
    }

    /// Layer count under as-soon-as-possible scheduling, where two gates
    /// conflict iff they share a qubit.
    pub fn depth(&self) -> usize {
        let mut level = vec![0usize; self.width];
        let mut depth = 0;
        for op in &self.ops {
            let layer = op.qubits().map(|q| level[q]).max().unwrap_or(0) + 1;
            for q in op.qubits() {
                level[q] = layer;
            }
            depth = depth.max(layer);
        }
        depth
    }

    pub fn gate_counts(&self) -> GateCounts {
        let mut counts: BTreeMap<GateKind, usize> = GateKind::ALL.iter().map(|&k| (k, 0)).collect();
        for op in &self.ops {
            *counts.entry(op.kind).or_default() += 1;
        }
        GateCounts {
            counts,
            total: self.ops.len(),
        }
    }

    /// Replace every MCX with k ≥ 3 controls by a V-chain of 2k−3 Toffolis over
    /// k−2 clean ancillas, which are returned to |0⟩.
    pub fn decompose_mcx(&self, policy: &AncillaPolicy) -> Result<Self> {
        let needed = self
            .ops
            .iter()
            .filter(|op| op.kind == GateKind::MCX)
            .map(|op| op.controls.len() - 2)
            .max()
            .unwrap_or(0);
        let (width, pool): (usize, Vec<usize>) = match policy {
            AncillaPolicy::Clean(pool) => {
                if let Some(&q) = pool.iter().find(|&&q| q >= self.width) {
                    return Err(QobfError::Construction(format!(
                        "ancilla {q} out of range for width {}",
                        self.width
                    )));
                }
                (self.width, pool.clone())
            }
            AncillaPolicy::Allocate => (self.width + needed, (self.width..self.width + needed).collect()),
        };

        let mut out = Circuit {
            width,
            ops: Vec::with_capacity(self.ops.len()),
            labels: self.labels.clone(),
        };
        for op in &self.ops {
            if op.kind != GateKind::MCX {
                out.ops.push(op.clone());
                continue;
            }
            let k = op.controls.len();
            let ancillas: Vec<usize> = pool
                .iter()
                .copied()
                .filter(|a| !op.controls.contains(a) && *a != op.target)
                .take(k - 2)
                .collect();
            if ancillas.len() < k - 2 {
                return Err(QobfError::Construction(format!(
                    "`{op}` needs {} clean ancillas, only {} available",
                    k - 2,
                    ancillas.len()
                )));
            }
            out.extend(v_chain(&op.controls, op.target, &ancillas)?)?;
        }
        Ok(out)
    }

    pub fn serialize(&self) -> String {
        let mut s = format!("width {}\n", self.width);
        for (name, idx) in &self.labels {
            s.push_str("label ");
            s.push_str(name);
            for q in idx {
                s.push_str(&format!(" {q}"));
            }
            s.push('\n');
        }
        for op in &self.ops {
            s.push_str(&op.to_string());
            s.push('\n');
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut circuit: Option<Circuit> = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line_no = lineno + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut tokens = line.split_whitespace();
            let head = tokens.next().unwrap_or_default();
            let perr = |token: &str, message: String| QobfError::Parse {
                line: line_no,
                token: token.to_string(),
                message,
            };
            let parse_index = |tok: &str| {
                tok.parse::<usize>()
                    .map_err(|_| perr(tok, "expected a non-negative qubit index".into()))
            };

            if head == "width" {
                if circuit.is_some() {
                    return Err(perr(head, "duplicate width header".into()));
                }
                let tok = tokens
                    .next()
                    .ok_or_else(|| perr(head, "missing width value".into()))?;
                let width = parse_index(tok)?;
                if let Some(extra) = tokens.next() {
                    return Err(perr(extra, "unexpected token after width".into()));
                }
                circuit = Some(Circuit::new(width));
                continue;
            }
            let c = circuit
                .as_mut()
                .ok_or_else(|| perr(head, "expected `width <n>` header first".into()))?;

            if head == "label" {
                let name = tokens
                    .next()
                    .ok_or_else(|| perr(head, "missing label name".into()))?;
                let idx = tokens.map(parse_index).collect::<Result<Vec<_>>>()?;
                c.set_label(name, idx).map_err(|e| perr(name, e.to_string()))?;
                continue;
            }

            let kind =
                GateKind::from_mnemonic(head).ok_or_else(|| perr(head, "unknown gate mnemonic".into()))?;
            let qubits = tokens.map(parse_index).collect::<Result<Vec<_>>>()?;
            let arity_ok = match kind {
                GateKind::H | GateKind::X | GateKind::Z => qubits.len() == 1,
                GateKind::CX => qubits.len() == 2,
                GateKind::CCX => qubits.len() == 3,
                GateKind::MCX => qubits.len() >= 4,
            };
            if !arity_ok {
                return Err(perr(
                    head,
                    format!("wrong number of qubits ({}) for {kind}", qubits.len()),
                ));
            }
            let (target, controls) = qubits.split_last().expect("arity checked");
            let op = match kind {
                GateKind::H => GateOp::h(*target),
                GateKind::Z => GateOp::z(*target),
                _ => GateOp::controlled_x(controls, *target).map_err(|e| perr(head, e.to_string()))?,
            };
            c.push(op).map_err(|e| perr(head, e.to_string()))?;
        }
        circuit.ok_or(QobfError::Parse {
            line: 0,
            token: String::new(),
            message: "empty input: missing `width <n>` header".into(),
        })
    }
}

/// Clean-ancilla V-chain for a k-controlled NOT, k ≥ 3.
fn v_chain(controls: &[usize], target: usize, ancillas: &[usize]) -> Result<Vec<GateOp>> {
    let k = controls.len();
    debug_assert!(k >= 3 && ancillas.len() >= k - 2);
    let mut compute = Vec::with_capacity(k - 2);
    compute.push(GateOp::ccx(controls[0], controls[1], ancillas[0])?);
    for i in 2..k - 1 {
        compute.push(GateOp::ccx(controls[i], ancillas[i - 2], ancillas[i - 1])?);
    }
    let mut ops = compute.clone();
    ops.push(GateOp::ccx(controls[k - 1], ancillas[k - 3], target)?);
    ops.extend(compute.into_iter().rev());
    Ok(ops)
}
