//! Obfuscation of a natural number `N` as the set of triplets `x + y + z = N`
//! over three n-bit registers, found with Grover search on a reversible
//! ripple-carry adder and simulated on an exact dense statevector.
//!
//! Module map:
//! - [`statevector`]: dense simulator and seeded terminal sampling
//! - [`circuit`]: gate IR, metrics, MCX decomposition, text format
//! - [`arithmetic`]: MAJ/UMA half adders and the cascaded triple sum
//! - [`grover`]: solution counting, iteration planning, oracle and diffuser
//! - [`obfuscator`]: the end-to-end pipeline
//! - [`bench`]: benchmark table rows
//! - [`cli`]: the `qobf` command-line front end

pub mod arithmetic;
pub mod bench;
pub mod circuit;
pub mod cli;
pub mod error;
pub mod grover;
pub mod obfuscator;
pub mod statevector;

pub use circuit::{AncillaPolicy, Circuit, GateKind, GateOp};
pub use error::{QobfError, Result};
pub use obfuscator::{plan, ObfuscationPlan};
pub use statevector::{Histogram, StateVector};
