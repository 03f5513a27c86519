//! The `qobf` command-line front end.
//!
//! Exit codes: 0 success, 2 constraint or argument violations, 3 resource
//! limits (including heavy bench targets without `--heavy`), 4 file I/O.

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::arithmetic::{build_half_adder, cuccaro_reference_counts, SumLayout};
use crate::bench::{self, BenchRow};
use crate::circuit::{AncillaPolicy, GateKind};
use crate::error::{QobfError, Result};
use crate::grover::{count_solutions, max_sum};
use crate::obfuscator::{self, build_full_circuit, ObfuscationPlan, RunOutcome};
use crate::statevector::DEFAULT_MAX_QUBITS;

pub const MAX_QUBITS_ENV: &str = "QOBF_MAX_QUBITS";

#[derive(Debug, Parser)]
#[command(
    name = "qobf",
    version,
    about = "Grover-based triple-sum obfuscation of natural numbers"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the full pipeline and print the decoded triplet histogram.
    Obfuscate {
        #[arg(long = "n-value")]
        n_value: u64,
        #[arg(long)]
        bits: Option<usize>,
        #[arg(long, default_value_t = obfuscator::DEFAULT_SHOTS)]
        shots: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
        format: OutputFormat,
        /// Number of triplets listed in text output.
        #[arg(long, default_value_t = 12)]
        top: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reproduce the benchmark table as CSV.
    Bench {
        #[arg(long, value_delimiter = ',', default_values_t = bench::DEFAULT_TARGETS)]
        targets: Vec<u64>,
        /// Allow targets wider than 20 qubits (23 qubits: ~128 MiB, 26 qubits: ~1.1 GiB).
        #[arg(long)]
        heavy: bool,
        /// Report plan and circuit metrics only; run_time_s is NA.
        #[arg(long)]
        dry_run: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Count triplets with x+y+z = N by inclusion–exclusion.
    Count {
        #[arg(long = "n-value")]
        n_value: u64,
        #[arg(long)]
        bits: usize,
        /// Cross-check against brute-force enumeration.
        #[arg(long)]
        verify: bool,
    },
    /// Print circuit metrics and the Grover plan.
    Inspect {
        #[arg(long = "n-value")]
        n_value: u64,
        #[arg(long)]
        bits: Option<usize>,
    },
    /// Write the full circuit in the text format.
    Export {
        #[arg(long = "n-value")]
        n_value: u64,
        #[arg(long)]
        bits: Option<usize>,
        /// Expand MCX gates into Toffoli V-chains on fresh ancillas.
        #[arg(long)]
        decompose: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Parse `args` (including the program name) and run. Returns the exit code.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let code = err.exit_code();
            let rendered = err.render().to_string();
            if code == 0 {
                let _ = write!(stdout, "{rendered}");
            } else {
                let _ = write!(stderr, "{rendered}");
            }
            return code;
        }
    };
    match execute(&cli.command, max_qubits_from_env()) {
        Ok(output) => match output {
            Output::Stdout(text) => match stdout.write_all(text.as_bytes()) {
                Ok(()) => 0,
                Err(e) => {
                    let _ = writeln!(stderr, "error: {e}");
                    4
                }
            },
            Output::Written { path, bytes } => {
                let _ = writeln!(stdout, "wrote {bytes} bytes to {}", path.display());
                0
            }
        },
        Err(err) => {
            let _ = writeln!(stderr, "error: {err}");
            err.exit_code()
        }
    }
}

fn max_qubits_from_env() -> Result<usize> {
    match std::env::var(MAX_QUBITS_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| QobfError::InvalidArgument(format!("{MAX_QUBITS_ENV}={v:?} is not an integer"))),
        Err(_) => Ok(DEFAULT_MAX_QUBITS),
    }
}

enum Output {
    Stdout(String),
    Written { path: PathBuf, bytes: usize },
}

fn emit(text: String, out: &Option<PathBuf>) -> Result<Output> {
    match out {
        None => Ok(Output::Stdout(text)),
        Some(path) => {
            std::fs::write(path, &text)
                .map_err(|e| QobfError::Io(format!("cannot write {}: {e}", path.display())))?;
            Ok(Output::Written {
                path: path.clone(),
                bytes: text.len(),
            })
        }
    }
}

fn execute(command: &Command, max_qubits: Result<usize>) -> Result<Output> {
    match command {
        Command::Obfuscate {
            n_value,
            bits,
            shots,
            seed,
            format,
            top,
            out,
        } => {
            let plan = obfuscator::plan(*n_value, *bits)?;
            let outcome = obfuscator::run_with_max_qubits(&plan, *shots, *seed, max_qubits?)?;
            let text = match format {
                OutputFormat::Text => render_text(&plan, &outcome, *seed, *top),
                OutputFormat::Json => outcome.to_json(&plan) + "\n",
                OutputFormat::Csv => render_csv(&plan, &outcome),
            };
            emit(text, out)
        }
        Command::Bench {
            targets,
            heavy,
            dry_run,
            out,
        } => {
            let max_qubits = max_qubits?;
            let mut rows: Vec<BenchRow> = Vec::with_capacity(targets.len());
            for &target in targets {
                if !dry_run && !heavy && bench::is_heavy(target)? {
                    let plan = obfuscator::plan(target, None)?;
                    return Err(QobfError::Resource {
                        width: plan.total_qubits,
                        max: bench::LIGHT_MAX_QUBITS,
                        bytes: bench::memory_budget_bytes(plan.total_qubits, plan.bits()),
                    });
                }
                rows.push(bench::bench_row(target, !dry_run, max_qubits)?);
            }
            emit(bench::to_csv(&rows), out)
        }
        Command::Count {
            n_value,
            bits,
            verify,
        } => {
            if *bits == 0 || *bits > 21 {
                return Err(QobfError::Constraint(format!(
                    "--bits must be in 1..=21, got {bits}"
                )));
            }
            let m = count_solutions(*n_value, *bits);
            let mut text = format!("{m}\n");
            if *verify {
                if *bits > 10 {
                    return Err(QobfError::Constraint("--verify supports --bits ≤ 10".into()));
                }
                let brute = brute_force_count(*n_value, *bits);
                let verdict = if brute == m { "match" } else { "mismatch" };
                text = format!("formula {m}\nbrute force {brute}\n{verdict}\n");
            }
            Ok(Output::Stdout(text))
        }
        Command::Inspect { n_value, bits } => {
            let plan = obfuscator::plan(*n_value, *bits)?;
            Ok(Output::Stdout(render_inspect(&plan)?))
        }
        Command::Export {
            n_value,
            bits,
            decompose,
            out,
        } => {
            let plan = obfuscator::plan(*n_value, *bits)?;
            let mut circuit = build_full_circuit(&plan)?;
            if *decompose {
                circuit = circuit.decompose_mcx(&AncillaPolicy::Allocate)?;
            }
            emit(circuit.serialize(), out)
        }
    }
}

fn brute_force_count(target: u64, bits: usize) -> u64 {
    let cap = 1u64 << bits;
    let mut count = 0;
    for x in 0..cap {
        for y in 0..cap {
            for z in 0..cap {
                if x + y + z == target {
                    count += 1;
                }
            }
        }
    }
    count
}

fn render_text(plan: &ObfuscationPlan, outcome: &RunOutcome, seed: u64, top: usize) -> String {
    let g = &plan.grover;
    let h = &outcome.histogram;
    let mut s = String::new();
    writeln!(
        s,
        "N = {}, n = {}, qubits = {}, T = {}, M = {}, R = {}",
        g.target, g.bits, plan.total_qubits, g.search_space, g.solutions, g.iterations
    )
    .unwrap();
    writeln!(s, "shots = {}, seed = {}", h.shots, seed).unwrap();
    writeln!(s).unwrap();
    let ranked = h.ranked();
    let peak = ranked.first().map_or(1, |r| r.1.max(1));
    writeln!(
        s,
        "{:>4} {:>5} {:>5} {:>5} {:>6}  valid  histogram",
        "rank", "x", "y", "z", "count"
    )
    .unwrap();
    for (rank, ((x, y, z), count)) in ranked.iter().take(top).enumerate() {
        let mark = if x + y + z == g.target { "*" } else { " " };
        let bar = "#".repeat(((count * 40 + peak / 2) / peak) as usize);
        writeln!(
            s,
            "{:>4} {x:>5} {y:>5} {z:>5} {count:>6}  {mark:<5}  {bar}",
            rank + 1
        )
        .unwrap();
    }
    if ranked.len() > top {
        writeln!(s, "  ... {} more distinct triplets", ranked.len() - top).unwrap();
    }
    writeln!(s).unwrap();
    writeln!(
        s,
        "valid_fraction = {:.4} ({}/{})",
        h.valid_fraction,
        h.valid_shots(),
        h.shots
    )
    .unwrap();
    writeln!(s, "exact_success  = {:.6}", outcome.exact_success).unwrap();
    writeln!(s, "theoretical    = {:.6}", g.theoretical_success).unwrap();
    s
}

fn render_csv(plan: &ObfuscationPlan, outcome: &RunOutcome) -> String {
    let mut s = String::from("x,y,z,count,valid\n");
    for ((x, y, z), count) in outcome.histogram.ranked() {
        writeln!(s, "{x},{y},{z},{count},{}", u8::from(x + y + z == plan.target())).unwrap();
    }
    s
}

fn render_inspect(plan: &ObfuscationPlan) -> Result<String> {
    let g = &plan.grover;
    let circuit = build_full_circuit(plan)?;
    let decomposed = circuit.decompose_mcx(&AncillaPolicy::Allocate)?;
    let mut s = String::new();
    writeln!(s, "N = {}", g.target).unwrap();
    writeln!(s, "n = {} (max sum 3·(2^n − 1) = {})", g.bits, max_sum(g.bits)).unwrap();
    writeln!(s, "width = {}", circuit.width()).unwrap();
    writeln!(s, "T = {}", g.search_space).unwrap();
    writeln!(s, "M = {}", g.solutions).unwrap();
    writeln!(s, "R = {}", g.iterations).unwrap();
    writeln!(s, "theoretical_success = {:.6}", g.theoretical_success).unwrap();
    for (label, c) in [("mcx-level", &circuit), ("decomposed", &decomposed)] {
        let counts = c.gate_counts();
        let per_kind: Vec<String> = GateKind::ALL
            .iter()
            .map(|&k| format!("{k}={}", counts.get(k)))
            .collect();
        writeln!(
            s,
            "{label}: width = {}, depth = {}, gates = {} ({})",
            c.width(),
            c.depth(),
            counts.total,
            per_kind.join(" ")
        )
        .unwrap();
    }
    let layout = SumLayout::new(g.bits);
    for (name, adder) in [
        ("adder1", layout.first_adder()),
        ("adder2", layout.second_adder()),
    ] {
        let k = adder.bits();
        let counts = build_half_adder(k, &adder)?.gate_counts();
        let (ref_ccx, ref_cx) = cuccaro_reference_counts(k);
        writeln!(
            s,
            "{name} ({k}-bit half adder): toffoli = {}, cnot = {} (reference ripple-carry: toffoli = {ref_ccx}, cnot = {ref_cx})",
            counts.get(GateKind::CCX),
            counts.get(GateKind::CX)
        )
        .unwrap();
    }
    Ok(s)
}
