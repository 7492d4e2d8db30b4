//! Tree-based noisy quantum-circuit simulator.
//!
//! Noisy statevector simulation repeats the whole circuit once per shot.
//! This crate speeds that up by partitioning the circuit into contiguous
//! subcircuits and reusing each intermediate state across many shots,
//! organized as a simulation tree whose per-level arities control how often
//! each state is reused. A dynamic partition planner picks the slice
//! boundaries and arities from the noise model, the requested shot count,
//! and the profiled cost of copying a state, trading speedup against
//! output-distribution accuracy.
//!
//! The main entry points are:
//!
//! - [`qasm::parse_qasm`] / [`bench`] for obtaining circuits,
//! - [`noise::NoiseModel`] for configuring error channels,
//! - [`partition::plan_partition`] for choosing a tree structure,
//! - [`tree::execute_tree`] / [`tree::execute_baseline`] for running,
//! - [`metrics`] for comparing output distributions.

pub mod bench;
pub mod circuit;
pub mod dm;
pub mod error;
pub mod gates;
pub mod metrics;
pub mod noise;
pub mod partition;
pub mod qasm;
pub mod report;
pub mod rng;
pub mod state;
pub mod tree;

pub use circuit::{slice, Circuit, Partition};
pub use error::{Error, Result};
pub use gates::{gate_matrix, Gate, GateKind, GateMatrix};
pub use noise::{NoiseChannel, NoiseModel};
pub use state::{
    apply_gate, bitstring, copy_state, init_state, sample_outcome, Counts, MemoryBudget,
    Statevector,
};
