//! Simulation-tree execution: reusing intermediate states across shots.
//!
//! The tree for arities `(A_0, ..., A_{k-1})` has the initial state at the
//! root; each node at depth `d` executes subcircuit `d` with fresh
//! per-location trajectory noise, and its resulting state is reused by
//! `A_{d+1}` children. Leaves draw one measurement outcome each, so a run
//! yields exactly `prod A_i` outcomes while executing only
//! `sum_i prod_{j<=i} A_j` subcircuit instances instead of the baseline's
//! `k * N`.
//!
//! Traversal is depth-first; the final child of every node consumes the
//! parent state in place, so a sequential run keeps at most `k + 1` states
//! live. Sibling subtrees near the root run in parallel. Every node's random
//! stream is derived from `(master_seed, path)`, which makes counts
//! independent of traversal and thread schedule.

use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::noise::{apply_kraus_step, apply_readout_error_index, NoiseModel, ResolvedNoise};
use crate::rng::{child_seed, root_seed, RandomStream};
use crate::state::{
    apply_gate, copy_state, init_state, sample_outcome, Counts, MemoryBudget, Statevector,
};

/// Per-level reuse counts plus the subcircuits they schedule.
#[derive(Debug, Clone)]
pub struct TreeStructure {
    arities: Vec<u64>,
    slices: Vec<Circuit>,
}

impl TreeStructure {
    pub fn new(slices: Vec<Circuit>, arities: Vec<u64>) -> Result<Self> {
        if slices.is_empty() || slices.len() != arities.len() {
            return Err(Error::InvalidArgument(format!(
                "need one arity per slice, got {} slices and {} arities",
                slices.len(),
                arities.len()
            )));
        }
        if arities.contains(&0) {
            return Err(Error::InvalidArgument("arities must be at least 1".into()));
        }
        let n = slices[0].n_qubits();
        if slices.iter().any(|s| s.n_qubits() != n) {
            return Err(Error::InvalidArgument(
                "all slices must have the same qubit count".into(),
            ));
        }
        Ok(Self { arities, slices })
    }

    /// Slice a circuit with a plan's partition and adopt its arities.
    pub fn from_plan(
        circuit: &Circuit,
        plan: &crate::partition::PartitionPlan,
    ) -> Result<Self> {
        let slices = crate::circuit::slice(circuit, &plan.partition)?;
        Self::new(slices, plan.arities.clone())
    }

    pub fn k(&self) -> usize {
        self.arities.len()
    }

    pub fn arities(&self) -> &[u64] {
        &self.arities
    }

    pub fn slices(&self) -> &[Circuit] {
        &self.slices
    }

    pub fn n_qubits(&self) -> usize {
        self.slices[0].n_qubits()
    }

    pub fn total_outcomes(&self) -> u64 {
        self.arities.iter().product()
    }

    /// Number of executions of the `i`-th subcircuit, 1-indexed:
    /// `prod_{j=0}^{i-1} A_j`.
    pub fn instances_of(&self, i: usize) -> Result<u64> {
        if i == 0 || i > self.k() {
            return Err(Error::InvalidArgument(format!(
                "subcircuit index {i} outside 1..={}",
                self.k()
            )));
        }
        Ok(instances_of_arities(&self.arities, i))
    }

    /// Total tree nodes including the root state node.
    pub fn total_nodes(&self) -> u64 {
        1 + subcircuit_nodes(&self.arities)
    }

    pub fn estimate_speedup(&self, n_baseline: u64) -> f64 {
        speedup_from_arities(&self.arities, n_baseline)
    }
}

/// `prod_{j=0}^{i-1} A_j` (1-indexed subcircuits).
pub fn instances_of_arities(arities: &[u64], i: usize) -> u64 {
    arities[..i].iter().product()
}

/// Total subcircuit executions: `sum_i instances_of(i)`.
pub fn subcircuit_nodes(arities: &[u64]) -> u64 {
    (1..=arities.len())
        .map(|i| instances_of_arities(arities, i))
        .sum()
}

/// Node-ratio speedup estimate of a tree over a flat baseline producing
/// `n_baseline` outcomes: `(k * n_baseline) / sum_i instances_of(i)`.
pub fn speedup_from_arities(arities: &[u64], n_baseline: u64) -> f64 {
    (arities.len() as u64 * n_baseline) as f64 / subcircuit_nodes(arities) as f64
}

/// Outcome of one tree or baseline run.
#[derive(Debug, Clone)]
pub struct TreeRunResult {
    pub counts: Counts,
    pub nodes_executed: u64,
    pub states_copied: u64,
    pub wall_time: Duration,
    pub seed: u64,
}

#[derive(Debug, Default)]
struct Acc {
    counts: Option<Counts>,
    nodes: u64,
    copies: u64,
}

impl Acc {
    fn absorb(&mut self, other: Acc) {
        match (&mut self.counts, other.counts) {
            (Some(mine), Some(theirs)) => mine.merge(theirs),
            (mine @ None, theirs) => *mine = theirs,
            _ => {}
        }
        self.nodes += other.nodes;
        self.copies += other.copies;
    }
}

struct TreeExec<'a> {
    structure: &'a TreeStructure,
    noise: ResolvedNoise,
    /// Levels whose sibling count is below this fan out in parallel.
    parallel_width_cap: u64,
}

impl TreeExec<'_> {
    fn apply_slice_noisy(
        &self,
        state: &mut Statevector,
        slice: &Circuit,
        stream: &mut RandomStream,
    ) -> Result<()> {
        for gate in slice.gates() {
            apply_gate(state, gate)?;
            let location = self.noise.for_kind(&gate.kind);
            if location.kraus.is_empty() {
                continue;
            }
            for &q in gate.qubits() {
                for kraus in &location.kraus {
                    apply_kraus_step(state, q, kraus, stream)?;
                }
            }
        }
        Ok(())
    }

    /// Execute one node: evolve the owned state through `slices[level]`,
    /// then either sample a leaf outcome or expand the children.
    fn run_node(
        &self,
        mut state: Statevector,
        level: usize,
        path_seed: u64,
        level_width: u64,
    ) -> Result<Acc> {
        let mut stream = RandomStream::new(path_seed);
        self.apply_slice_noisy(&mut state, &self.structure.slices[level], &mut stream)?;
        if level + 1 == self.structure.k() {
            let mut outcome = sample_outcome(&state, &mut stream);
            if let Some((p01, p10)) = self.noise.readout() {
                outcome =
                    apply_readout_error_index(outcome, state.n_qubits(), p01, p10, &mut stream);
            }
            drop(state);
            let mut counts = Counts::new(self.structure.n_qubits());
            counts.record(outcome);
            Ok(Acc {
                counts: Some(counts),
                nodes: 1,
                copies: 0,
            })
        } else {
            let mut acc = self.run_children(state, level + 1, path_seed, level_width)?;
            acc.nodes += 1;
            Ok(acc)
        }
    }

    /// Fan a parent state out to its `arities[level]` children. All children
    /// but the last copy the parent; the last consumes it in place.
    fn run_children(
        &self,
        parent: Statevector,
        level: usize,
        parent_seed: u64,
        parent_width: u64,
    ) -> Result<Acc> {
        let arity = self.structure.arities[level];
        let width = parent_width * arity;
        let mut acc = Acc {
            copies: arity - 1,
            ..Acc::default()
        };
        if arity > 1 && parent_width < self.parallel_width_cap {
            let head: Vec<Acc> = (0..arity - 1)
                .into_par_iter()
                .map(|j| {
                    let child = copy_state(&parent)?;
                    self.run_node(child, level, child_seed(parent_seed, level, j), width)
                })
                .collect::<Result<Vec<_>>>()?;
            for part in head {
                acc.absorb(part);
            }
        } else {
            for j in 0..arity - 1 {
                let child = copy_state(&parent)?;
                acc.absorb(self.run_node(
                    child,
                    level,
                    child_seed(parent_seed, level, j),
                    width,
                )?);
            }
        }
        acc.absorb(self.run_node(
            parent,
            level,
            child_seed(parent_seed, level, arity - 1),
            width,
        )?);
        Ok(acc)
    }
}

/// Execute a simulation tree: depth-first traversal with state reuse, one
/// sampled outcome per leaf, readout flips applied classically. Counts are
/// deterministic in `(structure, model, master_seed)` regardless of the
/// worker count.
pub fn execute_tree(
    structure: &TreeStructure,
    model: &NoiseModel,
    master_seed: u64,
    budget: &MemoryBudget,
) -> Result<TreeRunResult> {
    let start = Instant::now();
    let needed = structure.k() as u64 + 1;
    let available = budget.max_live_states(structure.n_qubits());
    if available < needed {
        return Err(Error::Capacity(format!(
            "tree depth needs {needed} live states of {} qubits but the budget holds {available}",
            structure.n_qubits()
        )));
    }
    let exec = TreeExec {
        structure,
        noise: model.resolve()?,
        parallel_width_cap: 4 * rayon::current_num_threads().max(1) as u64,
    };
    let root = init_state(structure.n_qubits(), budget)?;
    let acc = exec.run_children(root, 0, root_seed(master_seed), 1)?;
    let counts = acc
        .counts
        .unwrap_or_else(|| Counts::new(structure.n_qubits()));
    debug_assert_eq!(counts.total(), structure.total_outcomes());
    debug_assert_eq!(acc.nodes, subcircuit_nodes(structure.arities()));
    Ok(TreeRunResult {
        counts,
        nodes_executed: acc.nodes,
        states_copied: acc.copies,
        wall_time: start.elapsed(),
        seed: master_seed,
    })
}

/// Flat baseline: `n_shots` independent full-circuit trajectories, one
/// outcome each. Equivalent to a single-slice tree with arities `(N)`.
pub fn execute_baseline(
    circuit: &Circuit,
    model: &NoiseModel,
    n_shots: u64,
    master_seed: u64,
    budget: &MemoryBudget,
) -> Result<TreeRunResult> {
    if n_shots == 0 {
        return Err(Error::InvalidArgument("need at least one shot".into()));
    }
    let structure = TreeStructure::new(vec![circuit.clone()], vec![n_shots])?;
    execute_tree(&structure, model, master_seed, budget)
}
