//! Run orchestration and the machine-readable results document.
//!
//! This sits between the CLI / C API and the engine: given a parsed circuit,
//! a noise model, and run options, it executes the requested mode(s) and
//! assembles the results JSON. Counts keys are full-width bitstrings, qubit 0
//! rightmost. Everything except the `timing` section is deterministic in the
//! configuration and seed.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Partition};
use crate::error::{Error, Result};
use crate::metrics::{
    normalized_fidelity, qubit_error_frequency, Distribution,
};
use crate::noise::NoiseModel;
use crate::partition::{
    plan_partition_with, CopyCostProfile, PartitionPlan, PlanOptions, ResourceLimits,
};
use crate::state::{apply_gate, bitstring, init_state, MemoryBudget};
use crate::tree::{
    execute_baseline, execute_tree, speedup_from_arities, TreeRunResult, TreeStructure,
};

/// Ideal reference distributions are derived by an exact noise-free run up
/// to this width when not supplied explicitly.
pub const AUTO_IDEAL_MAX_QUBITS: usize = 20;

/// Conservative default for the state-copy cost in gate units when no
/// profile is supplied; measure the host with the `profile` command for
/// better plans.
pub const DEFAULT_COPY_COST_GATES: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunMode {
    Baseline,
    Tree,
    Both,
}

impl RunMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            RunMode::Baseline => "baseline",
            RunMode::Tree => "tree",
            RunMode::Both => "both",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "baseline" => Ok(RunMode::Baseline),
            "tree" => Ok(RunMode::Tree),
            "both" => Ok(RunMode::Both),
            other => Err(Error::InvalidArgument(format!(
                "mode must be baseline|tree|both, got `{other}`"
            ))),
        }
    }
}

/// Everything a run needs besides the circuit and noise model files.
#[derive(Debug, Clone)]
pub struct RunOptions {
    pub shots: u64,
    pub mode: RunMode,
    pub seed: u64,
    /// Explicit tree structure; when absent the planner decides.
    pub arities: Option<Vec<u64>>,
    pub boundaries: Option<Vec<usize>>,
    pub copy_cost: CopyCostProfile,
    pub memory_budget_bytes: u64,
    /// Ideal reference for fidelity metrics; when absent one is derived by
    /// an exact run if the circuit is narrow enough.
    pub ideal: Option<Distribution>,
}

impl RunOptions {
    pub fn new(shots: u64, mode: RunMode, seed: u64) -> Self {
        Self {
            shots,
            mode,
            seed,
            arities: None,
            boundaries: None,
            copy_cost: CopyCostProfile {
                gates_equivalent: DEFAULT_COPY_COST_GATES,
                per_width: BTreeMap::new(),
            },
            memory_budget_bytes: crate::state::DEFAULT_MEMORY_BUDGET_BYTES,
            ideal: None,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CircuitInfo {
    pub n_qubits: usize,
    pub n_gates: usize,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct TreeInfo {
    pub boundaries: Vec<usize>,
    pub arities: Vec<u64>,
    pub nodes_executed: u64,
    pub states_copied: u64,
}

#[derive(Debug, Default, Serialize, Deserialize)]
pub struct MetricsInfo {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub normalized_fidelity: Option<f64>,
    /// Both-mode extras: the baseline run's fidelity and the difference.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub normalized_fidelity_baseline: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub normalized_fidelity_delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub qubit_error_frequency: Option<Vec<f64>>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
pub struct TimingInfo {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub baseline_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tree_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measured_speedup: Option<f64>,
}

/// The results document; serializes to the stable results JSON schema.
#[derive(Debug, Serialize, Deserialize)]
pub struct ResultsDoc {
    pub circuit: CircuitInfo,
    pub mode: String,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tree: Option<TreeInfo>,
    pub counts: BTreeMap<String, u64>,
    pub metrics: MetricsInfo,
    pub timing: TimingInfo,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub predicted_speedup: Option<f64>,
}

impl ResultsDoc {
    pub fn to_json_pretty(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Derive the exact noise-free output distribution when feasible.
pub fn ideal_distribution(circuit: &Circuit, budget: &MemoryBudget) -> Result<Distribution> {
    if circuit.n_qubits() > AUTO_IDEAL_MAX_QUBITS {
        return Err(Error::InvalidArgument(format!(
            "auto-derived ideal distribution is limited to {AUTO_IDEAL_MAX_QUBITS} qubits; \
             supply one explicitly"
        )));
    }
    let mut state = init_state(circuit.n_qubits(), budget)?;
    for gate in circuit.gates() {
        apply_gate(&mut state, gate)?;
    }
    Ok(Distribution::from_statevector(&state))
}

/// Resolve the tree structure: explicit arities/boundaries or the planner.
/// Returns the structure and the predicted speedup.
fn resolve_structure(
    circuit: &Circuit,
    model: &NoiseModel,
    options: &RunOptions,
) -> Result<(TreeStructure, f64)> {
    match (&options.arities, &options.boundaries) {
        (Some(arities), boundaries) => {
            let product: u64 = arities.iter().product();
            if product < options.shots {
                return Err(Error::InvalidArgument(format!(
                    "explicit arities produce {product} outcomes, fewer than {} shots",
                    options.shots
                )));
            }
            let boundaries = match boundaries {
                Some(b) => b.clone(),
                None => {
                    // near-equal split into one slice per arity
                    let k = arities.len();
                    let n = circuit.n_gates();
                    if k > n.max(1) {
                        return Err(Error::InvalidArgument(format!(
                            "{k} slices requested for a {n}-gate circuit"
                        )));
                    }
                    let base = n / k;
                    let extra = n % k;
                    let mut cursor = 0usize;
                    let mut out = Vec::with_capacity(k.saturating_sub(1));
                    for i in 0..k - 1 {
                        cursor += base + usize::from(i < extra);
                        out.push(cursor);
                    }
                    out
                }
            };
            if boundaries.len() + 1 != arities.len() {
                return Err(Error::InvalidArgument(format!(
                    "{} boundaries imply {} slices but {} arities were given",
                    boundaries.len(),
                    boundaries.len() + 1,
                    arities.len()
                )));
            }
            let partition = Partition::new(boundaries, circuit.n_gates())?;
            let slices = crate::circuit::slice(circuit, &partition)?;
            let structure = TreeStructure::new(slices, arities.clone())?;
            let speedup = speedup_from_arities(arities, structure.total_outcomes());
            Ok((structure, speedup))
        }
        (None, Some(_)) => Err(Error::InvalidArgument(
            "boundaries without arities; give both or neither".into(),
        )),
        (None, None) => {
            let plan = plan_partition_with(
                circuit,
                model,
                options.shots,
                &options.copy_cost,
                &ResourceLimits::new(options.memory_budget_bytes),
                &PlanOptions::default(),
            )?;
            let speedup = plan.predicted_speedup;
            Ok((TreeStructure::from_plan(circuit, &plan)?, speedup))
        }
    }
}

/// Plan only; used by the `plan` subcommand.
pub fn plan_only(
    circuit: &Circuit,
    model: &NoiseModel,
    shots: u64,
    copy_cost: &CopyCostProfile,
    memory_budget_bytes: u64,
    forced_a0: Option<u64>,
) -> Result<PartitionPlan> {
    plan_partition_with(
        circuit,
        model,
        shots,
        copy_cost,
        &ResourceLimits::new(memory_budget_bytes),
        &PlanOptions { forced_a0 },
    )
}

/// Execute the configured mode(s) and assemble the results document.
pub fn run_simulation(
    circuit: &Circuit,
    model: &NoiseModel,
    options: &RunOptions,
) -> Result<ResultsDoc> {
    if options.shots == 0 {
        return Err(Error::InvalidArgument("need at least one shot".into()));
    }
    let budget = MemoryBudget::from_bytes(options.memory_budget_bytes);

    let mut tree_info = None;
    let mut timing = TimingInfo::default();
    let mut predicted_speedup = None;

    let baseline_result: Option<TreeRunResult> = match options.mode {
        RunMode::Baseline | RunMode::Both => {
            let r = execute_baseline(circuit, model, options.shots, options.seed, &budget)?;
            timing.baseline_s = Some(r.wall_time.as_secs_f64());
            Some(r)
        }
        RunMode::Tree => None,
    };
    let tree_result: Option<TreeRunResult> = match options.mode {
        RunMode::Tree | RunMode::Both => {
            let (structure, speedup) = resolve_structure(circuit, model, options)?;
            let r = execute_tree(&structure, model, options.seed, &budget)?;
            timing.tree_s = Some(r.wall_time.as_secs_f64());
            predicted_speedup = Some(speedup);
            tree_info = Some(TreeInfo {
                boundaries: structure
                    .slices()
                    .iter()
                    .take(structure.k() - 1)
                    .scan(0usize, |cursor, s| {
                        *cursor += s.n_gates();
                        Some(*cursor)
                    })
                    .collect(),
                arities: structure.arities().to_vec(),
                nodes_executed: r.nodes_executed,
                states_copied: r.states_copied,
            });
            Some(r)
        }
        RunMode::Baseline => None,
    };
    if let (Some(b), Some(t)) = (&timing.baseline_s, &timing.tree_s) {
        if *t > 0.0 {
            timing.measured_speedup = Some(b / t);
        }
    }

    // the reported counts are the mode's primary output: tree when present
    let primary = tree_result
        .as_ref()
        .or(baseline_result.as_ref())
        .expect("at least one mode ran");

    let ideal = match &options.ideal {
        Some(d) => Some(d.clone()),
        None if circuit.n_qubits() <= AUTO_IDEAL_MAX_QUBITS => {
            Some(ideal_distribution(circuit, &budget)?)
        }
        None => None,
    };

    let mut metrics = MetricsInfo::default();
    if let Some(ideal) = &ideal {
        let primary_dist = Distribution::from_counts(&primary.counts)?;
        // uniform ideal distributions make Eq-7 rescaling degenerate; report
        // no fidelity rather than failing the run
        match normalized_fidelity(ideal, &primary_dist) {
            Ok(f) => metrics.normalized_fidelity = Some(f),
            Err(Error::DegenerateIdeal) => {}
            Err(e) => return Err(e),
        }
        if options.mode == RunMode::Both {
            if let Some(b) = &baseline_result {
                let base_dist = Distribution::from_counts(&b.counts)?;
                match normalized_fidelity(ideal, &base_dist) {
                    Ok(fb) => {
                        metrics.normalized_fidelity_baseline = Some(fb);
                        if let Some(ft) = metrics.normalized_fidelity {
                            metrics.normalized_fidelity_delta = Some(ft - fb);
                        }
                    }
                    Err(Error::DegenerateIdeal) => {}
                    Err(e) => return Err(e),
                }
            }
        }
        if let Some(mode_index) = ideal.mode() {
            let reference = bitstring(mode_index, circuit.n_qubits());
            metrics.qubit_error_frequency =
                Some(qubit_error_frequency(&primary.counts, &reference)?);
        }
    }

    Ok(ResultsDoc {
        circuit: CircuitInfo {
            n_qubits: circuit.n_qubits(),
            n_gates: circuit.n_gates(),
        },
        mode: options.mode.as_str().to_string(),
        seed: options.seed,
        tree: tree_info,
        counts: primary.counts.to_string_map(),
        metrics,
        timing,
        predicted_speedup,
    })
}

/// Ideal-distribution JSON: `{"n_qubits": n, "probs": {"bits": p, ...}}`.
pub fn parse_ideal_json(text: &str) -> Result<Distribution> {
    #[derive(Deserialize)]
    struct IdealSchema {
        n_qubits: usize,
        probs: BTreeMap<String, f64>,
    }
    let schema: IdealSchema = serde_json::from_str(text)?;
    let mut probs = BTreeMap::new();
    for (bits, p) in schema.probs {
        probs.insert(crate::state::bitstring_index(&bits)?, p);
    }
    Distribution::new(schema.n_qubits, probs)
}
