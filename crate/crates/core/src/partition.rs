//! Dynamic circuit partitioning: slice boundaries, the first-subcircuit
//! shot count, trailing arities, and the copy-cost and memory constraints.
//!
//! The planner keeps the first subcircuit as short as the state-copy cost
//! allows, sizes its shot count so the observed error proportion is within a
//! 5% margin at 95% confidence, then splits the remainder into as many
//! equal slices as admit an arity of at least 2 each.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Partition};
use crate::error::{Error, Result};
use crate::gates::{Gate, GateKind};
use crate::noise::NoiseModel;
use crate::state::{init_state, MemoryBudget, BYTES_PER_AMPLITUDE};
use crate::tree::speedup_from_arities;

/// Time to copy one statevector, expressed in units of single-gate
/// application time, averaged over the profiled widths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CopyCostProfile {
    pub gates_equivalent: f64,
    /// Per-width copy/gate time ratios the average was taken over.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub per_width: BTreeMap<usize, f64>,
}

impl CopyCostProfile {
    pub fn uniform(gates_equivalent: f64) -> Result<Self> {
        if !gates_equivalent.is_finite() || gates_equivalent <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "copy cost must be positive and finite, got {gates_equivalent}"
            )));
        }
        Ok(Self {
            gates_equivalent,
            per_width: BTreeMap::new(),
        })
    }
}

/// Memory limits as seen by the planner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceLimits {
    pub memory_budget_bytes: u64,
}

impl ResourceLimits {
    pub fn new(memory_budget_bytes: u64) -> Self {
        Self {
            memory_budget_bytes,
        }
    }

    /// How many full statevectors of the given width fit in the budget.
    pub fn max_live_states(&self, n_qubits: usize) -> u64 {
        (self.memory_budget_bytes / BYTES_PER_AMPLITUDE) >> n_qubits
    }
}

impl Default for ResourceLimits {
    fn default() -> Self {
        Self::new(crate::state::DEFAULT_MEMORY_BUDGET_BYTES)
    }
}

/// The planner's output: slice boundaries, per-level arities, and the
/// node-ratio speedup prediction.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionPlan {
    pub partition: Partition,
    pub arities: Vec<u64>,
    pub predicted_speedup: f64,
    pub first_error_rate: f64,
}

impl PartitionPlan {
    /// Baseline: one slice, every shot in the first level, no reuse.
    pub fn is_baseline(&self) -> bool {
        self.arities.len() == 1
    }

    pub fn total_outcomes(&self) -> u64 {
        self.arities.iter().product()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "boundaries": self.partition.boundaries(),
            "arities": self.arities,
            "predicted_speedup": self.predicted_speedup,
            "first_error_rate": self.first_error_rate,
        })
    }
}

// ---------------------------------------------------------------------------
// Copy-cost profiling
// ---------------------------------------------------------------------------

/// An operation the profiler can time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileOp {
    CopyState { n_qubits: usize },
    ApplyGate { n_qubits: usize },
}

/// Timing source for profiling. Injected in tests so planning stays
/// deterministic and hardware-independent.
pub trait OpTimer {
    /// Median seconds per single operation over `reps` repetitions.
    fn median_seconds(&mut self, op: ProfileOp, reps: usize) -> Result<f64>;
}

/// Wall-clock timer that really performs the operations.
pub struct RealTimer {
    budget: MemoryBudget,
}

impl RealTimer {
    pub fn new() -> Self {
        Self {
            budget: MemoryBudget::default(),
        }
    }
}

impl Default for RealTimer {
    fn default() -> Self {
        Self::new()
    }
}

impl OpTimer for RealTimer {
    fn median_seconds(&mut self, op: ProfileOp, reps: usize) -> Result<f64> {
        let n_qubits = match op {
            ProfileOp::CopyState { n_qubits } | ProfileOp::ApplyGate { n_qubits } => n_qubits,
        };
        let mut state = init_state(n_qubits, &self.budget)?;
        let h = Gate::single(GateKind::H, 0);
        crate::state::apply_gate(&mut state, &h)?;
        let mut samples = Vec::with_capacity(reps);
        // warmup
        for _ in 0..2 {
            match op {
                ProfileOp::CopyState { .. } => drop(state.try_clone()?),
                ProfileOp::ApplyGate { .. } => crate::state::apply_gate(&mut state, &h)?,
            }
        }
        for _ in 0..reps {
            let start = Instant::now();
            match op {
                ProfileOp::CopyState { .. } => {
                    let copy = state.try_clone()?;
                    samples.push(start.elapsed().as_secs_f64());
                    drop(copy);
                }
                ProfileOp::ApplyGate { .. } => {
                    crate::state::apply_gate(&mut state, &h)?;
                    samples.push(start.elapsed().as_secs_f64());
                }
            }
        }
        samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(samples[samples.len() / 2])
    }
}

/// Measure the copy/gate time ratio per width and average across widths.
pub fn profile_copy_cost_with(
    timer: &mut dyn OpTimer,
    widths: &[usize],
    reps: usize,
) -> Result<CopyCostProfile> {
    if reps < 10 {
        return Err(Error::InvalidArgument(format!(
            "profiling needs reps >= 10, got {reps}"
        )));
    }
    if widths.is_empty() {
        return Err(Error::InvalidArgument("profiling needs at least one width".into()));
    }
    let mut per_width = BTreeMap::new();
    for &n_qubits in widths {
        let copy = timer.median_seconds(ProfileOp::CopyState { n_qubits }, reps)?;
        let gate = timer.median_seconds(ProfileOp::ApplyGate { n_qubits }, reps)?;
        if !gate.is_finite() || gate <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "gate time measured as {gate} at width {n_qubits}; clock too coarse"
            )));
        }
        per_width.insert(n_qubits, copy / gate);
    }
    let mean = per_width.values().sum::<f64>() / per_width.len() as f64;
    Ok(CopyCostProfile {
        gates_equivalent: mean,
        per_width,
    })
}

/// Measure on the host with wall-clock timing.
pub fn profile_copy_cost(widths: &[usize], reps: usize) -> Result<CopyCostProfile> {
    profile_copy_cost_with(&mut RealTimer::new(), widths, reps)
}

// ---------------------------------------------------------------------------
// Shot allocation
// ---------------------------------------------------------------------------

/// Probability that at least one noise location in the slice inserts an
/// error operator: `1 - prod_i (1 - e_i)` over every per-touched-qubit
/// location.
pub fn first_subcircuit_error_rate(slice: &Circuit, model: &NoiseModel) -> Result<f64> {
    let resolved = model.resolve()?;
    let mut survive = 1.0f64;
    for gate in slice.gates() {
        let e = resolved.for_kind(&gate.kind).error_rate;
        for _ in gate.qubits() {
            survive *= 1.0 - e;
        }
    }
    Ok(1.0 - survive)
}

/// Sample size for estimating an error proportion `p_hat` within margin
/// `eps` at the confidence given by z-score `z`, with finite-population
/// correction for `n_total` shots. Clamped to `[1, n_total]`; `p_hat` is
/// clamped to 0.5, where the variance term peaks.
pub fn required_first_shots(p_hat: f64, n_total: u64, z: f64, eps: f64) -> u64 {
    let p = p_hat.clamp(0.0, 0.5);
    let num = z * z * p * (1.0 - p) / (eps * eps);
    let bound = num / (1.0 + num / n_total as f64);
    (bound.ceil() as u64).clamp(1, n_total)
}

pub const DEFAULT_Z_SCORE: f64 = 1.96;
pub const DEFAULT_MARGIN: f64 = 0.05;

/// Equal arity for the remaining subcircuits: `floor((N/A0)^(1/k))`,
/// computed in exact integer arithmetic.
pub fn rest_arity(n_total: u64, a0: u64, k: u32) -> u64 {
    debug_assert!(a0 >= 1 && k >= 1);
    // largest a with a^k * a0 <= n_total
    let fits = |a: u64| -> bool {
        let mut acc: u128 = a0 as u128;
        for _ in 0..k {
            acc = acc.saturating_mul(a as u128);
            if acc > n_total as u128 {
                return false;
            }
        }
        true
    };
    let mut a = (n_total as f64 / a0 as f64).powf(1.0 / k as f64).floor() as u64;
    // guard against floating-point off-by-one in either direction
    while a > 1 && !fits(a) {
        a -= 1;
    }
    while fits(a + 1) {
        a += 1;
    }
    a.max(1)
}

/// Extra knobs for [`plan_partition_with`].
#[derive(Debug, Clone, Copy, Default)]
pub struct PlanOptions {
    /// Use this first-level shot count instead of deriving it from the
    /// first-slice error rate.
    pub forced_a0: Option<u64>,
}

/// Plan with default options; see [`plan_partition_with`].
pub fn plan_partition(
    circuit: &Circuit,
    model: &NoiseModel,
    n_shots: u64,
    cost: &CopyCostProfile,
    limits: &ResourceLimits,
) -> Result<PartitionPlan> {
    plan_partition_with(circuit, model, n_shots, cost, limits, &PlanOptions::default())
}

/// Choose slice boundaries and arities for a simulation tree.
///
/// The first slice holds `max(1, round(copy cost))` gates; its shot count
/// comes from the sample-size bound on the slice's error rate. The remainder
/// is split into the largest `k` slices such that the equal trailing arity is
/// at least 2, every slice is at least the minimum length, and `k + 2` live
/// states fit in memory. Arities are topped up round-robin from the first
/// level until their product reaches `n_shots`. When no `k >= 1` qualifies
/// the baseline single-slice plan is returned.
pub fn plan_partition_with(
    circuit: &Circuit,
    model: &NoiseModel,
    n_shots: u64,
    cost: &CopyCostProfile,
    limits: &ResourceLimits,
    options: &PlanOptions,
) -> Result<PartitionPlan> {
    if circuit.n_gates() == 0 {
        return Err(Error::InvalidArgument("cannot plan an empty circuit".into()));
    }
    if n_shots == 0 {
        return Err(Error::InvalidArgument("need at least one shot".into()));
    }
    let n_gates = circuit.n_gates();
    let min_gates = (cost.gates_equivalent.round() as usize).max(1);

    let baseline = |first_error_rate: f64| -> Result<PartitionPlan> {
        Ok(PartitionPlan {
            partition: Partition::identity(),
            arities: vec![n_shots],
            predicted_speedup: 1.0,
            first_error_rate,
        })
    };

    let whole_rate = first_subcircuit_error_rate(circuit, model)?;
    if n_gates <= min_gates {
        return baseline(whole_rate);
    }

    let first_slice = Circuit::new(
        circuit.n_qubits(),
        circuit.gates()[..min_gates].to_vec(),
    )?;
    let first_error_rate = first_subcircuit_error_rate(&first_slice, model)?;
    let a0 = match options.forced_a0 {
        Some(v) => v.clamp(1, n_shots),
        None => required_first_shots(first_error_rate, n_shots, DEFAULT_Z_SCORE, DEFAULT_MARGIN),
    };

    let remainder = n_gates - min_gates;
    let max_live = limits.max_live_states(circuit.n_qubits());
    // upper bounds: slice length, memory, and arity feasibility (2^k <= N/A0)
    let k_len_cap = remainder / min_gates;
    let k_mem_cap = max_live.saturating_sub(2).min(usize::MAX as u64) as usize;
    let mut chosen_k = None;
    for k in (1..=k_len_cap.min(k_mem_cap).min(63)).rev() {
        if rest_arity(n_shots, a0, k as u32) >= 2 {
            chosen_k = Some(k);
            break;
        }
    }
    let Some(k) = chosen_k else {
        return baseline(whole_rate);
    };

    // near-equal remainder slices, lengths differing by at most one
    let base_len = remainder / k;
    let extra = remainder % k;
    let mut boundaries = Vec::with_capacity(k);
    let mut cursor = min_gates;
    for i in 0..k {
        boundaries.push(cursor);
        cursor += base_len + usize::from(i < extra);
    }
    debug_assert_eq!(cursor, n_gates);
    let partition = Partition::new(boundaries, n_gates)?;

    let a_rest = rest_arity(n_shots, a0, k as u32);
    let mut arities = vec![a0];
    arities.extend(std::iter::repeat_n(a_rest, k));
    // round-robin top-up from the first level until the product covers N
    let levels = arities.len();
    let mut i = 0usize;
    while arities.iter().product::<u64>() < n_shots {
        arities[i % levels] += 1;
        i += 1;
    }

    let outcomes: u64 = arities.iter().product();
    let predicted_speedup = speedup_from_arities(&arities, outcomes);
    Ok(PartitionPlan {
        partition,
        arities,
        predicted_speedup,
        first_error_rate,
    })
}
