//! Dense statevector storage, gate application kernels, and measurement
//! sampling.
//!
//! Gates are applied by in-place amplitude-pair updates (stride `2^target`);
//! the full `2^n x 2^n` unitary is never materialized. Every allocation of
//! amplitude storage is charged against a shared [`MemoryBudget`] so that a
//! simulation cannot exceed its configured footprint no matter how many
//! intermediate states are alive.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gates::{Gate, GateKind};
use crate::rng::RandomStream;

pub const DEFAULT_MEMORY_BUDGET_BYTES: u64 = 4 * 1024 * 1024 * 1024;
pub const DEFAULT_MAX_QUBITS: usize = 26;
/// Bytes per complex double amplitude.
pub const BYTES_PER_AMPLITUDE: u64 = 16;

#[derive(Debug)]
struct BudgetInner {
    max_amplitudes: u64,
    max_qubits: usize,
    live: AtomicU64,
}

/// Shared cap on the total number of live amplitudes across all states.
#[derive(Debug, Clone)]
pub struct MemoryBudget {
    inner: Arc<BudgetInner>,
}

impl MemoryBudget {
    pub fn from_bytes(bytes: u64) -> Self {
        Self::with_limits(bytes, DEFAULT_MAX_QUBITS)
    }

    pub fn with_limits(bytes: u64, max_qubits: usize) -> Self {
        Self {
            inner: Arc::new(BudgetInner {
                max_amplitudes: bytes / BYTES_PER_AMPLITUDE,
                max_qubits,
                live: AtomicU64::new(0),
            }),
        }
    }

    pub fn max_qubits(&self) -> usize {
        self.inner.max_qubits
    }

    /// How many full statevectors of the given width fit in the budget.
    pub fn max_live_states(&self, n_qubits: usize) -> u64 {
        self.inner.max_amplitudes >> n_qubits
    }

    pub fn live_amplitudes(&self) -> u64 {
        self.inner.live.load(Ordering::Relaxed)
    }

    fn reserve(&self, amplitudes: u64) -> Result<()> {
        let prev = self.inner.live.fetch_add(amplitudes, Ordering::Relaxed);
        if prev + amplitudes > self.inner.max_amplitudes {
            self.inner.live.fetch_sub(amplitudes, Ordering::Relaxed);
            return Err(Error::Capacity(format!(
                "allocating {amplitudes} amplitudes would exceed the budget of {} ({} already live)",
                self.inner.max_amplitudes, prev
            )));
        }
        Ok(())
    }

    fn release(&self, amplitudes: u64) {
        self.inner.live.fetch_sub(amplitudes, Ordering::Relaxed);
    }
}

impl Default for MemoryBudget {
    fn default() -> Self {
        Self::from_bytes(DEFAULT_MEMORY_BUDGET_BYTES)
    }
}

/// A pure quantum state: `2^n` complex amplitudes, little-endian qubit order.
#[derive(Debug)]
pub struct Statevector {
    n_qubits: usize,
    amps: Vec<Complex64>,
    budget: MemoryBudget,
}

impl Drop for Statevector {
    fn drop(&mut self) {
        self.budget.release(self.amps.len() as u64);
    }
}

/// All-zeros initial state `|0...0>`.
pub fn init_state(n_qubits: usize, budget: &MemoryBudget) -> Result<Statevector> {
    if n_qubits == 0 {
        return Err(Error::InvalidArgument("state needs at least one qubit".into()));
    }
    if n_qubits > budget.max_qubits() {
        return Err(Error::Capacity(format!(
            "{n_qubits} qubits exceeds the configured maximum of {}",
            budget.max_qubits()
        )));
    }
    let len = 1u64 << n_qubits;
    budget.reserve(len)?;
    let mut amps = vec![Complex64::new(0.0, 0.0); len as usize];
    amps[0] = Complex64::new(1.0, 0.0);
    Ok(Statevector {
        n_qubits,
        amps,
        budget: budget.clone(),
    })
}

/// Deep copy. Checked against the memory budget, like any allocation.
pub fn copy_state(state: &Statevector) -> Result<Statevector> {
    state.try_clone()
}

impl Statevector {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn budget(&self) -> &MemoryBudget {
        &self.budget
    }

    pub fn try_clone(&self) -> Result<Statevector> {
        self.budget.reserve(self.amps.len() as u64)?;
        Ok(Statevector {
            n_qubits: self.n_qubits,
            amps: self.amps.clone(),
            budget: self.budget.clone(),
        })
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn scale(&mut self, factor: f64) {
        for a in &mut self.amps {
            *a *= factor;
        }
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n_qubits {
            return Err(Error::QubitOutOfRange {
                index: q,
                n_qubits: self.n_qubits,
            });
        }
        Ok(())
    }

    /// Apply an arbitrary 2x2 matrix to one qubit. Used by both unitary
    /// gates and (non-unitary) Kraus operators.
    pub fn apply_1q_matrix(&mut self, q: usize, m: &[[Complex64; 2]; 2]) -> Result<()> {
        self.check_qubit(q)?;
        let step = 1usize << q;
        let len = self.amps.len();
        let mut base = 0usize;
        while base < len {
            for i in base..base + step {
                let a = self.amps[i];
                let b = self.amps[i + step];
                self.amps[i] = m[0][0] * a + m[0][1] * b;
                self.amps[i + step] = m[1][0] * a + m[1][1] * b;
            }
            base += step << 1;
        }
        Ok(())
    }

    /// Squared norm of `M_q |psi>` without mutating the state.
    pub fn norm_sqr_after_1q(&self, q: usize, m: &[[Complex64; 2]; 2]) -> Result<f64> {
        self.check_qubit(q)?;
        let step = 1usize << q;
        let len = self.amps.len();
        let mut acc = 0.0;
        let mut base = 0usize;
        while base < len {
            for i in base..base + step {
                let a = self.amps[i];
                let b = self.amps[i + step];
                acc += (m[0][0] * a + m[0][1] * b).norm_sqr();
                acc += (m[1][0] * a + m[1][1] * b).norm_sqr();
            }
            base += step << 1;
        }
        Ok(acc)
    }

    fn apply_diagonal_1q(&mut self, q: usize, d0: Complex64, d1: Complex64) {
        let step = 1usize << q;
        let len = self.amps.len();
        let mut base = 0usize;
        while base < len {
            if d0 != Complex64::new(1.0, 0.0) {
                for i in base..base + step {
                    self.amps[i] *= d0;
                }
            }
            for i in base + step..base + (step << 1) {
                self.amps[i] *= d1;
            }
            base += step << 1;
        }
    }

    fn apply_x(&mut self, q: usize) {
        let step = 1usize << q;
        let len = self.amps.len();
        let mut base = 0usize;
        while base < len {
            for i in base..base + step {
                self.amps.swap(i, i + step);
            }
            base += step << 1;
        }
    }

    fn apply_cx(&mut self, control: usize, target: usize) {
        let cm = 1usize << control;
        let tm = 1usize << target;
        for i in 0..self.amps.len() {
            if i & cm != 0 && i & tm == 0 {
                self.amps.swap(i, i | tm);
            }
        }
    }

    fn apply_cphase(&mut self, a: usize, b: usize, phase: Complex64) {
        let mask = (1usize << a) | (1usize << b);
        for i in 0..self.amps.len() {
            if i & mask == mask {
                self.amps[i] *= phase;
            }
        }
    }

    fn apply_swap(&mut self, a: usize, b: usize) {
        let am = 1usize << a;
        let bm = 1usize << b;
        for i in 0..self.amps.len() {
            if i & am != 0 && i & bm == 0 {
                self.amps.swap(i, i ^ am ^ bm);
            }
        }
    }
}

/// Apply a gate in place. Norm is preserved to machine precision per gate.
pub fn apply_gate(state: &mut Statevector, gate: &Gate) -> Result<()> {
    for &q in gate.qubits() {
        state.check_qubit(q)?;
    }
    let qs = gate.qubits();
    match gate.kind {
        GateKind::X => state.apply_x(qs[0]),
        GateKind::Z => state.apply_diagonal_1q(qs[0], Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)),
        GateKind::S => state.apply_diagonal_1q(qs[0], Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)),
        GateKind::Sdg => state.apply_diagonal_1q(qs[0], Complex64::new(1.0, 0.0), Complex64::new(0.0, -1.0)),
        GateKind::T => state.apply_diagonal_1q(
            qs[0],
            Complex64::new(1.0, 0.0),
            Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4),
        ),
        GateKind::Tdg => state.apply_diagonal_1q(
            qs[0],
            Complex64::new(1.0, 0.0),
            Complex64::from_polar(1.0, -std::f64::consts::FRAC_PI_4),
        ),
        GateKind::Rz(theta) => state.apply_diagonal_1q(
            qs[0],
            Complex64::from_polar(1.0, -theta / 2.0),
            Complex64::from_polar(1.0, theta / 2.0),
        ),
        GateKind::Cx => state.apply_cx(qs[0], qs[1]),
        GateKind::Cz => state.apply_cphase(qs[0], qs[1], Complex64::new(-1.0, 0.0)),
        GateKind::Cp(theta) => state.apply_cphase(qs[0], qs[1], Complex64::from_polar(1.0, theta)),
        GateKind::Swap => state.apply_swap(qs[0], qs[1]),
        _ => {
            // H, Y, Rx, Ry, U: dense 2x2 path.
            let m = match crate::gates::gate_matrix(&gate.kind) {
                crate::gates::GateMatrix::One(m) => m,
                crate::gates::GateMatrix::Two(_) => unreachable!("two-qubit kinds handled above"),
            };
            state.apply_1q_matrix(qs[0], &m)?;
        }
    }
    Ok(())
}

/// Sample one basis state with probability `|amplitude|^2`, consuming one
/// draw from the stream. The state must be normalized.
pub fn sample_outcome(state: &Statevector, rng: &mut RandomStream) -> u64 {
    let u = rng.next_f64();
    let mut cum = 0.0;
    for (i, a) in state.amplitudes().iter().enumerate() {
        cum += a.norm_sqr();
        if u < cum {
            return i as u64;
        }
    }
    // Rounding slack: fall back to the last nonzero amplitude.
    state
        .amplitudes()
        .iter()
        .rposition(|a| a.norm_sqr() > 0.0)
        .unwrap_or(0) as u64
}

/// Render a basis-state index as a measurement bitstring, qubit 0 rightmost.
pub fn bitstring(index: u64, n_qubits: usize) -> String {
    let mut s = String::with_capacity(n_qubits);
    for q in (0..n_qubits).rev() {
        s.push(if index >> q & 1 == 1 { '1' } else { '0' });
    }
    s
}

/// Parse a measurement bitstring back to a basis-state index.
pub fn bitstring_index(bits: &str) -> Result<u64> {
    let mut index = 0u64;
    for ch in bits.chars() {
        index = (index << 1)
            | match ch {
                '0' => 0,
                '1' => 1,
                _ => {
                    return Err(Error::InvalidArgument(format!(
                        "bitstring may only contain 0/1, got `{bits}`"
                    )))
                }
            };
    }
    Ok(index)
}

/// Measurement outcome tally: basis-state index to count.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Counts {
    n_qubits: usize,
    counts: BTreeMap<u64, u64>,
}

impl Counts {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            counts: BTreeMap::new(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn record(&mut self, index: u64) {
        *self.counts.entry(index).or_insert(0) += 1;
    }

    pub fn merge(&mut self, other: Counts) {
        debug_assert_eq!(self.n_qubits, other.n_qubits);
        for (k, v) in other.counts {
            *self.counts.entry(k).or_insert(0) += v;
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn get(&self, bits: &str) -> u64 {
        bitstring_index(bits)
            .ok()
            .and_then(|i| self.counts.get(&i).copied())
            .unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.counts.iter().map(|(&k, &v)| (k, v))
    }

    /// Bitstring-keyed view, sorted by basis index.
    pub fn to_string_map(&self) -> BTreeMap<String, u64> {
        self.counts
            .iter()
            .map(|(&k, &v)| (bitstring(k, self.n_qubits), v))
            .collect()
    }
}
