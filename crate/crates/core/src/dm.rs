//! Exact density-matrix evolution for small circuits.
//!
//! This is the ground-truth oracle for trajectory correctness: one full
//! evolution yields the exact noisy output distribution, at the price of
//! `2^n x 2^n` storage. It is deliberately implemented over dense
//! full-space matrices built by entrywise embedding, a route independent of
//! the statevector engine's amplitude-pair kernels, so disagreement between
//! the two implicates one side.

use num_complex::Complex64;

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::gates::{gate_matrix, Gate};
use crate::metrics::Distribution;
use crate::noise::NoiseModel;

/// Widths above this are refused; the oracle exists for tests, not scale.
pub const DM_MAX_QUBITS: usize = 6;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// A mixed state: Hermitian, trace-1, positive semidefinite matrix.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    n_qubits: usize,
    /// Row-major `dim x dim`.
    data: Vec<Complex64>,
}

impl DensityMatrix {
    /// `|0...0><0...0|`.
    pub fn ground(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > DM_MAX_QUBITS {
            return Err(Error::Capacity(format!(
                "density-matrix oracle supports 1..={DM_MAX_QUBITS} qubits, got {n_qubits}"
            )));
        }
        let dim = 1 << n_qubits;
        let mut data = vec![ZERO; dim * dim];
        data[0] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits, data })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim() + col]
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim()).map(|i| self.entry(i, i)).sum()
    }

    /// Diagonal as real probabilities.
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.entry(i, i).re).collect()
    }

    /// Largest deviation from Hermitian symmetry.
    pub fn hermiticity_defect(&self) -> f64 {
        let dim = self.dim();
        let mut worst = 0.0f64;
        for r in 0..dim {
            for c in r..dim {
                let d = (self.entry(r, c) - self.entry(c, r).conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }
}

/// Dense full-space matrix of a gate, built entrywise: rows and columns agree
/// on every untouched qubit, and the touched bits index into the 2x2 or 4x4
/// gate matrix.
fn embed_gate(gate: &Gate, n_qubits: usize) -> Vec<Complex64> {
    let dim = 1usize << n_qubits;
    let m = gate_matrix(&gate.kind);
    let qs = gate.qubits();
    let touched_mask: usize = qs.iter().map(|&q| 1usize << q).sum();
    let sub_index = |state: usize| -> usize {
        // matrix convention: index = 2*bit(first operand) + bit(second)
        match qs.len() {
            1 => state >> qs[0] & 1,
            _ => ((state >> qs[0] & 1) << 1) | (state >> qs[1] & 1),
        }
    };
    let mut full = vec![ZERO; dim * dim];
    for row in 0..dim {
        for col in 0..dim {
            if row & !touched_mask == col & !touched_mask {
                full[row * dim + col] = m.at(sub_index(row), sub_index(col));
            }
        }
    }
    full
}

/// Dense full-space embedding of a single-qubit operator at `qubit`.
fn embed_1q(op: &[[Complex64; 2]; 2], qubit: usize, n_qubits: usize) -> Vec<Complex64> {
    let dim = 1usize << n_qubits;
    let mask = 1usize << qubit;
    let mut full = vec![ZERO; dim * dim];
    for row in 0..dim {
        for col in 0..dim {
            if row & !mask == col & !mask {
                full[row * dim + col] = op[row >> qubit & 1][col >> qubit & 1];
            }
        }
    }
    full
}

fn matmul(a: &[Complex64], b: &[Complex64], dim: usize) -> Vec<Complex64> {
    let mut out = vec![ZERO; dim * dim];
    for r in 0..dim {
        for k in 0..dim {
            let av = a[r * dim + k];
            if av.norm_sqr() == 0.0 {
                continue;
            }
            for c in 0..dim {
                out[r * dim + c] += av * b[k * dim + c];
            }
        }
    }
    out
}

fn dagger(a: &[Complex64], dim: usize) -> Vec<Complex64> {
    let mut out = vec![ZERO; dim * dim];
    for r in 0..dim {
        for c in 0..dim {
            out[c * dim + r] = a[r * dim + c].conj();
        }
    }
    out
}

/// `M rho M†` over dense matrices.
fn conjugate(rho: &[Complex64], m: &[Complex64], dim: usize) -> Vec<Complex64> {
    matmul(&matmul(m, rho, dim), &dagger(m, dim), dim)
}

/// Evolve the ground state through the circuit: per gate, the unitary
/// conjugation followed by each after-gate channel's exact superoperator
/// `sum_i K rho K†` on each touched qubit, in the same attachment order as
/// the trajectory engine.
pub fn evolve_density(circuit: &Circuit, model: &NoiseModel) -> Result<DensityMatrix> {
    let mut rho = DensityMatrix::ground(circuit.n_qubits())?;
    let dim = rho.dim();
    let resolved = model.resolve()?;
    for gate in circuit.gates() {
        let u = embed_gate(gate, circuit.n_qubits());
        rho.data = conjugate(&rho.data, &u, dim);
        let location = resolved.for_kind(&gate.kind);
        for &q in gate.qubits() {
            for kraus in &location.kraus {
                let mut next = vec![ZERO; dim * dim];
                for op in kraus.operators() {
                    let k = embed_1q(op, q, circuit.n_qubits());
                    let term = conjugate(&rho.data, &k, dim);
                    for (acc, t) in next.iter_mut().zip(term) {
                        *acc += t;
                    }
                }
                rho.data = next;
            }
        }
    }
    Ok(rho)
}

/// Exact output distribution: the diagonal of rho, convolved analytically
/// with the independent per-bit readout flip matrix when one is configured.
pub fn output_distribution(
    rho: &DensityMatrix,
    readout: Option<(f64, f64)>,
) -> Result<Distribution> {
    let mut probs = rho.diagonal();
    if let Some((p01, p10)) = readout {
        for q in 0..rho.n_qubits() {
            let mask = 1usize << q;
            for i in 0..probs.len() {
                if i & mask == 0 {
                    let p0 = probs[i];
                    let p1 = probs[i | mask];
                    probs[i] = (1.0 - p01) * p0 + p10 * p1;
                    probs[i | mask] = p01 * p0 + (1.0 - p10) * p1;
                }
            }
        }
    }
    Distribution::new(
        rho.n_qubits(),
        probs
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 1e-15)
            .map(|(i, &p)| (i as u64, p))
            .collect(),
    )
}
