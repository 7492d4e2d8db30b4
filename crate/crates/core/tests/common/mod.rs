//! Helpers shared by the integration suites.
#![allow(dead_code)]

use num_complex::Complex64;
use tqsim::gates::{Gate, GateKind, GateMatrix};
use tqsim::rng::RandomStream;
use tqsim::Circuit;

/// Deterministic random circuit over the full gate set.
pub fn random_circuit(n_qubits: usize, n_gates: usize, seed: u64) -> Circuit {
    let mut rng = RandomStream::new(seed);
    let mut c = Circuit::new(n_qubits, vec![]).unwrap();
    for _ in 0..n_gates {
        let q = (rng.next_u64() as usize) % n_qubits;
        let other = if n_qubits > 1 {
            (q + 1 + (rng.next_u64() as usize) % (n_qubits - 1)) % n_qubits
        } else {
            q
        };
        let angle = (rng.next_f64() - 0.5) * 2.0 * std::f64::consts::PI;
        let gate = match rng.next_u64() % 12 {
            0 => Gate::single(GateKind::X, q),
            1 => Gate::single(GateKind::Y, q),
            2 => Gate::single(GateKind::Z, q),
            3 => Gate::single(GateKind::H, q),
            4 => Gate::single(GateKind::S, q),
            5 => Gate::single(GateKind::T, q),
            6 => Gate::single(GateKind::Rx(angle), q),
            7 => Gate::single(GateKind::Ry(angle), q),
            8 => Gate::single(GateKind::Rz(angle), q),
            9 if n_qubits > 1 => Gate::pair(GateKind::Cx, q, other),
            10 if n_qubits > 1 => Gate::pair(GateKind::Cp(angle), q, other),
            11 if n_qubits > 1 => Gate::pair(GateKind::Swap, q, other),
            _ => Gate::single(GateKind::U(angle, angle * 0.7, angle * 0.3), q),
        };
        c.push(gate).unwrap();
    }
    c
}

/// Full `2^n x 2^n` unitary of one gate, built entrywise: independent of the
/// engine's amplitude-pair kernels.
pub fn full_gate_matrix(gate: &Gate, n_qubits: usize) -> Vec<Vec<Complex64>> {
    let dim = 1usize << n_qubits;
    let m: GateMatrix = tqsim::gate_matrix(&gate.kind);
    let qs = gate.qubits();
    let touched: usize = qs.iter().map(|&q| 1usize << q).sum();
    let sub = |state: usize| -> usize {
        match qs.len() {
            1 => state >> qs[0] & 1,
            _ => ((state >> qs[0] & 1) << 1) | (state >> qs[1] & 1),
        }
    };
    let mut full = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
    for (r, row) in full.iter_mut().enumerate() {
        for (c, v) in row.iter_mut().enumerate() {
            if r & !touched == c & !touched {
                *v = m.at(sub(r), sub(c));
            }
        }
    }
    full
}

/// Apply the full-matrix product of a circuit to `|0...0>`: the brute-force
/// oracle for the statevector engine.
pub fn full_matrix_simulate(circuit: &Circuit) -> Vec<Complex64> {
    let dim = 1usize << circuit.n_qubits();
    let mut v = vec![Complex64::new(0.0, 0.0); dim];
    v[0] = Complex64::new(1.0, 0.0);
    for gate in circuit.gates() {
        let m = full_gate_matrix(gate, circuit.n_qubits());
        let mut out = vec![Complex64::new(0.0, 0.0); dim];
        for (r, row) in m.iter().enumerate() {
            for (c, mv) in row.iter().enumerate() {
                if mv.norm_sqr() > 0.0 {
                    out[r] += mv * v[c];
                }
            }
        }
        v = out;
    }
    v
}
