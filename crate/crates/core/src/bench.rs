//! Deterministic generators for the benchmark circuit families.

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::gates::{Gate, GateKind};

use std::f64::consts::PI;

/// Quantum Fourier transform on `n` qubits: for each target from high to
/// low, H then controlled phases `pi/2^d` from each lower qubit, and a final
/// `floor(n/2)` swaps to restore bit order. With `prepend_hadamards`, `n`
/// leading H gates prepare the equal superposition so the ideal output is
/// `|0...0>`.
pub fn gen_qft(n: usize, prepend_hadamards: bool) -> Result<Circuit> {
    if n == 0 {
        return Err(Error::InvalidArgument("qft needs n >= 1".into()));
    }
    let mut c = Circuit::new(n, vec![])?;
    if prepend_hadamards {
        for q in 0..n {
            c.push(Gate::single(GateKind::H, q))?;
        }
    }
    for target in (0..n).rev() {
        c.push(Gate::single(GateKind::H, target))?;
        for control in (0..target).rev() {
            let d = target - control;
            c.push(Gate::pair(GateKind::Cp(PI / (1u64 << d) as f64), control, target))?;
        }
    }
    for q in 0..n / 2 {
        c.push(Gate::pair(GateKind::Swap, q, n - 1 - q))?;
    }
    Ok(c.with_measurement())
}

/// Bernstein-Vazirani oracle circuit: `n_data` data qubits plus one ancilla
/// (the highest qubit). Ideal measurement of the data qubits yields the
/// hidden string exactly; the ancilla reads out uniformly at random.
pub fn gen_bv(n_data: usize, hidden: &str) -> Result<Circuit> {
    if hidden.len() != n_data || n_data == 0 {
        return Err(Error::InvalidArgument(format!(
            "hidden string length {} must equal n_data {n_data} (>= 1)",
            hidden.len()
        )));
    }
    if hidden.chars().any(|c| c != '0' && c != '1') {
        return Err(Error::InvalidArgument("hidden string must be over 0/1".into()));
    }
    let ancilla = n_data;
    let mut c = Circuit::new(n_data + 1, vec![])?;
    c.push(Gate::single(GateKind::X, ancilla))?;
    for q in 0..=n_data {
        c.push(Gate::single(GateKind::H, q))?;
    }
    // hidden uses the bitstring convention: rightmost character is qubit 0
    for (i, ch) in hidden.chars().rev().enumerate() {
        if ch == '1' {
            c.push(Gate::pair(GateKind::Cx, i, ancilla))?;
        }
    }
    for q in 0..n_data {
        c.push(Gate::single(GateKind::H, q))?;
    }
    Ok(c.with_measurement())
}

/// GHZ state preparation: H on qubit 0 and a CX fan-out chain.
pub fn gen_ghz(n: usize) -> Result<Circuit> {
    if n < 2 {
        return Err(Error::InvalidArgument("ghz needs n >= 2".into()));
    }
    let mut c = Circuit::new(n, vec![])?;
    c.push(Gate::single(GateKind::H, 0))?;
    for q in 1..n {
        c.push(Gate::pair(GateKind::Cx, 0, q))?;
    }
    Ok(c.with_measurement())
}

/// Quantum phase estimation of the eigenvalue `exp(2*pi*i*phase)` of a
/// diagonal phase unitary, using `n_phase` counting qubits plus one
/// eigenstate qubit (the highest) prepared in `|1>`. The counting register
/// concentrates on the closest `n_phase`-bit fixed-point approximations of
/// `phase`; exactly representable phases read out deterministically.
pub fn gen_qpe(n_phase: usize, phase: f64) -> Result<Circuit> {
    if n_phase == 0 {
        return Err(Error::InvalidArgument("qpe needs n_phase >= 1".into()));
    }
    if !(0.0..1.0).contains(&phase) {
        return Err(Error::InvalidArgument(format!(
            "phase must be in [0, 1), got {phase}"
        )));
    }
    let eigen = n_phase;
    let mut c = Circuit::new(n_phase + 1, vec![])?;
    c.push(Gate::single(GateKind::X, eigen))?;
    for q in 0..n_phase {
        c.push(Gate::single(GateKind::H, q))?;
    }
    // controlled-U^(2^j): U = diag(1, e^{2 pi i phase}) is a pure phase, so
    // the controlled power is a single CP gate
    for j in 0..n_phase {
        let theta = 2.0 * PI * phase * (1u64 << j) as f64;
        c.push(Gate::pair(GateKind::Cp(theta), j, eigen))?;
    }
    // inverse QFT on the counting register: reversed gate order, negated angles
    let qft = gen_qft(n_phase, false)?;
    for gate in qft.gates().iter().rev() {
        let inverted = match gate.kind {
            GateKind::Cp(theta) => Gate::new(GateKind::Cp(-theta), gate.qubits().to_vec())?,
            _ => gate.clone(),
        };
        c.push(inverted)?;
    }
    Ok(c.with_measurement())
}

/// One or more QAOA Max-Cut layers over an edge list: H on every vertex,
/// then per layer `CX, RZ(2*gamma), CX` for each edge and `RX(2*beta)` on
/// every vertex.
pub fn gen_qaoa_maxcut(
    n_vertices: usize,
    edges: &[(usize, usize)],
    beta: f64,
    gamma: f64,
    p_layers: usize,
) -> Result<Circuit> {
    if n_vertices == 0 {
        return Err(Error::InvalidArgument("qaoa needs at least one vertex".into()));
    }
    if p_layers == 0 {
        return Err(Error::InvalidArgument("qaoa needs p_layers >= 1".into()));
    }
    for &(u, v) in edges {
        if u >= n_vertices || v >= n_vertices {
            return Err(Error::QubitOutOfRange {
                index: u.max(v),
                n_qubits: n_vertices,
            });
        }
        if u == v {
            return Err(Error::InvalidArgument(format!("self-loop edge ({u},{v})")));
        }
    }
    let mut c = Circuit::new(n_vertices, vec![])?;
    for q in 0..n_vertices {
        c.push(Gate::single(GateKind::H, q))?;
    }
    for _ in 0..p_layers {
        for &(u, v) in edges {
            c.push(Gate::pair(GateKind::Cx, u, v))?;
            c.push(Gate::single(GateKind::Rz(2.0 * gamma), v))?;
            c.push(Gate::pair(GateKind::Cx, u, v))?;
        }
        for q in 0..n_vertices {
            c.push(Gate::single(GateKind::Rx(2.0 * beta), q))?;
        }
    }
    Ok(c.with_measurement())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{apply_gate, init_state, MemoryBudget};
    use num_complex::Complex64;

    fn final_state(c: &Circuit) -> Vec<Complex64> {
        let budget = MemoryBudget::default();
        let mut s = init_state(c.n_qubits(), &budget).unwrap();
        for g in c.gates() {
            apply_gate(&mut s, g).unwrap();
        }
        s.amplitudes().to_vec()
    }

    #[test]
    fn qft_gate_count_formula() {
        for n in 1..=20 {
            let c = gen_qft(n, false).unwrap();
            assert_eq!(c.n_gates(), n + n * (n - 1) / 2 + n / 2, "n={n}");
            let with_prelude = gen_qft(n, true).unwrap();
            assert_eq!(with_prelude.n_gates(), c.n_gates() + n);
        }
        assert_eq!(gen_qft(3, false).unwrap().n_gates(), 7);
        assert_eq!(gen_qft(1, false).unwrap().n_gates(), 1);
    }

    #[test]
    fn qft_matches_discrete_fourier_matrix() {
        // Apply the circuit to each basis state and compare against
        // F[y][x] = exp(2 pi i x y / N) / sqrt(N).
        let n = 3;
        let dim = 1usize << n;
        for input in 0..dim {
            let mut c = Circuit::new(n, vec![]).unwrap();
            for q in 0..n {
                if input >> q & 1 == 1 {
                    c.push(Gate::single(GateKind::X, q)).unwrap();
                }
            }
            for g in gen_qft(n, false).unwrap().gates() {
                c.push(g.clone()).unwrap();
            }
            let amps = final_state(&c);
            let scale = 1.0 / (dim as f64).sqrt();
            for (y, amp) in amps.iter().enumerate() {
                let angle = 2.0 * PI * (input * y) as f64 / dim as f64;
                let expect = Complex64::from_polar(scale, angle);
                assert!(
                    (amp - expect).norm() < 1e-12,
                    "input {input}, output {y}: {amp} vs {expect}"
                );
            }
        }
    }

    #[test]
    fn qft_with_prelude_outputs_all_zeros() {
        let c = gen_qft(12, true).unwrap();
        let amps = final_state(&c);
        assert!((amps[0].norm_sqr() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn bv_gate_count_and_ideal_output() {
        let c = gen_bv(3, "111").unwrap();
        assert_eq!(c.n_gates(), 11);
        let zeros = gen_bv(3, "000").unwrap();
        assert_eq!(zeros.n_gates(), 8); // no oracle CX gates

        // data readout equals the hidden string; ancilla is in |->
        let hidden = "1011";
        let c = gen_bv(4, hidden).unwrap();
        let amps = final_state(&c);
        let data_mask = (1usize << 4) - 1;
        let hidden_idx = usize::from_str_radix(hidden, 2).unwrap();
        let mut support = std::collections::BTreeSet::new();
        for (i, a) in amps.iter().enumerate() {
            if a.norm_sqr() > 1e-12 {
                assert_eq!(i & data_mask, hidden_idx, "unexpected data bits in {i:b}");
                support.insert(i >> 4);
            }
        }
        assert_eq!(support.len(), 2, "ancilla spans both values");
    }

    #[test]
    fn ghz_counts_and_distribution() {
        for n in [2usize, 3, 5] {
            let c = gen_ghz(n).unwrap();
            assert_eq!(c.n_gates(), n);
        }
        let amps = final_state(&gen_ghz(3).unwrap());
        assert!((amps[0].norm_sqr() - 0.5).abs() < 1e-12);
        assert!((amps[7].norm_sqr() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn qpe_exact_phase_is_deterministic() {
        // phase 0.25 on 3 counting qubits: counting register reads 010.
        let c = gen_qpe(3, 0.25).unwrap();
        let amps = final_state(&c);
        // eigenstate qubit (q3) stays |1>; counting bits = 2
        let expect = (1usize << 3) | 0b010;
        for (i, a) in amps.iter().enumerate() {
            let p = a.norm_sqr();
            if i == expect {
                assert!((p - 1.0).abs() < 1e-9, "p({i:b}) = {p}");
            } else {
                assert!(p < 1e-9, "p({i:b}) = {p}");
            }
        }
    }

    #[test]
    fn qpe_one_third_peaks_at_171() {
        let c = gen_qpe(9, 1.0 / 3.0).unwrap();
        let amps = final_state(&c);
        let counting_mask = (1usize << 9) - 1;
        let mut best = (0usize, 0.0f64);
        for (i, a) in amps.iter().enumerate() {
            let p = a.norm_sqr();
            if p > best.1 {
                best = (i, p);
            }
        }
        assert_eq!(best.0 & counting_mask, 171);
        assert_eq!(best.0 >> 9, 1); // eigenstate qubit
    }

    #[test]
    fn qpe_single_counting_qubit_zero_phase() {
        let c = gen_qpe(1, 0.0).unwrap();
        let amps = final_state(&c);
        // counting bit 0, eigenstate qubit 1 -> index 0b10
        assert!((amps[2].norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn qaoa_gate_count_and_uniform_at_zero_angles() {
        let triangle = [(0, 1), (1, 2), (2, 0)];
        let c = gen_qaoa_maxcut(3, &triangle, 0.3, 0.7, 1).unwrap();
        assert_eq!(c.n_gates(), 3 + 3 * 3 + 3);

        let zero = gen_qaoa_maxcut(3, &triangle, 0.0, 0.0, 1).unwrap();
        let amps = final_state(&zero);
        for a in &s_uniform(amps) {
            assert!((a - 0.125).abs() < 1e-12);
        }

        let empty = gen_qaoa_maxcut(2, &[], 0.1, 0.2, 1).unwrap();
        assert_eq!(empty.n_gates(), 4); // H layer + RX layer
    }

    fn s_uniform(amps: Vec<Complex64>) -> Vec<f64> {
        amps.iter().map(|a| a.norm_sqr()).collect()
    }

    #[test]
    fn generators_are_deterministic() {
        assert_eq!(gen_qft(5, true).unwrap(), gen_qft(5, true).unwrap());
        assert_eq!(gen_bv(4, "1010").unwrap(), gen_bv(4, "1010").unwrap());
        assert_eq!(gen_qpe(4, 0.3).unwrap(), gen_qpe(4, 0.3).unwrap());
        assert_eq!(
            gen_qaoa_maxcut(3, &[(0, 1)], 0.1, 0.2, 2).unwrap(),
            gen_qaoa_maxcut(3, &[(0, 1)], 0.1, 0.2, 2).unwrap()
        );
    }

    #[test]
    fn generator_argument_validation() {
        assert!(gen_qft(0, false).is_err());
        assert!(gen_bv(3, "10").is_err());
        assert!(gen_bv(2, "1x").is_err());
        assert!(gen_ghz(1).is_err());
        assert!(gen_qpe(3, 1.0).is_err());
        assert!(gen_qaoa_maxcut(2, &[(0, 5)], 0.1, 0.1, 1).is_err());
        assert!(gen_qaoa_maxcut(2, &[(1, 1)], 0.1, 0.1, 1).is_err());
    }
}
