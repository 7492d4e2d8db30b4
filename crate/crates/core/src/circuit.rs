//! Circuit representation and slicing into contiguous subcircuits.
//!
//! Qubit ordering is little-endian throughout the crate: qubit 0 is the
//! least significant bit of a basis-state index, and the rightmost character
//! of a measurement bitstring.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::gates::Gate;

/// An ordered list of gates over a fixed number of qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    gates: Vec<Gate>,
    /// Whether the program ends with a full terminal measurement.
    pub measured: bool,
}

impl Circuit {
    pub fn new(n_qubits: usize, gates: Vec<Gate>) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::InvalidArgument("circuit needs at least one qubit".into()));
        }
        for gate in &gates {
            for &q in gate.qubits() {
                if q >= n_qubits {
                    return Err(Error::QubitOutOfRange { index: q, n_qubits });
                }
            }
        }
        Ok(Self {
            n_qubits,
            gates,
            measured: false,
        })
    }

    pub fn with_measurement(mut self) -> Self {
        self.measured = true;
        self
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn n_gates(&self) -> usize {
        self.gates.len()
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        for &q in gate.qubits() {
            if q >= self.n_qubits {
                return Err(Error::QubitOutOfRange {
                    index: q,
                    n_qubits: self.n_qubits,
                });
            }
        }
        self.gates.push(gate);
        Ok(())
    }

    /// Render as an OpenQASM 2.0 program.
    pub fn to_qasm(&self) -> String {
        let mut out = String::new();
        out.push_str("OPENQASM 2.0;\n");
        let _ = writeln!(out, "qreg q[{}];", self.n_qubits);
        if self.measured {
            let _ = writeln!(out, "creg c[{}];", self.n_qubits);
        }
        for gate in &self.gates {
            let params = gate.kind.params();
            if params.is_empty() {
                let _ = write!(out, "{}", gate.kind.name());
            } else {
                let rendered: Vec<String> = params.iter().map(|p| format!("{p}")).collect();
                let _ = write!(out, "{}({})", gate.kind.name(), rendered.join(","));
            }
            let operands: Vec<String> = gate.qubits().iter().map(|q| format!("q[{q}]")).collect();
            let _ = writeln!(out, " {};", operands.join(","));
        }
        if self.measured {
            out.push_str("measure q -> c;\n");
        }
        out
    }
}

/// Strictly increasing gate indices splitting a circuit into contiguous
/// subcircuits. Empty boundaries mean the identity partition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    boundaries: Vec<usize>,
}

impl Partition {
    pub fn new(boundaries: Vec<usize>, n_gates: usize) -> Result<Self> {
        let mut prev = 0usize;
        for &b in &boundaries {
            if b <= prev {
                return Err(Error::InvalidPartition(format!(
                    "boundaries must be strictly increasing and positive, got {boundaries:?}"
                )));
            }
            if b >= n_gates {
                return Err(Error::InvalidPartition(format!(
                    "boundary {b} outside (0, {n_gates})"
                )));
            }
            prev = b;
        }
        Ok(Self { boundaries })
    }

    pub fn identity() -> Self {
        Self { boundaries: Vec::new() }
    }

    pub fn boundaries(&self) -> &[usize] {
        &self.boundaries
    }

    pub fn n_slices(&self) -> usize {
        self.boundaries.len() + 1
    }
}

/// Split a circuit at the partition boundaries. Each slice keeps the full
/// qubit count; only the last slice carries the measured flag.
pub fn slice(circuit: &Circuit, partition: &Partition) -> Result<Vec<Circuit>> {
    // Re-validate against this circuit; the partition may come from elsewhere.
    let partition = Partition::new(partition.boundaries.clone(), circuit.n_gates().max(1))?;
    let mut slices = Vec::with_capacity(partition.n_slices());
    let mut start = 0usize;
    for &b in partition.boundaries() {
        slices.push(Circuit {
            n_qubits: circuit.n_qubits,
            gates: circuit.gates[start..b].to_vec(),
            measured: false,
        });
        start = b;
    }
    slices.push(Circuit {
        n_qubits: circuit.n_qubits,
        gates: circuit.gates[start..].to_vec(),
        measured: circuit.measured,
    });
    Ok(slices)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::GateKind;

    fn six_gate_circuit() -> Circuit {
        let gates = (0..6).map(|i| Gate::single(GateKind::H, i % 3)).collect();
        Circuit::new(3, gates).unwrap()
    }

    #[test]
    fn even_split() {
        let c = six_gate_circuit();
        let p = Partition::new(vec![2, 4], c.n_gates()).unwrap();
        let parts = slice(&c, &p).unwrap();
        assert_eq!(parts.len(), 3);
        assert!(parts.iter().all(|s| s.n_gates() == 2 && s.n_qubits() == 3));
    }

    #[test]
    fn identity_partition_returns_whole_circuit() {
        let c = six_gate_circuit().with_measurement();
        let parts = slice(&c, &Partition::identity()).unwrap();
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[0].gates(), c.gates());
        assert!(parts[0].measured);
    }

    #[test]
    fn concatenation_reproduces_original() {
        let gates: Vec<Gate> = (0..7)
            .map(|i| {
                if i % 2 == 0 {
                    Gate::single(GateKind::Rx(0.1 * i as f64), i % 3)
                } else {
                    Gate::pair(GateKind::Cx, i % 3, (i + 1) % 3)
                }
            })
            .collect();
        let c = Circuit::new(3, gates).unwrap();
        let p = Partition::new(vec![3], c.n_gates()).unwrap();
        let parts = slice(&c, &p).unwrap();
        assert_eq!(parts[0].n_gates(), 3);
        assert_eq!(parts[1].n_gates(), 4);
        let rejoined: Vec<Gate> = parts.iter().flat_map(|s| s.gates().iter().cloned()).collect();
        assert_eq!(rejoined.as_slice(), c.gates());
    }

    #[test]
    fn only_last_slice_is_measured() {
        let c = six_gate_circuit().with_measurement();
        let p = Partition::new(vec![2], c.n_gates()).unwrap();
        let parts = slice(&c, &p).unwrap();
        assert!(!parts[0].measured);
        assert!(parts[1].measured);
    }

    #[test]
    fn invalid_boundaries_rejected() {
        assert!(Partition::new(vec![4, 2], 6).is_err());
        assert!(Partition::new(vec![0], 6).is_err());
        assert!(Partition::new(vec![6], 6).is_err());
        assert!(Partition::new(vec![2, 2], 6).is_err());
    }

    #[test]
    fn out_of_range_gate_rejected() {
        let err = Circuit::new(2, vec![Gate::single(GateKind::X, 5)]);
        assert!(matches!(err, Err(Error::QubitOutOfRange { index: 5, n_qubits: 2 })));
    }
}
