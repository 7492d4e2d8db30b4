//! Gate kinds, their unitary matrices, and the gate/circuit element types.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// A gate tag with its bound parameters. Parameter arity is enforced by
/// construction: rotation tags carry one angle, `U` three, all others none.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateKind {
    X,
    Y,
    Z,
    H,
    S,
    Sdg,
    T,
    Tdg,
    Rx(f64),
    Ry(f64),
    Rz(f64),
    U(f64, f64, f64),
    Cx,
    Cz,
    Swap,
    Cp(f64),
}

impl GateKind {
    /// Build a kind from a lowercase QASM mnemonic and its parameter list.
    pub fn from_name(name: &str, params: &[f64]) -> Result<Self> {
        let expect = |n: usize| -> Result<()> {
            if params.len() == n {
                Ok(())
            } else {
                Err(Error::InvalidGate(format!(
                    "gate `{name}` takes {n} parameter(s), got {}",
                    params.len()
                )))
            }
        };
        let kind = match name {
            "x" => GateKind::X,
            "y" => GateKind::Y,
            "z" => GateKind::Z,
            "h" => GateKind::H,
            "s" => GateKind::S,
            "sdg" => GateKind::Sdg,
            "t" => GateKind::T,
            "tdg" => GateKind::Tdg,
            "rx" => {
                expect(1)?;
                GateKind::Rx(params[0])
            }
            "ry" => {
                expect(1)?;
                GateKind::Ry(params[0])
            }
            "rz" => {
                expect(1)?;
                GateKind::Rz(params[0])
            }
            "u" | "u3" => {
                expect(3)?;
                GateKind::U(params[0], params[1], params[2])
            }
            "cx" => GateKind::Cx,
            "cz" => GateKind::Cz,
            "swap" => GateKind::Swap,
            "cp" => {
                expect(1)?;
                GateKind::Cp(params[0])
            }
            _ => {
                return Err(Error::InvalidGate(format!("unknown gate `{name}`")));
            }
        };
        // Parameterless tags reject stray parameters.
        match kind {
            GateKind::Rx(_) | GateKind::Ry(_) | GateKind::Rz(_) | GateKind::U(..) | GateKind::Cp(_) => {}
            _ => expect(0)?,
        }
        Ok(kind)
    }

    /// QASM mnemonic.
    pub fn name(&self) -> &'static str {
        match self {
            GateKind::X => "x",
            GateKind::Y => "y",
            GateKind::Z => "z",
            GateKind::H => "h",
            GateKind::S => "s",
            GateKind::Sdg => "sdg",
            GateKind::T => "t",
            GateKind::Tdg => "tdg",
            GateKind::Rx(_) => "rx",
            GateKind::Ry(_) => "ry",
            GateKind::Rz(_) => "rz",
            GateKind::U(..) => "u",
            GateKind::Cx => "cx",
            GateKind::Cz => "cz",
            GateKind::Swap => "swap",
            GateKind::Cp(_) => "cp",
        }
    }

    pub fn params(&self) -> Vec<f64> {
        match *self {
            GateKind::Rx(t) | GateKind::Ry(t) | GateKind::Rz(t) | GateKind::Cp(t) => vec![t],
            GateKind::U(t, p, l) => vec![t, p, l],
            _ => Vec::new(),
        }
    }

    /// Number of qubit operands (1 or 2).
    pub fn n_qubits(&self) -> usize {
        match self {
            GateKind::Cx | GateKind::Cz | GateKind::Swap | GateKind::Cp(_) => 2,
            _ => 1,
        }
    }

    /// One representative kind per tag (parameters zeroed), covering the
    /// whole gate set. Used to resolve per-tag noise tables.
    pub fn all_tags() -> [GateKind; 16] {
        [
            GateKind::X,
            GateKind::Y,
            GateKind::Z,
            GateKind::H,
            GateKind::S,
            GateKind::Sdg,
            GateKind::T,
            GateKind::Tdg,
            GateKind::Rx(0.0),
            GateKind::Ry(0.0),
            GateKind::Rz(0.0),
            GateKind::U(0.0, 0.0, 0.0),
            GateKind::Cx,
            GateKind::Cz,
            GateKind::Swap,
            GateKind::Cp(0.0),
        ]
    }
}

/// A gate unitary: 2x2 for single-qubit tags, 4x4 for two-qubit tags.
///
/// For two-qubit matrices the row/column index is `2*control_bit + target_bit`
/// where "control" is the gate's first operand and "target" its second (for
/// SWAP, simply the first and second operands).
#[derive(Debug, Clone, PartialEq)]
pub enum GateMatrix {
    One([[Complex64; 2]; 2]),
    Two([[Complex64; 4]; 4]),
}

impl GateMatrix {
    pub fn dim(&self) -> usize {
        match self {
            GateMatrix::One(_) => 2,
            GateMatrix::Two(_) => 4,
        }
    }

    pub fn at(&self, row: usize, col: usize) -> Complex64 {
        match self {
            GateMatrix::One(m) => m[row][col],
            GateMatrix::Two(m) => m[row][col],
        }
    }
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// The standard unitary for a gate kind with its parameters bound.
pub fn gate_matrix(kind: &GateKind) -> GateMatrix {
    let frac = std::f64::consts::FRAC_1_SQRT_2;
    match *kind {
        GateKind::X => GateMatrix::One([[ZERO, ONE], [ONE, ZERO]]),
        GateKind::Y => GateMatrix::One([[ZERO, c(0.0, -1.0)], [c(0.0, 1.0), ZERO]]),
        GateKind::Z => GateMatrix::One([[ONE, ZERO], [ZERO, c(-1.0, 0.0)]]),
        GateKind::H => GateMatrix::One([
            [c(frac, 0.0), c(frac, 0.0)],
            [c(frac, 0.0), c(-frac, 0.0)],
        ]),
        GateKind::S => GateMatrix::One([[ONE, ZERO], [ZERO, c(0.0, 1.0)]]),
        GateKind::Sdg => GateMatrix::One([[ONE, ZERO], [ZERO, c(0.0, -1.0)]]),
        GateKind::T => GateMatrix::One([[ONE, ZERO], [ZERO, c(frac, frac)]]),
        GateKind::Tdg => GateMatrix::One([[ONE, ZERO], [ZERO, c(frac, -frac)]]),
        GateKind::Rx(theta) => {
            let (sin, cos) = (theta / 2.0).sin_cos();
            GateMatrix::One([[c(cos, 0.0), c(0.0, -sin)], [c(0.0, -sin), c(cos, 0.0)]])
        }
        GateKind::Ry(theta) => {
            let (sin, cos) = (theta / 2.0).sin_cos();
            GateMatrix::One([[c(cos, 0.0), c(-sin, 0.0)], [c(sin, 0.0), c(cos, 0.0)]])
        }
        GateKind::Rz(theta) => GateMatrix::One([
            [Complex64::from_polar(1.0, -theta / 2.0), ZERO],
            [ZERO, Complex64::from_polar(1.0, theta / 2.0)],
        ]),
        GateKind::U(theta, phi, lambda) => {
            let (sin, cos) = (theta / 2.0).sin_cos();
            GateMatrix::One([
                [c(cos, 0.0), -Complex64::from_polar(sin, lambda)],
                [
                    Complex64::from_polar(sin, phi),
                    Complex64::from_polar(cos, phi + lambda),
                ],
            ])
        }
        GateKind::Cx => GateMatrix::Two([
            [ONE, ZERO, ZERO, ZERO],
            [ZERO, ONE, ZERO, ZERO],
            [ZERO, ZERO, ZERO, ONE],
            [ZERO, ZERO, ONE, ZERO],
        ]),
        GateKind::Cz => GateMatrix::Two([
            [ONE, ZERO, ZERO, ZERO],
            [ZERO, ONE, ZERO, ZERO],
            [ZERO, ZERO, ONE, ZERO],
            [ZERO, ZERO, ZERO, c(-1.0, 0.0)],
        ]),
        GateKind::Swap => GateMatrix::Two([
            [ONE, ZERO, ZERO, ZERO],
            [ZERO, ZERO, ONE, ZERO],
            [ZERO, ONE, ZERO, ZERO],
            [ZERO, ZERO, ZERO, ONE],
        ]),
        GateKind::Cp(theta) => GateMatrix::Two([
            [ONE, ZERO, ZERO, ZERO],
            [ZERO, ONE, ZERO, ZERO],
            [ZERO, ZERO, ONE, ZERO],
            [ZERO, ZERO, ZERO, Complex64::from_polar(1.0, theta)],
        ]),
    }
}

/// A gate applied to specific qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    qubits: Vec<usize>,
}

impl Gate {
    pub fn new(kind: GateKind, qubits: Vec<usize>) -> Result<Self> {
        if qubits.len() != kind.n_qubits() {
            return Err(Error::InvalidGate(format!(
                "gate `{}` takes {} qubit(s), got {}",
                kind.name(),
                kind.n_qubits(),
                qubits.len()
            )));
        }
        if qubits.len() == 2 && qubits[0] == qubits[1] {
            return Err(Error::InvalidGate(format!(
                "gate `{}` requires distinct qubits",
                kind.name()
            )));
        }
        Ok(Self { kind, qubits })
    }

    /// Shorthand for a single-qubit gate.
    pub fn single(kind: GateKind, qubit: usize) -> Self {
        Gate::new(kind, vec![qubit]).expect("single-qubit kind")
    }

    /// Shorthand for a two-qubit gate.
    pub fn pair(kind: GateKind, a: usize, b: usize) -> Self {
        Gate::new(kind, vec![a, b]).expect("two-qubit kind with distinct qubits")
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[allow(clippy::needless_range_loop)]
    fn conj_transpose_times_self(m: &GateMatrix) -> Vec<Vec<Complex64>> {
        let d = m.dim();
        let mut out = vec![vec![ZERO; d]; d];
        for r in 0..d {
            for col in 0..d {
                let mut acc = ZERO;
                for k in 0..d {
                    acc += m.at(k, r).conj() * m.at(k, col);
                }
                out[r][col] = acc;
            }
        }
        out
    }

    fn assert_unitary(kind: &GateKind) {
        let m = gate_matrix(kind);
        let prod = conj_transpose_times_self(&m);
        for (r, row) in prod.iter().enumerate() {
            for (col, v) in row.iter().enumerate() {
                let expect = if r == col { 1.0 } else { 0.0 };
                assert!(
                    (v.re - expect).abs() < 1e-12 && v.im.abs() < 1e-12,
                    "{}: M†M[{r}][{col}] = {v}",
                    kind.name()
                );
            }
        }
    }

    #[test]
    fn all_gate_matrices_are_unitary() {
        let kinds = [
            GateKind::X,
            GateKind::Y,
            GateKind::Z,
            GateKind::H,
            GateKind::S,
            GateKind::Sdg,
            GateKind::T,
            GateKind::Tdg,
            GateKind::Rx(0.37),
            GateKind::Ry(-1.2),
            GateKind::Rz(2.5),
            GateKind::U(0.7, 1.1, -0.4),
            GateKind::Cx,
            GateKind::Cz,
            GateKind::Swap,
            GateKind::Cp(0.9),
        ];
        for kind in &kinds {
            assert_unitary(kind);
        }
    }

    #[test]
    fn self_inverse_gates_square_to_identity() {
        for kind in [
            GateKind::X,
            GateKind::Y,
            GateKind::Z,
            GateKind::H,
            GateKind::Cx,
            GateKind::Cz,
            GateKind::Swap,
        ] {
            let m = gate_matrix(&kind);
            let d = m.dim();
            for r in 0..d {
                for col in 0..d {
                    let mut acc = ZERO;
                    for k in 0..d {
                        acc += m.at(r, k) * m.at(k, col);
                    }
                    let expect = if r == col { 1.0 } else { 0.0 };
                    assert!(
                        (acc.re - expect).abs() < 1e-12 && acc.im.abs() < 1e-12,
                        "{}^2 != I",
                        kind.name()
                    );
                }
            }
        }
    }

    #[test]
    fn pauli_x_matrix() {
        let m = gate_matrix(&GateKind::X);
        assert_eq!(m.at(0, 0), ZERO);
        assert_eq!(m.at(0, 1), ONE);
        assert_eq!(m.at(1, 0), ONE);
        assert_eq!(m.at(1, 1), ZERO);
    }

    #[test]
    fn rz_zero_is_identity() {
        let m = gate_matrix(&GateKind::Rz(0.0));
        assert!((m.at(0, 0) - ONE).norm() < 1e-15);
        assert!((m.at(1, 1) - ONE).norm() < 1e-15);
        assert!(m.at(0, 1).norm() < 1e-15 && m.at(1, 0).norm() < 1e-15);
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn hadamard_squares_to_identity_within_tolerance() {
        let m = gate_matrix(&GateKind::H);
        let mut prod = [[ZERO; 2]; 2];
        for r in 0..2 {
            for col in 0..2 {
                for k in 0..2 {
                    prod[r][col] += m.at(r, k) * m.at(k, col);
                }
            }
        }
        assert!((prod[0][0] - ONE).norm() < 1e-12);
        assert!((prod[1][1] - ONE).norm() < 1e-12);
        assert!(prod[0][1].norm() < 1e-12);
        assert!(prod[1][0].norm() < 1e-12);
    }

    #[test]
    fn gate_construction_rejects_bad_operands() {
        assert!(Gate::new(GateKind::Cx, vec![1, 1]).is_err());
        assert!(Gate::new(GateKind::H, vec![0, 1]).is_err());
        assert!(GateKind::from_name("rx", &[]).is_err());
        assert!(GateKind::from_name("h", &[0.5]).is_err());
        assert!(GateKind::from_name("frobnicate", &[]).is_err());
    }
}
