use std::fmt;

use super::perspective::TruthPerspective;
use crate::error::{HoloqError, Result};
use crate::qlin::{apply_kraus_on, c, check_qubits, embed, tensor_all, CMatrix, Qumix};

/// The gate families attached to the gate connectives, plus the identity
/// used for atomic occurrences.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GateKind {
    Identity(usize),
    /// Flips the last qubit.
    Not(usize),
    /// Hadamard on the last qubit.
    SqrtId(usize),
    /// Controls: last qubit of block 1 and of block 2; target: last qubit of block 3.
    Toffoli(usize, usize, usize),
    /// Control: last qubit of block 1; target: last qubit of block 2.
    Xor(usize, usize),
}

impl GateKind {
    pub fn arity(&self) -> usize {
        match *self {
            GateKind::Identity(n) | GateKind::Not(n) | GateKind::SqrtId(n) => n,
            GateKind::Toffoli(u, v, w) => u + v + w,
            GateKind::Xor(u, v) => u + v,
        }
    }

    fn blocks(&self) -> Vec<usize> {
        match *self {
            GateKind::Identity(n) | GateKind::Not(n) | GateKind::SqrtId(n) => vec![n],
            GateKind::Toffoli(u, v, w) => vec![u, v, w],
            GateKind::Xor(u, v) => vec![u, v],
        }
    }
}

/// A gate family instance under a truth-perspective.
#[derive(Clone, Debug, PartialEq)]
pub struct GateSpec {
    pub kind: GateKind,
    pub perspective: TruthPerspective,
}

fn pauli_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)])
}

fn hadamard() -> CMatrix {
    TruthPerspective::hadamard().matrix().clone()
}

/// Permutation matrix on `2^k` flipping the last bit when all other bits are 1.
fn controlled_x(controls: usize) -> CMatrix {
    let k = controls + 1;
    let d = 1usize << k;
    let mut m = CMatrix::identity(d, d);
    let a = d - 2;
    let b = d - 1;
    m[(a, a)] = c(0., 0.);
    m[(b, b)] = c(0., 0.);
    m[(a, b)] = c(1., 0.);
    m[(b, a)] = c(1., 0.);
    m
}

impl GateSpec {
    pub fn new(kind: GateKind, perspective: TruthPerspective) -> Self {
        GateSpec { kind, perspective }
    }

    pub fn arity(&self) -> usize {
        self.kind.arity()
    }

    pub fn is_identity(&self) -> bool {
        matches!(self.kind, GateKind::Identity(_))
    }

    fn check(&self) -> Result<()> {
        if self.kind.blocks().contains(&0) {
            return Err(HoloqError::DimensionMismatch {
                expected: 1,
                found: 0,
            });
        }
        check_qubits(self.arity())
    }

    /// Qubits (relative to the gate's own block) the gate acts on
    /// non-trivially, and the perspective-conjugated operator on them.
    pub(crate) fn local_action(&self) -> Option<(Vec<usize>, CMatrix)> {
        let blocks = self.kind.blocks();
        let lasts: Vec<usize> = blocks
            .iter()
            .scan(0, |acc, &b| {
                *acc += b;
                Some(*acc - 1)
            })
            .collect();
        let (qubits, canon) = match self.kind {
            GateKind::Identity(_) => return None,
            GateKind::Not(n) => (vec![n - 1], pauli_x()),
            GateKind::SqrtId(n) => (vec![n - 1], hadamard()),
            GateKind::Toffoli(..) => (lasts, controlled_x(2)),
            GateKind::Xor(..) => (lasts, controlled_x(1)),
        };
        let t = self.perspective.power(qubits.len());
        let op = &t * canon * t.adjoint();
        Some((qubits, op))
    }

    /// The full `2^n x 2^n` unitary.
    pub fn unitary(&self) -> Result<CMatrix> {
        self.check()?;
        let n = self.arity();
        let dim = 1usize << n;
        Ok(match self.local_action() {
            None => CMatrix::identity(dim, dim),
            Some((qubits, op)) => embed(n, &qubits, &op),
        })
    }

    /// `U rho U^dagger`.
    pub fn apply(&self, rho: &Qumix) -> Result<Qumix> {
        self.check()?;
        if rho.qubits() != self.arity() {
            return Err(HoloqError::DimensionMismatch {
                expected: self.arity(),
                found: rho.qubits(),
            });
        }
        Ok(self.apply_at(rho, 0))
    }

    /// Applies the gate to the block of `rho` starting at qubit `offset`.
    pub(crate) fn apply_at(&self, rho: &Qumix, offset: usize) -> Qumix {
        match self.local_action() {
            None => rho.clone(),
            Some((qubits, op)) => {
                let shifted: Vec<usize> = qubits.iter().map(|q| q + offset).collect();
                apply_kraus_on(rho, &shifted, &[op])
            }
        }
    }
}

impl fmt::Display for GateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = &self.perspective;
        match self.kind {
            GateKind::Identity(n) => write!(f, "I^({n})"),
            GateKind::Not(n) => write!(f, "NOT_{p}^({n})"),
            GateKind::SqrtId(n) => write!(f, "SQRT_I_{p}^({n})"),
            GateKind::Toffoli(u, v, w) => write!(f, "T_{p}^({u},{v},{w})"),
            GateKind::Xor(u, v) => write!(f, "XOR_{p}^({u},{v})"),
        }
    }
}

/// Convenience wrapper for [`GateSpec::unitary`].
pub fn gate_unitary(g: &GateSpec) -> Result<CMatrix> {
    g.unitary()
}

/// Convenience wrapper for [`GateSpec::apply`].
pub fn apply_gate(g: &GateSpec, rho: &Qumix) -> Result<Qumix> {
    g.apply(rho)
}

/// Reversible conjunction: Toffoli over `rho (x) sigma (x) falsity`.
pub fn and_op(perspective: &TruthPerspective, rho: &Qumix, sigma: &Qumix) -> Result<Qumix> {
    let input = tensor_all(&[rho.clone(), sigma.clone(), perspective.falsity()])?;
    GateSpec::new(
        GateKind::Toffoli(rho.qubits(), sigma.qubits(), 1),
        perspective.clone(),
    )
    .apply(&input)
}
