use std::fmt;

use crate::error::{HoloqError, Result};
use crate::qlin::{c, kron_power, probability, unitarity_defect, CMatrix, Qumix, C64};

/// Tolerance for unitarity checks.
pub const TOL_UNITARY: f64 = 1e-9;

/// A single-qubit unitary whose columns are the falsity ket (column 0) and
/// the truth ket (column 1) of the perspective.
#[derive(Clone, Debug, PartialEq)]
pub struct TruthPerspective {
    u: CMatrix,
}

impl TruthPerspective {
    pub fn from_matrix(u: CMatrix) -> Result<Self> {
        if u.nrows() != 2 || u.ncols() != 2 {
            return Err(HoloqError::DimensionMismatch {
                expected: 2,
                found: u.nrows().max(u.ncols()),
            });
        }
        let defect = unitarity_defect(&u);
        if defect > TOL_UNITARY {
            return Err(HoloqError::NotUnitary { defect });
        }
        Ok(TruthPerspective { u })
    }

    /// Row-major entries.
    pub fn from_entries(entries: [[C64; 2]; 2]) -> Result<Self> {
        Self::from_matrix(CMatrix::from_row_slice(
            2,
            2,
            &[entries[0][0], entries[0][1], entries[1][0], entries[1][1]],
        ))
    }

    /// The computational basis.
    pub fn identity() -> Self {
        TruthPerspective {
            u: CMatrix::identity(2, 2),
        }
    }

    pub fn hadamard() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        TruthPerspective {
            u: CMatrix::from_row_slice(2, 2, &[c(h, 0.), c(h, 0.), c(h, 0.), c(-h, 0.)]),
        }
    }

    /// Truth and falsity swapped relative to the computational basis.
    pub fn bit_flip() -> Self {
        TruthPerspective {
            u: CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]),
        }
    }

    /// Named presets: `I`, `H`, `X`.
    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "I" => Some(Self::identity()),
            "H" => Some(Self::hadamard()),
            "X" => Some(Self::bit_flip()),
            _ => None,
        }
    }

    /// Name of the matching preset, if any (exact entry comparison up to 1e-12).
    pub fn preset_name(&self) -> Option<&'static str> {
        ["I", "H", "X"].into_iter().find(|name| {
            let p = Self::preset(name).unwrap();
            crate::qlin::max_entry_distance(&p.u, &self.u) < 1e-12
        })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.u
    }

    pub fn falsity_ket(&self) -> CMatrix {
        self.u.columns(0, 1).into_owned()
    }

    pub fn truth_ket(&self) -> CMatrix {
        self.u.columns(1, 1).into_owned()
    }

    /// `(falsity projector, truth projector)` on one qubit.
    pub fn truth_projectors(&self) -> (Qumix, Qumix) {
        let f = self.falsity_ket();
        let t = self.truth_ket();
        (
            Qumix::from_parts(1, &f * f.adjoint()),
            Qumix::from_parts(1, &t * t.adjoint()),
        )
    }

    pub fn falsity(&self) -> Qumix {
        self.truth_projectors().0
    }

    pub fn truth(&self) -> Qumix {
        self.truth_projectors().1
    }

    /// `u^(x)n`.
    pub fn power(&self, n: usize) -> CMatrix {
        kron_power(&self.u, n)
    }

    /// `u m u^dagger` for a single-qubit operator `m`.
    pub fn conjugate(&self, m: &CMatrix) -> CMatrix {
        &self.u * m * self.u.adjoint()
    }

    /// Basis product state: qubit `k` is the truth projector if `bits[k]`,
    /// the falsity projector otherwise.
    pub fn basis_state(&self, bits: &[bool]) -> Result<Qumix> {
        let (p0, p1) = self.truth_projectors();
        let parts: Vec<Qumix> = bits
            .iter()
            .map(|&b| if b { p1.clone() } else { p0.clone() })
            .collect();
        crate::qlin::tensor_all(&parts)
    }
}

impl fmt::Display for TruthPerspective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(name) = self.preset_name() {
            return f.write_str(name);
        }
        let e: Vec<String> = self
            .u
            .transpose()
            .iter()
            .map(|z| format!("{:.4}{:+.4}i", z.re, z.im))
            .collect();
        write!(f, "[[{}, {}], [{}, {}]]", e[0], e[1], e[2], e[3])
    }
}

/// `1 - |<1_b | 1_a>|^2`: the probability, under perspective `b`, that the
/// truth of `a` is false.
pub fn epistemic_distance(a: &TruthPerspective, b: &TruthPerspective) -> f64 {
    1.0 - probability(b, &a.truth())
}

/// Surrogate preorder: `rho` precedes `sigma` under the perspective iff its
/// truth probability is no larger (up to `1e-12`).
pub fn precedes(perspective: &TruthPerspective, rho: &Qumix, sigma: &Qumix) -> bool {
    probability(perspective, rho) <= probability(perspective, sigma) + 1e-12
}
