use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;

use super::perspective::TruthPerspective;
use crate::error::{HoloqError, Result};
use crate::lang::{EpistemicKind, Label};
use crate::qlin::{
    apply_kraus_on, c, check_qubits, embed, max_entry_distance, probability, qumix_close, reduce,
    validate_qumix, CMatrix, Qumix, MAX_QUBITS,
};
use crate::random;

/// Completeness tolerance for Kraus families.
pub const TOL_KRAUS: f64 = 1e-9;
/// Matching tolerance for table lookups and domain membership.
pub const TOL_MATCH: f64 = 1e-9;

/// Preset epistemic maps. Each acts on the last qubit of its block only,
/// so it is defined at every arity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PresetKind {
    /// Maximal epistemic capacity: every state is left unchanged.
    Identity,
    /// NOT in the given basis.
    FlipInBasis,
    /// Measures in the given basis and forgets the outcome.
    DephaseInBasis,
    /// Phase gate `diag(1, i)` in the given basis.
    PhaseInBasis,
    /// Depolarizing noise of the given strength.
    Depolarize,
}

impl PresetKind {
    pub fn name(self) -> &'static str {
        match self {
            PresetKind::Identity => "identity",
            PresetKind::FlipInBasis => "flip-in-basis",
            PresetKind::DephaseInBasis => "dephase-in-basis",
            PresetKind::PhaseInBasis => "phase-in-basis",
            PresetKind::Depolarize => "depolarize",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        [
            PresetKind::Identity,
            PresetKind::FlipInBasis,
            PresetKind::DephaseInBasis,
            PresetKind::PhaseInBasis,
            PresetKind::Depolarize,
        ]
        .into_iter()
        .find(|k| k.name() == name)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Preset {
    pub kind: PresetKind,
    pub basis: TruthPerspective,
    /// Noise strength in `[0, 1]`; only read by `Depolarize`.
    pub strength: f64,
}

impl Preset {
    pub fn new(kind: PresetKind, basis: TruthPerspective) -> Self {
        Preset {
            kind,
            basis,
            strength: 0.0,
        }
    }

    pub fn depolarize(strength: f64) -> Self {
        Preset {
            kind: PresetKind::Depolarize,
            basis: TruthPerspective::identity(),
            strength,
        }
    }

    /// Single-qubit Kraus operators, conjugated into the basis.
    fn qubit_kraus(&self) -> Vec<CMatrix> {
        let z = c(0.0, 0.0);
        let o = c(1.0, 0.0);
        let m = |a, b, cc, d| CMatrix::from_row_slice(2, 2, &[a, b, cc, d]);
        let canon = match self.kind {
            PresetKind::Identity => vec![m(o, z, z, o)],
            PresetKind::FlipInBasis => vec![m(z, o, o, z)],
            PresetKind::DephaseInBasis => vec![m(o, z, z, z), m(z, z, z, o)],
            PresetKind::PhaseInBasis => vec![m(o, z, z, c(0.0, 1.0))],
            PresetKind::Depolarize => {
                let p = self.strength.clamp(0.0, 1.0);
                let a = c((1.0 - 0.75 * p).sqrt(), 0.0);
                let b = (p / 4.0).sqrt();
                vec![
                    m(a, z, z, a),
                    m(z, c(b, 0.), c(b, 0.), z),
                    m(z, c(0., -b), c(0., b), z),
                    m(c(b, 0.), z, z, c(-b, 0.)),
                ]
            }
        };
        canon.iter().map(|k| self.basis.conjugate(k)).collect()
    }
}

/// Explicit Kraus families, one per supported arity.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausMap {
    arities: BTreeMap<usize, Vec<CMatrix>>,
}

impl KrausMap {
    pub fn new(arities: BTreeMap<usize, Vec<CMatrix>>) -> Result<Self> {
        for (&n, ops) in &arities {
            check_qubits(n)?;
            let dim = 1usize << n;
            if ops.is_empty() {
                return Err(HoloqError::NotTracePreserving { defect: 1.0 });
            }
            let mut sum = CMatrix::zeros(dim, dim);
            for k in ops {
                if k.nrows() != dim || k.ncols() != dim {
                    return Err(HoloqError::DimensionMismatch {
                        expected: dim,
                        found: k.nrows(),
                    });
                }
                sum += k.adjoint() * k;
            }
            let defect = max_entry_distance(&sum, &CMatrix::identity(dim, dim));
            if defect > TOL_KRAUS {
                return Err(HoloqError::NotTracePreserving { defect });
            }
        }
        Ok(KrausMap { arities })
    }

    pub fn single(arity: usize, ops: Vec<CMatrix>) -> Result<Self> {
        Self::new(BTreeMap::from([(arity, ops)]))
    }

    pub fn arities(&self) -> &BTreeMap<usize, Vec<CMatrix>> {
        &self.arities
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fallback {
    Identity,
    Error,
}

/// A finite input/output table on one or more arities.
#[derive(Clone, Debug, PartialEq)]
pub struct TableMap {
    arities: Vec<usize>,
    pairs: Vec<(Qumix, Qumix)>,
    fallback: Fallback,
}

impl TableMap {
    pub fn new(arity: usize, pairs: Vec<(Qumix, Qumix)>, fallback: Fallback) -> Result<Self> {
        Self::with_arities(&[arity], pairs, fallback)
    }

    /// A table whose pairs may live on any of the listed arities.
    pub fn with_arities(
        arities: &[usize],
        pairs: Vec<(Qumix, Qumix)>,
        fallback: Fallback,
    ) -> Result<Self> {
        let mut arities = arities.to_vec();
        arities.sort_unstable();
        arities.dedup();
        if arities.is_empty() {
            return Err(HoloqError::DimensionMismatch {
                expected: 1,
                found: 0,
            });
        }
        for &a in &arities {
            check_qubits(a)?;
        }
        for (input, output) in &pairs {
            if input.qubits() != output.qubits() {
                return Err(HoloqError::DimensionMismatch {
                    expected: input.qubits(),
                    found: output.qubits(),
                });
            }
            if !arities.contains(&input.qubits()) {
                return Err(HoloqError::DimensionMismatch {
                    expected: arities[0],
                    found: input.qubits(),
                });
            }
            let report = validate_qumix(output);
            if !report.pass() {
                return Err(HoloqError::InvalidQumix(report.to_string()));
            }
        }
        Ok(TableMap {
            arities,
            pairs,
            fallback,
        })
    }

    pub fn arities(&self) -> &[usize] {
        &self.arities
    }

    pub fn pairs(&self) -> &[(Qumix, Qumix)] {
        &self.pairs
    }

    pub fn fallback(&self) -> Fallback {
        self.fallback
    }

    fn lookup(&self, rho: &Qumix) -> Option<&Qumix> {
        self.pairs
            .iter()
            .find(|(input, _)| {
                input.qubits() == rho.qubits()
                    && qumix_close(input, rho, TOL_MATCH).unwrap_or(false)
            })
            .map(|(_, out)| out)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Realization {
    Kraus(KrausMap),
    Preset(Preset),
    Table(TableMap),
}

/// The set of states an operation is declared to handle.
#[derive(Clone, Debug, PartialEq, Default)]
pub enum Domain {
    #[default]
    All,
    Listed(Vec<Qumix>),
}

impl Domain {
    pub fn contains(&self, rho: &Qumix) -> bool {
        match self {
            Domain::All => true,
            Domain::Listed(states) => states.iter().any(|s| {
                s.qubits() == rho.qubits() && qumix_close(s, rho, TOL_MATCH).unwrap_or(false)
            }),
        }
    }
}

/// An understanding or knowledge operation of one agent at one time.
#[derive(Clone, Debug, PartialEq)]
pub struct EpistemicOp {
    pub kind: EpistemicKind,
    pub label: Label,
    pub realization: Realization,
    pub domain: Domain,
}

impl fmt::Display for EpistemicOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_{}", self.kind.letter(), self.label)
    }
}

impl EpistemicOp {
    pub fn new(kind: EpistemicKind, label: Label, realization: Realization) -> Self {
        EpistemicOp {
            kind,
            label,
            realization,
            domain: Domain::All,
        }
    }

    pub fn preset(kind: EpistemicKind, label: Label, preset: Preset) -> Self {
        Self::new(kind, label, Realization::Preset(preset))
    }

    pub fn supports_arity(&self, n: usize) -> bool {
        match &self.realization {
            Realization::Kraus(k) => k.arities.contains_key(&n),
            Realization::Preset(_) => (1..=MAX_QUBITS).contains(&n),
            Realization::Table(t) => t.arities.contains(&n),
        }
    }

    fn missing(&self, n: usize) -> HoloqError {
        HoloqError::MissingArity {
            label: self.to_string(),
            arity: n,
        }
    }

    pub fn is_table(&self) -> bool {
        matches!(self.realization, Realization::Table(_))
    }

    /// Full Kraus family at arity `n`; `None` for table realizations.
    pub fn kraus(&self, n: usize) -> Result<Option<Vec<CMatrix>>> {
        if !self.supports_arity(n) {
            return Err(self.missing(n));
        }
        Ok(match &self.realization {
            Realization::Kraus(k) => Some(k.arities[&n].clone()),
            Realization::Preset(p) => Some(
                p.qubit_kraus()
                    .iter()
                    .map(|k| embed(n, &[n - 1], k))
                    .collect(),
            ),
            Realization::Table(_) => None,
        })
    }

    /// Applies the operation to the whole of `rho`.
    pub fn apply(&self, rho: &Qumix) -> Result<Qumix> {
        self.apply_at(rho, 0, rho.qubits())
    }

    /// Applies the operation to the block `[offset, offset + arity)` of `rho`.
    /// Table realizations only accept the whole state.
    pub(crate) fn apply_at(&self, rho: &Qumix, offset: usize, arity: usize) -> Result<Qumix> {
        if !self.supports_arity(arity) {
            return Err(self.missing(arity));
        }
        match &self.realization {
            Realization::Kraus(k) => {
                let qubits: Vec<usize> = (offset..offset + arity).collect();
                Ok(apply_kraus_on(rho, &qubits, &k.arities[&arity]))
            }
            Realization::Preset(p) => {
                if p.kind == PresetKind::Identity {
                    return Ok(rho.clone());
                }
                Ok(apply_kraus_on(rho, &[offset + arity - 1], &p.qubit_kraus()))
            }
            Realization::Table(t) => {
                if offset != 0 || arity != rho.qubits() {
                    return Err(HoloqError::DimensionMismatch {
                        expected: arity,
                        found: rho.qubits(),
                    });
                }
                match (t.lookup(rho), t.fallback) {
                    (Some(out), _) => Ok(out.clone()),
                    (None, Fallback::Identity) => Ok(rho.clone()),
                    (None, Fallback::Error) => Err(HoloqError::TableMiss {
                        label: self.to_string(),
                    }),
                }
            }
        }
    }

    /// `K(P0) = P0` and `K(P1) = P1` at arity 1 for the perspective's
    /// falsity and truth projectors.
    pub fn has_sound_capacity(&self, perspective: &TruthPerspective) -> bool {
        let (p0, p1) = perspective.truth_projectors();
        [p0, p1].iter().all(|p| match self.apply(p) {
            Ok(out) => qumix_close(&out, p, TOL_MATCH).unwrap_or(false),
            Err(_) => false,
        })
    }

    /// Sampling check of truth domination: no sampled `rho` has
    /// `p(K rho) = 1` while `p(rho) < 1 - 1e-6`.
    pub fn truth_domination<R: Rng + ?Sized>(
        &self,
        perspective: &TruthPerspective,
        arities: &[usize],
        samples: usize,
        rng: &mut R,
    ) -> TruthDomination {
        let mut tried = 0;
        for &n in arities {
            if !self.supports_arity(n) {
                continue;
            }
            for (k, rho) in domination_candidates(self, perspective, n, samples, rng)
                .into_iter()
                .enumerate()
            {
                if k >= samples {
                    break;
                }
                tried += 1;
                let Ok(out) = self.apply(&rho) else { continue };
                if probability(perspective, &out) >= 1.0 - 1e-9
                    && probability(perspective, &rho) < 1.0 - 1e-6
                {
                    return TruthDomination {
                        sound: false,
                        tried,
                        witness: Some(rho),
                    };
                }
            }
        }
        TruthDomination {
            sound: true,
            tried,
            witness: None,
        }
    }
}

/// Outcome of [`EpistemicOp::truth_domination`].
#[derive(Clone, Debug)]
pub struct TruthDomination {
    pub sound: bool,
    pub tried: usize,
    pub witness: Option<Qumix>,
}

/// Basis products first, then back-solved preimages of true states when the
/// map is a single unitary, then random pure and mixed states.
fn domination_candidates<R: Rng + ?Sized>(
    op: &EpistemicOp,
    perspective: &TruthPerspective,
    n: usize,
    samples: usize,
    rng: &mut R,
) -> Vec<Qumix> {
    let mut out = Vec::new();
    let basis_count = (1usize << n).min(samples / 4 + 1);
    for idx in 0..basis_count {
        let bits: Vec<bool> = (0..n).map(|q| (idx >> (n - 1 - q)) & 1 == 1).collect();
        if let Ok(s) = perspective.basis_state(&bits) {
            out.push(s);
        }
    }
    if let Realization::Table(t) = &op.realization {
        out.extend(t.pairs.iter().map(|(i, _)| i.clone()));
    }
    if let Ok(Some(kraus)) = op.kraus(n) {
        if kraus.len() == 1 {
            let u = &kraus[0];
            for _ in 0..samples / 4 {
                let target = random::random_true_state(n, perspective, rng);
                let pre = u.adjoint() * target.matrix() * u;
                out.push(Qumix::from_parts(n, pre));
            }
        }
    }
    while out.len() < samples {
        if rng.gen_bool(0.5) {
            out.push(random::random_pure(n, rng));
        } else {
            let rank = rng.gen_range(1..=(1usize << n).min(4));
            out.push(random::random_mixed(n, rank, rng));
        }
    }
    out
}

/// True iff `rho` factorizes exactly (within `tol`) as the tensor product of
/// its reductions onto the given consecutive blocks.
pub(crate) fn factorization_defect(rho: &Qumix, blocks: &[std::ops::Range<usize>]) -> Result<f64> {
    let parts: Vec<Qumix> = blocks
        .iter()
        .map(|b| reduce(rho, &b.clone().collect::<Vec<_>>()))
        .collect::<Result<_>>()?;
    let product = crate::qlin::tensor_all(&parts)?;
    rho.distance(&product)
}
