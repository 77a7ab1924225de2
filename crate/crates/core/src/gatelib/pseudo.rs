use std::fmt;
use std::ops::Range;
use std::sync::Arc;

use super::epistemic::{factorization_defect, EpistemicOp};
use super::gates::{GateKind, GateSpec};
use super::perspective::TruthPerspective;
use super::quasi::QuasiModel;
use crate::error::{HoloqError, Result};
use crate::lang::{Sentence, SyntacticalTree};
use crate::qlin::{reduce, tensor_all, CMatrix, Qumix};

/// Factorization tolerance for table-realized components.
pub const TOL_FACTOR: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub enum Component {
    Gate(GateSpec),
    Epistemic(Arc<EpistemicOp>),
}

/// One tensor factor of a pseudo-gate, placed on a contiguous qubit range.
#[derive(Clone, Debug, PartialEq)]
pub struct Block {
    pub span: Range<usize>,
    pub component: Component,
}

impl Block {
    pub fn arity(&self) -> usize {
        self.span.len()
    }

    /// Applies this block alone to a state on exactly its own qubits.
    pub fn apply_local(&self, rho: &Qumix) -> Result<Qumix> {
        if rho.qubits() != self.arity() {
            return Err(HoloqError::DimensionMismatch {
                expected: self.arity(),
                found: rho.qubits(),
            });
        }
        self.apply_in_place(rho, 0)
    }

    fn apply_in_place(&self, rho: &Qumix, offset: usize) -> Result<Qumix> {
        match &self.component {
            Component::Gate(g) => Ok(g.apply_at(rho, offset)),
            Component::Epistemic(op) => op.apply_at(rho, offset, self.arity()),
        }
    }
}

/// Ordered tensor product of gate lifts and epistemic operations, mapping the
/// meaning of one level to the meaning of the level below it.
#[derive(Clone, Debug, PartialEq)]
pub struct PseudoGate {
    /// Level (1-based) whose meaning this pseudo-gate produces.
    pub target_level: usize,
    pub blocks: Vec<Block>,
}

impl PseudoGate {
    pub fn width(&self) -> usize {
        self.blocks.last().map(|b| b.span.end).unwrap_or(0)
    }

    pub fn apply(&self, rho: &Qumix) -> Result<Qumix> {
        if rho.qubits() != self.width() {
            return Err(HoloqError::DimensionMismatch {
                expected: self.width(),
                found: rho.qubits(),
            });
        }
        let has_table = self
            .blocks
            .iter()
            .any(|b| matches!(&b.component, Component::Epistemic(op) if op.is_table()));
        if has_table && self.blocks.len() > 1 {
            let spans: Vec<Range<usize>> = self.blocks.iter().map(|b| b.span.clone()).collect();
            let defect = factorization_defect(rho, &spans)?;
            if defect > TOL_FACTOR {
                return Err(HoloqError::NotFactorizable { defect });
            }
            let parts = self
                .blocks
                .iter()
                .map(|b| {
                    let local = reduce(rho, &b.span.clone().collect::<Vec<_>>())?;
                    b.apply_in_place(&local, 0)
                })
                .collect::<Result<Vec<_>>>()?;
            return tensor_all(&parts);
        }
        self.blocks
            .iter()
            .try_fold(rho.clone(), |acc, b| b.apply_in_place(&acc, b.span.start))
    }
}

impl PseudoGate {
    /// The full unitary when every block is unitary (gates and single-Kraus
    /// epistemic operations), `None` otherwise.
    pub fn unitary(&self) -> Result<Option<CMatrix>> {
        let mut acc = CMatrix::identity(1, 1);
        for b in &self.blocks {
            let u = match &b.component {
                Component::Gate(g) => g.unitary()?,
                Component::Epistemic(op) => match op.kraus(b.arity())? {
                    Some(mut k) if k.len() == 1 => k.remove(0),
                    _ => return Ok(None),
                },
            };
            acc = acc.kronecker(&u);
        }
        Ok(Some(acc))
    }
}

impl fmt::Display for PseudoGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .blocks
            .iter()
            .map(|b| match &b.component {
                Component::Gate(g) => g.to_string(),
                Component::Epistemic(op) => format!("{op}^({})", b.arity()),
            })
            .collect();
        f.write_str(&parts.join(" ⊗ "))
    }
}

/// Convenience wrapper for [`PseudoGate::apply`].
pub fn apply_pseudo_gate(pg: &PseudoGate, rho: &Qumix) -> Result<Qumix> {
    pg.apply(rho)
}

/// One pseudo-gate per level transition, in application order: the first
/// maps the top level to the level below it, the last produces level 1.
pub fn compile_pseudo_gates(
    tree: &SyntacticalTree,
    perspective: &TruthPerspective,
    qm: &QuasiModel,
) -> Result<Vec<PseudoGate>> {
    let mut out = Vec::new();
    for i in (1..tree.height()).rev() {
        let level = tree.level(i).expect("level in range");
        let mut blocks = Vec::with_capacity(level.len());
        for occ in level {
            let r = occ.arity();
            let gate = |kind| Component::Gate(GateSpec::new(kind, perspective.clone()));
            let component = match &occ.sentence {
                Sentence::Atom(_) | Sentence::True | Sentence::False => gate(GateKind::Identity(r)),
                Sentence::Not(_) => gate(GateKind::Not(r)),
                Sentence::SqrtId(_) => gate(GateKind::SqrtId(r)),
                Sentence::Toffoli(a, b, c) => gate(GateKind::Toffoli(
                    a.atomic_complexity(),
                    b.atomic_complexity(),
                    c.atomic_complexity(),
                )),
                Sentence::Xor(a, b) => {
                    gate(GateKind::Xor(a.atomic_complexity(), b.atomic_complexity()))
                }
                Sentence::Epistemic(kind, label, _) => {
                    let op = qm.resolve(label)?.op(*kind);
                    if !op.supports_arity(r) {
                        return Err(HoloqError::MissingArity {
                            label: op.to_string(),
                            arity: r,
                        });
                    }
                    Component::Epistemic(Arc::clone(op))
                }
            };
            blocks.push(Block {
                span: occ.span.clone(),
                component,
            });
        }
        out.push(PseudoGate {
            target_level: i,
            blocks,
        });
    }
    Ok(out)
}

/// Pseudo-gate tree of a sentence (length `height - 1`).
pub fn pseudo_gate_tree(
    s: &Sentence,
    perspective: &TruthPerspective,
    qm: &QuasiModel,
) -> Result<Vec<PseudoGate>> {
    compile_pseudo_gates(&SyntacticalTree::build(s), perspective, qm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gatelib::{EpistemicSituation, Fallback, Realization, TableMap};
    use crate::lang::{parse_sentence, EpistemicKind, Label};
    use crate::qlin::{pure_qumix, qumix_close, Ket};

    fn qm() -> QuasiModel {
        QuasiModel::new().with_situation(EpistemicSituation::maximal(
            "a",
            "t",
            TruthPerspective::identity(),
        ))
    }

    #[test]
    fn worked_example_has_four_pseudo_gates() {
        let s = parse_sentence("K[a@t] not T(q, not q, f)").unwrap();
        let pgs = pseudo_gate_tree(&s, &TruthPerspective::identity(), &qm()).unwrap();
        let shown: Vec<String> = pgs.iter().map(|p| p.to_string()).collect();
        assert_eq!(
            shown,
            [
                "I^(1) ⊗ NOT_I^(1) ⊗ I^(1)",
                "T_I^(1,1,1)",
                "NOT_I^(3)",
                "K_a@t^(3)"
            ]
        );
        assert_eq!(
            pgs.iter().map(|p| p.target_level).collect::<Vec<_>>(),
            [4, 3, 2, 1]
        );
    }

    #[test]
    fn atom_has_no_pseudo_gates() {
        let pgs =
            pseudo_gate_tree(&Sentence::atom("q"), &TruthPerspective::identity(), &qm()).unwrap();
        assert!(pgs.is_empty());
    }

    #[test]
    fn xor_single_transition() {
        let s = parse_sentence("q (+) r").unwrap();
        let pgs = pseudo_gate_tree(&s, &TruthPerspective::identity(), &qm()).unwrap();
        assert_eq!(pgs.len(), 1);
        assert_eq!(pgs[0].to_string(), "XOR_I^(1,1)");
    }

    #[test]
    fn unresolved_agent() {
        let s = parse_sentence("K[b@t] q").unwrap();
        assert!(matches!(
            pseudo_gate_tree(&s, &TruthPerspective::identity(), &qm()),
            Err(HoloqError::Unresolved(_))
        ));
    }

    #[test]
    fn missing_arity() {
        let table = TableMap::new(1, vec![], Fallback::Identity).unwrap();
        let k = crate::gatelib::EpistemicOp::new(
            EpistemicKind::Knows,
            Label::new("a", "t"),
            Realization::Table(table),
        );
        let u = k.clone();
        let qm = QuasiModel::new().with_situation(EpistemicSituation::with_ops(
            "a",
            "t",
            TruthPerspective::identity(),
            u,
            k,
        ));
        let s = parse_sentence("K[a@t] (q (+) r)").unwrap();
        assert!(matches!(
            pseudo_gate_tree(&s, &TruthPerspective::identity(), &qm),
            Err(HoloqError::MissingArity { arity: 2, .. })
        ));
    }

    fn negate_middle() -> PseudoGate {
        let s = parse_sentence("T(q, not q, f)").unwrap();
        pseudo_gate_tree(&s, &TruthPerspective::identity(), &qm())
            .unwrap()
            .remove(0)
    }

    #[test]
    fn middle_negation_fixes_symmetric_factor() {
        let rho = pure_qumix(&Ket::superposition(&["000", "010", "100", "110"]).unwrap());
        let out = negate_middle().apply(&rho).unwrap();
        assert!(qumix_close(&out, &rho, 1e-12).unwrap());
    }

    #[test]
    fn middle_negation_on_entangled_input() {
        let rho = pure_qumix(&Ket::superposition(&["010", "100"]).unwrap());
        let expected = pure_qumix(&Ket::superposition(&["000", "110"]).unwrap());
        let out = negate_middle().apply(&rho).unwrap();
        assert!(qumix_close(&out, &expected, 1e-12).unwrap());
    }

    #[test]
    fn identity_channel_pseudo_gate() {
        let s = parse_sentence("K[a@t] T(q, r, f)").unwrap();
        let pgs = pseudo_gate_tree(&s, &TruthPerspective::identity(), &qm()).unwrap();
        let k3 = pgs.last().unwrap();
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(5);
        let rho = crate::random::random_mixed(3, 3, &mut rng);
        assert_eq!(k3.apply(&rho).unwrap(), rho);
    }

    #[test]
    fn table_component_requires_factorized_input() {
        let table = TableMap::new(1, vec![(Qumix::p1(), Qumix::p0())], Fallback::Identity).unwrap();
        let k = crate::gatelib::EpistemicOp::new(
            EpistemicKind::Knows,
            Label::new("a", "t"),
            Realization::Table(table),
        );
        let qm = QuasiModel::new().with_situation(EpistemicSituation::with_ops(
            "a",
            "t",
            TruthPerspective::identity(),
            k.clone(),
            k,
        ));
        let s = parse_sentence("(K[a@t] q) (+) r").unwrap();
        let pgs = pseudo_gate_tree(&s, &TruthPerspective::identity(), &qm).unwrap();
        let product = pure_qumix(&Ket::basis("10").unwrap());
        let out = pgs[0].apply(&product).unwrap();
        assert_eq!(out, pure_qumix(&Ket::basis("00").unwrap()));
        let entangled = pure_qumix(&Ket::superposition(&["01", "10"]).unwrap());
        assert!(matches!(
            pgs[0].apply(&entangled),
            Err(HoloqError::NotFactorizable { .. })
        ));
    }
}
