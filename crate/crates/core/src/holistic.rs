//! Holistic evaluation: level meanings, the t/f constraint, contextual
//! meanings, normality and the commutation clauses.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{HoloqError, Result};
use crate::gatelib::{
    compile_pseudo_gates, Block, Component, PseudoGate, QuasiModel, TruthPerspective,
};
use crate::lang::{OccurrencePath, Sentence, SyntacticalTree};
use crate::qlin::{check_qubits, max_entry_distance, probability, reduce, Qumix};

/// Tolerance for the t/f constraint, normality and commutation checks.
pub const TOL_HOLISTIC: f64 = 1e-9;

/// Result of checking one `t`/`f` occurrence against its projector.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstraintCheck {
    pub path: OccurrencePath,
    pub constant: char,
    pub defect: f64,
}

/// The meaning of every level of one sentence's syntactical tree.
#[derive(Clone, Debug)]
pub struct HolisticEvaluation {
    sentence: Sentence,
    perspective: TruthPerspective,
    tree: SyntacticalTree,
    pseudo_gates: Vec<PseudoGate>,
    /// `levels[i - 1]` is the meaning of level `i`.
    levels: Vec<Qumix>,
    constraints: Vec<ConstraintCheck>,
    domain_notes: Vec<String>,
}

fn check_constants(
    tree: &SyntacticalTree,
    level: usize,
    rho: &Qumix,
    perspective: &TruthPerspective,
    out: &mut Vec<ConstraintCheck>,
) -> Result<()> {
    let (p0, p1) = perspective.truth_projectors();
    for (j, occ) in tree.level(level).unwrap_or(&[]).iter().enumerate() {
        let (constant, target) = match occ.sentence {
            Sentence::True => ('t', &p1),
            Sentence::False => ('f', &p0),
            _ => continue,
        };
        let red = reduce(rho, &[occ.span.start])?;
        let defect = max_entry_distance(red.matrix(), target.matrix());
        let path = OccurrencePath::new(level, j + 1);
        if defect > TOL_HOLISTIC {
            return Err(HoloqError::ConstraintViolation {
                path,
                constant,
                defect,
            });
        }
        out.push(ConstraintCheck {
            path,
            constant,
            defect,
        });
    }
    Ok(())
}

fn domain_notes(pg: &PseudoGate, rho: &Qumix, out: &mut Vec<String>) -> Result<()> {
    for b in &pg.blocks {
        if let Component::Epistemic(op) = &b.component {
            if matches!(op.domain, crate::gatelib::Domain::All) {
                continue;
            }
            let local = reduce(rho, &b.span.clone().collect::<Vec<_>>())?;
            if !op.domain.contains(&local) {
                out.push(format!(
                    "input of {op} at level {} lies outside its declared domain",
                    pg.target_level + 1
                ));
            }
        }
    }
    Ok(())
}

/// Computes every level meaning of `s` from the top-level meaning `top`,
/// rejecting the evaluation if some `t`/`f` occurrence is not the
/// corresponding projector of `perspective`.
pub fn evaluate(
    qm: &QuasiModel,
    perspective: &TruthPerspective,
    s: &Sentence,
    top: &Qumix,
) -> Result<HolisticEvaluation> {
    let tree = SyntacticalTree::build(s);
    check_qubits(tree.width())?;
    if top.qubits() != tree.width() {
        return Err(HoloqError::DimensionMismatch {
            expected: tree.width(),
            found: top.qubits(),
        });
    }
    let pseudo_gates = compile_pseudo_gates(&tree, perspective, qm)?;
    let k = tree.height();
    let mut constraints = Vec::new();
    let mut notes = Vec::new();
    let mut levels = vec![top.clone()];
    check_constants(&tree, k, top, perspective, &mut constraints)?;
    for pg in &pseudo_gates {
        let above = levels.last().expect("nonempty");
        domain_notes(pg, above, &mut notes)?;
        let below = pg.apply(above)?;
        check_constants(
            &tree,
            pg.target_level,
            &below,
            perspective,
            &mut constraints,
        )?;
        levels.push(below);
    }
    levels.reverse();
    Ok(HolisticEvaluation {
        sentence: s.clone(),
        perspective: perspective.clone(),
        tree,
        pseudo_gates,
        levels,
        constraints,
        domain_notes: notes,
    })
}

impl HolisticEvaluation {
    pub fn sentence(&self) -> &Sentence {
        &self.sentence
    }

    pub fn perspective(&self) -> &TruthPerspective {
        &self.perspective
    }

    pub fn tree(&self) -> &SyntacticalTree {
        &self.tree
    }

    /// In application order (top level first).
    pub fn pseudo_gates(&self) -> &[PseudoGate] {
        &self.pseudo_gates
    }

    pub fn height(&self) -> usize {
        self.levels.len()
    }

    /// Meaning of level `i` (1-based).
    pub fn level_meaning(&self, i: usize) -> Option<&Qumix> {
        i.checked_sub(1).and_then(|k| self.levels.get(k))
    }

    /// The meaning of the sentence itself (level 1).
    pub fn meaning(&self) -> &Qumix {
        &self.levels[0]
    }

    pub fn top(&self) -> &Qumix {
        self.levels.last().expect("at least one level")
    }

    pub fn probability(&self) -> f64 {
        probability(&self.perspective, self.meaning())
    }

    pub fn constraints(&self) -> &[ConstraintCheck] {
        &self.constraints
    }

    pub fn domain_notes(&self) -> &[String] {
        &self.domain_notes
    }

    fn pseudo_gate_into(&self, level: usize) -> Option<&PseudoGate> {
        self.pseudo_gates.iter().find(|pg| pg.target_level == level)
    }

    /// The block of the pseudo-gate that produces the occurrence at `path`.
    pub fn block_at(&self, path: OccurrencePath) -> Option<&Block> {
        self.pseudo_gate_into(path.level)?
            .blocks
            .get(path.position.checked_sub(1)?)
    }

    /// Reduced state of the occurrence at `path` within its level's meaning.
    pub fn contextual_meaning(&self, path: OccurrencePath) -> Result<Qumix> {
        let occ = self.tree.get(path).ok_or(HoloqError::InvalidPath(path))?;
        let level = &self.levels[path.level - 1];
        if occ.span.len() == level.qubits() {
            return Ok(level.clone());
        }
        reduce(level, &occ.span.clone().collect::<Vec<_>>())
    }

    /// Truth probability of the occurrence's contextual meaning.
    pub fn contextual_probability(&self, path: OccurrencePath) -> Result<f64> {
        Ok(probability(
            &self.perspective,
            &self.contextual_meaning(path)?,
        ))
    }

    /// Compares the contextual meanings of all occurrences of each subformula.
    pub fn check_normal(&self) -> NormalityReport {
        let mut groups: Vec<(Sentence, Vec<OccurrencePath>)> = Vec::new();
        for path in self.tree.paths() {
            let s = &self.tree.get(path).expect("own path").sentence;
            match groups.iter_mut().find(|(g, _)| g == s) {
                Some((_, paths)) => paths.push(path),
                None => groups.push((s.clone(), vec![path])),
            }
        }
        let mut violations = Vec::new();
        let mut compared = 0;
        for (s, paths) in &groups {
            let meanings: Vec<Qumix> = paths
                .iter()
                .map(|&p| self.contextual_meaning(p).expect("own path"))
                .collect();
            for a in 0..paths.len() {
                for b in a + 1..paths.len() {
                    compared += 1;
                    let defect = max_entry_distance(meanings[a].matrix(), meanings[b].matrix());
                    if defect > TOL_HOLISTIC {
                        violations.push(NormalityViolation {
                            sentence: s.clone(),
                            first: paths[a],
                            second: paths[b],
                            defect,
                        });
                    }
                }
            }
        }
        NormalityReport {
            groups: groups.len(),
            compared,
            violations,
        }
    }

    /// For every compound occurrence, compares its contextual meaning with
    /// the producing block applied to the joint reduction of its children.
    pub fn check_commutation(&self) -> CommutationReport {
        let mut checks = Vec::new();
        for path in self.tree.paths() {
            if path.level == self.height() {
                continue;
            }
            let occ = self.tree.get(path).expect("own path");
            let clause = match occ.sentence {
                Sentence::Not(_) => 1,
                Sentence::SqrtId(_) => 2,
                Sentence::Toffoli(..) => 3,
                Sentence::Xor(..) => 4,
                Sentence::Epistemic(crate::lang::EpistemicKind::Understands, ..) => 5,
                Sentence::Epistemic(crate::lang::EpistemicKind::Knows, ..) => 6,
                _ => continue,
            };
            let block = self
                .block_at(path)
                .expect("compound occurrence has a block");
            let above = &self.levels[path.level];
            let outcome = reduce(above, &occ.span.clone().collect::<Vec<_>>())
                .and_then(|joint| block.apply_local(&joint))
                .and_then(|rhs| {
                    let lhs = self.contextual_meaning(path)?;
                    Ok(max_entry_distance(lhs.matrix(), rhs.matrix()))
                });
            checks.push(CommutationCheck {
                clause,
                path,
                sentence: occ.sentence.clone(),
                defect: outcome.map_err(|e| e.to_string()),
            });
        }
        CommutationReport { checks }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NormalityViolation {
    pub sentence: Sentence,
    pub first: OccurrencePath,
    pub second: OccurrencePath,
    pub defect: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NormalityReport {
    /// Number of distinct subformulas.
    pub groups: usize,
    /// Number of occurrence pairs compared.
    pub compared: usize,
    pub violations: Vec<NormalityViolation>,
}

impl NormalityReport {
    pub fn is_normal(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for NormalityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_normal() {
            return write!(f, "normal ({} pairs compared)", self.compared);
        }
        write!(f, "not normal:")?;
        for v in &self.violations {
            write!(
                f,
                " {} at {} vs {} (defect {:.3e});",
                v.sentence, v.first, v.second, v.defect
            )?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CommutationCheck {
    /// 1 negation, 2 square root of identity, 3 Toffoli, 4 XOR,
    /// 5 understanding, 6 knowledge.
    pub clause: u8,
    pub path: OccurrencePath,
    pub sentence: Sentence,
    /// Max entrywise defect, or the error raised while applying the block.
    pub defect: std::result::Result<f64, String>,
}

impl CommutationCheck {
    pub fn holds(&self) -> bool {
        matches!(self.defect, Ok(d) if d <= TOL_HOLISTIC)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CommutationReport {
    pub checks: Vec<CommutationCheck>,
}

impl CommutationReport {
    pub fn holds(&self) -> bool {
        self.checks.iter().all(CommutationCheck::holds)
    }

    /// `(checked, failed)` per clause number.
    pub fn per_clause(&self) -> BTreeMap<u8, (usize, usize)> {
        let mut out = BTreeMap::new();
        for c in &self.checks {
            let e = out.entry(c.clause).or_insert((0, 0));
            e.0 += 1;
            if !c.holds() {
                e.1 += 1;
            }
        }
        out
    }

    pub fn max_defect(&self) -> f64 {
        self.checks
            .iter()
            .map(|c| c.defect.clone().unwrap_or(f64::INFINITY))
            .fold(0.0, f64::max)
    }
}

impl fmt::Display for CommutationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .per_clause()
            .iter()
            .map(|(k, (n, bad))| format!("clause {k}: {}/{n}", n - bad))
            .collect();
        if parts.is_empty() {
            return f.write_str("no compound occurrences");
        }
        f.write_str(&parts.join(", "))
    }
}

/// Key under which an assignment for a perspective is stored: the preset
/// name when there is one, the matrix rendering otherwise.
pub fn perspective_key(p: &TruthPerspective) -> String {
    p.to_string()
}

/// Top-level meanings of finitely many sentences, per perspective key.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ModelAssignment {
    entries: BTreeMap<String, (Sentence, BTreeMap<String, Qumix>)>,
}

impl ModelAssignment {
    pub fn new() -> Self {
        Self::default()
    }

    /// Stores `rho` as the top-level meaning of `s` under `key`.
    pub fn insert(&mut self, s: &Sentence, key: &str, rho: Qumix) -> Result<()> {
        let n = s.atomic_complexity();
        if rho.qubits() != n {
            return Err(HoloqError::DimensionMismatch {
                expected: n,
                found: rho.qubits(),
            });
        }
        self.entries
            .entry(s.to_string())
            .or_insert_with(|| (s.clone(), BTreeMap::new()))
            .1
            .insert(key.to_string(), rho);
        Ok(())
    }

    pub fn with(mut self, s: &Sentence, key: &str, rho: Qumix) -> Result<Self> {
        self.insert(s, key, rho)?;
        Ok(self)
    }

    pub fn get(&self, s: &Sentence, key: &str) -> Result<&Qumix> {
        self.entries
            .get(&s.to_string())
            .and_then(|(_, m)| m.get(key))
            .ok_or_else(|| HoloqError::MissingAssignment {
                sentence: s.to_string(),
                perspective: key.to_string(),
            })
    }

    /// `(sentence, perspective key, top meaning)` in canonical order.
    pub fn iter(&self) -> impl Iterator<Item = (&Sentence, &str, &Qumix)> {
        self.entries
            .values()
            .flat_map(|(s, m)| m.iter().map(move |(k, rho)| (s, k.as_str(), rho)))
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Evaluates `s` from its assigned top meaning under `perspective`.
    pub fn evaluate(
        &self,
        qm: &QuasiModel,
        perspective: &TruthPerspective,
        s: &Sentence,
    ) -> Result<HolisticEvaluation> {
        evaluate(
            qm,
            perspective,
            s,
            self.get(s, &perspective_key(perspective))?,
        )
    }
}
