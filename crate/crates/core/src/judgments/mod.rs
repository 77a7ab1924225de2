//! Truth, contextual truth, consequence by sampling, the no-contradiction
//! suite and the epistemic-situation scenarios.

mod sampler;
mod scenarios;

use std::fmt;

use rand::Rng;

pub use sampler::{sample_top, Generator, SamplerConfig, TopLayout};
pub use scenarios::{
    run_all, run_situation, ScenarioCheck, ScenarioConfig, ScenarioReport, SITUATIONS,
};

use crate::error::{HoloqError, Result};
use crate::gatelib::{EpistemicSituation, QuasiModel, TruthPerspective};
use crate::holistic::{evaluate, HolisticEvaluation, ModelAssignment};
use crate::lang::{Label, OccurrencePath, Sentence, SyntacticalTree};
use crate::qlin::{max_entry_distance, probability, Qumix};
use crate::random::random_perspective;

/// A probability at or above this counts as truth.
pub const TRUTH_THRESHOLD: f64 = 1.0 - 1e-9;

/// `p(Hol(s)) = 1` (within `1e-9`) for the top meaning assigned to `s`.
pub fn is_true(
    qm: &QuasiModel,
    perspective: &TruthPerspective,
    s: &Sentence,
    assignment: &ModelAssignment,
) -> Result<bool> {
    Ok(assignment.evaluate(qm, perspective, s)?.probability() >= TRUTH_THRESHOLD)
}

/// Truth of the occurrence at `path` in the context of the evaluated sentence.
pub fn is_true_contextual(ev: &HolisticEvaluation, path: OccurrencePath) -> Result<bool> {
    Ok(ev.contextual_probability(path)? >= TRUTH_THRESHOLD)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClaimKind {
    /// The context is true in every sampled model.
    Truth,
    /// The conclusion is contextually true in every sampled model of the context.
    ContextualTruth,
    /// Whenever all premises are contextually true, so is the conclusion.
    Consequence,
    /// As `Consequence`, restricted to harmonic quasi-models and their shared perspective.
    HarmonicConsequence,
}

impl ClaimKind {
    pub fn name(self) -> &'static str {
        match self {
            ClaimKind::Truth => "truth",
            ClaimKind::ContextualTruth => "contextual-truth",
            ClaimKind::Consequence => "consequence",
            ClaimKind::HarmonicConsequence => "harmonic-consequence",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        [
            ClaimKind::Truth,
            ClaimKind::ContextualTruth,
            ClaimKind::Consequence,
            ClaimKind::HarmonicConsequence,
        ]
        .into_iter()
        .find(|k| k.name() == name)
    }
}

/// Which truth-perspective a claim is judged under.
#[derive(Clone, Debug, PartialEq)]
pub enum PerspectiveScope {
    Fixed(TruthPerspective),
    /// The perspective of the agent's epistemic situation.
    Agent(Label),
    /// Cycles through `I`, `H`, `X`, then random perspectives.
    Sampled,
}

impl fmt::Display for PerspectiveScope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PerspectiveScope::Fixed(p) => write!(f, "{p}"),
            PerspectiveScope::Agent(l) => write!(f, "per-agent:{l}"),
            PerspectiveScope::Sampled => f.write_str("sampled"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Claim {
    pub kind: ClaimKind,
    pub context: Sentence,
    pub premises: Vec<Sentence>,
    pub conclusion: Sentence,
    pub scope: PerspectiveScope,
}

impl Claim {
    pub fn truth(s: Sentence, scope: PerspectiveScope) -> Self {
        Claim {
            kind: ClaimKind::Truth,
            conclusion: s.clone(),
            context: s,
            premises: Vec::new(),
            scope,
        }
    }

    pub fn contextual_truth(context: Sentence, sub: Sentence, scope: PerspectiveScope) -> Self {
        Claim {
            kind: ClaimKind::ContextualTruth,
            context,
            premises: Vec::new(),
            conclusion: sub,
            scope,
        }
    }

    pub fn consequence(
        context: Sentence,
        premises: Vec<Sentence>,
        conclusion: Sentence,
        scope: PerspectiveScope,
    ) -> Self {
        Claim {
            kind: ClaimKind::Consequence,
            context,
            premises,
            conclusion,
            scope,
        }
    }

    /// Judged under the shared perspective of a harmonic quasi-model.
    pub fn harmonic(context: Sentence, premises: Vec<Sentence>, conclusion: Sentence) -> Self {
        Claim {
            kind: ClaimKind::HarmonicConsequence,
            context,
            premises,
            conclusion,
            scope: PerspectiveScope::Sampled,
        }
    }

    /// Occurrence paths of the premises and the conclusion (first
    /// occurrence of each; all occurrences agree in a normal model).
    pub fn paths(&self, tree: &SyntacticalTree) -> Result<(Vec<OccurrencePath>, OccurrencePath)> {
        let locate = |s: &Sentence| {
            tree.occurrences_of(s)
                .first()
                .copied()
                .ok_or_else(|| HoloqError::NotSubformula {
                    sub: s.to_string(),
                    context: self.context.to_string(),
                })
        };
        let premises = self
            .premises
            .iter()
            .map(locate)
            .collect::<Result<Vec<_>>>()?;
        Ok((premises, locate(&self.conclusion)?))
    }

    fn perspective<R: Rng + ?Sized>(
        &self,
        qm: &QuasiModel,
        index: usize,
        rng: &mut R,
    ) -> Result<TruthPerspective> {
        if self.kind == ClaimKind::HarmonicConsequence {
            return qm.shared_perspective().ok_or_else(|| {
                HoloqError::Preset("harmonic consequence needs a harmonic quasi-model".into())
            });
        }
        Ok(match &self.scope {
            PerspectiveScope::Fixed(p) => p.clone(),
            PerspectiveScope::Agent(l) => qm.resolve(l)?.perspective.clone(),
            PerspectiveScope::Sampled => match index % 5 {
                0 => TruthPerspective::identity(),
                1 => TruthPerspective::hadamard(),
                2 => TruthPerspective::bit_flip(),
                _ => random_perspective(rng),
            },
        })
    }
}

impl fmt::Display for Claim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            ClaimKind::Truth => write!(f, "|= {}", self.context),
            ClaimKind::ContextualTruth => write!(f, "|=[{}] {}", self.context, self.conclusion),
            ClaimKind::Consequence | ClaimKind::HarmonicConsequence => {
                let ps: Vec<String> = self.premises.iter().map(|p| p.to_string()).collect();
                let tag = if self.kind == ClaimKind::HarmonicConsequence {
                    "harm"
                } else {
                    ""
                };
                write!(
                    f,
                    "{} |={tag}[{}] {}",
                    ps.join(", "),
                    self.context,
                    self.conclusion
                )
            }
        }
    }
}

/// A concrete model in which a claim fails.
#[derive(Clone, Debug, PartialEq)]
pub struct Counterexample {
    pub claim: Claim,
    pub model: QuasiModel,
    pub perspective: TruthPerspective,
    /// Top-level meaning of the claim's context.
    pub top: Qumix,
    pub sample_index: Option<usize>,
    pub premise_probabilities: Vec<f64>,
    pub conclusion_probability: f64,
}

/// Probabilities recomputed from a counterexample.
#[derive(Clone, Debug, PartialEq)]
pub struct Replay {
    pub premise_probabilities: Vec<f64>,
    pub conclusion_probability: f64,
}

impl Replay {
    /// Premises true and conclusion not.
    pub fn fails_claim(&self) -> bool {
        self.premise_probabilities
            .iter()
            .all(|&p| p >= TRUTH_THRESHOLD)
            && self.conclusion_probability < TRUTH_THRESHOLD
    }
}

impl Counterexample {
    /// Re-evaluates the claim in the stored model.
    pub fn replay(&self) -> Result<Replay> {
        let (replay, _) = judge(&self.claim, &self.model, &self.perspective, &self.top)?;
        Ok(replay)
    }

    /// The stored probabilities are reproduced within `tol` and still fail the claim.
    pub fn reproduces(&self, tol: f64) -> Result<bool> {
        let r = self.replay()?;
        let close = r.premise_probabilities.len() == self.premise_probabilities.len()
            && r.premise_probabilities
                .iter()
                .zip(&self.premise_probabilities)
                .all(|(a, b)| (a - b).abs() <= tol)
            && (r.conclusion_probability - self.conclusion_probability).abs() <= tol;
        Ok(close && r.fails_claim())
    }
}

fn judge(
    claim: &Claim,
    qm: &QuasiModel,
    p: &TruthPerspective,
    top: &Qumix,
) -> Result<(Replay, HolisticEvaluation)> {
    let ev = evaluate(qm, p, &claim.context, top)?;
    let (premises, conclusion) = claim.paths(ev.tree())?;
    let premise_probabilities = premises
        .iter()
        .map(|&path| ev.contextual_probability(path))
        .collect::<Result<Vec<_>>>()?;
    let conclusion_probability = ev.contextual_probability(conclusion)?;
    Ok((
        Replay {
            premise_probabilities,
            conclusion_probability,
        },
        ev,
    ))
}

/// Judges a claim in one explicitly given model; `Some` if it fails there.
pub fn witness(
    claim: &Claim,
    qm: &QuasiModel,
    perspective: &TruthPerspective,
    top: &Qumix,
) -> Result<Option<Counterexample>> {
    let (r, ev) = judge(claim, qm, perspective, top)?;
    if !ev.check_normal().is_normal() {
        return Err(HoloqError::Preset(format!(
            "witness model for `{}` is not normal",
            claim.context
        )));
    }
    Ok(r.fails_claim().then(|| Counterexample {
        claim: claim.clone(),
        model: qm.clone(),
        perspective: perspective.clone(),
        top: top.clone(),
        sample_index: None,
        premise_probabilities: r.premise_probabilities,
        conclusion_probability: r.conclusion_probability,
    }))
}

#[derive(Clone, Debug, PartialEq)]
pub enum Outcome {
    CounterexampleFound(Box<Counterexample>),
    NoCounterexampleFound {
        samples: usize,
    },
    /// Established for fixed constants without sampling.
    Holds {
        witness: String,
    },
}

/// Result of a sampled claim check, with sampling diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub outcome: Outcome,
    /// Samples drawn (up to and including a counterexample).
    pub drawn: usize,
    /// Samples giving a normal model that satisfies the t/f constraint.
    pub accepted: usize,
    /// Accepted samples in which every premise was true.
    pub antecedent_hits: usize,
    pub rejected_constraint: usize,
    pub rejected_non_normal: usize,
}

impl Verdict {
    pub fn counterexample(&self) -> Option<&Counterexample> {
        match &self.outcome {
            Outcome::CounterexampleFound(c) => Some(c),
            _ => None,
        }
    }

    pub fn found_counterexample(&self) -> bool {
        self.counterexample().is_some()
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.outcome {
            Outcome::CounterexampleFound(c) => write!(
                f,
                "counterexample at sample {} (conclusion p = {})",
                c.sample_index.map_or("-".to_string(), |i| i.to_string()),
                crate::fmt_probability(c.conclusion_probability)
            ),
            Outcome::NoCounterexampleFound { samples } => write!(
                f,
                "no counterexample in {samples} samples ({} accepted, {} with true premises)",
                self.accepted, self.antecedent_hits
            ),
            Outcome::Holds { witness } => write!(f, "holds: {witness}"),
        }
    }
}

/// Projects the premise occurrence onto truth at its level and pulls the
/// state back to the top through the (unitary) pseudo-gates above it.
fn back_solve(ev: &HolisticEvaluation, path: OccurrencePath) -> Result<Option<Qumix>> {
    let occ = ev.tree().get(path).ok_or(HoloqError::InvalidPath(path))?;
    let level = ev.level_meaning(path.level).expect("valid level");
    let n = level.qubits();
    let t = ev.perspective().truth_ket();
    let proj = &t * t.adjoint();
    let pi = crate::qlin::embed(n, &[occ.span.end - 1], &proj);
    let mut m = &pi * level.matrix() * &pi;
    let tr = m.trace().re;
    if tr < 1e-9 {
        return Ok(None);
    }
    m /= crate::qlin::c(tr, 0.0);
    for pg in ev.pseudo_gates().iter().rev() {
        if pg.target_level >= path.level {
            let Some(u) = pg.unitary()? else {
                return Ok(None);
            };
            m = u.adjoint() * m * u;
        }
    }
    let h = (&m + m.adjoint()) * crate::qlin::c(0.5, 0.0);
    Ok(Some(Qumix::from_matrix_unchecked(h)?))
}

fn rejectable(e: &HoloqError) -> bool {
    matches!(
        e,
        HoloqError::ConstraintViolation { .. }
            | HoloqError::NotFactorizable { .. }
            | HoloqError::TableMiss { .. }
    )
}

/// Samples normal models of the claim's context in the quasi-model and
/// returns the lowest-index counterexample, if any.
///
/// Fails with [`HoloqError::SamplerExhausted`] when no accepted sample
/// made all premises true.
pub fn check_consequence(claim: &Claim, qm: &QuasiModel, cfg: &SamplerConfig) -> Result<Verdict> {
    cfg.validate()?;
    let tree = SyntacticalTree::build(&claim.context);
    claim.paths(&tree)?;
    let layout = TopLayout::of(&tree);
    let mut v = Verdict {
        outcome: Outcome::NoCounterexampleFound {
            samples: cfg.samples,
        },
        drawn: 0,
        accepted: 0,
        antecedent_hits: 0,
        rejected_constraint: 0,
        rejected_non_normal: 0,
    };
    for i in 0..cfg.samples {
        v.drawn += 1;
        let mut rng = cfg.rng(i);
        let generator = cfg.generator(i);
        let p = claim.perspective(qm, i, &mut rng)?;
        let mut top = sample_top(&layout, &p, generator, &mut rng)?;
        if generator == Generator::BackSolved && !claim.premises.is_empty() {
            let (premise_paths, _) = claim.paths(&tree)?;
            for path in premise_paths {
                match evaluate(qm, &p, &claim.context, &top) {
                    Ok(ev) => {
                        if let Some(next) = back_solve(&ev, path)? {
                            top = next;
                        }
                    }
                    Err(e) if rejectable(&e) => break,
                    Err(e) => return Err(e),
                }
            }
        }
        let (r, ev) = match judge(claim, qm, &p, &top) {
            Ok(x) => x,
            Err(e) if rejectable(&e) => {
                v.rejected_constraint += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        if !ev.check_normal().is_normal() {
            v.rejected_non_normal += 1;
            continue;
        }
        v.accepted += 1;
        if r.premise_probabilities
            .iter()
            .all(|&x| x >= TRUTH_THRESHOLD)
        {
            v.antecedent_hits += 1;
            if r.conclusion_probability < TRUTH_THRESHOLD {
                v.outcome = Outcome::CounterexampleFound(Box::new(Counterexample {
                    claim: claim.clone(),
                    model: qm.clone(),
                    perspective: p,
                    top,
                    sample_index: Some(i),
                    premise_probabilities: r.premise_probabilities,
                    conclusion_probability: r.conclusion_probability,
                }));
                return Ok(v);
            }
        }
    }
    if v.antecedent_hits == 0 {
        return Err(HoloqError::SamplerExhausted {
            samples: cfg.samples,
        });
    }
    Ok(v)
}

/// Identity-capacity situations under `p` for every label of `s`.
pub fn maximal_model_for(s: &Sentence, p: &TruthPerspective) -> QuasiModel {
    let mut qm = QuasiModel::new();
    for l in s.labels() {
        qm.insert(EpistemicSituation::maximal(&l.agent, &l.time, p.clone()));
    }
    qm
}

/// Outcome of [`lemma_noncontradiction`].
#[derive(Clone, Debug, PartialEq)]
pub struct LemmaReport {
    pub sentence: Sentence,
    pub evaluated: usize,
    pub perspectives: usize,
    pub max_probability: f64,
    /// Index of the sample attaining the maximum.
    pub argmax: Option<usize>,
    /// A sample with `p >= 1 - 1e-6`, which would refute the lemma.
    pub violation: Option<Box<Counterexample>>,
}

impl LemmaReport {
    pub fn holds(&self) -> bool {
        self.violation.is_none()
    }
}

/// Evaluates `alpha /\ not alpha` over sampled normal models and
/// perspectives and records the largest truth probability seen.
///
/// Perspective of sample `i` is `perspectives[i % len]`, where the list is
/// `I`, `H`, `X` followed by random perspectives up to `perspective_count`.
pub fn lemma_noncontradiction(
    alpha: &Sentence,
    cfg: &SamplerConfig,
    perspective_count: usize,
) -> Result<LemmaReport> {
    cfg.validate()?;
    let s = Sentence::and(alpha.clone(), Sentence::not(alpha.clone()));
    let tree = SyntacticalTree::build(&s);
    let layout = TopLayout::of(&tree);
    let mut prng = cfg.rng(usize::MAX);
    let mut perspectives = vec![
        TruthPerspective::identity(),
        TruthPerspective::hadamard(),
        TruthPerspective::bit_flip(),
    ];
    while perspectives.len() < perspective_count.max(1) {
        perspectives.push(random_perspective(&mut prng));
    }
    perspectives.truncate(perspective_count.max(1));
    let claim = Claim::truth(s.clone(), PerspectiveScope::Sampled);
    let mut report = LemmaReport {
        sentence: s.clone(),
        evaluated: 0,
        perspectives: perspectives.len(),
        max_probability: 0.0,
        argmax: None,
        violation: None,
    };
    for i in 0..cfg.samples {
        let mut rng = cfg.rng(i);
        let p = &perspectives[i % perspectives.len()];
        let qm = maximal_model_for(&s, p);
        let top = sample_top(&layout, p, cfg.generator(i), &mut rng)?;
        let ev = match evaluate(&qm, p, &s, &top) {
            Ok(ev) => ev,
            Err(e) if rejectable(&e) => continue,
            Err(e) => return Err(e),
        };
        if !ev.check_normal().is_normal() {
            continue;
        }
        report.evaluated += 1;
        let prob = ev.probability();
        if prob > report.max_probability || report.argmax.is_none() {
            report.max_probability = prob;
            report.argmax = Some(i);
        }
        if prob >= 1.0 - 1e-6 && report.violation.is_none() {
            report.violation = Some(Box::new(Counterexample {
                claim: claim.clone(),
                model: qm,
                perspective: p.clone(),
                top,
                sample_index: Some(i),
                premise_probabilities: Vec::new(),
                conclusion_probability: prob,
            }));
        }
    }
    Ok(report)
}

/// Largest entrywise distance between two states of equal size.
pub(crate) fn state_defect(a: &Qumix, b: &Qumix) -> f64 {
    max_entry_distance(a.matrix(), b.matrix())
}

/// Truth probability under `p`, re-exported for scenario reports.
pub(crate) fn prob(p: &TruthPerspective, rho: &Qumix) -> f64 {
    probability(p, rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gatelib::{Preset, PresetKind};
    use crate::lang::parse_sentence;
    use crate::qlin::{pure_qumix, Ket};

    fn sp(s: &str) -> Sentence {
        parse_sentence(s).unwrap()
    }

    fn id() -> TruthPerspective {
        TruthPerspective::identity()
    }

    fn qm() -> QuasiModel {
        QuasiModel::new().with_situation(EpistemicSituation::with_preset(
            "a",
            "t",
            id(),
            Preset::new(PresetKind::DephaseInBasis, id()),
        ))
    }

    #[test]
    fn truth_examples() {
        let s = sp("K[a@t] t");
        let a = ModelAssignment::new().with(&s, "I", Qumix::p1()).unwrap();
        assert!(is_true(&qm(), &id(), &s, &a).unwrap());
        let a = ModelAssignment::new()
            .with(&Sentence::False, "I", Qumix::p0())
            .unwrap();
        assert!(!is_true(&qm(), &id(), &Sentence::False, &a).unwrap());
    }

    #[test]
    fn contextual_truth_examples() {
        let s = sp("T(q, not q, f)");
        let top = pure_qumix(&Ket::basis("110").unwrap());
        let ev = evaluate(&qm(), &id(), &s, &top).unwrap();
        assert!(is_true_contextual(&ev, OccurrencePath::new(2, 1)).unwrap());
        assert!(!is_true_contextual(&ev, OccurrencePath::new(1, 1)).unwrap());
        let ev = evaluate(&qm(), &id(), &Sentence::True, &Qumix::p1()).unwrap();
        assert!(is_true_contextual(&ev, OccurrencePath::new(1, 1)).unwrap());
    }

    #[test]
    fn knowledge_implies_truth_on_samples() {
        let claim = Claim::harmonic(sp("K[a@t] q"), vec![sp("K[a@t] q")], sp("q"));
        let v = check_consequence(&claim, &qm(), &SamplerConfig::new(1, 120)).unwrap();
        assert!(
            matches!(v.outcome, Outcome::NoCounterexampleFound { .. }),
            "{v}"
        );
        assert!(v.antecedent_hits > 0);
    }

    #[test]
    fn reflexive_consequence() {
        let claim = Claim::consequence(sp("q"), vec![sp("q")], sp("q"), PerspectiveScope::Sampled);
        let v = check_consequence(&claim, &QuasiModel::new(), &SamplerConfig::new(2, 50)).unwrap();
        assert!(!v.found_counterexample());
    }

    #[test]
    fn not_a_subformula() {
        let claim = Claim::consequence(sp("q"), vec![sp("r")], sp("q"), PerspectiveScope::Sampled);
        assert!(matches!(
            check_consequence(&claim, &QuasiModel::new(), &SamplerConfig::new(2, 5)),
            Err(HoloqError::NotSubformula { .. })
        ));
    }

    #[test]
    fn exhaustion_is_reported() {
        let claim = Claim::consequence(
            sp("T(q, not q, f)"),
            vec![sp("T(q, not q, f)")],
            sp("q"),
            PerspectiveScope::Fixed(id()),
        );
        let cfg = SamplerConfig::new(0, 30).with_generators(&[Generator::BasisProducts]);
        assert!(matches!(
            check_consequence(&claim, &QuasiModel::new(), &cfg),
            Err(HoloqError::SamplerExhausted { samples: 30 })
        ));
    }

    #[test]
    fn back_solving_reaches_measure_zero_antecedents() {
        // sqrtid q is true only when q is the Hadamard image of the truth.
        let claim = Claim::consequence(
            sp("sqrtid q"),
            vec![sp("sqrtid q")],
            sp("sqrtid q"),
            PerspectiveScope::Fixed(id()),
        );
        let cfg = SamplerConfig::new(4, 20).with_generators(&[Generator::BackSolved]);
        let v = check_consequence(&claim, &QuasiModel::new(), &cfg).unwrap();
        assert_eq!(v.antecedent_hits, 20);
    }

    #[test]
    fn seed_determinism() {
        let claim = Claim::consequence(
            sp("q (+) r"),
            vec![sp("q")],
            sp("q (+) r"),
            PerspectiveScope::Sampled,
        );
        let cfg = SamplerConfig::new(9, 40);
        let a = check_consequence(&claim, &QuasiModel::new(), &cfg).unwrap();
        let b = check_consequence(&claim, &QuasiModel::new(), &cfg).unwrap();
        assert_eq!(a, b);
        assert!(a.found_counterexample());
        let cx = a.counterexample().unwrap();
        assert!(cx.reproduces(0.0).unwrap());
    }

    #[test]
    fn lemma_for_atoms_and_constants() {
        let cfg = SamplerConfig::new(5, 100);
        let r = lemma_noncontradiction(&sp("q"), &cfg, 5).unwrap();
        assert!(r.holds());
        assert!(r.max_probability <= 0.5 + 1e-9);
        let r = lemma_noncontradiction(&Sentence::True, &cfg, 5).unwrap();
        assert!(r.max_probability.abs() < 1e-12);
    }
}
