use std::collections::BTreeMap;
use std::sync::Arc;

use super::epistemic::{Domain, EpistemicOp, Preset, PresetKind};
use super::perspective::TruthPerspective;
use crate::error::{HoloqError, Result};
use crate::lang::{EpistemicKind, Label};

/// `(perspective, domain, U, K)` of one agent at one time.
#[derive(Clone, Debug, PartialEq)]
pub struct EpistemicSituation {
    pub agent: String,
    pub time: String,
    pub perspective: TruthPerspective,
    pub domain: Domain,
    pub understand: Arc<EpistemicOp>,
    pub know: Arc<EpistemicOp>,
}

impl EpistemicSituation {
    /// Both operations realized by the same preset, labelled for `agent@time`.
    pub fn with_preset(
        agent: &str,
        time: &str,
        perspective: TruthPerspective,
        preset: Preset,
    ) -> Self {
        let label = Label::new(agent, time);
        Self::with_ops(
            agent,
            time,
            perspective,
            EpistemicOp::preset(EpistemicKind::Understands, label.clone(), preset.clone()),
            EpistemicOp::preset(EpistemicKind::Knows, label, preset),
        )
    }

    /// Maximal epistemic capacity: `U` and `K` are the identity.
    pub fn maximal(agent: &str, time: &str, perspective: TruthPerspective) -> Self {
        let basis = perspective.clone();
        Self::with_preset(
            agent,
            time,
            perspective,
            Preset::new(PresetKind::Identity, basis),
        )
    }

    pub fn with_ops(
        agent: &str,
        time: &str,
        perspective: TruthPerspective,
        understand: EpistemicOp,
        know: EpistemicOp,
    ) -> Self {
        EpistemicSituation {
            agent: agent.to_string(),
            time: time.to_string(),
            perspective,
            domain: Domain::All,
            understand: Arc::new(understand),
            know: Arc::new(know),
        }
    }

    pub fn op(&self, kind: EpistemicKind) -> &Arc<EpistemicOp> {
        match kind {
            EpistemicKind::Understands => &self.understand,
            EpistemicKind::Knows => &self.know,
        }
    }
}

/// Interpretation of the agent and time names of the language.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Den {
    pub agents: BTreeMap<String, String>,
    pub times: BTreeMap<String, String>,
}

/// Times, agents, their epistemic situations and the name interpretation.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct QuasiModel {
    pub times: Vec<String>,
    pub agents: Vec<String>,
    pub situations: BTreeMap<(String, String), EpistemicSituation>,
    pub den: Den,
}

impl QuasiModel {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers the situation, its agent and its time. Names in sentences
    /// resolve to themselves unless `den` says otherwise.
    pub fn with_situation(mut self, situation: EpistemicSituation) -> Self {
        self.insert(situation);
        self
    }

    pub fn insert(&mut self, situation: EpistemicSituation) {
        if !self.agents.contains(&situation.agent) {
            self.agents.push(situation.agent.clone());
        }
        if !self.times.contains(&situation.time) {
            self.times.push(situation.time.clone());
        }
        self.situations
            .insert((situation.agent.clone(), situation.time.clone()), situation);
    }

    fn den_agent<'a>(&'a self, name: &'a str) -> Result<&'a str> {
        match self.den.agents.get(name) {
            Some(a) => Ok(a),
            None if self.agents.iter().any(|a| a == name) => Ok(name),
            None => Err(HoloqError::Unresolved(format!("agent name `{name}`"))),
        }
    }

    fn den_time<'a>(&'a self, name: &'a str) -> Result<&'a str> {
        match self.den.times.get(name) {
            Some(t) => Ok(t),
            None if self.times.iter().any(|t| t == name) => Ok(name),
            None => Err(HoloqError::Unresolved(format!("time name `{name}`"))),
        }
    }

    /// The situation denoted by the names in `label`.
    pub fn resolve(&self, label: &Label) -> Result<&EpistemicSituation> {
        let agent = self.den_agent(&label.agent)?;
        let time = self.den_time(&label.time)?;
        self.situations
            .get(&(agent.to_string(), time.to_string()))
            .ok_or_else(|| {
                HoloqError::Unresolved(format!("no epistemic situation for {agent}@{time}"))
            })
    }

    /// All agents share one truth-perspective.
    pub fn is_harmonic(&self) -> bool {
        let mut it = self.situations.values().map(|s| &s.perspective);
        match it.next() {
            None => true,
            Some(first) => {
                it.all(|p| crate::qlin::max_entry_distance(p.matrix(), first.matrix()) < 1e-12)
            }
        }
    }

    /// The shared perspective of a harmonic quasi-model.
    pub fn shared_perspective(&self) -> Option<TruthPerspective> {
        if self.is_harmonic() {
            self.situations
                .values()
                .next()
                .map(|s| s.perspective.clone())
        } else {
            None
        }
    }

    /// Every agent has a sound epistemic capacity for its own perspective.
    pub fn is_sound(&self) -> bool {
        self.situations
            .values()
            .all(|s| s.know.has_sound_capacity(&s.perspective))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resolution_through_den() {
        let mut qm = QuasiModel::new().with_situation(EpistemicSituation::maximal(
            "alice",
            "t0",
            TruthPerspective::identity(),
        ));
        assert!(qm.resolve(&Label::new("a", "t")).is_err());
        qm.den.agents.insert("a".into(), "alice".into());
        qm.den.times.insert("t".into(), "t0".into());
        assert_eq!(qm.resolve(&Label::new("a", "t")).unwrap().agent, "alice");
        assert!(qm.resolve(&Label::new("alice", "t0")).is_ok());
        assert!(matches!(
            qm.resolve(&Label::new("b", "t")),
            Err(HoloqError::Unresolved(_))
        ));
    }

    #[test]
    fn harmonic_and_sound() {
        let qm = QuasiModel::new()
            .with_situation(EpistemicSituation::maximal(
                "a",
                "t",
                TruthPerspective::identity(),
            ))
            .with_situation(EpistemicSituation::maximal(
                "b",
                "t",
                TruthPerspective::identity(),
            ));
        assert!(qm.is_harmonic());
        assert!(qm.is_sound());
        let qm = qm.with_situation(EpistemicSituation::with_preset(
            "c",
            "t",
            TruthPerspective::hadamard(),
            Preset::new(PresetKind::FlipInBasis, TruthPerspective::hadamard()),
        ));
        assert!(!qm.is_harmonic());
        assert!(!qm.is_sound());
        assert!(qm.shared_perspective().is_none());
    }
}
