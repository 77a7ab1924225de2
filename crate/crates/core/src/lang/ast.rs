use std::fmt;

/// Which epistemic connective prefixes a sentence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EpistemicKind {
    /// `U[a@t]`: the agent understands the sentence at the time.
    Understands,
    /// `K[a@t]`: the agent knows the sentence at the time.
    Knows,
}

impl EpistemicKind {
    pub fn letter(self) -> char {
        match self {
            EpistemicKind::Understands => 'U',
            EpistemicKind::Knows => 'K',
        }
    }
}

/// Agent and time names attached to an epistemic connective.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label {
    pub agent: String,
    pub time: String,
}

impl Label {
    pub fn new(agent: impl Into<String>, time: impl Into<String>) -> Self {
        Label {
            agent: agent.into(),
            time: time.into(),
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.agent, self.time)
    }
}

/// A sentence of the epistemic quantum computational language.
///
/// Conjunction has no node of its own: `a /\ b` is stored as
/// `Toffoli(a, b, False)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Sentence {
    Atom(String),
    True,
    False,
    Not(Box<Sentence>),
    SqrtId(Box<Sentence>),
    Toffoli(Box<Sentence>, Box<Sentence>, Box<Sentence>),
    Xor(Box<Sentence>, Box<Sentence>),
    Epistemic(EpistemicKind, Label, Box<Sentence>),
}

impl Sentence {
    pub fn atom(name: impl Into<String>) -> Self {
        Sentence::Atom(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(s: Sentence) -> Self {
        Sentence::Not(Box::new(s))
    }

    pub fn sqrt_id(s: Sentence) -> Self {
        Sentence::SqrtId(Box::new(s))
    }

    pub fn toffoli(a: Sentence, b: Sentence, c: Sentence) -> Self {
        Sentence::Toffoli(Box::new(a), Box::new(b), Box::new(c))
    }

    /// `a /\ b`, i.e. `T(a, b, f)`.
    pub fn and(a: Sentence, b: Sentence) -> Self {
        Sentence::toffoli(a, b, Sentence::False)
    }

    pub fn xor(a: Sentence, b: Sentence) -> Self {
        Sentence::Xor(Box::new(a), Box::new(b))
    }

    pub fn knows(agent: &str, time: &str, s: Sentence) -> Self {
        Sentence::Epistemic(EpistemicKind::Knows, Label::new(agent, time), Box::new(s))
    }

    pub fn understands(agent: &str, time: &str, s: Sentence) -> Self {
        Sentence::Epistemic(
            EpistemicKind::Understands,
            Label::new(agent, time),
            Box::new(s),
        )
    }

    /// Atoms and the two truth-value constants.
    pub fn is_atomic(&self) -> bool {
        matches!(self, Sentence::Atom(_) | Sentence::True | Sentence::False)
    }

    /// Immediate subsentences, left to right.
    pub fn children(&self) -> Vec<&Sentence> {
        match self {
            Sentence::Atom(_) | Sentence::True | Sentence::False => Vec::new(),
            Sentence::Not(c) | Sentence::SqrtId(c) | Sentence::Epistemic(_, _, c) => vec![c],
            Sentence::Toffoli(a, b, c) => vec![a, b, c],
            Sentence::Xor(a, b) => vec![a, b],
        }
    }

    /// Number of atomic occurrences (atoms, `t` and `f` all count). This is
    /// the qubit count of the sentence's semantic space.
    pub fn atomic_complexity(&self) -> usize {
        if self.is_atomic() {
            1
        } else {
            self.children().iter().map(|c| c.atomic_complexity()).sum()
        }
    }

    /// Atomic leaves in left-to-right order.
    pub fn leaves(&self) -> Vec<&Sentence> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a Sentence>) {
        if self.is_atomic() {
            out.push(self);
        } else {
            for c in self.children() {
                c.collect_leaves(out);
            }
        }
    }

    /// Length of the longest root-to-leaf path, counting nodes.
    pub fn depth(&self) -> usize {
        1 + self.children().iter().map(|c| c.depth()).max().unwrap_or(0)
    }

    /// Every distinct `(agent, time)` label used by an epistemic connective.
    pub fn labels(&self) -> Vec<Label> {
        let mut out = Vec::new();
        self.collect_labels(&mut out);
        out.sort();
        out.dedup();
        out
    }

    fn collect_labels(&self, out: &mut Vec<Label>) {
        if let Sentence::Epistemic(_, label, _) = self {
            out.push(label.clone());
        }
        for c in self.children() {
            c.collect_labels(out);
        }
    }

    /// True if `sub` occurs somewhere in `self` (including `self` itself).
    pub fn contains(&self, sub: &Sentence) -> bool {
        self == sub || self.children().iter().any(|c| c.contains(sub))
    }
}

impl fmt::Display for Sentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::print_sentence(self))
    }
}
