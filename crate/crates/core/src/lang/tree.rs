use std::fmt;
use std::ops::Range;

use super::ast::Sentence;

/// Position of an occurrence in a syntactical tree: `level` counts from the
/// root (level 1) upward, `position` counts from 1 within the level.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OccurrencePath {
    pub level: usize,
    pub position: usize,
}

impl OccurrencePath {
    pub fn new(level: usize, position: usize) -> Self {
        OccurrencePath { level, position }
    }
}

impl fmt::Display for OccurrencePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.level, self.position)
    }
}

/// One occurrence within a level.
#[derive(Clone, Debug, PartialEq)]
pub struct Occurrence {
    pub sentence: Sentence,
    /// Qubits of the semantic space carrying this occurrence's atomic leaves.
    pub span: Range<usize>,
    /// Position (1-based) of the occurrence in the level below that this
    /// one was unfolded from. `None` on level 1.
    pub parent: Option<usize>,
    /// Positions (1-based) in the level above that this occurrence unfolds into.
    pub children: Vec<usize>,
}

impl Occurrence {
    pub fn arity(&self) -> usize {
        self.span.len()
    }
}

/// Leveled decomposition of a sentence, from the sentence itself (level 1)
/// to the sequence of its atomic occurrences (the top level).
#[derive(Clone, Debug, PartialEq)]
pub struct SyntacticalTree {
    levels: Vec<Vec<Occurrence>>,
}

impl SyntacticalTree {
    pub fn build(s: &Sentence) -> Self {
        let n = s.atomic_complexity();
        let mut levels = vec![vec![Occurrence {
            sentence: s.clone(),
            span: 0..n,
            parent: None,
            children: Vec::new(),
        }]];

        while levels
            .last()
            .unwrap()
            .iter()
            .any(|o| !o.sentence.is_atomic())
        {
            let current = levels.last_mut().unwrap();
            let mut next = Vec::new();
            for (idx, occ) in current.iter_mut().enumerate() {
                let parts: Vec<Sentence> = if occ.sentence.is_atomic() {
                    vec![occ.sentence.clone()]
                } else {
                    occ.sentence.children().into_iter().cloned().collect()
                };
                let mut start = occ.span.start;
                for part in parts {
                    let width = part.atomic_complexity();
                    next.push(Occurrence {
                        sentence: part,
                        span: start..start + width,
                        parent: Some(idx + 1),
                        children: Vec::new(),
                    });
                    occ.children.push(next.len());
                    start += width;
                }
            }
            levels.push(next);
        }
        SyntacticalTree { levels }
    }

    /// Number of levels.
    pub fn height(&self) -> usize {
        self.levels.len()
    }

    pub fn root(&self) -> &Sentence {
        &self.levels[0][0].sentence
    }

    /// Qubit count of the semantic space.
    pub fn width(&self) -> usize {
        self.levels[0][0].span.len()
    }

    /// Level `i` (1-based, root is level 1).
    pub fn level(&self, i: usize) -> Option<&[Occurrence]> {
        i.checked_sub(1)
            .and_then(|k| self.levels.get(k))
            .map(|v| v.as_slice())
    }

    pub fn levels(&self) -> impl Iterator<Item = (usize, &[Occurrence])> {
        self.levels
            .iter()
            .enumerate()
            .map(|(k, v)| (k + 1, v.as_slice()))
    }

    pub fn get(&self, path: OccurrencePath) -> Option<&Occurrence> {
        self.level(path.level)
            .and_then(|l| path.position.checked_sub(1).and_then(|j| l.get(j)))
    }

    /// Every position whose occupant is structurally equal to `sub`, ordered
    /// by level and then position.
    pub fn occurrences_of(&self, sub: &Sentence) -> Vec<OccurrencePath> {
        self.paths()
            .filter(|p| self.get(*p).map(|o| &o.sentence) == Some(sub))
            .collect()
    }

    /// All occurrence paths, ordered by level and then position.
    pub fn paths(&self) -> impl Iterator<Item = OccurrencePath> + '_ {
        self.levels()
            .flat_map(|(i, level)| (1..=level.len()).map(move |j| OccurrencePath::new(i, j)))
    }

    /// Multi-line rendering, top level first, in the `Level_i = (...)` style.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (i, level) in self.levels().collect::<Vec<_>>().into_iter().rev() {
            let items: Vec<String> = level.iter().map(|o| o.sentence.to_string()).collect();
            out.push_str(&format!("Level_{i} = ({})\n", items.join("; ")));
        }
        out
    }
}

/// Convenience wrapper for [`SyntacticalTree::build`].
pub fn build_syntactical_tree(s: &Sentence) -> SyntacticalTree {
    SyntacticalTree::build(s)
}

/// Convenience wrapper for [`SyntacticalTree::occurrences_of`].
pub fn occurrences_of(tree: &SyntacticalTree, sub: &Sentence) -> Vec<OccurrencePath> {
    tree.occurrences_of(sub)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse_sentence;

    fn texts(tree: &SyntacticalTree, i: usize) -> Vec<String> {
        tree.level(i)
            .unwrap()
            .iter()
            .map(|o| o.sentence.to_string())
            .collect()
    }

    #[test]
    fn worked_tree_has_five_levels() {
        let s = parse_sentence("K[a@t1] not T(q, not q, f)").unwrap();
        let tree = build_syntactical_tree(&s);
        assert_eq!(tree.height(), 5);
        assert_eq!(texts(&tree, 5), ["q", "q", "f"]);
        assert_eq!(texts(&tree, 4), ["q", "not q", "f"]);
        assert_eq!(texts(&tree, 3), ["T(q, not q, f)"]);
        assert_eq!(texts(&tree, 2), ["not T(q, not q, f)"]);
        assert_eq!(texts(&tree, 1), ["K[a@t1] not T(q, not q, f)"]);
        assert_eq!(s.atomic_complexity(), 3);
    }

    #[test]
    fn atomic_sentence_has_one_level() {
        let tree = build_syntactical_tree(&Sentence::atom("q"));
        assert_eq!(tree.height(), 1);
        assert_eq!(texts(&tree, 1), ["q"]);
    }

    #[test]
    fn contradiction_tree() {
        let tree = build_syntactical_tree(&parse_sentence("T(q, not q, f)").unwrap());
        assert_eq!(tree.height(), 3);
        assert_eq!(texts(&tree, 3), ["q", "q", "f"]);
        assert_eq!(texts(&tree, 2), ["q", "not q", "f"]);
    }

    #[test]
    fn atomic_complexity_counts_constants() {
        let s = parse_sentence("T(q, q, f)").unwrap();
        assert_eq!(s.atomic_complexity(), 3);
        assert_eq!(Sentence::atom("q").atomic_complexity(), 1);
    }

    #[test]
    fn occurrence_lookup() {
        let tree = build_syntactical_tree(&parse_sentence("T(q, not q, f)").unwrap());
        let q = Sentence::atom("q");
        assert_eq!(
            tree.occurrences_of(&q),
            vec![
                OccurrencePath::new(2, 1),
                OccurrencePath::new(3, 1),
                OccurrencePath::new(3, 2)
            ]
        );
        assert_eq!(
            tree.occurrences_of(&Sentence::False),
            vec![OccurrencePath::new(2, 3), OccurrencePath::new(3, 3)]
        );
        let single = build_syntactical_tree(&q);
        assert!(single.occurrences_of(&Sentence::atom("r")).is_empty());
    }

    #[test]
    fn spans_and_links() {
        let tree = build_syntactical_tree(&parse_sentence("(q (+) r) /\\ not s").unwrap());
        let root = tree.get(OccurrencePath::new(1, 1)).unwrap();
        assert_eq!(root.span, 0..4);
        assert_eq!(root.children, vec![1, 2, 3]);
        let xor = tree.get(OccurrencePath::new(2, 1)).unwrap();
        assert_eq!(xor.span, 0..2);
        let neg = tree.get(OccurrencePath::new(2, 2)).unwrap();
        assert_eq!(neg.span, 2..3);
        let f = tree.get(OccurrencePath::new(2, 3)).unwrap();
        assert_eq!(f.span, 3..4);
        let top = tree.level(3).unwrap();
        assert_eq!(top.len(), 4);
        assert_eq!(top[2].parent, Some(2));
        assert!(tree.get(OccurrencePath::new(4, 1)).is_none());
        assert!(tree.get(OccurrencePath::new(1, 0)).is_none());
    }
}
