//! Syntax of the epistemic quantum computational language: AST, concrete
//! grammar, atomic complexity and syntactical trees.

mod ast;
mod parser;
mod tree;

pub use ast::{EpistemicKind, Label, Sentence};
pub use parser::{is_valid_atom_name, parse_sentence, print_sentence};
pub use tree::{
    build_syntactical_tree, occurrences_of, Occurrence, OccurrencePath, SyntacticalTree,
};

/// Number of atomic occurrences of `s`, constants included.
pub fn atomic_complexity(s: &Sentence) -> usize {
    s.atomic_complexity()
}
