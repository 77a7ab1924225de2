//! Truth-perspectives, gate families, epistemic operations, quasi-models and
//! pseudo-gate trees.

mod epistemic;
mod gates;
mod perspective;
mod pseudo;
mod quasi;

pub use epistemic::{
    Domain, EpistemicOp, Fallback, KrausMap, Preset, PresetKind, Realization, TableMap,
    TruthDomination, TOL_KRAUS, TOL_MATCH,
};
pub use gates::{and_op, apply_gate, gate_unitary, GateKind, GateSpec};
pub use perspective::{epistemic_distance, precedes, TruthPerspective, TOL_UNITARY};
pub use pseudo::{
    apply_pseudo_gate, compile_pseudo_gates, pseudo_gate_tree, Block, Component, PseudoGate,
    TOL_FACTOR,
};
pub use quasi::{Den, EpistemicSituation, QuasiModel};

/// Convenience wrapper for [`TruthPerspective::truth_projectors`].
pub fn truth_projectors(p: &TruthPerspective) -> (crate::qlin::Qumix, crate::qlin::Qumix) {
    p.truth_projectors()
}

/// Applies an epistemic operation to a whole state.
pub fn apply_epistemic(
    op: &EpistemicOp,
    rho: &crate::qlin::Qumix,
) -> crate::Result<crate::qlin::Qumix> {
    op.apply(rho)
}
