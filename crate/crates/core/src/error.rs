use thiserror::Error;

use crate::lang::OccurrencePath;

pub type Result<T, E = HoloqError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum HoloqError {
    #[error("syntax error at byte {offset}: expected one of {expected:?}, found {found}")]
    Syntax {
        offset: usize,
        expected: Vec<String>,
        found: String,
    },

    #[error("unknown operator `{name}` at byte {offset}")]
    UnknownOperator { name: String, offset: usize },

    #[error("{qubits} qubits exceeds the dense-storage cap of {max}")]
    TooManyQubits { qubits: usize, max: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid qumix: {0}")]
    InvalidQumix(String),

    #[error("ket is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("qubit index {index} out of range for {qubits} qubits")]
    IndexOutOfRange { index: usize, qubits: usize },

    #[error("duplicate qubit index {0}")]
    DuplicateIndex(usize),

    #[error("matrix is not unitary (defect {defect:e})")]
    NotUnitary { defect: f64 },

    #[error("Kraus operators are not trace preserving (defect {defect:e})")]
    NotTracePreserving { defect: f64 },

    #[error("unresolved name: {0}")]
    Unresolved(String),

    #[error("epistemic operation {label} has no realization at arity {arity}")]
    MissingArity { label: String, arity: usize },

    #[error("epistemic table of {label} has no entry for the input state")]
    TableMiss { label: String },

    #[error("input does not factorize across the blocks of a table-realized pseudo-gate (defect {defect:e})")]
    NotFactorizable { defect: f64 },

    #[error("constraint violation at occurrence {path} ({constant}): reduced state differs from the perspective projector by {defect:e}")]
    ConstraintViolation {
        path: OccurrencePath,
        constant: char,
        defect: f64,
    },

    #[error("invalid occurrence path {0}")]
    InvalidPath(OccurrencePath),

    #[error("no assignment for `{sentence}` under perspective `{perspective}`")]
    MissingAssignment {
        sentence: String,
        perspective: String,
    },

    #[error("`{sub}` is not a subformula of `{context}`")]
    NotSubformula { sub: String, context: String },

    #[error("sampler exhausted: none of {samples} samples satisfied the antecedent")]
    SamplerExhausted { samples: usize },

    #[error("preset error: {0}")]
    Preset(String),

    #[error("model file error: {0}")]
    ModelFile(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
