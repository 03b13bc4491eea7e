use thiserror::Error;

/// Every failure the engine reports. Axiom violations are data (see
/// [`crate::report::AxiomReport`]) and never surface here.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum Error {
    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },

    #[error("duplicate label {label:?} at {path}")]
    DuplicateLabel { path: String, label: String },

    #[error("profile {profile} has arity {arity}, above maxArity {max_arity}")]
    ArityOverflow {
        profile: String,
        arity: usize,
        max_arity: usize,
    },

    #[error("colour {0} is not in the colour set")]
    UnknownColour(String),

    #[error("invalid json: {0}")]
    Json(String),

    #[error("size cap exceeded: {what} needs {needed}, cap is {cap}")]
    SizeCap {
        what: String,
        needed: u128,
        cap: u128,
    },

    #[error("no unit at colour {0}")]
    MissingUnit(String),

    #[error("colour mismatch: {0}")]
    ColourMismatch(String),

    #[error("unknown element {0}")]
    UnknownElement(String),

    #[error("undefined operation: {0}")]
    Undefined(String),

    #[error("not a structure map: {0}")]
    InvalidMap(String),

    #[error("unit assumption fails ({side} side) at {witness}")]
    UnitAssumption { side: String, witness: String },

    #[error("coface {face} is not well defined on class {class} at level {level}")]
    IllDefinedCoface {
        level: usize,
        face: usize,
        class: String,
    },

    #[error("type violation: {0}")]
    TypeViolation(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("axioms fail: {0}")]
    AxiomsFail(String),
}

pub type Result<T> = std::result::Result<T, Error>;
