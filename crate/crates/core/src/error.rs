//! Error type shared by the whole kernel.

use thiserror::Error;

/// Everything that can go wrong while building or checking kernel data.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("elements live over different presentations: {0}")]
    MixedPresentation(String),

    #[error("operation requires a cochain-degree-0 element, got degree {0}")]
    PositiveDegreeInput(i64),

    #[error("generator `{0}` declared twice")]
    DuplicateGenerator(String),

    #[error("invalid generator `{name}`: {reason}")]
    InvalidGenerator { name: String, reason: String },

    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),

    #[error("differential of `{name}` is not homogeneous of degree +1 and equal weight: {reason}")]
    NonHomogeneousDifferential { name: String, reason: String },

    #[error("the ({degree}, {weight}) slice is not finite-dimensional: {reason}")]
    InfiniteSlice {
        degree: i64,
        weight: i64,
        reason: String,
    },

    #[error("cosimplicial index {index} out of range at level {level}")]
    IndexOutOfRange { index: usize, level: usize },

    #[error("denormalised elements live at different levels: {0} vs {1}")]
    LevelMismatch(usize, usize),

    #[error("invalid Lie algebra data: {0}")]
    InvalidLie(String),

    #[error("invalid Lie algebra action: {0}")]
    InvalidAction(String),

    #[error("morphism does not commute with the differentials at generator `{0}`")]
    NotChainMap(String),

    #[error("morphism is not surjective on the ({degree}, {weight}) slice")]
    NotSurjective { degree: i64, weight: i64 },

    #[error("matrix size mismatch: {0}")]
    SizeMismatch(String),

    #[error("degree error: {0}")]
    DegreeError(String),

    #[error("point violates a declared relation: {0}")]
    RelationViolation(String),

    #[error("degree-0 part is not of the declared-smooth shape: {0}")]
    UnsupportedDegree0(String),

    #[error("unsupported morphism shape: {0}")]
    UnsupportedMorphismShape(String),

    #[error("parse error at byte {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("validation error: {0}")]
    Validation(String),
}

impl Error {
    pub fn parse(position: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            position,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
