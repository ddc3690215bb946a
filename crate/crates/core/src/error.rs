use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },

    #[error("invalid rational literal `{0}`")]
    Scalar(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("relation violated: {}", .0.join("; "))]
    RelationViolation(Vec<String>),

    #[error("obstructed family: Ext^2 table is nonzero")]
    Obstructed,

    #[error("only length-one free resolutions are supported")]
    UnsupportedResolution,

    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),

    #[error("truncation degree {0} exceeds the cap of {cap}", cap = crate::dmod::MAX_DEGREE_CAP)]
    DegreeCap(usize),

    #[error("dimension not stabilized by degree {max_degree} (last value {last})")]
    NotStabilized { max_degree: usize, last: usize },

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
