use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Everything that can go wrong while building or analysing a typed space.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unknown point `{0}`")]
    UnknownPoint(String),
    #[error("unknown type `{0}`")]
    UnknownType(String),
    #[error("duplicate point id `{0}`")]
    DuplicatePoint(String),
    #[error("duplicate coordinates ({x}, {y}) for `{first}` and `{second}`")]
    DuplicateCoordinates {
        first: String,
        second: String,
        x: f64,
        y: f64,
    },
    #[error("coordinates of `{0}` are not finite")]
    NonFiniteCoordinate(String),
    #[error("radii must be finite, positive and strictly ascending")]
    NonAscendingRadii,
    #[error("unknown shape tag `{0}`")]
    UnknownShape(String),
    #[error("duplicate type label `{0}`")]
    DuplicateType(String),
    #[error("type order contains a cycle through `{0}`")]
    CyclicOrder(String),
    #[error(
        "order {p} <= {q} violates neighborhood inclusion: `{witness}` is in umin(`{point}`, {p}) but not in umin(`{point}`, {q})"
    )]
    OrderViolation {
        p: String,
        q: String,
        point: String,
        witness: String,
    },
    #[error("space is invalid: {0}")]
    InvalidSpace(String),
    #[error("{0} must not be empty")]
    EmptySet(&'static str),
    #[error("at least {needed} points are required, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("epsilon undefined (degenerate)")]
    EpsilonUndefined,
    #[error("the two points of a cut or surgery must differ (`{0}`)")]
    SamePoint(String),
    #[error("not surgery-eligible: `{inside}` lies in the transitive closure of `{of}`")]
    NotSurgeryEligible { inside: String, of: String },
    #[error("set is not closure connected under {0}")]
    NotClosureConnected(String),
    #[error("root `{0}` is not a member of the set")]
    RootNotInSet(String),
    #[error("types {0} and {1} are not ordered")]
    IncomparableTypes(String, String),
    #[error("decomposition undefined: space is not ({p}, {q})-uniformly typed at `{origin}`")]
    NotUniform {
        p: String,
        q: String,
        origin: String,
    },
    #[error("cluster of `{origin}` is not ({p}, {q})-straight")]
    NotPqStraight {
        p: String,
        q: String,
        origin: String,
    },
    #[error("index value {0} is outside the realized range")]
    IndexOutOfRange(String),
    #[error("point `{0}` would be indexed twice")]
    DoubleIndex(String),
    #[error("indexing stage {stage} claimed no new points ({remaining} remain)")]
    StageStalled { stage: usize, remaining: usize },
    #[error("type `{0}` is not a radius type")]
    NotRadiusType(String),
    #[error("space has no coordinates for `{0}`")]
    MissingCoordinates(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Errors that come from malformed or inconsistent input data, as opposed
    /// to an algorithm whose hypotheses are not met.
    pub fn is_data_error(&self) -> bool {
        !matches!(
            self,
            Error::NotSurgeryEligible { .. }
                | Error::NotClosureConnected(_)
                | Error::NotUniform { .. }
                | Error::NotPqStraight { .. }
                | Error::IncomparableTypes(..)
                | Error::StageStalled { .. }
                | Error::EpsilonUndefined
                | Error::DoubleIndex(_)
                | Error::SamePoint(_)
                | Error::RootNotInSet(_)
        )
    }
}
