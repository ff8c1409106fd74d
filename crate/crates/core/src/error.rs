use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid finite type {series}{rank}")]
    InvalidFiniteType { series: char, rank: usize },

    #[error("inadmissible twist: {base} does not admit a diagram automorphism of order {twist}")]
    InadmissibleTwist { base: String, twist: u8 },

    #[error("cannot parse type string {0:?}")]
    ParseType(String),

    #[error("cannot parse group element {0:?}")]
    ParseElement(String),

    #[error("cannot parse group {0:?}")]
    ParseGroup(String),

    #[error("point {point}: vertex {vertex} is not in its facet")]
    VertexOutsideFacet { point: String, vertex: usize },

    #[error("point {point}: {reason}")]
    InvalidPoint { point: String, reason: String },

    #[error("invalid datum: {0}")]
    InvalidDatum(String),

    #[error("unknown point label {0:?}")]
    UnknownPoint(String),

    #[error("datum has no points")]
    NoPoints,

    #[error("inconsistent ramification data: {0}")]
    InconsistentRamification(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("no C2 cover exists: {0} branch points is odd")]
    OddBranchCount(usize),

    #[error("no such cover exists: |R3+| = {plus} and |R3-| = {minus} differ modulo 3")]
    NoSuchCover { plus: usize, minus: usize },

    #[error("pairing inadmissible: {0}")]
    PairingInadmissible(String),

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("type mismatch: {0} vs {1}")]
    TypeMismatch(String, String),

    #[error("bundle is not dominant at point {0}")]
    NotDominant(String),

    #[error("bundle is not in Pic^Delta: central charges {0:?} disagree")]
    NotInPicDelta(Vec<i64>),

    #[error("point {0} is not Iwahori (facet is not the full vertex set)")]
    NotIwahori(String),

    #[error("rank unknown: {0}")]
    RankUnknown(String),

    #[error("bound unavailable: {0}")]
    BoundUnavailable(String),

    #[error("internal inconsistency: {0}")]
    Inconsistent(String),

    #[error("division by zero")]
    DivisionByZero,

    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),

    #[error("malformed input: {0}")]
    Malformed(String),
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Malformed(err.to_string())
    }
}
