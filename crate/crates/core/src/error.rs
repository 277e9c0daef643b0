use num_bigint::BigUint;
use thiserror::Error;

/// Errors shared across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("extension degree {requested} exceeds the construction limit {limit}")]
    DegreeTooLarge { requested: u32, limit: u32 },

    #[error("field of size {size} exceeds the enumeration cap {cap}")]
    EnumerationCap { size: BigUint, cap: u64 },

    #[error("splitting degree exceeds the extension cap {0}")]
    ExtensionCap(u32),

    #[error("inversion of zero")]
    ZeroInversion,

    #[error("division by the zero polynomial")]
    ZeroPolynomialDivision,

    #[error("elements belong to different fields (F_{p1}^{m1} vs F_{p2}^{m2})")]
    FieldMismatch { p1: u64, m1: u32, p2: u64, m2: u32 },

    #[error("no embedding: source F_{{{p}^{src}}} does not embed into F_{{{p}^{dst}}}")]
    NoEmbedding { p: u64, src: u32, dst: u32 },

    #[error("characteristic {p} divides 2d = {two_d}")]
    CharDividesTwoD { p: u64, two_d: u64 },

    #[error("matrix is not invertible (zero determinant)")]
    SingularMatrix,

    #[error("points in a triple must be pairwise distinct")]
    RepeatedPoint,

    #[error("input is not closed under the group operations")]
    NotAGroup,

    #[error("point does not lie on the curve")]
    NotOnCurve,

    #[error("degenerate quartic: 4I^3 = J^2")]
    DegenerateQuartic,

    #[error("{0} is not a prime power")]
    NotPrimePower(u64),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invariant breach: {0}")]
    InvariantBreach(String),
}

pub type Result<T> = std::result::Result<T, Error>;
