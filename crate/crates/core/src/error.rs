use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("malformed sample set: {0}")]
    MalformedSamples(String),

    #[error(
        "inconsistent Hilbert-polynomial computation: expected degree {expected}, found {found:?}"
    )]
    DegreeMismatch {
        expected: usize,
        found: Option<usize>,
    },

    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("length mismatch: {0}")]
    LengthMismatch(String),

    #[error("not a hypersurface: the coefficient matrix is zero")]
    NotAHypersurface,

    #[error("SL condition violated: sum({factor}) = {sum}")]
    NotSpecialLinear { factor: &'static str, sum: i64 },

    #[error("λ does not preserve X: term weights {0:?} differ")]
    DoesNotPreserve(Vec<i64>),

    #[error("not normal: r=0 (a (1,1) hypersurface is normal iff r >= 1)")]
    NotNormal,

    #[error("method inapplicable: {0}")]
    MethodInapplicable(String),

    #[error("degenerate Hilbert data: a0 = {0} is not positive")]
    DegenerateHilbert(String),

    #[error("invariant violation: {0}")]
    Invariant(String),

    #[error("invalid certificate: {0}")]
    InvalidCertificate(String),
}
