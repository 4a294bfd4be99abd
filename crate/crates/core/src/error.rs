use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("the zero polynomial has no factorization")]
    ZeroPolynomial,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("enumeration budget exceeded: {needed} > {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("quartic is not stable (type {0})")]
    NotStable(String),
    #[error("singular matrix")]
    SingularMatrix,
    #[error("cuspidal/degenerate family: discriminant vanishes identically")]
    DegenerateFamily,
    #[error("discriminant is zero: x^3 + ax + b does not define an elliptic curve")]
    SingularCurve,
    #[error("zero section")]
    ZeroSection,
    #[error("section degree {degree} exceeds line bundle degree {bound}")]
    DegreeBound { degree: usize, bound: i64 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
