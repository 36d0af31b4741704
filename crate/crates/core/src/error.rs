use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid context: {0}")]
    InvalidContext(String),
    #[error("q^({num}/{den}) is not an integer power of the uniformizer (denominator must divide {modulus})")]
    FractionalPower { num: i64, den: i64, modulus: i64 },
    #[error("{op}: precondition violated: {detail}")]
    Precondition { op: &'static str, detail: String },
    #[error("{op}: window too small: {detail}")]
    Window { op: &'static str, detail: String },
    #[error("{op}: linear system has no solution: {detail}")]
    Unsolvable { op: &'static str, detail: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn precondition<T>(op: &'static str, detail: impl Into<String>) -> Result<T> {
    Err(Error::Precondition { op, detail: detail.into() })
}
