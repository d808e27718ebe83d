use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("field {0} not prime")]
    NotPrime(u32),
    #[error("field modulus {0} outside the supported range 2..=251")]
    ModulusOutOfRange(u32),
    #[error("division by zero")]
    DivisionByZero,
    #[error("singular matrix")]
    SingularMatrix,
    #[error("matrix dimension {0} outside the supported range 1..=5")]
    DimensionOutOfRange(usize),
    #[error("rank {rank} exceeds dimension {n}")]
    RankOutOfRange { rank: usize, n: usize },
    #[error("entry {value} is not reduced modulo {p}")]
    EntryOutOfRange { value: u32, p: u8 },
    #[error("GL too large: |GL({n}, {p})| = {size} exceeds cap {cap}")]
    GlTooLarge { n: usize, p: u8, size: u128, cap: u64 },
    #[error("solution space too large: {size} vectors exceeds cap {cap}")]
    SolutionSpaceTooLarge { size: u128, cap: u64 },
    #[error("stabilizer too large: {size} elements exceeds cap {cap}")]
    StabilizerTooLarge { size: u128, cap: u64 },
    #[error("exhaustive search too large: {size} group actions exceeds bound {cap}")]
    SearchTooLarge { size: u128, cap: u64 },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("scheme has no rows")]
    EmptyScheme,
    #[error("line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid witness: {0}")]
    Witness(String),
}

impl Error {
    /// True for the errors raised when a configured enumeration cap is hit.
    pub fn is_cap(&self) -> bool {
        matches!(
            self,
            Error::GlTooLarge { .. }
                | Error::SolutionSpaceTooLarge { .. }
                | Error::StabilizerTooLarge { .. }
                | Error::SearchTooLarge { .. }
        )
    }

    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse { line, column, message: message.into() }
    }
}
