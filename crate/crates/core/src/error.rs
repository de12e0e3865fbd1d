use thiserror::Error;

use crate::construct::CaseTag;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("even characteristic p = {0} is not supported by the construction")]
    EvenCharacteristic(u32),
    #[error("{0} is not a prime")]
    NotPrime(u32),
    #[error("field GF({p}^{degree}) exceeds the table limit of {limit} elements")]
    TooLarge { p: u32, degree: u32, limit: u64 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("norm target {0} is zero or outside the base field")]
    BadNormTarget(u32),
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("the six special elements are not distinct")]
    PartitionDegenerate,
    #[error("index {index} out of range 0..={max}")]
    IndexError { index: usize, max: usize },
    #[error("length n = {n} outside [{min}, {max}]")]
    LengthOutOfRange { n: usize, min: usize, max: usize },
    #[error("prescribed norm for {scalar} is zero in case {case}")]
    NormTargetZero { case: CaseTag, scalar: &'static str },
    #[error("construction failed in case {case}: {reason}")]
    ConstructionFailed { case: CaseTag, reason: String },
    #[error("closing column impossible: partial second row is self-orthogonal")]
    ClosingImpossible,
    #[error("internal error: {0}")]
    Internal(String),
    #[error("matrix has rank {0} < 2")]
    RankDeficient(usize),
    #[error("code needs {work} codeword evaluations, oracle cap is {cap}")]
    TooLargeForOracle { work: u64, cap: u64 },
    #[error("length {0} < 3 has no dual distance defined")]
    TooShort(usize),
    #[error("certificate does not pass")]
    NotCertified,
    #[error("exhaustive search needs {candidates} candidates, cap is {cap}")]
    TooLargeForExhaustive { candidates: u128, cap: u64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}
