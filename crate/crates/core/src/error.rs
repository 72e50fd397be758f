use thiserror::Error;

/// Errors produced by the analysis routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("extension degree {m} outside supported range {min}..={max}")]
    DegreeOutOfRange { m: u32, min: u32, max: u32 },
    #[error("modulus {modulus:#x} does not have degree {m}")]
    WrongModulusDegree { modulus: u64, m: u32 },
    #[error("modulus {0:#x} is reducible")]
    ReduciblePolynomial(u64),
    #[error("modulus {0:#x} is irreducible but x is not a primitive element")]
    NotPrimitive(u64),
    #[error("discrete logarithm of zero")]
    LogOfZero,

    #[error("truth table has {got} variables, field has degree {expected}")]
    DimensionMismatch { expected: u32, got: u32 },
    #[error("transform length {0} is not a power of two")]
    LengthNotPowerOfTwo(usize),
    #[error("linearity {0} is odd; table is corrupted")]
    OddLinearity(u64),
    #[error("exponent {d} outside 1..={max}")]
    ExponentOutOfRange { d: u64, max: u64 },
    #[error("almost-bent classification needs odd m, got m = {0}")]
    EvenM(u32),

    #[error("alpha must be nonzero")]
    ZeroAlpha,
    #[error("exponent {d} is not coprime to 2^m - 1 (gcd {gcd})")]
    NotCoprime { d: u64, gcd: u64 },
    #[error("alpha, beta must be nonzero and distinct")]
    DegenerateSubspace,
    #[error("codimension-2 formula produced non-integer value {numerator}/8")]
    NonIntegerResult { numerator: i64 },
    #[error("x^{0} is not almost bent")]
    NotAlmostBent(u64),
    #[error("support set has {got} points, expected {expected}")]
    WrongCardinality { expected: usize, got: usize },

    #[error("sequence periods differ: {0} vs {1}")]
    PeriodMismatch(usize, usize),
    #[error("perfectness is defined for odd periods, got {0}")]
    EvenPeriod(usize),

    #[error("binary weight {weight} exceeds enumeration cap {cap}")]
    WeightOverflow { weight: u32, cap: u32 },
    #[error("subvector query must be nonzero and differ from the reference vector")]
    InvalidSubvectorQuery,
    #[error("binary weight {0} is not a power of two >= 4")]
    WeightNotPowerOfTwo(u32),
    #[error("weight-2 exponent: the trace identity holds and no witness exists")]
    GoldInput,
    #[error("vector length mismatch: {0} vs {1}")]
    LengthMismatch(u32, u32),
    #[error("invalid bit string {0:?}")]
    BadBitString(String),
    #[error("no odd-count subvector class exists for this exponent")]
    NoWitness,
}

pub type Result<T> = std::result::Result<T, Error>;
