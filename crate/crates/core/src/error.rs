use thiserror::Error;

/// Errors raised by the field, form, group and representation layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("field of order {p}^{r} exceeds the supported size")]
    FieldTooLarge { p: u32, r: u32 },
    #[error("modulus is not a monic irreducible polynomial of degree {0}")]
    BadModulus(u32),
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("degree {sub} does not divide the extension degree {r}")]
    InvalidSubfield { sub: u32, r: u32 },
    #[error("no element of order {m} in a field of order {q}")]
    NoSuchRoot { m: u64, q: u32 },
    #[error("argument must be nonzero")]
    ZeroArgument,
    #[error("operation requires odd characteristic")]
    EvenCharacteristic,
    #[error("element is not a primitive {0}-th root of unity")]
    BadRoot(u32),
    #[error("form requires {0}")]
    BadCharacteristic(&'static str),
    #[error("field has no automorphism of order 2")]
    NoInvolution,
    #[error("lambda must satisfy lambda != lambda^eta")]
    BadLambda,
    #[error("form is degenerate")]
    DegenerateForm,
    #[error("unsupported form kind for this operation: {0}")]
    UnsupportedKind(&'static str),
    #[error("form is not {0}")]
    KindMismatch(&'static str),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("elements belong to different groups")]
    GroupMismatch,
    #[error("isotropic count {count} matches neither extraspecial type for n = {n}")]
    InconsistentCount { count: u64, n: usize },
    #[error("matrix does not preserve the form")]
    NotAnIsometry,
    #[error("matrix does not scale the form by the given multiplier")]
    NotASimilitude,
    #[error("matrix is singular")]
    Singular,
    #[error("field has no primitive {0}-th root of unity")]
    NoRootOfUnity(u32),
    #[error("no alpha, beta with alpha^2 + beta^2 = -1")]
    NoAlphaBeta,
    #[error("representations use different roots of unity")]
    EpsilonMismatch,
    #[error("group closure exceeded the cap of {0} elements")]
    CapExceeded(usize),
    #[error("matrices are not proportional")]
    NotProportional,
    #[error("operation is not available for the {0} case")]
    WrongCase(&'static str),
    #[error("factor set does not split: {0}")]
    SplitFailure(String),
    #[error("unsupported tower chain: {0}")]
    UnsupportedChain(String),
    #[error("requested depth {depth} exceeds the materialized depth {max}")]
    DepthTooDeep { depth: usize, max: usize },
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
