use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("gcd(0, 0) is undefined")]
    GcdOfZeros,
    #[error("irreducibility is undefined for constant polynomials")]
    ConstantPolynomial,
    #[error("degree {m} is outside the supported range 1..={max}")]
    DegreeOutOfRange { m: usize, max: usize },
    #[error("cannot parse `{0}` as a 0x-prefixed hex polynomial")]
    Parse(String),
    #[error("modulus {modulus} is not irreducible of degree {m}")]
    BadModulus { m: usize, modulus: String },
    #[error("element has degree {deg} but the field has degree {m}")]
    ElementTooWide { deg: usize, m: usize },
    #[error("operands live in different fields (GF(2^{left}) vs GF(2^{right}))")]
    ContextMismatch { left: usize, right: usize },
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("{sub} does not divide the field degree {m}")]
    NotASubfield { sub: usize, m: usize },
    #[error("{l} does not divide {k}")]
    NotADivisor { l: usize, k: usize },
    #[error("parameters must be positive (got {0})")]
    NonPositive(&'static str),
    #[error("element {elt} is not in GF(2^{n}) inside the ambient field with modulus {modulus}")]
    NotInSubfield {
        elt: String,
        n: usize,
        modulus: String,
    },
    #[error("instance needs ambient degree {expected}, element lives in degree {got}")]
    WrongAmbient { expected: usize, got: usize },
    #[error(
        "closed-form solving needs k <= n (got n={n}, k={k}); use oracle::linalg_solve for k > n"
    )]
    KExceedsN { n: usize, k: usize },
    #[error("Artin-Schreier form needs 1 <= k < n (got n={n}, k={k})")]
    ArtinSchreierRange { n: usize, k: usize },
    #[error("enumeration of {count} elements exceeds the cap of {cap}")]
    EnumerationCap { count: u128, cap: u128 },
    #[error("n={n} exceeds the enumeration guard of {max}")]
    EnumerationGuard { n: usize, max: usize },
    #[error("invalid benchmark grid: {0}")]
    BadGrid(String),
    #[error("benchmark equality gate failed at {0}")]
    GateMismatch(String),
    #[error("{0}")]
    Invalid(String),
}
