use alloc::string::String;
use core::fmt;

/// Every failure the core library reports.
#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// A multi-index entry names dimension 0 or breaks the sorted-support invariant.
    InvalidMultiIndex(String),
    /// An exponent or degree does not fit in the integer type.
    Overflow,
    /// `s` touches a dimension whose weight is exactly zero.
    ZeroWeight { dim: u32 },
    /// A weight sequence violates its own invariants.
    InvalidSequence(String),
    /// A parameter lies outside its documented domain.
    InvalidParameter(String),
    /// The hypotheses of the applicable theorem do not hold.
    HypothesisViolated(String),
    /// No finite bound on the unvisited tail could be certified.
    TailBoundInconclusive,
    /// The requested tolerance was not reached within the work budget.
    ToleranceNotReached { lo: f64, hi: f64 },
    /// `||b||_1` is too close to 1 and no enumeration caps were given.
    MarginViolated { l1_hi: f64 },
    /// The index set is larger than the caller-supplied cap.
    CapExceeded { count: Option<u64>, cap: u64 },
    /// A coefficient field entry is malformed.
    InvalidField(String),
    /// The ellipticity bounds `r <= a <= R` could not be certified.
    EllipticityViolated(String),
    /// An iterative solver stopped before reaching its tolerance.
    NonConvergence { iterations: usize, residual: f64 },
    /// A quadrature design cannot resolve the requested quantity.
    QuadratureTooCoarse(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidMultiIndex(m) => write!(f, "invalid multi-index: {m}"),
            Error::Overflow => write!(f, "integer overflow"),
            Error::ZeroWeight { dim } => write!(f, "multi-index uses dimension {dim} where b is zero"),
            Error::InvalidSequence(m) => write!(f, "invalid weight sequence: {m}"),
            Error::InvalidParameter(m) => write!(f, "invalid parameter: {m}"),
            Error::HypothesisViolated(m) => write!(f, "hypotheses not satisfied: {m}"),
            Error::TailBoundInconclusive => write!(f, "no finite tail bound could be certified"),
            Error::ToleranceNotReached { lo, hi } => {
                write!(f, "tolerance not reached, enclosure [{lo:e}, {hi:e}]")
            }
            Error::MarginViolated { l1_hi } => {
                write!(f, "||b||_1 <= {l1_hi} is too close to 1; supply enumeration caps")
            }
            Error::CapExceeded { count: Some(c), cap } => {
                write!(f, "index set has {c} elements, cap is {cap}")
            }
            Error::CapExceeded { count: None, cap } => {
                write!(f, "index set size overflows u64, cap is {cap}")
            }
            Error::InvalidField(m) => write!(f, "invalid coefficient field: {m}"),
            Error::EllipticityViolated(m) => write!(f, "ellipticity not certified: {m}"),
            Error::NonConvergence { iterations, residual } => {
                write!(f, "solver did not converge after {iterations} iterations (relative residual {residual:e})")
            }
            Error::QuadratureTooCoarse(m) => write!(f, "quadrature too coarse: {m}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
