//! Error type shared by the whole crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A sieve or Euler-product evaluation needs local data at a prime that
    /// the eigenform does not carry.
    #[error("no local factor for prime {prime} (data covers primes <= {covered})")]
    MissingPrime { prime: u64, covered: u64 },

    /// A lookup asked for an index beyond the built table.
    #[error("coefficient table covers n <= {table}, request needs {requested}")]
    TableTooSmall { table: u64, requested: f64 },

    /// Closed-form root recovery produced roots that do not satisfy the
    /// characteristic quartic to the required residual.
    #[error(
        "root recovery failed for local factor p={p} (e1={e1}, e2={e2}): \
         residual {residual:e} > {allowed:e}"
    )]
    RootResidual {
        p: u64,
        e1: f64,
        e2: f64,
        residual: f64,
        allowed: f64,
    },

    /// Estimated quadrature error exceeds the tolerated fraction of the
    /// running value.
    #[error("quadrature too coarse in {context}: estimated error {estimate:e} vs value {value:e}")]
    QuadratureAccuracy {
        context: &'static str,
        estimate: f64,
        value: f64,
    },

    /// The panel budget cannot resolve all jump points of the integrand.
    #[error("quadrature budget exhausted: {needed} panels needed, budget {budget}")]
    QuadratureBudget { needed: u64, budget: u64 },

    /// Kernel evaluated outside its support `[-1, 1]`.
    #[error("kernel argument {0} outside [-1, 1]")]
    KernelDomain(f64),

    /// A fit was requested with too few usable points.
    #[error("insufficient data for fit: {have} usable points, need at least {need}")]
    InsufficientData { have: usize, need: usize },

    /// Eigenvalue file could not be parsed.
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },

    /// Any other precondition violation.
    #[error("invalid input: {0}")]
    Invalid(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Exit-code class used by the command-line frontend: accuracy failures
    /// are distinguished from plain validation errors.
    pub fn is_accuracy(&self) -> bool {
        matches!(
            self,
            Error::QuadratureAccuracy { .. } | Error::QuadratureBudget { .. }
        )
    }
}
