//! Numerical machinery for degree-4 spin Euler products attached to genus-2
//! Hecke eigenforms.
//!
//! The crate is organized around one pipeline:
//!
//! * [`local`] — algebra of a single local Euler factor: symmetric
//!   coefficients `(e1, e2)`, spin parameters, Hecke eigenvalue conversions
//!   and prime-power coefficient expansions.
//! * [`table`] — multiplicative sieve expanding the Euler product into dense
//!   tables of `a(n)`, `lambda(n)` and `d4(n)` with prefix sums.
//! * [`voronoi`] — the truncated oscillating main term for the partial sum
//!   `S(x) = sum_{n<=x} a(n)`, a Perron contour-integral cross-check, and
//!   empirical error-exponent fits.
//! * [`detector`] — Fejér-kernel resonance tests on the rescaled partial sum,
//!   extrema location and short-interval sign-change scans.
//! * [`ingest`] — eigenvalue file parsing, synthetic form generators and
//!   CSV/JSON report emission.
//!
//! All public types are immutable after construction and all operations are
//! pure, so everything here is safe to share across threads.

// Negated comparisons like `!(x > 0.0)` are deliberate: they reject NaN,
// which the un-negated forms would wave through. Reference constants are
// kept at full printed precision.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod detector;
pub mod error;
pub mod exact;
pub mod fit;
pub mod ingest;
pub mod local;
pub mod primes;
pub mod sum;
pub mod table;
pub mod voronoi;

pub use detector::{ExtremaReport, KernelPhase, KernelTest, WindowScan};
pub use error::{Error, Result};
pub use ingest::{Convention, EigenvalueFile, Family, SyntheticSpec};
pub use local::{EigenformData, LocalFactor, SpinParameters};
pub use table::{CoeffTable, SignCounts, ZeroTolerance};
pub use voronoi::{PerronConfig, SlopeFit, VoronoiEvaluation};
