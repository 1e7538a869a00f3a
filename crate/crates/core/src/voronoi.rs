//! Truncated oscillating main term for the partial sums, and an independent
//! Perron contour-integral route to the same quantity.
//!
//! The partial sum `S(x) = sum_{n<=x} a(n)` of a degree-4 spin Dirichlet
//! series with functional equation admits the truncated expansion
//!
//! ```text
//! S(x) ~ x^{3/8} (2 pi)^{-3/4}
//!        * sum_{n<=M} a(n) n^{-5/8} cos(4 sqrt(2 pi) (n x)^{1/4} + pi/4)
//! ```
//!
//! with a power-saving error in `x` and `M`. [`main_term`] evaluates the
//! right-hand side with compensated summation in a deterministic order;
//! [`evaluate`] pairs it with the exact table value and the truncation
//! height `T` defined by `T^4 = 4 pi^2 (M + 1/2) x`.
//!
//! [`perron_oracle`] approximates `S(x)` a second way:
//! `(1/2 pi i) int_{kappa-iT}^{kappa+iT} Z^{(P)}(s) x^s / s ds` with the
//! Euler product truncated at primes `<= P` and every local factor inverted
//! exactly at each quadrature node. For `x` below the prime cutoff, this
//! converges to the same partial sum, giving a genuinely independent check
//! of the full coefficient pipeline.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fit::{log_log_fit, LinearFit};
use crate::local::EigenformData;
use crate::primes::primes_upto;
use crate::sum::KahanSum;
use crate::table::CoeffTable;

/// Frequency constant `4 sqrt(2 pi)` of the oscillating main term. It is a
/// normalization-dependent quantity, so it is exposed as a named value (and
/// an override hook) rather than buried in the formulas.
pub fn osc_frequency() -> f64 {
    4.0 * (2.0 * PI).sqrt()
}

/// Both sides of the truncated expansion at one point.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct VoronoiEvaluation {
    pub x: f64,
    pub m: u64,
    /// Truncation height, `t_height^4 = 4 pi^2 (M + 1/2) x`.
    pub t_height: f64,
    /// `S(x)` from the coefficient table.
    pub exact: f64,
    /// Truncated oscillating main term.
    pub main_term: f64,
    /// `exact - main_term`.
    pub residual: f64,
}

impl crate::ingest::ReportRow for VoronoiEvaluation {
    fn csv_header() -> &'static str {
        "x,M,T,exact,main_term,residual"
    }
    fn csv_row(&self) -> String {
        use crate::ingest::format_f64 as f;
        format!(
            "{},{},{},{},{},{}",
            f(self.x),
            self.m,
            f(self.t_height),
            f(self.exact),
            f(self.main_term),
            f(self.residual)
        )
    }
}

/// Truncation height `(4 pi^2 (M + 1/2) x)^{1/4}`.
pub fn truncation_height(x: f64, m: u64) -> f64 {
    (4.0 * PI * PI * (m as f64 + 0.5) * x).powf(0.25)
}

/// The oscillating main term with the default frequency constant.
///
/// Summation runs over ascending `n` with compensated accumulation, so the
/// result is deterministic and stable against cancellation.
pub fn main_term(table: &CoeffTable, x: f64, m: u64) -> Result<f64> {
    main_term_with_frequency(table, x, m, osc_frequency())
}

/// Same, with an explicit frequency constant (normalization probes).
pub fn main_term_with_frequency(table: &CoeffTable, x: f64, m: u64, c_osc: f64) -> Result<f64> {
    if m > table.bound() {
        return Err(Error::TableTooSmall {
            table: table.bound(),
            requested: m as f64,
        });
    }
    if !(x > 0.0) {
        return Err(Error::Invalid(format!("x must be positive, got {x}")));
    }
    let amp = x.powf(0.375) * (2.0 * PI).powf(-0.75);
    let mut acc = KahanSum::new();
    for n in 1..=m {
        let nf = n as f64;
        let phase = c_osc * (nf * x).powf(0.25) + PI / 4.0;
        acc.add(table.a(n) * nf.powf(-0.625) * phase.cos());
    }
    Ok(amp * acc.value())
}

/// Exact side, main term and residual at one `(x, M)`.
pub fn evaluate(table: &CoeffTable, x: f64, m: u64) -> Result<VoronoiEvaluation> {
    let exact = table.partial_sum(x)?;
    let main = main_term(table, x, m)?;
    Ok(VoronoiEvaluation {
        x,
        m,
        t_height: truncation_height(x, m),
        exact,
        main_term: main,
        residual: exact - main,
    })
}

/// Leading asymptotic of the `I_0` kernel transform:
/// `(-1)^k (2 pi)^{-1/2} t^{3/8} cos(4 t^{1/4} + pi/4)`.
pub fn i0_leading(t: f64, k: u32) -> f64 {
    let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    sign * (2.0 * PI).powf(-0.5) * t.powf(0.375) * (4.0 * t.powf(0.25) + PI / 4.0).cos()
}

/// Configuration of the Perron contour integral.
#[derive(Debug, Clone, Copy)]
pub struct PerronConfig {
    /// Real abscissa, strictly right of the abscissa of convergence.
    pub kappa: f64,
    /// Contour height `T`.
    pub t_height: f64,
    /// Euler product truncated at primes `<= prime_cutoff`.
    pub prime_cutoff: u64,
    /// Quadrature step in `t`; `None` picks the phase-resolved default
    /// (integrand phase advances at most pi/8 per step).
    pub step: Option<f64>,
}

impl PerronConfig {
    pub fn new(t_height: f64, prime_cutoff: u64) -> Self {
        Self {
            kappa: 1.1,
            t_height,
            prime_cutoff,
            step: None,
        }
    }
}

/// `S(x)` via the truncated Perron integral.
///
/// Uses composite midpoint on `[0, T]` (conjugate symmetry covers the lower
/// half), with a trapezoid comparison per panel as the error estimate; if
/// that estimate exceeds 10% of the running value, the step was too coarse
/// and an accuracy error is returned.
pub fn perron_oracle(form: &EigenformData, x: f64, cfg: &PerronConfig) -> Result<f64> {
    if cfg.kappa <= 1.0 {
        return Err(Error::Invalid(format!(
            "kappa must exceed 1, got {}",
            cfg.kappa
        )));
    }
    if !(cfg.t_height > 0.0) || cfg.prime_cutoff < 2 {
        return Err(Error::Invalid("need T > 0 and prime cutoff >= 2".into()));
    }
    if x.fract() == 0.0 {
        return Err(Error::Invalid(format!(
            "x = {x} is an integer; the contour integral converges to the jump midpoint there"
        )));
    }
    if form.prime_bound < cfg.prime_cutoff {
        return Err(Error::MissingPrime {
            prime: cfg.prime_cutoff,
            covered: form.prime_bound,
        });
    }

    let primes = primes_upto(cfg.prime_cutoff);
    let factors: Vec<(f64, f64, f64)> = primes
        .iter()
        .map(|&p| {
            let lf = form.locals[&p];
            ((p as f64).ln(), lf.e1, lf.e2)
        })
        .collect();

    // Phase rate of the integrand: ln x from x^{it}, plus the log-derivative
    // of the truncated Euler product, bounded by 4 ln p / (p^kappa - 1).
    let rate = x.ln().abs()
        + factors
            .iter()
            .map(|&(lp, _, _)| 4.0 * lp / ((lp * cfg.kappa).exp() - 1.0))
            .sum::<f64>()
        + 1.0 / cfg.kappa;
    let step = cfg.step.unwrap_or((PI / 8.0) / rate);
    let panels = (cfg.t_height / step).ceil() as usize;
    let h = cfg.t_height / panels as f64;

    let integrand = |t: f64| -> Complex64 {
        let s = Complex64::new(cfg.kappa, t);
        let mut z = Complex64::new(1.0, 0.0);
        for &(lp, e1, e2) in &factors {
            let w = (-s * lp).exp();
            let q = (((w - e1) * w + e2) * w - e1) * w + 1.0;
            z /= q;
        }
        z * (s * x.ln()).exp() / s
    };

    // Midpoint value and per-panel trapezoid comparison, accumulated in
    // fixed chunk order so the result is independent of thread count.
    const CHUNK: usize = 4096;
    let chunk_results: Vec<(f64, f64, f64)> = (0..panels.div_ceil(CHUNK))
        .into_par_iter()
        .map(|ci| {
            let lo = ci * CHUNK;
            let hi = ((ci + 1) * CHUNK).min(panels);
            let mut mid = KahanSum::new();
            let mut trap = KahanSum::new();
            let mut err = 0.0f64;
            let mut left = integrand(lo as f64 * h).re;
            for i in lo..hi {
                let m = integrand((i as f64 + 0.5) * h).re;
                let right = integrand((i + 1) as f64 * h).re;
                let tr = 0.5 * (left + right);
                mid.add(m);
                trap.add(tr);
                err += (m - tr).abs() / 3.0;
                left = right;
            }
            (mid.value(), trap.value(), err)
        })
        .collect();

    let mut mid_total = KahanSum::new();
    let mut err_total = 0.0f64;
    for (m, _t, e) in &chunk_results {
        mid_total.add(*m);
        err_total += *e;
    }
    let value = mid_total.value() * h / PI;
    let est = err_total * h / PI;
    if est > 0.1 * value.abs() {
        return Err(Error::QuadratureAccuracy {
            context: "perron contour integral",
            estimate: est,
            value,
        });
    }
    Ok(value)
}

/// Fit summary of `log |residual|` against `log x`.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub std_err: f64,
    pub r_squared: f64,
    pub points_used: usize,
}

impl From<LinearFit> for SlopeFit {
    fn from(f: LinearFit) -> Self {
        SlopeFit {
            slope: f.slope,
            std_err: f.slope_std_err,
            r_squared: f.r_squared,
            points_used: f.points,
        }
    }
}

/// Least-squares exponent of the residual against `x`, over a grid of
/// evaluation points with per-point truncation `M = m_rule(x)`. Exact zero
/// residuals are excluded; fewer than four usable points is an error.
pub fn error_exponent_fit(
    table: &CoeffTable,
    xs: &[f64],
    m_rule: impl Fn(f64) -> u64 + Sync,
) -> Result<SlopeFit> {
    if xs.len() < 8 {
        return Err(Error::InsufficientData {
            have: xs.len(),
            need: 8,
        });
    }
    let evals: Vec<VoronoiEvaluation> = xs
        .par_iter()
        .map(|&x| evaluate(table, x, m_rule(x)))
        .collect::<Result<_>>()?;
    residual_slope(&evals)
}

/// The fit itself, reusable on synthetic residual inputs for self-tests.
pub fn residual_slope(evals: &[VoronoiEvaluation]) -> Result<SlopeFit> {
    let pts: Vec<(f64, f64)> = evals.iter().map(|e| (e.x, e.residual)).collect();
    Ok(log_log_fit(&pts, 4)?.into())
}
