//! Eigenvalue files, synthetic form families, and report emission.
//!
//! # File format
//!
//! Plain text, hand-editable:
//!
//! ```text
//! # label=tempered-1 k=20 convention=e1e2 prime_bound=1000
//! 2 -0.9170601224112437 0.29725089841626443
//! 3 1.4647778541017386 1.4365268528432679
//! ...
//! ```
//!
//! One header line, then one row per prime in strictly increasing order with
//! no gaps below the declared bound. Under `convention=lambda` the two
//! values are the normalised eigenvalues `lambda(p)` and `lambda(p^2)`;
//! under `convention=e1e2` they are the symmetric coefficients directly.
//! Decimal strings are preserved verbatim through a read/write cycle.
//!
//! Published eigenvalue tables are usually unnormalised; the expected
//! conversion is `lambda(p) = (classical eigenvalue) * p^{-(k - 3/2)}`.
//! Getting that exponent wrong is the single most error-prone ingestion
//! step, so it is never applied silently here: files carry already
//! normalised values.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::local::{EigenformData, LocalFactor};
use crate::primes::primes_upto;

/// Which pair of numbers a data row carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Convention {
    Lambda,
    E1E2,
}

impl Convention {
    fn tag(self) -> &'static str {
        match self {
            Convention::Lambda => "lambda",
            Convention::E1E2 => "e1e2",
        }
    }
}

/// A parsed eigenvalue file: header plus raw rows. Row values keep their
/// original decimal spelling so emit-then-load round-trips byte for byte.
#[derive(Debug, Clone)]
pub struct EigenvalueFile {
    pub label: String,
    pub weight: u32,
    pub convention: Convention,
    pub prime_bound: u64,
    pub rows: Vec<EigenRow>,
}

#[derive(Debug, Clone)]
pub struct EigenRow {
    pub p: u64,
    pub v1: String,
    pub v2: String,
}

impl EigenvalueFile {
    /// Parse from text; `path` is used only in error messages.
    pub fn parse(text: &str, path: &str) -> Result<Self> {
        let perr = |line: usize, msg: String| Error::Parse {
            path: path.to_string(),
            line,
            msg,
        };
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or_else(|| perr(1, "empty file".into()))?;
        let header = header
            .strip_prefix('#')
            .ok_or_else(|| perr(1, "header must start with '#'".into()))?;
        let mut label = None;
        let mut weight = None;
        let mut convention = None;
        let mut prime_bound = None;
        for tok in header.split_whitespace() {
            let (k, v) = tok
                .split_once('=')
                .ok_or_else(|| perr(1, format!("bad header token '{tok}'")))?;
            match k {
                "label" => label = Some(v.to_string()),
                "k" => {
                    weight = Some(
                        v.parse::<u32>()
                            .map_err(|_| perr(1, format!("bad weight '{v}'")))?,
                    )
                }
                "convention" => {
                    convention = Some(match v {
                        "lambda" => Convention::Lambda,
                        "e1e2" => Convention::E1E2,
                        _ => return Err(perr(1, format!("unknown convention '{v}'"))),
                    })
                }
                "prime_bound" => {
                    prime_bound = Some(
                        v.parse::<u64>()
                            .map_err(|_| perr(1, format!("bad prime_bound '{v}'")))?,
                    )
                }
                _ => return Err(perr(1, format!("unknown header key '{k}'"))),
            }
        }
        let label = label.ok_or_else(|| perr(1, "missing label".into()))?;
        let weight = weight.ok_or_else(|| perr(1, "missing k".into()))?;
        let convention = convention.ok_or_else(|| perr(1, "missing convention".into()))?;
        let prime_bound = prime_bound.ok_or_else(|| perr(1, "missing prime_bound".into()))?;

        let mut rows: Vec<EigenRow> = Vec::new();
        for (idx, line) in lines {
            let lineno = idx + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let mut it = trimmed.split_whitespace();
            let (p, v1, v2) = match (it.next(), it.next(), it.next(), it.next()) {
                (Some(p), Some(v1), Some(v2), None) => (p, v1, v2),
                _ => return Err(perr(lineno, "expected 'p v1 v2'".into())),
            };
            let p: u64 = p
                .parse()
                .map_err(|_| perr(lineno, format!("bad prime '{p}'")))?;
            for v in [v1, v2] {
                let x: f64 = v
                    .parse()
                    .map_err(|_| perr(lineno, format!("bad value '{v}'")))?;
                if !x.is_finite() {
                    return Err(perr(lineno, format!("non-finite value '{v}'")));
                }
            }
            if let Some(last) = rows.last() {
                if p <= last.p {
                    return Err(perr(
                        lineno,
                        format!("primes must be strictly increasing ({} then {p})", last.p),
                    ));
                }
            }
            rows.push(EigenRow {
                p,
                v1: v1.to_string(),
                v2: v2.to_string(),
            });
        }
        if rows.is_empty() {
            return Err(perr(2, "no data rows".into()));
        }

        // coverage: every prime <= prime_bound, in order, no extras
        let expected = primes_upto(prime_bound);
        for (i, &p) in expected.iter().enumerate() {
            match rows.get(i) {
                Some(r) if r.p == p => {}
                _ => {
                    return Err(Error::MissingPrime {
                        prime: p,
                        covered: prime_bound,
                    })
                }
            }
        }
        if rows.len() != expected.len() {
            return Err(Error::Invalid(format!(
                "row for {} exceeds declared prime_bound {prime_bound}",
                rows[expected.len()].p
            )));
        }

        Ok(Self {
            label,
            weight,
            convention,
            prime_bound,
            rows,
        })
    }

    /// Serialize back to the text format, preserving row strings.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# label={} k={} convention={} prime_bound={}",
            self.label,
            self.weight,
            self.convention.tag(),
            self.prime_bound
        );
        for r in &self.rows {
            let _ = writeln!(out, "{} {} {}", r.p, r.v1, r.v2);
        }
        out
    }

    /// Build the numeric form: each row becomes a local factor, via the
    /// eigenvalue conversion when the convention is `lambda`.
    pub fn to_form(&self) -> Result<EigenformData> {
        let mut locals = BTreeMap::new();
        for r in &self.rows {
            let v1: f64 = r.v1.parse().unwrap();
            let v2: f64 = r.v2.parse().unwrap();
            let lf = match self.convention {
                Convention::Lambda => LocalFactor::from_hecke(r.p, v1, v2),
                Convention::E1E2 => LocalFactor::new(r.p, v1, v2),
            };
            locals.insert(r.p, lf);
        }
        EigenformData::new(self.weight, self.label.clone(), locals, self.prime_bound)
    }
}

/// Read and validate a file from disk.
pub fn load(path: impl AsRef<Path>) -> Result<EigenformData> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    EigenvalueFile::parse(&text, &path.display().to_string())?.to_form()
}

/// Convert a form back to file representation with freshly formatted
/// decimals (shortest strings that parse back to the same doubles).
pub fn to_eigenvalue_file(form: &EigenformData, convention: Convention) -> EigenvalueFile {
    let rows = form
        .locals
        .values()
        .map(|lf| {
            let (v1, v2) = match convention {
                Convention::E1E2 => (lf.e1, lf.e2),
                Convention::Lambda => {
                    let lam = lf.lambda(2);
                    (lam[1], lam[2])
                }
            };
            EigenRow {
                p: lf.p,
                v1: format!("{v1}"),
                v2: format!("{v2}"),
            }
        })
        .collect();
    EigenvalueFile {
        label: form.label.clone(),
        weight: form.weight,
        convention,
        prime_bound: form.prime_bound,
        rows,
    }
}

/// Synthetic family selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Tempered,
    Sk,
    Trivial,
}

/// Reproducible synthetic form description: the same spec always generates
/// bitwise-identical data.
#[derive(Debug, Clone)]
pub struct SyntheticSpec {
    pub family: Family,
    pub seed: u64,
    pub prime_bound: u64,
    pub weight: u32,
    /// Explicit angles for the sk family (one per prime, increasing order);
    /// seeded angles otherwise.
    pub sk_angles: Option<Vec<f64>>,
}

/// Angle source for the non-tempered family.
#[derive(Debug, Clone)]
pub enum SkSource {
    Seed(u64),
    /// Angles `theta_p in [0, pi]`, one per prime in increasing order.
    Angles(Vec<f64>),
}

/// Local factor with unit-circle spin parameters
/// `{e^{ia}, e^{-ia}, e^{ib}, e^{-ib}}`.
pub fn tempered_local(p: u64, a: f64, b: f64) -> LocalFactor {
    let e1 = 2.0 * a.cos() + 2.0 * b.cos();
    let e2 = 2.0 + 4.0 * a.cos() * b.cos();
    LocalFactor::new(p, e1, e2)
}

/// Local factor with spin parameters
/// `{sqrt(p), 1/sqrt(p), e^{i theta}, e^{-i theta}}` — the lift shape whose
/// degree-4 function factors through a degree-2 one. Never tempered.
pub fn sk_local(p: u64, theta: f64) -> LocalFactor {
    let s = (p as f64).sqrt() + 1.0 / (p as f64).sqrt();
    let e1 = s + 2.0 * theta.cos();
    let e2 = 2.0 + s * 2.0 * theta.cos();
    LocalFactor::new(p, e1, e2)
}

/// Tempered form with independent uniform angles per prime, deterministic
/// in the seed.
pub fn gen_tempered(seed: u64, prime_bound: u64) -> Result<EigenformData> {
    if prime_bound < 2 {
        return Err(Error::Invalid("prime_bound must be >= 2".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut locals = BTreeMap::new();
    for p in primes_upto(prime_bound) {
        let a = rng.gen::<f64>() * std::f64::consts::PI;
        let b = rng.gen::<f64>() * std::f64::consts::PI;
        locals.insert(p, tempered_local(p, a, b));
    }
    EigenformData::new(20, format!("tempered-{seed}"), locals, prime_bound)
}

/// Non-tempered lift-type form; all its eigenvalues are positive.
pub fn gen_sk(source: SkSource, prime_bound: u64) -> Result<EigenformData> {
    if prime_bound < 2 {
        return Err(Error::Invalid("prime_bound must be >= 2".into()));
    }
    let primes = primes_upto(prime_bound);
    let (label, angles): (String, Vec<f64>) = match source {
        SkSource::Seed(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (
                format!("sk-{seed}"),
                primes
                    .iter()
                    .map(|_| rng.gen::<f64>() * std::f64::consts::PI)
                    .collect(),
            )
        }
        SkSource::Angles(a) => {
            if a.len() != primes.len() {
                return Err(Error::Invalid(format!(
                    "need {} angles for primes <= {prime_bound}, got {}",
                    primes.len(),
                    a.len()
                )));
            }
            if a.iter().any(|t| !(0.0..=std::f64::consts::PI).contains(t)) {
                return Err(Error::Invalid("angles must lie in [0, pi]".into()));
            }
            ("sk-angles".to_string(), a)
        }
    };
    let mut locals = BTreeMap::new();
    for (&p, &theta) in primes.iter().zip(angles.iter()) {
        locals.insert(p, sk_local(p, theta));
    }
    EigenformData::new(20, label, locals, prime_bound)
}

/// Every local factor `(4, 6)`: the coefficient model `a(n) = d4(n)`.
/// Useful as an exact oracle; the partial sums of this form grow steadily,
/// so none of the oscillation-based assertions apply to it.
pub fn gen_trivial(prime_bound: u64) -> Result<EigenformData> {
    if prime_bound < 2 {
        return Err(Error::Invalid("prime_bound must be >= 2".into()));
    }
    let mut locals = BTreeMap::new();
    for p in primes_upto(prime_bound) {
        locals.insert(p, LocalFactor::new(p, 4.0, 6.0));
    }
    EigenformData::new(20, "trivial", locals, prime_bound)
}

/// Dispatch on a [`SyntheticSpec`].
pub fn generate(spec: &SyntheticSpec) -> Result<EigenformData> {
    let mut form = match (spec.family, &spec.sk_angles) {
        (Family::Tempered, _) => gen_tempered(spec.seed, spec.prime_bound)?,
        (Family::Sk, None) => gen_sk(SkSource::Seed(spec.seed), spec.prime_bound)?,
        (Family::Sk, Some(angles)) => gen_sk(SkSource::Angles(angles.clone()), spec.prime_bound)?,
        (Family::Trivial, _) => gen_trivial(spec.prime_bound)?,
    };
    if spec.weight != form.weight {
        form = EigenformData::new(spec.weight, form.label, form.locals, form.prime_bound)?;
    }
    Ok(form)
}

/// Full-precision float formatting for report files: 17 significant digits,
/// which round-trips any double exactly.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// One row of a tabular report.
pub trait ReportRow {
    fn csv_header() -> &'static str;
    fn csv_row(&self) -> String;
}

/// Write rows as CSV with a fixed header and deterministic formatting.
pub fn emit_csv<T: ReportRow>(rows: &[T], path: impl AsRef<Path>) -> Result<()> {
    let mut out = String::new();
    out.push_str(T::csv_header());
    out.push('\n');
    for r in rows {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Write rows as a JSON array.
pub fn emit_json<T: serde::Serialize>(rows: &[T], path: impl AsRef<Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(rows)
        .map_err(|e| Error::Invalid(format!("serialization failed: {e}")))?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}
