//! Parsers for the small grid and rule languages used on the command line.

use spinor_core::{Error, Result};

/// Grid spec `lo:hi:count:log|lin`.
#[derive(Debug, Clone, Copy)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    pub log: bool,
}

impl GridSpec {
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 4 {
            return Err(Error::Invalid(format!(
                "grid must be lo:hi:count:log|lin, got '{s}'"
            )));
        }
        let lo: f64 = parts[0]
            .parse()
            .map_err(|_| Error::Invalid(format!("bad grid lo '{}'", parts[0])))?;
        let hi: f64 = parts[1]
            .parse()
            .map_err(|_| Error::Invalid(format!("bad grid hi '{}'", parts[1])))?;
        let count: usize = parts[2]
            .parse()
            .map_err(|_| Error::Invalid(format!("bad grid count '{}'", parts[2])))?;
        let log = match parts[3] {
            "log" => true,
            "lin" => false,
            other => {
                return Err(Error::Invalid(format!(
                    "grid scale must be log|lin, got '{other}'"
                )))
            }
        };
        // the negated form also rejects NaN
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(lo > 0.0) && log {
            return Err(Error::Invalid("log grid needs lo > 0".into()));
        }
        if hi < lo || count == 0 {
            return Err(Error::Invalid(format!("degenerate grid '{s}'")));
        }
        Ok(Self { lo, hi, count, log })
    }

    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.lo];
        }
        let n = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                let f = i as f64 / n;
                if self.log {
                    self.lo * (self.hi / self.lo).powf(f)
                } else {
                    self.lo + (self.hi - self.lo) * f
                }
            })
            .collect()
    }
}

/// Truncation rule `const:<int>` or `pow:<float>` (`M = x^<float>`).
#[derive(Debug, Clone, Copy)]
pub enum MRule {
    Const(u64),
    Pow(f64),
}

impl MRule {
    pub fn parse(s: &str) -> Result<Self> {
        match s.split_once(':') {
            Some(("const", v)) => v
                .parse()
                .map(MRule::Const)
                .map_err(|_| Error::Invalid(format!("bad const M-rule '{s}'"))),
            Some(("pow", v)) => v
                .parse()
                .map(MRule::Pow)
                .map_err(|_| Error::Invalid(format!("bad pow M-rule '{s}'"))),
            _ => Err(Error::Invalid(format!(
                "M-rule must be const:<int> or pow:<float>, got '{s}'"
            ))),
        }
    }

    pub fn at(&self, x: f64) -> u64 {
        match *self {
            MRule::Const(m) => m,
            MRule::Pow(e) => x.powf(e).floor().max(1.0) as u64,
        }
    }
}

/// Zero-band spec: a bare float is relative to `d4(n)`, `abs:<float>` is an
/// absolute threshold.
pub fn parse_zero_tol(s: &str) -> Result<spinor_core::ZeroTolerance> {
    use spinor_core::ZeroTolerance::*;
    if let Some(v) = s.strip_prefix("abs:") {
        return v
            .parse()
            .map(Absolute)
            .map_err(|_| Error::Invalid(format!("bad zero tolerance '{s}'")));
    }
    s.parse()
        .map(RelativeD4)
        .map_err(|_| Error::Invalid(format!("bad zero tolerance '{s}'")))
}
