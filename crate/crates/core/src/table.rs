//! Dense multiplicative coefficient tables.
//!
//! [`CoeffTable::build`] expands the Euler product into arrays `a(n)`,
//! `lambda(n)` and `d4(n)` for `n <= N`, together with the prefix sums
//! `S(n) = a(1) + ... + a(n)`. The sieve walks prime powers directly:
//! for every `p^v <= N` it multiplies the local coefficient at exponent `v`
//! into all `m = k * p^v` with `p` not dividing `k`, so each `a[n]` ends up
//! as the product of its local coefficients without a factorization table.
//!
//! `d4(n)` counts ordered factorizations `n = abcd`; at prime powers it is
//! `binom(v+3, 3)`, and it bounds `|a(n)|` whenever the form is tempered.

use crate::error::{Error, Result};
use crate::local::EigenformData;
use crate::primes::primes_upto;
use crate::sum::KahanSum;

/// Dense coefficient tables for `1 <= n <= N`, immutable once built.
#[derive(Debug, Clone)]
pub struct CoeffTable {
    n: u64,
    a: Vec<f64>,
    lam: Vec<f64>,
    d4: Vec<u32>,
    prefix_a: Vec<f64>,
}

/// Sign tally of `a(n)` for `n <= x`, with the zero band reported
/// separately rather than folded into either sign.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SignCounts {
    pub x: f64,
    pub plus: u64,
    pub minus: u64,
    pub zero: u64,
    /// The absolute threshold used at `n = 1` (for the record; relative
    /// tolerances scale per-index).
    pub zero_tolerance: f64,
}

/// How to decide that a coefficient is numerically zero.
///
/// Genuine eigenvalues are irrational and essentially never vanish, but
/// float arithmetic needs a band. The default scales with `d4(n)`, the
/// natural size of `a(n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ZeroTolerance {
    /// `|a(n)| <= t` counts as zero.
    Absolute(f64),
    /// `|a(n)| <= t * d4(n)` counts as zero.
    RelativeD4(f64),
}

impl Default for ZeroTolerance {
    fn default() -> Self {
        ZeroTolerance::RelativeD4(1e-10)
    }
}

impl ZeroTolerance {
    /// Absolute threshold at an index with the given `d4` value.
    #[inline]
    pub fn at(&self, d4: u32) -> f64 {
        match *self {
            ZeroTolerance::Absolute(t) => t,
            ZeroTolerance::RelativeD4(t) => t * d4 as f64,
        }
    }
}

#[inline]
fn d4_prime_power(v: u32) -> u32 {
    // binom(v+3, 3)
    let v = v as u64;
    ((v + 1) * (v + 2) * (v + 3) / 6) as u32
}

impl CoeffTable {
    /// Sieve all tables up to `n`. Every prime `<= n` must carry local data.
    pub fn build(form: &EigenformData, n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Invalid("table bound N must be >= 1".into()));
        }
        let len = n as usize + 1;
        let mut a = vec![1.0f64; len];
        let mut lam = vec![1.0f64; len];
        let mut d4 = vec![1u32; len];
        a[0] = 0.0;
        lam[0] = 0.0;
        d4[0] = 0;

        for p in primes_upto(n) {
            let lf = form.local(p)?;
            let mut j_max = 1u32;
            let mut pw = p;
            while pw <= n / p {
                pw *= p;
                j_max += 1;
            }
            let cj = lf.coeffs(j_max as usize);
            let lj = lf.lambda(j_max as usize);

            let mut pv = 1u64;
            for v in 1..=j_max {
                pv *= p;
                let (cv, lv, dv) = (cj[v as usize], lj[v as usize], d4_prime_power(v));
                // m = k * p^v over k not divisible by p.
                let mut m = pv;
                let mut k_mod_p = 1u64;
                while m <= n {
                    if k_mod_p != 0 {
                        let i = m as usize;
                        a[i] *= cv;
                        lam[i] *= lv;
                        d4[i] *= dv;
                    }
                    m += pv;
                    k_mod_p += 1;
                    if k_mod_p == p {
                        k_mod_p = 0;
                    } else if k_mod_p > p {
                        k_mod_p = 1;
                    }
                }
            }
        }

        let mut prefix_a = vec![0.0f64; len];
        let mut acc = KahanSum::new();
        for i in 1..len {
            acc.add(a[i]);
            prefix_a[i] = acc.value();
        }

        Ok(Self {
            n,
            a,
            lam,
            d4,
            prefix_a,
        })
    }

    /// Upper index bound `N`.
    pub fn bound(&self) -> u64 {
        self.n
    }

    #[inline]
    pub fn a(&self, n: u64) -> f64 {
        self.a[n as usize]
    }

    #[inline]
    pub fn lam(&self, n: u64) -> f64 {
        self.lam[n as usize]
    }

    #[inline]
    pub fn d4(&self, n: u64) -> u32 {
        self.d4[n as usize]
    }

    /// `S(x) = sum_{n <= x} a(n)`, the step function of the prefix sums.
    /// Zero for `x < 1`; errors above the table bound.
    pub fn partial_sum(&self, x: f64) -> Result<f64> {
        if x < 1.0 {
            return Ok(0.0);
        }
        let idx = x.floor() as u64;
        if idx > self.n {
            return Err(Error::TableTooSmall {
                table: self.n,
                requested: x,
            });
        }
        Ok(self.prefix_a[idx as usize])
    }

    /// Coefficient slice `a(1..=N)` (index 0 is a placeholder zero).
    pub fn a_slice(&self) -> &[f64] {
        &self.a
    }

    pub fn lam_slice(&self) -> &[f64] {
        &self.lam
    }

    pub fn d4_slice(&self) -> &[u32] {
        &self.d4
    }

    pub fn prefix_slice(&self) -> &[f64] {
        &self.prefix_a
    }

    /// Classify signs of `a(n)` for `n <= x`.
    pub fn sign_counts(&self, x: f64, tol: ZeroTolerance) -> Result<SignCounts> {
        if x < 1.0 || x > self.n as f64 {
            return Err(Error::TableTooSmall {
                table: self.n,
                requested: x,
            });
        }
        let top = x.floor() as usize;
        let (mut plus, mut minus, mut zero) = (0u64, 0u64, 0u64);
        for i in 1..=top {
            let t = tol.at(self.d4[i]);
            let v = self.a[i];
            if v > t {
                plus += 1;
            } else if v < -t {
                minus += 1;
            } else {
                zero += 1;
            }
        }
        Ok(SignCounts {
            x,
            plus,
            minus,
            zero,
            zero_tolerance: tol.at(1),
        })
    }

    /// All `n` violating the divisor bound `|a(n)| <= d4(n) + tol`. Empty
    /// exactly when the bound holds on the whole table.
    pub fn rp_violations(&self, tol: f64) -> Vec<u64> {
        (1..=self.n)
            .filter(|&i| self.a[i as usize].abs() > self.d4[i as usize] as f64 + tol)
            .collect()
    }

    /// Maximum over `n <= N` of the relative defect in the identity
    /// `a(n) = sum_{d^2 | n} lambda(n/d^2) / d`, evaluated by a direct
    /// double loop over `d` (independent of the sieve path).
    pub fn hecke_crosscheck(&self) -> f64 {
        let len = self.a.len();
        let mut recon = vec![0.0f64; len];
        let mut d = 1u64;
        while d * d < len as u64 {
            let d2 = (d * d) as usize;
            let w = 1.0 / d as f64;
            let mut m = 1usize;
            while m * d2 < len {
                recon[m * d2] += self.lam[m] * w;
                m += 1;
            }
            d += 1;
        }
        let mut worst = 0.0f64;
        for (a, r) in self.a.iter().zip(recon.iter()).skip(1) {
            let dev = (a - r).abs() / (1.0 + a.abs());
            worst = worst.max(dev);
        }
        worst
    }

    /// `sum_{n <= N} d4(n) / n^2`, which climbs towards `zeta(2)^4` from
    /// below; a cheap global sanity anchor for the `d4` table.
    pub fn d4_zeta2_partial(&self) -> f64 {
        let mut acc = KahanSum::new();
        for i in 1..self.a.len() {
            acc.add(self.d4[i] as f64 / (i as f64 * i as f64));
        }
        acc.value()
    }

    /// `max_{2 <= x <= N} |S(x)| / x^theta`; recorded by the check pipeline
    /// as an empirical mean-value statistic.
    pub fn mean_value_ratio(&self, theta: f64) -> f64 {
        let mut worst = 0.0f64;
        for i in 2..self.a.len() {
            let r = self.prefix_a[i].abs() / (i as f64).powf(theta);
            worst = worst.max(r);
        }
        worst
    }
}

/// Streaming prefix sums `S(c)` at the given checkpoints without holding
/// full tables: coefficients are produced segment by segment and discarded.
/// Checkpoints must be increasing.
pub fn segmented_prefix(
    form: &EigenformData,
    n: u64,
    checkpoints: &[u64],
    segment_len: u64,
) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::Invalid("bound N must be >= 1".into()));
    }
    if checkpoints.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Invalid(
            "checkpoints must be strictly increasing".into(),
        ));
    }
    if let Some(&last) = checkpoints.last() {
        if last > n {
            return Err(Error::TableTooSmall {
                table: n,
                requested: last as f64,
            });
        }
    }
    let seg = segment_len.max(1024);
    let primes = primes_upto(n);
    for &p in &primes {
        form.local(p)?;
    }
    // Per-prime coefficient expansions up to the largest exponent needed.
    let coeffs: Vec<(u64, Vec<f64>)> = primes
        .iter()
        .map(|&p| {
            let mut j = 1u32;
            let mut pw = p;
            while pw <= n / p {
                pw *= p;
                j += 1;
            }
            (p, form.local(p).unwrap().coeffs(j as usize))
        })
        .collect();

    let mut out = Vec::with_capacity(checkpoints.len());
    let mut next_cp = 0usize;
    let mut acc = KahanSum::new();
    let mut lo = 1u64;
    let mut value = vec![1.0f64; seg as usize];
    let mut rem = vec![1u64; seg as usize];
    while lo <= n && next_cp < checkpoints.len() {
        let hi = (lo + seg - 1).min(n);
        let len = (hi - lo + 1) as usize;
        for v in value[..len].iter_mut() {
            *v = 1.0;
        }
        for (i, r) in rem[..len].iter_mut().enumerate() {
            *r = lo + i as u64;
        }
        for &(p, ref cj) in &coeffs {
            if p * p > hi {
                break;
            }
            // first multiple of p in [lo, hi]
            let mut m = lo.div_ceil(p) * p;
            while m <= hi {
                let i = (m - lo) as usize;
                let mut v = 0usize;
                while rem[i].is_multiple_of(p) {
                    rem[i] /= p;
                    v += 1;
                }
                value[i] *= cj[v];
                m += p;
            }
        }
        for i in 0..len {
            // leftover is 1 or a single prime > sqrt(hi)
            if rem[i] > 1 {
                let lf = form.local(rem[i])?;
                value[i] *= lf.e1;
            }
            acc.add(value[i]);
            let m = lo + i as u64;
            while next_cp < checkpoints.len() && checkpoints[next_cp] == m {
                out.push(acc.value());
                next_cp += 1;
            }
        }
        lo = hi + 1;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{gen_sk, gen_tempered, gen_trivial, SkSource};
    use crate::local::LocalFactor;
    use std::collections::BTreeMap;

    fn trivial_form(pb: u64) -> EigenformData {
        gen_trivial(pb).unwrap()
    }

    /// Independent per-n oracle: trial-division factorization and naive
    /// series inversion by long division, sharing no code with the sieve.
    fn naive_a(form: &EigenformData, n: u64) -> f64 {
        let mut rest = n;
        let mut out = 1.0;
        let mut p = 2u64;
        while p * p <= rest {
            if rest.is_multiple_of(p) {
                let mut v = 0usize;
                while rest.is_multiple_of(p) {
                    rest /= p;
                    v += 1;
                }
                out *= naive_local_coeff(form.locals[&p], v);
            }
            p += 1;
        }
        if rest > 1 {
            out *= naive_local_coeff(form.locals[&rest], 1);
        }
        out
    }

    fn naive_local_coeff(lf: LocalFactor, v: usize) -> f64 {
        // Long division of 1 by the quartic, written independently of the
        // recurrence in LocalFactor::coeffs.
        let q = [1.0, -lf.e1, lf.e2, -lf.e1, 1.0];
        let mut c = vec![0.0f64; v + 1];
        for j in 0..=v {
            let mut acc = if j == 0 { 1.0 } else { 0.0 };
            for i in 1..=j.min(4) {
                acc -= q[i] * c[j - i];
            }
            c[j] = acc;
        }
        c[v]
    }

    #[test]
    fn build_rejects_zero_bound() {
        let f = trivial_form(2);
        assert!(CoeffTable::build(&f, 0).is_err());
    }

    #[test]
    fn build_names_missing_prime() {
        let mut locals = BTreeMap::new();
        locals.insert(2, LocalFactor::new(2, 4.0, 6.0));
        let f = EigenformData::new(20, "partial", locals, 2).unwrap();
        let err = CoeffTable::build(&f, 10).unwrap_err();
        assert!(matches!(err, Error::MissingPrime { prime: 3, .. }));
    }

    #[test]
    fn trivial_form_small_values() {
        let t = CoeffTable::build(&trivial_form(12), 12).unwrap();
        assert_eq!(t.a(1), 1.0);
        assert_eq!(t.a(12), 40.0); // a(4)*a(3) = 10*4
        assert_eq!(t.d4(12), 40);
        for n in 1..=12 {
            assert_eq!(t.a(n), t.d4(n) as f64);
        }
    }

    #[test]
    fn one_plus_t4_factor_kills_powers_of_two() {
        let mut locals = BTreeMap::new();
        locals.insert(2, LocalFactor::new(2, 0.0, 0.0));
        locals.insert(3, LocalFactor::new(3, 4.0, 6.0));
        let f = EigenformData::new(20, "mixed", locals, 3).unwrap();
        let t = CoeffTable::build(&f, 4).unwrap();
        assert_eq!(t.a(2), 0.0);
        assert_eq!(t.a(4), 0.0);
        assert_eq!(t.a(3), 4.0);
    }

    #[test]
    fn sieve_matches_naive_oracle() {
        let form = gen_tempered(42, 10_000).unwrap();
        let t = CoeffTable::build(&form, 10_000).unwrap();
        for n in 1..=10_000u64 {
            let o = naive_a(&form, n);
            let dev = (t.a(n) - o).abs() / o.abs().max(1.0);
            assert!(dev <= 1e-12, "n={n}: sieve={} oracle={o}", t.a(n));
        }
    }

    #[test]
    fn multiplicativity_spot_checks() {
        let form = gen_tempered(7, 3_000).unwrap();
        let t = CoeffTable::build(&form, 3_000).unwrap();
        for &(m, n) in &[
            (4u64, 9u64),
            (5, 8),
            (7, 27),
            (25, 49),
            (11, 128),
            (13, 230),
        ] {
            assert_eq!(num_integer_gcd(m, n), 1);
            let lhs = t.a(m * n);
            let rhs = t.a(m) * t.a(n);
            assert!((lhs - rhs).abs() <= 1e-9 * rhs.abs().max(1.0), "({m},{n})");
            let ll = t.lam(m * n);
            let lr = t.lam(m) * t.lam(n);
            assert!((ll - lr).abs() <= 1e-9 * lr.abs().max(1.0));
            assert_eq!(t.d4(m * n), t.d4(m) * t.d4(n));
        }
    }

    fn num_integer_gcd(mut a: u64, mut b: u64) -> u64 {
        while b != 0 {
            let t = a % b;
            a = b;
            b = t;
        }
        a
    }

    #[test]
    fn prefix_sums_are_consistent() {
        let t = CoeffTable::build(&gen_tempered(3, 500).unwrap(), 500).unwrap();
        for n in 2..=500u64 {
            let diff = t.prefix_slice()[n as usize] - t.prefix_slice()[n as usize - 1];
            assert!((diff - t.a(n)).abs() <= 1e-9 * t.a(n).abs().max(1.0));
        }
        assert_eq!(t.partial_sum(0.5).unwrap(), 0.0);
        assert!(t.partial_sum(501.0).is_err());
    }

    #[test]
    fn hecke_identity_holds_by_construction() {
        let t = CoeffTable::build(&gen_tempered(11, 5_000).unwrap(), 5_000).unwrap();
        assert!(t.hecke_crosscheck() <= 1e-9);
    }

    #[test]
    fn hecke_identity_squarefree_and_square_cases() {
        let form = gen_tempered(13, 1_000).unwrap();
        let t = CoeffTable::build(&form, 1_000).unwrap();
        // squarefree n: a(n) = lambda(n)
        for n in [1u64, 2, 3, 5, 6, 7, 10, 15, 30, 210, 770] {
            assert!((t.a(n) - t.lam(n)).abs() <= 1e-12 * t.a(n).abs().max(1.0));
        }
        // n = p^2: a(p^2) = lambda(p^2) + 1/p
        for p in [2u64, 3, 5, 7, 11, 31] {
            let expect = t.lam(p * p) + 1.0 / p as f64;
            assert!((t.a(p * p) - expect).abs() <= 1e-12);
        }
    }

    #[test]
    fn sign_counts_examples() {
        let t = CoeffTable::build(&trivial_form(100), 100).unwrap();
        let s = t.sign_counts(100.0, ZeroTolerance::default()).unwrap();
        assert_eq!((s.plus, s.minus, s.zero), (100, 0, 0));
        let s1 = t.sign_counts(1.0, ZeroTolerance::default()).unwrap();
        assert_eq!(s1.plus, 1);
        assert!(t.sign_counts(101.0, ZeroTolerance::default()).is_err());

        let rt = CoeffTable::build(&gen_tempered(5, 10_000).unwrap(), 10_000).unwrap();
        let s = rt.sign_counts(10_000.0, ZeroTolerance::default()).unwrap();
        assert_eq!(s.plus + s.minus + s.zero, 10_000);
    }

    #[test]
    fn sign_counts_monotone_in_x() {
        let t = CoeffTable::build(&gen_tempered(2, 2_000).unwrap(), 2_000).unwrap();
        let mut prev = t.sign_counts(1.0, ZeroTolerance::default()).unwrap();
        for x in [10.0, 250.5, 999.0, 2_000.0] {
            let s = t.sign_counts(x, ZeroTolerance::default()).unwrap();
            assert!(s.plus >= prev.plus && s.minus >= prev.minus && s.zero >= prev.zero);
            prev = s;
        }
    }

    #[test]
    fn rp_scan_trivial_form_is_clean() {
        let t = CoeffTable::build(&trivial_form(2_000), 2_000).unwrap();
        assert!(t.rp_violations(1e-6).is_empty());
    }

    #[test]
    fn rp_scan_flags_sk_forms() {
        // Small angles at p >= 5 push a(p) = sqrt(p) + 1/sqrt(p) + 2cos(theta)
        // above d4(p) = 4.
        let angles: Vec<f64> = primes_for_angles(100).iter().map(|_| 0.3f64).collect();
        let form = gen_sk(SkSource::Angles(angles), 100).unwrap();
        let t = CoeffTable::build(&form, 100).unwrap();
        let bad = t.rp_violations(1e-6);
        assert!(!bad.is_empty());
        assert!(bad.contains(&5));
    }

    fn primes_for_angles(pb: u64) -> Vec<u64> {
        crate::primes::primes_upto(pb)
    }

    #[test]
    fn sk_lambda_positive_smoke() {
        let form = gen_sk(SkSource::Seed(1), 10_000).unwrap();
        let t = CoeffTable::build(&form, 10_000).unwrap();
        for n in 1..=10_000u64 {
            assert!(t.lam(n) > 0.0, "lambda({n}) = {}", t.lam(n));
        }
    }

    #[test]
    fn d4_partial_sum_approaches_zeta2_fourth() {
        let z24 = 7.321397388943344; // zeta(2)^4
        let t1 = CoeffTable::build(&trivial_form(1_000), 1_000).unwrap();
        let t2 = CoeffTable::build(&trivial_form(10_000), 10_000).unwrap();
        let (s1, s2) = (t1.d4_zeta2_partial(), t2.d4_zeta2_partial());
        assert!(s1 < s2 && s2 < z24);
        assert!(z24 - s2 < 0.05);
    }

    #[test]
    fn segmented_prefix_matches_dense() {
        let form = gen_tempered(21, 20_000).unwrap();
        let t = CoeffTable::build(&form, 20_000).unwrap();
        let cps = vec![1u64, 2, 97, 4_096, 9_999, 20_000];
        let got = segmented_prefix(&form, 20_000, &cps, 4_096).unwrap();
        for (i, &cp) in cps.iter().enumerate() {
            let want = t.prefix_slice()[cp as usize];
            assert!(
                (got[i] - want).abs() <= 1e-9 * want.abs().max(1.0),
                "checkpoint {cp}: {} vs {}",
                got[i],
                want
            );
        }
    }
}
