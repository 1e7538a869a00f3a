//! Exact-rational coefficient expansion for local factors with rational
//! `(e1, e2)`.
//!
//! Real eigenform data is irrational and lives in `f64`; this path exists so
//! unit-test forms (the all-`(4, 6)` model, `1 + t^4`, and friends) have an
//! arithmetic oracle with no rounding at all.

use num_bigint::BigInt;
use num_rational::BigRational;

fn big(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Rational power-series inverse of `1 - e1 t + e2 t^2 - e1 t^3 + t^4`,
/// same recurrence as [`crate::local::LocalFactor::coeffs`].
pub fn coeffs(e1: &BigRational, e2: &BigRational, j_max: usize) -> Vec<BigRational> {
    let mut c = Vec::with_capacity(j_max + 1);
    c.push(big(1));
    for j in 1..=j_max {
        let mut v = e1 * &c[j - 1];
        if j >= 2 {
            v -= e2 * &c[j - 2];
        }
        if j >= 3 {
            v += e1 * &c[j - 3];
        }
        if j >= 4 {
            v -= c[j - 4].clone();
        }
        c.push(v);
    }
    c
}

/// Rational eigenvalue expansion, `lambda(p^j) = a(p^j) - a(p^{j-2})/p`.
pub fn lambda(p: u64, e1: &BigRational, e2: &BigRational, j_max: usize) -> Vec<BigRational> {
    let a = coeffs(e1, e2, j_max);
    let inv_p = big(1) / big(p as i64);
    (0..=j_max)
        .map(|j| {
            if j >= 2 {
                &a[j] - &a[j - 2] * &inv_p
            } else {
                a[j].clone()
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::local::LocalFactor;
    use num_traits::ToPrimitive;

    #[test]
    fn rational_matches_float_path() {
        for (p, e1n, e2n) in [(2i64, 4i64, 6i64), (5, 0, 0), (3, 1, 1), (7, -2, 3)] {
            let (re1, re2) = (big(e1n), big(e2n));
            let exact_c = coeffs(&re1, &re2, 20);
            let exact_l = lambda(p as u64, &re1, &re2, 20);
            let f = LocalFactor::new(p as u64, e1n as f64, e2n as f64);
            let float_c = f.coeffs(20);
            let float_l = f.lambda(20);
            for j in 0..=20 {
                let ec = exact_c[j].to_f64().unwrap();
                let el = exact_l[j].to_f64().unwrap();
                assert!((float_c[j] - ec).abs() <= 1e-12 * ec.abs().max(1.0));
                assert!((float_l[j] - el).abs() <= 1e-12 * el.abs().max(1.0));
            }
        }
    }

    #[test]
    fn trivial_form_is_exactly_binomial() {
        let c = coeffs(&big(4), &big(6), 10);
        for (j, v) in c.iter().enumerate() {
            let b = ((j + 1) * (j + 2) * (j + 3) / 6) as i64;
            assert_eq!(v, &big(b));
        }
    }
}
