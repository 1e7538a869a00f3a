//! Algebra of the local spin Euler factor.
//!
//! At each prime the degree-4 factor is the reciprocal of the quartic
//!
//! ```text
//! q(t) = 1 - e1*t + e2*t^2 - e1*t^3 + t^4,
//! ```
//!
//! palindromic because the four spin parameters multiply to 1. Two real
//! symmetric coefficients `(e1, e2)` therefore determine the factor
//! completely; the spin parameters themselves are recovered only for
//! validation (temperedness checks).

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::primes::primes_upto;

/// One local Euler factor in symmetric-coefficient form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalFactor {
    /// The prime this factor lives at.
    pub p: u64,
    /// First elementary symmetric function of the four spin parameters.
    pub e1: f64,
    /// Second elementary symmetric function.
    pub e2: f64,
}

/// The four spin parameters `beta_1..beta_4`, ordered so that
/// `beta_1*beta_4 = beta_2*beta_3 = 1`.
#[derive(Debug, Clone, Copy)]
pub struct SpinParameters {
    pub beta: [Complex64; 4],
}

impl LocalFactor {
    pub fn new(p: u64, e1: f64, e2: f64) -> Self {
        Self { p, e1, e2 }
    }

    /// Local factor with the prescribed first two normalised Hecke
    /// eigenvalues `lambda(p)` and `lambda(p^2)`.
    ///
    /// Inverting the first two steps of [`LocalFactor::lambda`] gives
    /// `e1 = lambda(p)` and `e2 = lambda(p)^2 - lambda(p^2) - 1/p`.
    pub fn from_hecke(p: u64, lam_p: f64, lam_p2: f64) -> Self {
        let e2 = lam_p * lam_p - lam_p2 - 1.0 / p as f64;
        Self { p, e1: lam_p, e2 }
    }

    /// Coefficients `a(p^0), ..., a(p^J)` of the power-series inverse of the
    /// quartic, via the four-term recurrence
    /// `c_j = e1*c_{j-1} - e2*c_{j-2} + e1*c_{j-3} - c_{j-4}` with `c_0 = 1`.
    pub fn coeffs(&self, j_max: usize) -> Vec<f64> {
        let mut c = Vec::with_capacity(j_max + 1);
        c.push(1.0);
        for j in 1..=j_max {
            let mut v = self.e1 * c[j - 1];
            if j >= 2 {
                v -= self.e2 * c[j - 2];
            }
            if j >= 3 {
                v += self.e1 * c[j - 3];
            }
            if j >= 4 {
                v -= c[j - 4];
            }
            c.push(v);
        }
        c
    }

    /// Eigenvalues `lambda(p^0), ..., lambda(p^J)`.
    ///
    /// The lambda series at `p` is `(1 - t^2/p)` times the coefficient
    /// series, so `lambda(p^j) = a(p^j) - a(p^{j-2})/p` with the second term
    /// absent for `j < 2`.
    pub fn lambda(&self, j_max: usize) -> Vec<f64> {
        let a = self.coeffs(j_max);
        let inv_p = 1.0 / self.p as f64;
        (0..=j_max)
            .map(|j| {
                if j >= 2 {
                    a[j] - a[j - 2] * inv_p
                } else {
                    a[j]
                }
            })
            .collect()
    }

    /// The four roots of `t^4 - e1*t^3 + e2*t^2 - e1*t + 1` (the spin
    /// parameters), recovered in closed form: the palindromic substitution
    /// `u = t + 1/t` reduces the quartic to `u^2 - e1*u + (e2 - 2) = 0`,
    /// and each `u` splits into a reciprocal pair via `t^2 - u*t + 1 = 0`.
    ///
    /// Each root is validated against the quartic; a residual above
    /// `1e-9 * (1 + |e1| + |e2|)` is reported as an error.
    pub fn roots(&self) -> Result<SpinParameters> {
        let e1 = Complex64::new(self.e1, 0.0);
        let e2 = Complex64::new(self.e2, 0.0);
        let disc = (e1 * e1 - 4.0 * (e2 - 2.0)).sqrt();
        let u1 = (e1 + disc) / 2.0;
        let u2 = (e1 - disc) / 2.0;
        let pair = |u: Complex64| {
            let d = (u * u - 4.0).sqrt();
            ((u + d) / 2.0, (u - d) / 2.0)
        };
        let (b1, b4) = pair(u1);
        let (b2, b3) = pair(u2);
        let beta = [b1, b2, b3, b4];

        let allowed = 1e-9 * (1.0 + self.e1.abs() + self.e2.abs());
        let residual = beta
            .iter()
            .map(|&b| self.quartic_residual(b))
            .fold(0.0f64, f64::max);
        if !(residual <= allowed) {
            return Err(Error::RootResidual {
                p: self.p,
                e1: self.e1,
                e2: self.e2,
                residual,
                allowed,
            });
        }
        Ok(SpinParameters { beta })
    }

    fn quartic_residual(&self, b: Complex64) -> f64 {
        // Horner on t^4 - e1 t^3 + e2 t^2 - e1 t + 1, normalised by the
        // largest monomial so big roots do not inflate the residual.
        let e1 = Complex64::new(self.e1, 0.0);
        let e2 = Complex64::new(self.e2, 0.0);
        let v = (((b - e1) * b + e2) * b - e1) * b + Complex64::new(1.0, 0.0);
        let scale = b.norm().powi(4).max(1.0);
        v.norm() / scale
    }

    /// True when every spin parameter sits on the unit circle to within
    /// `tol`.
    pub fn is_tempered(&self, tol: f64) -> Result<bool> {
        let roots = self.roots()?;
        Ok(roots.max_unit_deviation() <= tol)
    }
}

impl SpinParameters {
    /// Largest deviation of `|beta_i|` from 1.
    pub fn max_unit_deviation(&self) -> f64 {
        self.beta
            .iter()
            .map(|b| (b.norm() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Largest distance from any `1/beta_i` to the root multiset, checking
    /// closure under inversion.
    pub fn inversion_defect(&self) -> f64 {
        self.beta
            .iter()
            .map(|&b| {
                let inv = 1.0 / b;
                self.beta
                    .iter()
                    .map(|&c| (c - inv).norm())
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    }

    /// Largest distance from any conjugate `conj(beta_i)` to the multiset,
    /// checking that the factor has real coefficients.
    pub fn conjugation_defect(&self) -> f64 {
        self.beta
            .iter()
            .map(|&b| {
                let cj = b.conj();
                self.beta
                    .iter()
                    .map(|&c| (c - cj).norm())
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    }
}

/// Per-prime local data of one eigenform, plus the functional-equation
/// metadata consumed by the oscillating main term.
#[derive(Debug, Clone)]
pub struct EigenformData {
    /// Weight `k`.
    pub weight: u32,
    /// Sign of the functional equation, `(-1)^k`.
    pub fe_sign: i8,
    pub label: String,
    /// Local factor for every prime `<= prime_bound`.
    pub locals: BTreeMap<u64, LocalFactor>,
    /// Largest prime with data.
    pub prime_bound: u64,
}

impl EigenformData {
    /// Builds and validates: every prime up to `prime_bound` must carry
    /// exactly one local factor and the sign must match the parity of the
    /// weight.
    pub fn new(
        weight: u32,
        label: impl Into<String>,
        locals: BTreeMap<u64, LocalFactor>,
        prime_bound: u64,
    ) -> Result<Self> {
        // both sequences are sorted, so coverage is a single merge walk
        let expected: Vec<u64> = primes_upto(prime_bound);
        let mut keys = locals.keys().copied();
        let mut key = keys.next();
        for &p in &expected {
            match key {
                Some(k) if k == p => key = keys.next(),
                Some(k) if k < p => {
                    return Err(Error::Invalid(format!(
                        "local factor at {k} which is not a prime <= {prime_bound}"
                    )))
                }
                _ => {
                    return Err(Error::MissingPrime {
                        prime: p,
                        covered: prime_bound,
                    })
                }
            }
        }
        if let Some(k) = key {
            return Err(Error::Invalid(format!(
                "local factor at {k} which is not a prime <= {prime_bound}"
            )));
        }
        let fe_sign = if weight.is_multiple_of(2) { 1 } else { -1 };
        Ok(Self {
            weight,
            fe_sign,
            label: label.into(),
            locals,
            prime_bound,
        })
    }

    /// Local factor at `p`, or the missing-prime error.
    pub fn local(&self, p: u64) -> Result<&LocalFactor> {
        self.locals.get(&p).ok_or(Error::MissingPrime {
            prime: p,
            covered: self.prime_bound,
        })
    }

    /// Largest unit-circle deviation over all primes (temperedness measure).
    pub fn max_unit_deviation(&self) -> Result<f64> {
        let mut worst = 0.0f64;
        for lf in self.locals.values() {
            worst = worst.max(lf.roots()?.max_unit_deviation());
        }
        Ok(worst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TRIVIAL: LocalFactor = LocalFactor {
        p: 2,
        e1: 4.0,
        e2: 6.0,
    };

    fn binom3(j: usize) -> f64 {
        ((j + 1) * (j + 2) * (j + 3) / 6) as f64
    }

    #[test]
    fn coeffs_trivial_form_is_binomial_series() {
        // 1/q = (1-t)^{-4}
        assert_eq!(TRIVIAL.coeffs(4), vec![1.0, 4.0, 10.0, 20.0, 35.0]);
    }

    #[test]
    fn coeffs_of_one_plus_t4() {
        // q = 1 + t^4, long division gives 1 - t^4 + t^8 - ...
        let f = LocalFactor::new(2, 0.0, 0.0);
        assert_eq!(f.coeffs(4), vec![1.0, 0.0, 0.0, 0.0, -1.0]);
        assert_eq!(f.coeffs(8)[8], 1.0);
    }

    #[test]
    fn coeffs_of_cyclotomic_like_quartic() {
        // q = 1 - t + t^2 - t^3 + t^4 = (1+t^5)/(1+t), so
        // 1/q = (1+t)(1 - t^5 + t^10 - ...) = 1 + t - t^5 - t^6 + ...
        let f = LocalFactor::new(2, 1.0, 1.0);
        assert_eq!(f.coeffs(5), vec![1.0, 1.0, 0.0, 0.0, 0.0, -1.0]);
    }

    #[test]
    fn remultiplication_recovers_identity() {
        // Convolving the coefficients with (1, -e1, e2, -e1, 1) must give
        // (1, 0, 0, ...). Exercised on a few hand-picked factors.
        for (e1, e2) in [(4.0, 6.0), (0.0, 0.0), (1.0, 1.0), (-2.3, 1.7), (3.9, 5.2)] {
            let f = LocalFactor::new(5, e1, e2);
            let c = f.coeffs(24);
            let q = [1.0, -e1, e2, -e1, 1.0];
            for j in 1..=24usize {
                let conv: f64 = (0..5.min(j + 1)).map(|i| q[i] * c[j - i]).sum();
                let scale = c[j].abs().max(1.0);
                assert!(
                    conv.abs() / scale <= 1e-12,
                    "({e1},{e2}) j={j}: conv={conv:e}"
                );
            }
        }
    }

    #[test]
    fn lambda_of_trivial_form() {
        let lam = TRIVIAL.lambda(2);
        assert_eq!(lam, vec![1.0, 4.0, 10.0 - 0.5]);
    }

    #[test]
    fn lambda_of_one_plus_t4() {
        for p in [2u64, 5, 11] {
            let f = LocalFactor::new(p, 0.0, 0.0);
            assert_eq!(f.lambda(2), vec![1.0, 0.0, -1.0 / p as f64]);
        }
    }

    #[test]
    fn lambda_constant_term_is_one() {
        for (e1, e2) in [(4.0, 6.0), (0.3, -1.2), (0.0, 0.0)] {
            assert_eq!(LocalFactor::new(7, e1, e2).lambda(0), vec![1.0]);
        }
    }

    #[test]
    fn from_hecke_examples() {
        let f = LocalFactor::from_hecke(2, 4.0, 9.5);
        assert_eq!((f.e1, f.e2), (4.0, 6.0));
        let g = LocalFactor::from_hecke(5, 0.0, -0.2);
        assert!(g.e1 == 0.0 && g.e2.abs() < 1e-15, "g = {g:?}");
    }

    #[test]
    fn hecke_roundtrip_is_identity() {
        for (p, e1, e2) in [(2u64, 1.3, -0.7), (3, -2.2, 4.1), (97, 0.01, 2.5)] {
            let f = LocalFactor::new(p, e1, e2);
            let lam = f.lambda(2);
            let g = LocalFactor::from_hecke(p, lam[1], lam[2]);
            assert!((g.e1 - e1).abs() <= 1e-12 && (g.e2 - e2).abs() <= 1e-12);
        }
    }

    #[test]
    fn roots_of_trivial_form_are_all_one() {
        let roots = TRIVIAL.roots().unwrap();
        for b in roots.beta {
            assert!((b - Complex64::new(1.0, 0.0)).norm() < 1e-7);
        }
    }

    #[test]
    fn roots_of_one_plus_t4_are_eighth_roots_of_unity() {
        let roots = LocalFactor::new(2, 0.0, 0.0).roots().unwrap();
        for b in roots.beta {
            // t^4 = -1
            assert!((b.powu(4) + Complex64::new(1.0, 0.0)).norm() < 1e-12);
            assert!((b.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn roots_pairing_is_reciprocal() {
        let f = LocalFactor::new(3, 1.7, -0.4);
        let r = f.roots().unwrap();
        assert!((r.beta[0] * r.beta[3] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!((r.beta[1] * r.beta[2] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!(r.inversion_defect() < 1e-8);
        assert!(r.conjugation_defect() < 1e-8);
    }

    #[test]
    fn roots_reject_non_finite_input() {
        let err = LocalFactor::new(2, f64::NAN, 0.0).roots().unwrap_err();
        assert!(matches!(err, Error::RootResidual { .. }));
    }

    #[test]
    fn temperedness_examples() {
        assert!(TRIVIAL.is_tempered(1e-8).unwrap());
        assert!(LocalFactor::new(2, 0.0, 0.0).is_tempered(1e-8).unwrap());
        // Saito-Kurokawa shape at p=2, theta=pi/2: roots include sqrt(2).
        let sq2 = 2.0f64.sqrt();
        let sk = LocalFactor::new(2, sq2 + 1.0 / sq2, 2.0);
        assert!(!sk.is_tempered(0.1).unwrap());
    }

    #[test]
    fn tempered_coeffs_obey_divisor_bound() {
        // For unit-circle roots, |a(p^j)| <= binom(j+3, 3).
        for (a, b) in [(0.4, 2.1), (1.0, 1.0), (2.9, 0.3), (3.05, 2.62)] {
            let e1 = 2.0 * f64::cos(a) + 2.0 * f64::cos(b);
            let e2 = 2.0 + 4.0 * f64::cos(a) * f64::cos(b);
            let f = LocalFactor::new(2, e1, e2);
            assert!(f.is_tempered(1e-8).unwrap());
            for (j, c) in f.coeffs(40).iter().enumerate() {
                assert!(c.abs() <= binom3(j) + 1e-6, "j={j} c={c}");
            }
        }
    }

    #[test]
    fn eigenform_data_validates_coverage() {
        let mut locals = BTreeMap::new();
        for p in [2u64, 3, 5] {
            locals.insert(p, LocalFactor::new(p, 4.0, 6.0));
        }
        let f = EigenformData::new(20, "t", locals.clone(), 5).unwrap();
        assert_eq!(f.fe_sign, 1);
        assert_eq!(
            EigenformData::new(21, "t", locals.clone(), 5)
                .unwrap()
                .fe_sign,
            -1
        );
        locals.remove(&3);
        let err = EigenformData::new(20, "t", locals, 5).unwrap_err();
        assert!(matches!(err, Error::MissingPrime { prime: 3, .. }));
    }
}
