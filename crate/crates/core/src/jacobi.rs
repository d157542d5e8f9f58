//! Truncated Fourier expansions of Jacobi forms.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::ntheory::{self, big_rat, cohen_h_many, gcd3, ipow, isqrt, NtError, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum JacobiError {
    #[error("weight must be even and at least 4, got {0}")]
    Weight(i64),
    #[error("index must be nonnegative, got {0}")]
    Index(i64),
    #[error("raising factor must be positive, got {0}")]
    Factor(i64),
    #[error("coefficient ({n}, {r}) lies outside the truncation n <= {n_max}")]
    OutOfBox { n: i64, r: i64, n_max: i64 },
    #[error("expansions are incompatible: {0}")]
    Mismatch(String),
    #[error(transparent)]
    Nt(#[from] NtError),
}

/// `sum c(n, r) q^n zeta^r` for `0 <= n <= n_max`, of weight `k` and index `M`.
///
/// Only nonzero coefficients are stored. Every `(n, r)` with `n <= n_max` is
/// known: absent entries are zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JacobiExpansion {
    weight: i64,
    index: i64,
    n_max: i64,
    coeffs: BTreeMap<(i64, i64), Rational>,
}

impl JacobiExpansion {
    pub fn zero(weight: i64, index: i64, n_max: i64) -> Result<Self, JacobiError> {
        if index < 0 {
            return Err(JacobiError::Index(index));
        }
        Ok(Self { weight, index, n_max: n_max.max(0), coeffs: BTreeMap::new() })
    }

    /// Builds an expansion from raw coefficients. Entries outside `0 <= n <=
    /// n_max` are rejected; the remaining invariants are left to
    /// [`validate_jacobi`].
    pub fn from_coeffs<I>(weight: i64, index: i64, n_max: i64, coeffs: I) -> Result<Self, JacobiError>
    where
        I: IntoIterator<Item = ((i64, i64), Rational)>,
    {
        let mut out = Self::zero(weight, index, n_max)?;
        for ((n, r), c) in coeffs {
            if n < 0 || n > out.n_max {
                return Err(JacobiError::OutOfBox { n, r, n_max: out.n_max });
            }
            out.set(n, r, c);
        }
        Ok(out)
    }

    pub fn weight(&self) -> i64 {
        self.weight
    }

    pub fn index(&self) -> i64 {
        self.index
    }

    pub fn n_max(&self) -> i64 {
        self.n_max
    }

    pub(crate) fn set(&mut self, n: i64, r: i64, c: Rational) {
        if c.is_zero() {
            self.coeffs.remove(&(n, r));
        } else {
            self.coeffs.insert((n, r), c);
        }
    }

    pub fn coeff(&self, n: i64, r: i64) -> Rational {
        self.coeffs.get(&(n, r)).cloned().unwrap_or_else(Rational::zero)
    }

    /// `None` when `(n, r)` is beyond the truncation; indices outside the cone
    /// `4nM - r^2 >= 0` are known zeros.
    pub fn known(&self, n: i64, r: i64) -> Option<Rational> {
        if n < 0 || 4 * n * self.index - r * r < 0 {
            return Some(Rational::zero());
        }
        if n > self.n_max {
            return None;
        }
        Some(self.coeff(n, r))
    }

    /// Like [`known`](Self::known), but reads `c(n, r)` at the representative
    /// of `r mod 2M` in `(-M, M]` with the same discriminant. Only meaningful
    /// for expansions that pass [`validate_jacobi`].
    pub fn reduced_known(&self, n: i64, r: i64) -> Option<Rational> {
        let m = self.index;
        let d = 4 * n * m - r * r;
        if n < 0 || d < 0 {
            return Some(Rational::zero());
        }
        if m == 0 {
            return self.known(n, r);
        }
        let mut r0 = r.rem_euclid(2 * m);
        if r0 > m {
            r0 -= 2 * m;
        }
        self.known((d + r0 * r0) / (4 * m), r0)
    }

    /// Nonzero coefficients in `(n, r)` order.
    pub fn iter(&self) -> impl Iterator<Item = (&(i64, i64), &Rational)> {
        self.coeffs.iter()
    }

    /// All `(n, r)` in the truncation with `4nM - r^2 >= 0`.
    pub fn indices(&self) -> Vec<(i64, i64)> {
        let mut out = Vec::new();
        for n in 0..=self.n_max {
            let bound = isqrt(4 * n * self.index);
            for r in -bound..=bound {
                out.push((n, r));
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn scale(&self, s: &Rational) -> Self {
        let mut out = Self { coeffs: BTreeMap::new(), ..self.clone() };
        for (&(n, r), c) in &self.coeffs {
            out.set(n, r, c * s);
        }
        out
    }

    pub fn truncate(&self, n_max: i64) -> Self {
        let n_max = n_max.min(self.n_max);
        Self {
            weight: self.weight,
            index: self.index,
            n_max,
            coeffs: self.coeffs.iter().filter(|(k, _)| k.0 <= n_max).map(|(k, v)| (*k, v.clone())).collect(),
        }
    }

    /// `self + s * other` on the common truncation.
    pub fn add_scaled(&self, other: &Self, s: &Rational) -> Result<Self, JacobiError> {
        if self.index != other.index || self.weight != other.weight {
            return Err(JacobiError::Mismatch(format!(
                "(k={}, M={}) vs (k={}, M={})",
                self.weight, self.index, other.weight, other.index
            )));
        }
        let mut out = self.truncate(other.n_max);
        for (&(n, r), c) in &other.coeffs {
            if n <= out.n_max {
                let v = out.coeff(n, r) + c * s;
                out.set(n, r, v);
            }
        }
        Ok(out)
    }

    /// Product with an elliptic modular form given by its q-expansion; the
    /// weights add and the index is unchanged.
    pub fn mul_elliptic(&self, series: &[Rational], series_weight: i64) -> Self {
        let n_max = self.n_max.min(series.len() as i64 - 1);
        let mut out = Self {
            weight: self.weight + series_weight,
            index: self.index,
            n_max,
            coeffs: BTreeMap::new(),
        };
        let mut acc: BTreeMap<(i64, i64), Rational> = BTreeMap::new();
        for (&(n, r), c) in &self.coeffs {
            for j in 0..=(n_max - n) {
                let a = &series[j as usize];
                if a.is_zero() {
                    continue;
                }
                *acc.entry((n + j, r)).or_insert_with(Rational::zero) += c * a;
            }
        }
        for ((n, r), c) in acc {
            out.set(n, r, c);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum JacobiViolation {
    /// A nonzero coefficient with `4nM - r^2 < 0`.
    OutsideCone { n: i64, r: i64 },
    /// `c(n, r) != (-1)^k c(n, -r)`.
    Asymmetric { n: i64, r: i64 },
    /// `c(n, r)` differs from the coefficient with the same discriminant and
    /// the reduced representative of `r mod 2M`.
    NotPeriodic { n: i64, r: i64, n0: i64, r0: i64 },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct JacobiReport {
    pub checked: usize,
    pub violations: Vec<JacobiViolation>,
}

impl JacobiReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the coefficient constraints of a Jacobi form on the stored box.
pub fn validate_jacobi(phi: &JacobiExpansion) -> JacobiReport {
    let mut report = JacobiReport::default();
    let m = phi.index;
    let sign = if phi.weight % 2 == 0 { Rational::one() } else { -Rational::one() };
    for (&(n, r), _) in phi.iter() {
        if 4 * n * m - r * r < 0 {
            report.violations.push(JacobiViolation::OutsideCone { n, r });
        }
    }
    for (n, r) in phi.indices() {
        report.checked += 1;
        let c = phi.coeff(n, r);
        if r > 0 && c != &sign * phi.coeff(n, -r) {
            report.violations.push(JacobiViolation::Asymmetric { n, r });
        }
        if m == 0 {
            continue;
        }
        let mut r0 = r.rem_euclid(2 * m);
        if r0 > m {
            r0 -= 2 * m;
        }
        let d = 4 * n * m - r * r;
        let n0 = (d + r0 * r0) / (4 * m);
        if (n0, r0) != (n, r) && c != phi.coeff(n0, r0) {
            report.violations.push(JacobiViolation::NotPeriodic { n, r, n0, r0 });
        }
    }
    report
}

/// The Jacobi Eisenstein series of index 1,
/// `c(n, r) = H(k-1, 4n - r^2) / H(k-1, 0)`.
pub fn jacobi_eisenstein_index1(k: i64, n_max: i64) -> Result<JacobiExpansion, JacobiError> {
    if k < 4 || k % 2 != 0 {
        return Err(JacobiError::Weight(k));
    }
    let mut out = JacobiExpansion::zero(k, 1, n_max)?;
    let discs: BTreeSet<u64> = out.indices().into_iter().map(|(n, r)| (4 * n - r * r) as u64).collect();
    let discs: Vec<u64> = discs.into_iter().chain(std::iter::once(0)).collect();
    let h = cohen_h_many((k - 1) as u32, &discs)?;
    let h0 = h[&0].clone();
    for (n, r) in out.indices() {
        let c = &h[&((4 * n - r * r) as u64)] / &h0;
        out.set(n, r, c);
    }
    Ok(out)
}

/// The index-raising operator of level `l`:
/// `c'(n, r) = sum_{d | gcd(n, r, l)} d^(k-1) c(nl/d^2, r/d)`.
///
/// The output truncation is `n_max / l`, so every emitted coefficient only
/// uses input data inside the input box.
pub fn index_raise(phi: &JacobiExpansion, l: i64) -> Result<JacobiExpansion, JacobiError> {
    if l <= 0 {
        return Err(JacobiError::Factor(l));
    }
    let mut out = JacobiExpansion::zero(phi.weight, phi.index * l, phi.n_max / l)?;
    let k = phi.weight;
    for (n, r) in out.indices() {
        let g = gcd3(n, r, l);
        let mut acc = Rational::zero();
        for d in ntheory::divisors(g as u64) {
            let d = d as i64;
            let c = phi.coeff(n * l / (d * d), r / d);
            if !c.is_zero() {
                acc += big_rat(ipow(d, (k - 1) as u32)) * c;
            }
        }
        out.set(n, r, acc);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ntheory::{cohen_h, divisor_sigma, frac, rat};

    #[test]
    fn zero_expansion_is_valid() {
        let z = JacobiExpansion::zero(4, 3, 5).unwrap();
        assert!(validate_jacobi(&z).passed());
    }

    #[test]
    fn eisenstein_index1_values() {
        let e = jacobi_eisenstein_index1(4, 5).unwrap();
        assert_eq!(e.coeff(0, 0), rat(1));
        assert_eq!(e.coeff(1, 0), cohen_h(3, 4).unwrap() / cohen_h(3, 0).unwrap());
        assert_eq!(e.coeff(1, 0), rat(126));
        assert_eq!(e.coeff(1, 1), rat(56));
        assert_eq!(e.coeff(1, 2), rat(1));
        assert_eq!(e.coeff(1, 3), rat(0));
        assert_eq!(e.known(1, 3), Some(rat(0)));
        assert_eq!(e.known(6, 0), None);
        assert!(validate_jacobi(&e).passed());
        assert!(jacobi_eisenstein_index1(5, 3).is_err());
    }

    #[test]
    fn eisenstein_index1_passes_validation() {
        for k in [4, 6, 8, 10] {
            let e = jacobi_eisenstein_index1(k, 8).unwrap();
            let report = validate_jacobi(&e);
            assert!(report.passed(), "k={k}: {:?}", report.violations);
        }
    }

    #[test]
    fn asymmetry_is_reported() {
        let mut e = jacobi_eisenstein_index1(4, 3).unwrap();
        e.set(1, 1, rat(57));
        let report = validate_jacobi(&e);
        assert!(report.violations.contains(&JacobiViolation::Asymmetric { n: 1, r: 1 }));
    }

    #[test]
    fn coefficient_outside_cone_is_reported() {
        let phi = JacobiExpansion::from_coeffs(4, 1, 2, [((1, 3), rat(1)), ((1, -3), rat(1))]).unwrap();
        let report = validate_jacobi(&phi);
        assert!(report.violations.contains(&JacobiViolation::OutsideCone { n: 1, r: 3 }));
        assert!(JacobiExpansion::from_coeffs(4, 1, 2, [((3, 0), rat(1))]).is_err());
    }

    #[test]
    fn index_raise_examples() {
        let e = jacobi_eisenstein_index1(4, 12).unwrap();
        assert_eq!(index_raise(&e, 1).unwrap(), e);
        let e2 = index_raise(&e, 2).unwrap();
        assert_eq!(e2.index(), 2);
        assert_eq!(e2.n_max(), 6);
        assert_eq!(e2.coeff(0, 0), big_rat(divisor_sigma(3, 2).unwrap()));
        assert_eq!(e2.coeff(1, 1), e.coeff(2, 1));
        // (1, 2): gcd(1, 2, 2) = 1
        assert_eq!(e2.coeff(2, 2), e.coeff(4, 2) + rat(8) * e.coeff(1, 1));
        assert!(validate_jacobi(&e2).passed());
        assert!(index_raise(&e, 0).is_err());
    }

    #[test]
    fn index_raise_is_multiplicative_on_coprime_factors() {
        let e = jacobi_eisenstein_index1(6, 36).unwrap();
        for (l1, l2) in [(2, 3), (3, 2), (2, 5), (5, 3)] {
            let a = index_raise(&index_raise(&e, l1).unwrap(), l2).unwrap();
            let b = index_raise(&e, l1 * l2).unwrap();
            assert_eq!(a.truncate(b.n_max()), b.truncate(a.n_max()), "{l1} {l2}");
        }
    }

    #[test]
    fn elliptic_product() {
        let e = jacobi_eisenstein_index1(4, 4).unwrap();
        let e4 = ntheory::elliptic_eisenstein(4, 4).unwrap();
        let p = e.mul_elliptic(&e4, 4);
        assert_eq!(p.weight(), 8);
        assert_eq!(p.coeff(0, 0), rat(1));
        assert_eq!(p.coeff(1, 0), rat(126 + 240));
        assert!(validate_jacobi(&p).passed());
        let half = p.scale(&frac(1, 2));
        assert_eq!(half.coeff(0, 0), frac(1, 2));
    }

    #[test]
    fn reduced_lookup_extends_a_jacobi_form() {
        let small = index_raise(&jacobi_eisenstein_index1(4, 12).unwrap(), 3).unwrap();
        let large = index_raise(&jacobi_eisenstein_index1(4, 30).unwrap(), 3).unwrap();
        for (n, r) in large.indices() {
            if let Some(c) = small.reduced_known(n, r) {
                assert_eq!(c, large.coeff(n, r), "({n}, {r})");
            }
        }
        assert_eq!(small.reduced_known(9, 17), Some(large.coeff(9, 17)));
        assert_eq!(small.reduced_known(9, 0), None);
        assert_eq!(small.reduced_known(1, 9), Some(rat(0)));
    }
}
