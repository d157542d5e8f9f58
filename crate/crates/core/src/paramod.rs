//! Truncated Fourier expansions of paramodular forms of degree 2.
//!
//! A coefficient is addressed by the integer triple `(n, r, m)` standing for
//! `T = [[n, r/2], [r/2, mN]]`; the level `N` lives on the expansion. Only
//! nonzero coefficients are stored, and everything inside the recorded box is
//! known.
//!
//! The Fricke index map is computed directly from `T[V_d^{-1}]`. A closed 3x3
//! form of it, valid under the convention `beta = delta = 1` (so
//! `alpha d - gamma N/d = 1`), is kept in the tests as a cross-check; it does
//! not reduce to the identity for `V_1 = I`. The symmetry `f | W_N = f` of
//! Maass forms is the statement `alpha(n, r, m) = alpha(m, r, n)` at level `N`.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::jacobi::JacobiExpansion;
use crate::matrix::{
    is_integral, is_symplectic, mat2, mat2_inverse, mat2_mul, mat2_scale, mat2_transpose, mat4_blocks, Mat2, Mat4,
};
use crate::ntheory::{self, frac, isqrt, rat, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParamodError {
    #[error("level must be a squarefree positive integer, got {0}")]
    Level(i64),
    #[error("{d} does not divide the level {level}")]
    Divisor { level: i64, d: i64 },
    #[error("index {0} lies outside the expansion box or the cone 4nmN >= r^2")]
    OutOfBox(FourierIndex),
    #[error("Fourier-Jacobi index m = {m} exceeds m_max = {m_max}")]
    SliceOutOfBox { m: i64, m_max: i64 },
    #[error("expansions are incompatible: {0}")]
    Mismatch(String),
    #[error("no index of the requested box is determined by the input")]
    EmptyBox,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct FourierIndex {
    pub n: i64,
    pub r: i64,
    pub m: i64,
}

impl FourierIndex {
    pub const fn new(n: i64, r: i64, m: i64) -> Self {
        Self { n, r, m }
    }

    /// `4 n m N - r^2`.
    pub fn discriminant(&self, level: i64) -> i64 {
        4 * self.n * self.m * level - self.r * self.r
    }

    pub fn is_semidefinite(&self, level: i64) -> bool {
        self.n >= 0 && self.m >= 0 && self.discriminant(level) >= 0
    }

    pub fn content(&self) -> i64 {
        ntheory::gcd3(self.n, self.r, self.m)
    }

    pub fn is_zero(&self) -> bool {
        self.n == 0 && self.r == 0 && self.m == 0
    }
}

/// Ordered by `(m, n, r)`, the serialization order.
impl Ord for FourierIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.m, self.n, self.r).cmp(&(other.m, other.n, other.r))
    }
}

impl PartialOrd for FourierIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl std::fmt::Display for FourierIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {}, {})", self.n, self.r, self.m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct ExpansionBox {
    pub n_max: i64,
    pub m_max: i64,
}

impl ExpansionBox {
    pub const fn new(n_max: i64, m_max: i64) -> Self {
        Self { n_max, m_max }
    }

    pub fn contains(&self, t: FourierIndex, level: i64) -> bool {
        t.n <= self.n_max && t.m <= self.m_max && t.is_semidefinite(level)
    }

    /// Every semidefinite index of the box, in `(m, n, r)` order.
    pub fn indices(&self, level: i64) -> Vec<FourierIndex> {
        let mut out = Vec::new();
        for m in 0..=self.m_max {
            for n in 0..=self.n_max {
                let bound = isqrt(4 * n * m * level);
                for r in -bound..=bound {
                    out.push(FourierIndex::new(n, r, m));
                }
            }
        }
        out
    }

    pub fn cardinality(&self, level: i64) -> usize {
        if self.n_max < 0 || self.m_max < 0 {
            return 0;
        }
        let mut count = 0;
        for m in 0..=self.m_max {
            for n in 0..=self.n_max {
                count += 2 * isqrt(4 * n * m * level) as usize + 1;
            }
        }
        count
    }

    pub fn intersect(&self, other: &Self) -> Self {
        Self::new(self.n_max.min(other.n_max), self.m_max.min(other.m_max))
    }
}

/// Finds the largest box all of whose indices satisfy `determined`.
///
/// Boxes are compared by `min(n_max, m_max)`, then by the number of indices,
/// then by `m_max`. The search stays within `caps`.
pub fn largest_box<F>(level: i64, caps: ExpansionBox, determined: F) -> Option<ExpansionBox>
where
    F: Fn(FourierIndex) -> bool,
{
    let mut row_bounds: Vec<i64> = Vec::new();
    for m in 0..=caps.m_max {
        let mut best = -1;
        'rows: for n in 0..=caps.n_max {
            let bound = isqrt(4 * n * m * level);
            for r in -bound..=bound {
                if !determined(FourierIndex::new(n, r, m)) {
                    break 'rows;
                }
            }
            best = n;
        }
        if best < 0 {
            break;
        }
        row_bounds.push(best);
    }
    let mut choice: Option<(ExpansionBox, (i64, usize, i64))> = None;
    let mut running = i64::MAX;
    for (b, &row) in row_bounds.iter().enumerate() {
        running = running.min(row);
        let candidate = ExpansionBox::new(running, b as i64);
        let key = (running.min(b as i64), candidate.cardinality(level), b as i64);
        if choice.as_ref().is_none_or(|(_, best)| key > *best) {
            choice = Some((candidate, key));
        }
    }
    choice.map(|(b, _)| b)
}

pub fn validate_level(level: i64) -> Result<(), ParamodError> {
    if level >= 1 && ntheory::is_squarefree(level as u64) {
        Ok(())
    } else {
        Err(ParamodError::Level(level))
    }
}

/// `sum alpha(T) e(trace(TZ))` truncated to a box.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamodularExpansion {
    weight: i64,
    level: i64,
    bx: ExpansionBox,
    coeffs: BTreeMap<FourierIndex, Rational>,
}

impl ParamodularExpansion {
    pub fn zero(weight: i64, level: i64, bx: ExpansionBox) -> Result<Self, ParamodError> {
        validate_level(level)?;
        let bx = ExpansionBox::new(bx.n_max.max(0), bx.m_max.max(0));
        Ok(Self { weight, level, bx, coeffs: BTreeMap::new() })
    }

    /// Rejects any index outside the box or the semidefinite cone.
    pub fn from_coeffs<I>(weight: i64, level: i64, bx: ExpansionBox, coeffs: I) -> Result<Self, ParamodError>
    where
        I: IntoIterator<Item = (FourierIndex, Rational)>,
    {
        let mut out = Self::zero(weight, level, bx)?;
        for (t, c) in coeffs {
            if !out.bx.contains(t, level) {
                return Err(ParamodError::OutOfBox(t));
            }
            out.set(t, c);
        }
        Ok(out)
    }

    pub fn weight(&self) -> i64 {
        self.weight
    }

    pub fn level(&self) -> i64 {
        self.level
    }

    pub fn expansion_box(&self) -> ExpansionBox {
        self.bx
    }

    pub(crate) fn set(&mut self, t: FourierIndex, c: Rational) {
        debug_assert!(self.bx.contains(t, self.level), "{t} outside {:?}", self.bx);
        if c.is_zero() {
            self.coeffs.remove(&t);
        } else {
            self.coeffs.insert(t, c);
        }
    }

    pub fn coeff(&self, t: FourierIndex) -> Rational {
        self.coeffs.get(&t).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coeff_ref(&self, t: &FourierIndex) -> Option<&Rational> {
        self.coeffs.get(t)
    }

    /// Known value at an integral index: non-semidefinite indices are zero,
    /// indices beyond the box are unknown.
    pub fn known(&self, n: i64, r: i64, m: i64) -> Option<Rational> {
        let t = FourierIndex::new(n, r, m);
        if !t.is_semidefinite(self.level) {
            return Some(Rational::zero());
        }
        if n > self.bx.n_max || m > self.bx.m_max {
            return None;
        }
        Some(self.coeff(t))
    }

    /// Like [`known`](Self::known) for rational arguments; a non-integral
    /// argument gives a zero coefficient.
    pub fn known_frac(&self, n: &Rational, r: &Rational, m: &Rational) -> Option<Rational> {
        if !(is_integral(n) && is_integral(r) && is_integral(m)) {
            return Some(Rational::zero());
        }
        let to = |x: &Rational| ntheory::to_i64(x.numer()).expect("index fits in i64");
        self.known(to(n), to(r), to(m))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&FourierIndex, &Rational)> {
        self.coeffs.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn restrict(&self, bx: ExpansionBox) -> Self {
        let bx = self.bx.intersect(&bx);
        Self {
            weight: self.weight,
            level: self.level,
            bx,
            coeffs: self.coeffs.iter().filter(|(t, _)| bx.contains(**t, self.level)).map(|(t, c)| (*t, c.clone())).collect(),
        }
    }

    pub fn scale(&self, s: &Rational) -> Self {
        let mut out = Self { coeffs: BTreeMap::new(), ..self.clone() };
        for (t, c) in &self.coeffs {
            out.set(*t, c * s);
        }
        out
    }

    /// `self + s * other` on the common box.
    pub fn add_scaled(&self, other: &Self, s: &Rational) -> Result<Self, ParamodError> {
        if self.level != other.level || self.weight != other.weight {
            return Err(ParamodError::Mismatch(format!(
                "(k={}, N={}) vs (k={}, N={})",
                self.weight, self.level, other.weight, other.level
            )));
        }
        let mut out = self.restrict(other.bx);
        for (t, c) in &other.coeffs {
            if out.bx.contains(*t, out.level) {
                let v = out.coeff(*t) + c * s;
                out.set(*t, v);
            }
        }
        Ok(out)
    }

    /// First index (in `(m, n, r)` order) where the two expansions differ on
    /// the common box.
    pub fn first_difference(&self, other: &Self) -> Option<FourierIndex> {
        let bx = self.bx.intersect(&other.bx);
        bx.indices(self.level).into_iter().find(|t| self.coeff(*t) != other.coeff(*t))
    }

    /// Every stored coefficient is even in `r`.
    pub fn is_r_symmetric(&self) -> bool {
        self.coeffs.iter().all(|(t, c)| &self.coeff(FourierIndex::new(t.n, -t.r, t.m)) == c)
    }
}

/// Anything that can report Fourier coefficients of a paramodular-type
/// expansion: `None` marks an index whose coefficient is not determined.
pub trait CoefficientSource: Sync {
    fn weight(&self) -> i64;
    fn level(&self) -> i64;
    fn coeff_at(&self, t: FourierIndex) -> Option<Rational>;
    /// Upper bound for output boxes derived from this source.
    fn caps(&self) -> ExpansionBox;
}

impl CoefficientSource for ParamodularExpansion {
    fn weight(&self) -> i64 {
        self.weight
    }

    fn level(&self) -> i64 {
        self.level
    }

    fn coeff_at(&self, t: FourierIndex) -> Option<Rational> {
        self.known(t.n, t.r, t.m)
    }

    fn caps(&self) -> ExpansionBox {
        self.bx
    }
}

/// `phi(tau, z) e(mN tau')` viewed as a function on degree-2 space: its
/// coefficients vanish off the row `m`.
#[derive(Debug, Clone)]
pub struct JacobiSlice {
    phi: JacobiExpansion,
    level: i64,
    m: i64,
    periodic: bool,
}

impl JacobiSlice {
    /// Coefficients beyond `phi.n_max()` are unknown.
    pub fn new(phi: JacobiExpansion, level: i64, m: i64) -> Result<Self, ParamodError> {
        validate_level(level)?;
        if m < 1 || phi.index() != m * level {
            return Err(ParamodError::Mismatch(format!("index {} is not {m} * {level}", phi.index())));
        }
        Ok(Self { phi, level, m, periodic: false })
    }

    /// Also reads coefficients beyond the truncation through the
    /// periodicity of a Jacobi form; `phi` must pass validation.
    pub fn periodic(phi: JacobiExpansion, level: i64, m: i64) -> Result<Self, ParamodError> {
        let report = crate::jacobi::validate_jacobi(&phi);
        if !report.passed() {
            return Err(ParamodError::Mismatch(format!("not a Jacobi form: {:?}", report.violations[0])));
        }
        Ok(Self { periodic: true, ..Self::new(phi, level, m)? })
    }

    pub fn jacobi(&self) -> &JacobiExpansion {
        &self.phi
    }

    pub fn row(&self) -> i64 {
        self.m
    }
}

impl CoefficientSource for JacobiSlice {
    fn weight(&self) -> i64 {
        self.phi.weight()
    }

    fn level(&self) -> i64 {
        self.level
    }

    fn coeff_at(&self, t: FourierIndex) -> Option<Rational> {
        if t.m != self.m {
            return Some(Rational::zero());
        }
        if self.periodic {
            self.phi.reduced_known(t.n, t.r)
        } else {
            self.phi.known(t.n, t.r)
        }
    }

    fn caps(&self) -> ExpansionBox {
        ExpansionBox::new(self.phi.n_max(), self.m)
    }
}

/// The `m`-th Fourier-Jacobi coefficient, a Jacobi expansion of index `mN`.
/// For `m = 0` this is the degenerate index-0 expansion carrying only `r = 0`.
pub fn fj_slice(f: &ParamodularExpansion, m: i64) -> Result<JacobiExpansion, ParamodError> {
    if m < 0 || m > f.bx.m_max {
        return Err(ParamodError::SliceOutOfBox { m, m_max: f.bx.m_max });
    }
    let coeffs = f.iter().filter(|(t, _)| t.m == m).map(|(t, c)| ((t.n, t.r), c.clone()));
    Ok(JacobiExpansion::from_coeffs(f.weight, m * f.level, f.bx.n_max, coeffs).expect("slice stays in its box"))
}

/// `V_d = (1/sqrt d) [[alpha d, beta N], [gamma, delta d]]` with
/// `alpha delta d - beta gamma N/d = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FrickeMatrix {
    pub level: i64,
    pub d: i64,
    pub alpha: i64,
    pub beta: i64,
    pub gamma: i64,
    pub delta: i64,
}

impl FrickeMatrix {
    pub fn determinant_holds(&self) -> bool {
        let e = self.level / self.d;
        self.alpha * self.delta * self.d - self.beta * self.gamma * e == 1
    }

    /// `sqrt(d) V_d` as an integer matrix.
    pub fn scaled_matrix(&self) -> Mat2 {
        mat2([[self.alpha * self.d, self.beta * self.level], [self.gamma, self.delta * self.d]])
    }

    /// `F_d^2 = diag(V_d^{-2}, (V_d^tr)^2)`, which is rational.
    pub fn fricke_square(&self) -> Mat4 {
        let w = self.scaled_matrix();
        let inv_d = frac(1, self.d);
        let v2 = mat2_scale(&mat2_mul(&w, &w), &inv_d);
        let v2_inv = mat2_inverse(&v2).expect("V_d is invertible");
        let vt2 = mat2_transpose(&v2);
        mat4_blocks(&v2_inv, &mat2([[0, 0], [0, 0]]), &mat2([[0, 0], [0, 0]]), &vt2)
    }
}

/// Canonical `V_d`: identity for `d = 1`, `[[0, N], [-1, 0]]` for `d = N`, and
/// otherwise `beta = delta = 1` with the smallest nonnegative `alpha` solving
/// `alpha d = 1 mod N/d`.
pub fn fricke_matrix(level: i64, d: i64) -> Result<FrickeMatrix, ParamodError> {
    validate_level(level)?;
    if d <= 0 || level % d != 0 {
        return Err(ParamodError::Divisor { level, d });
    }
    let v = if d == 1 {
        FrickeMatrix { level, d, alpha: 1, beta: 0, gamma: 0, delta: 1 }
    } else if d == level {
        FrickeMatrix { level, d, alpha: 0, beta: 1, gamma: -1, delta: 0 }
    } else {
        let e = level / d;
        let alpha = (0..e).find(|a| (a * d).rem_euclid(e) == 1).expect("d and N/d are coprime");
        FrickeMatrix { level, d, alpha, beta: 1, gamma: (alpha * d - 1) / e, delta: 1 }
    };
    debug_assert!(v.determinant_holds());
    Ok(v)
}

/// `T[V_d^{-1}]` in index coordinates. With `U = sqrt(d) V_d^{-1}`,
/// `T[V_d^{-1}] = U^tr T U / d`, which expands to integral formulas because
/// `d | N`.
pub fn fricke_index_map(t: FourierIndex, v: &FrickeMatrix) -> FourierIndex {
    let FrickeMatrix { level: nn, d, alpha: a, beta: b, gamma: g, delta: dl } = *v;
    let e = nn / d;
    let FourierIndex { n, r, m } = t;
    FourierIndex {
        n: n * dl * dl * d - r * g * dl + m * g * g * e,
        r: -2 * n * b * dl * nn + r * (a * dl * d + b * g * e) - 2 * m * nn * a * g,
        m: n * b * b * e - r * a * b + m * a * a * d,
    }
}

/// Box of input indices needed to evaluate `f | F_d^{-1}` on `out`.
pub fn fricke_source_box(level: i64, v: &FrickeMatrix, out: ExpansionBox) -> ExpansionBox {
    let mut need = ExpansionBox::new(0, 0);
    for t in out.indices(level) {
        let s = fricke_index_map(t, v);
        need.n_max = need.n_max.max(s.n);
        need.m_max = need.m_max.max(s.m);
    }
    need
}

/// `f | F_d^{-1}(Z) = f(Z[V_d^tr])`: the coefficient at `T` is the input
/// coefficient at `T[V_d^{-1}]`. The output box is the largest one whose
/// images all fall inside the input box.
pub fn apply_fricke(f: &ParamodularExpansion, d: i64) -> Result<ParamodularExpansion, ParamodError> {
    let v = fricke_matrix(f.level, d)?;
    let caps = ExpansionBox::new(f.bx.n_max.max(f.bx.m_max), f.bx.n_max.max(f.bx.m_max));
    let bx = largest_box(f.level, caps, |t| f.bx.contains(fricke_index_map(t, &v), f.level))
        .ok_or(ParamodError::EmptyBox)?;
    apply_fricke_in(f, &v, bx)
}

/// [`apply_fricke`] onto a caller-chosen box.
pub fn apply_fricke_in(
    f: &ParamodularExpansion,
    v: &FrickeMatrix,
    bx: ExpansionBox,
) -> Result<ParamodularExpansion, ParamodError> {
    if v.level != f.level {
        return Err(ParamodError::Mismatch(format!("V_d of level {} on a form of level {}", v.level, f.level)));
    }
    let mut out = ParamodularExpansion::zero(f.weight, f.level, bx)?;
    for t in bx.indices(f.level) {
        let s = fricke_index_map(t, v);
        if !f.bx.contains(s, f.level) {
            return Err(ParamodError::OutOfBox(s));
        }
        out.set(t, f.coeff(s));
    }
    Ok(out)
}

/// Siegel's operator: `a(n) = alpha(n, 0, 0)`.
pub fn phi_operator(f: &ParamodularExpansion) -> Vec<Rational> {
    (0..=f.bx.n_max).map(|n| f.coeff(FourierIndex::new(n, 0, 0))).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CuspVerdict {
    pub cusp: bool,
    /// `alpha(n, 0, 0) = 0` on the box; sufficient for forms invariant under
    /// the maximal extension.
    pub phi_vanishes: bool,
    pub assumed_extended_invariance: bool,
    pub singular_checked: usize,
    pub witnesses: Vec<(FourierIndex, String)>,
}

/// Scans every singular index (`4nmN = r^2`) of the box.
pub fn is_cusp(f: &ParamodularExpansion, assume_extended_invariance: bool) -> CuspVerdict {
    let phi_vanishes = phi_operator(f).iter().all(Zero::is_zero);
    let mut checked = 0;
    let mut witnesses = Vec::new();
    for t in f.bx.indices(f.level) {
        if t.discriminant(f.level) != 0 {
            continue;
        }
        checked += 1;
        let c = f.coeff(t);
        if !c.is_zero() {
            witnesses.push((t, ntheory::format_rational(&c)));
        }
    }
    CuspVerdict {
        cusp: witnesses.is_empty(),
        phi_vanishes,
        assumed_extended_invariance: assume_extended_invariance,
        singular_checked: checked,
        witnesses,
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Slot {
    Int,
    TimesN,
    OverN,
}

const PARAMODULAR_PATTERN: [[Slot; 4]; 4] = {
    use Slot::*;
    [
        [Int, TimesN, Int, Int],
        [Int, Int, Int, OverN],
        [Int, TimesN, Int, Int],
        [TimesN, TimesN, TimesN, Int],
    ]
};

fn matches_pattern(m: &Mat4, level: i64) -> bool {
    let nr = rat(level);
    (0..4).all(|i| {
        (0..4).all(|j| match PARAMODULAR_PATTERN[i][j] {
            Slot::Int => is_integral(&m[i][j]),
            Slot::TimesN => is_integral(&(&m[i][j] / &nr)),
            Slot::OverN => is_integral(&(&m[i][j] * &nr)),
        })
    })
}

/// Membership in the paramodular group of level `N`.
pub fn is_paramodular_member(m: &Mat4, level: i64) -> bool {
    level >= 1 && is_symplectic(m) && matches_pattern(m, level)
}

/// Membership in the Jacobi subgroup: paramodular, with second column
/// `(0, ±1, 0, 0)^tr` and last row `(0, 0, 0, ±1)`.
pub fn is_jacobi_member(m: &Mat4, level: i64) -> bool {
    let unit = |x: &Rational| x.is_one() || (-x).is_one();
    is_paramodular_member(m, level)
        && m[0][1].is_zero()
        && m[2][1].is_zero()
        && m[3][0].is_zero()
        && m[3][1].is_zero()
        && m[3][2].is_zero()
        && unit(&m[1][1])
        && unit(&m[3][3])
}

/// The embedding of `SL_2 x SL_2` into `Sp_2`, second factor twisted by `N`.
pub fn embed_pair(g: &Mat2, h: &Mat2, level: i64) -> Mat4 {
    let nr = rat(level);
    let z = Rational::zero;
    [
        [g[0][0].clone(), z(), g[0][1].clone(), z()],
        [z(), h[0][0].clone(), z(), &h[0][1] / &nr],
        [g[1][0].clone(), z(), g[1][1].clone(), z()],
        [z(), &h[1][0] * &nr, z(), h[1][1].clone()],
    ]
}

pub fn divisors_of_level(level: i64) -> Vec<i64> {
    ntheory::divisors(level as u64).into_iter().map(|d| d as i64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{mat4_from_i64, mat4_identity, j_matrix};

    fn sample(level: i64) -> ParamodularExpansion {
        let bx = ExpansionBox::new(4, 4);
        let coeffs = bx
            .indices(level)
            .into_iter()
            .map(|t| (t, rat(1 + t.n + 2 * t.m + t.r * t.r)));
        ParamodularExpansion::from_coeffs(4, level, bx, coeffs).unwrap()
    }

    #[test]
    fn index_order_is_m_n_r() {
        let mut v = vec![FourierIndex::new(2, 0, 0), FourierIndex::new(0, 0, 1), FourierIndex::new(1, -1, 1)];
        v.sort();
        assert_eq!(v, vec![FourierIndex::new(2, 0, 0), FourierIndex::new(0, 0, 1), FourierIndex::new(1, -1, 1)]);
    }

    #[test]
    fn construction_rejects_bad_indices() {
        let bx = ExpansionBox::new(2, 2);
        assert!(ParamodularExpansion::from_coeffs(4, 1, bx, [(FourierIndex::new(1, 3, 1), rat(1))]).is_err());
        assert!(ParamodularExpansion::from_coeffs(4, 1, bx, [(FourierIndex::new(3, 0, 1), rat(1))]).is_err());
        assert!(ParamodularExpansion::zero(4, 4, bx).is_err());
    }

    #[test]
    fn slices() {
        let z = ParamodularExpansion::zero(4, 2, ExpansionBox::new(3, 3)).unwrap();
        for m in 0..=3 {
            assert!(fj_slice(&z, m).unwrap().is_zero());
        }
        let f = sample(2);
        let s0 = fj_slice(&f, 0).unwrap();
        assert_eq!(s0.index(), 0);
        assert!(s0.iter().all(|((_, r), _)| *r == 0));
        let s1 = fj_slice(&f, 1).unwrap();
        assert_eq!(s1.index(), 2);
        assert_eq!(s1.coeff(1, 2), f.coeff(FourierIndex::new(1, 2, 1)));
        assert!(fj_slice(&f, 5).is_err());
    }

    #[test]
    fn fricke_matrices() {
        let v1 = fricke_matrix(6, 1).unwrap();
        assert_eq!((v1.alpha, v1.beta, v1.gamma, v1.delta), (1, 0, 0, 1));
        let vn = fricke_matrix(6, 6).unwrap();
        assert_eq!(vn.scaled_matrix(), mat2([[0, 6], [-1, 0]]));
        for level in [1, 2, 3, 5, 6, 10, 15, 30] {
            for d in divisors_of_level(level) {
                let v = fricke_matrix(level, d).unwrap();
                assert!(v.determinant_holds(), "N={level} d={d}");
            }
        }
        let v = fricke_matrix(6, 2).unwrap();
        assert_eq!(2 * v.alpha * v.delta - 3 * v.beta * v.gamma, 1);
        assert!(fricke_matrix(6, 4).is_err());
        assert!(fricke_matrix(4, 2).is_err());
    }

    #[test]
    fn fricke_index_map_examples() {
        let t = FourierIndex::new(3, 2, 5);
        assert_eq!(fricke_index_map(t, &fricke_matrix(6, 1).unwrap()), t);
        assert_eq!(fricke_index_map(t, &fricke_matrix(6, 6).unwrap()), FourierIndex::new(5, -2, 3));
    }

    /// T[V^{-1}] evaluated with rational matrices.
    fn fricke_by_matrices(t: FourierIndex, v: &FrickeMatrix) -> FourierIndex {
        let nn = rat(v.level);
        let tm = [[rat(t.n), frac(t.r, 2)], [frac(t.r, 2), rat(t.m) * &nn]];
        let u = mat2_inverse(&v.scaled_matrix()).unwrap();
        // V^{-1} = sqrt(d) * W^{-1}, so T[V^{-1}] = d * W^{-tr} T W^{-1}.
        let res = mat2_scale(&mat2_mul(&mat2_mul(&mat2_transpose(&u), &tm), &u), &rat(v.d));
        let n = res[0][0].clone();
        let r = &res[0][1] * rat(2);
        let m = &res[1][1] / &nn;
        assert!(n.is_integer() && r.is_integer() && m.is_integer());
        let c = |x: Rational| ntheory::to_i64(x.numer()).unwrap();
        FourierIndex::new(c(n), c(r), c(m))
    }

    /// Closed form of the map, valid for the beta = delta = 1 convention.
    fn closed_form_map(t: FourierIndex, level: i64, d: i64, alpha: i64, gamma: i64) -> FourierIndex {
        let e = level / d;
        FourierIndex::new(
            d * t.n - gamma * t.r + gamma * gamma * e * t.m,
            -2 * level * t.n + (alpha * d + gamma * e) * t.r - 2 * alpha * gamma * level * t.m,
            e * t.n - alpha * t.r + alpha * alpha * d * t.m,
        )
    }

    #[test]
    fn fricke_map_matches_matrix_evaluation_and_closed_form() {
        for level in [1, 2, 3, 5, 6, 10] {
            for d in divisors_of_level(level) {
                let v = fricke_matrix(level, d).unwrap();
                for t in ExpansionBox::new(5, 5).indices(level) {
                    let s = fricke_index_map(t, &v);
                    assert_eq!(s, fricke_by_matrices(t, &v));
                    assert_eq!(s.content(), t.content());
                    assert_eq!(s.discriminant(level), t.discriminant(level));
                    if v.beta == 1 && v.delta == 1 {
                        assert_eq!(s, closed_form_map(t, level, d, v.alpha, v.gamma));
                    }
                }
            }
        }
        // With V_1 = I the closed form is not the identity.
        let t = FourierIndex::new(1, 1, 1);
        assert_ne!(closed_form_map(t, 6, 1, 1, 0), t);
    }

    #[test]
    fn fricke_twice_is_identity_on_common_box() {
        for level in [1, 2, 3, 6] {
            let f = sample(level);
            for d in divisors_of_level(level) {
                let once = apply_fricke(&f, d).unwrap();
                let twice = apply_fricke(&once, d).unwrap();
                assert_eq!(twice.first_difference(&f), None, "N={level} d={d}");
            }
        }
    }

    #[test]
    fn fricke_trivial_divisor_is_identity() {
        let f = sample(3);
        assert_eq!(apply_fricke(&f, 1).unwrap(), f);
    }

    #[test]
    fn phi_and_cusp() {
        let z = ParamodularExpansion::zero(4, 1, ExpansionBox::new(3, 3)).unwrap();
        assert!(phi_operator(&z).iter().all(Zero::is_zero));
        assert!(is_cusp(&z, true).cusp);
        let f = sample(1);
        let v = is_cusp(&f, false);
        assert!(!v.cusp);
        assert_eq!(v.witnesses[0].0, FourierIndex::new(0, 0, 0));
    }

    #[test]
    fn membership_examples() {
        for level in [1, 2, 3, 6] {
            assert!(is_paramodular_member(&mat4_identity(), level));
            assert!(is_jacobi_member(&mat4_identity(), level));
        }
        assert!(is_paramodular_member(&j_matrix(), 1));
        assert!(!is_paramodular_member(&j_matrix(), 2));
        assert!(!is_jacobi_member(&j_matrix(), 1));
        for level in [1, 2, 3, 5, 6, 10] {
            for d in divisors_of_level(level) {
                let sq = fricke_matrix(level, d).unwrap().fricke_square();
                assert!(is_paramodular_member(&sq, level), "N={level} d={d}");
            }
        }
        let g = mat2([[2, 1], [1, 1]]);
        let h = mat2([[1, 3], [0, 1]]);
        assert!(is_paramodular_member(&embed_pair(&g, &h, 6), 6));
        assert!(is_jacobi_member(&embed_pair(&g, &mat2([[1, 0], [0, 1]]), 6), 6));
        let not_symplectic = mat4_from_i64([[2, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]);
        assert!(!is_paramodular_member(&not_symplectic, 1));
    }

    #[test]
    fn largest_box_prefers_square_boxes() {
        let bx = largest_box(1, ExpansionBox::new(10, 10), |t| t.n <= 4 && t.m <= 7).unwrap();
        assert_eq!(bx, ExpansionBox::new(4, 7));
        assert!(largest_box(1, ExpansionBox::new(3, 3), |_| false).is_none());
    }
}
