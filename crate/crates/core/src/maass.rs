//! The Gritsenko lift and checkers for the Maass relations.
//!
//! A form lies in the Maass space when
//! `alpha(n, r, m) = sum_{delta | gcd(n, r, m)} delta^(k-1) alpha(nm/delta^2, r/delta, 1)`
//! for every nonzero index, with zero entries ignored by the gcd, and the
//! constant term satisfies `alpha(0, 0, 1) = -(2k/B_k) alpha(0, 0, 0)`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::jacobi::JacobiExpansion;
use crate::ntheory::{self, big_rat, format_rational, ipow, rat, NtError, Rational};
use crate::paramod::{self, CoefficientSource, ExpansionBox, FourierIndex, ParamodError, ParamodularExpansion};

/// At most this many witnesses are kept in a report, the smallest first.
pub const MAX_WITNESSES: usize = 32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MaassError {
    #[error("Jacobi expansion known up to n = {available}, the box needs n = {needed} (short by {})", needed - available)]
    InsufficientBox { needed: i64, available: i64 },
    #[error("Jacobi index {index} does not match the level {level}")]
    IndexMismatch { index: i64, level: i64 },
    #[error("not a Jacobi form: {0}")]
    NotJacobi(String),
    #[error("{0} is not prime")]
    NotPrime(i64),
    #[error("the form fails the Maass relations, first at {0}")]
    NotMaass(FourierIndex),
    #[error(transparent)]
    Paramod(#[from] ParamodError),
    #[error(transparent)]
    Nt(#[from] NtError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    #[serde(flatten)]
    pub index: FourierIndex,
    pub lhs: String,
    pub rhs: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub other: Option<FourierIndex>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prime: Option<i64>,
}

impl Witness {
    pub fn new(index: FourierIndex, lhs: &Rational, rhs: &Rational) -> Self {
        Self { index, lhs: format_rational(lhs), rhs: format_rational(rhs), other: None, prime: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub status: Status,
    pub checked: usize,
    pub skipped: usize,
    pub witnesses: Vec<Witness>,
    #[serde(skip)]
    pub failures: usize,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub(crate) fn from_outcomes(outcomes: impl IntoIterator<Item = Outcome>) -> Self {
        let mut report = Self { status: Status::Pass, checked: 0, skipped: 0, witnesses: Vec::new(), failures: 0 };
        for o in outcomes {
            report.push(o);
        }
        report
    }

    pub(crate) fn push(&mut self, o: Outcome) {
        match o {
            Outcome::Trivial => {}
            Outcome::Skipped => self.skipped += 1,
            Outcome::Held => self.checked += 1,
            Outcome::Failed(w) => {
                self.checked += 1;
                self.failures += 1;
                self.status = Status::Fail;
                if self.witnesses.len() < MAX_WITNESSES {
                    self.witnesses.push(w);
                }
            }
        }
    }

    /// Folds several reports into one, keeping witness order.
    pub fn merge(reports: impl IntoIterator<Item = CheckReport>) -> Self {
        let mut out = Self::from_outcomes([]);
        for r in reports {
            out.checked += r.checked;
            out.skipped += r.skipped;
            out.failures += r.failures;
            if r.status == Status::Fail {
                out.status = Status::Fail;
            }
            let room = MAX_WITNESSES - out.witnesses.len();
            out.witnesses.extend(r.witnesses.into_iter().take(room));
        }
        out
    }
}

pub(crate) enum Outcome {
    Trivial,
    Skipped,
    Held,
    Failed(Witness),
}

fn compare(index: FourierIndex, lhs: Option<Rational>, rhs: Option<Rational>) -> Outcome {
    match (lhs, rhs) {
        (Some(l), Some(r)) if l == r => Outcome::Held,
        (Some(l), Some(r)) => Outcome::Failed(Witness::new(index, &l, &r)),
        _ => Outcome::Skipped,
    }
}

fn pow_rat(base: i64, exp: i64) -> Rational {
    big_rat(ipow(base, exp as u32))
}

/// `-(2k / B_k)`, the ratio `alpha(0, 0, 1) / alpha(0, 0, 0)` of a Maass form.
pub fn constant_ratio(k: i64) -> Result<Rational, NtError> {
    Ok(-rat(2 * k) / ntheory::bernoulli_even(k)?)
}

/// `alpha(T)` of the lift from a coefficient oracle `c(n, r)` of the Jacobi
/// form; `None` as soon as a needed `c` is unknown.
pub(crate) fn lift_coefficient<F>(k: i64, ratio: &Rational, t: FourierIndex, c: F) -> Option<Rational>
where
    F: Fn(i64, i64) -> Option<Rational>,
{
    if t.is_zero() {
        return c(0, 0).map(|c0| c0 / ratio);
    }
    let mut acc = Rational::zero();
    for delta in ntheory::divisors(t.content() as u64) {
        let delta = delta as i64;
        let v = c(t.n * t.m / (delta * delta), t.r / delta)?;
        if !v.is_zero() {
            acc += pow_rat(delta, k - 1) * v;
        }
    }
    Some(acc)
}

/// Lifts a Jacobi expansion of index `N` to a paramodular expansion of level
/// `N` on `bx`. Needs `phi` known up to `n_max * m_max`.
pub fn gritsenko_lift(phi: &JacobiExpansion, level: i64, bx: ExpansionBox) -> Result<ParamodularExpansion, MaassError> {
    paramod::validate_level(level)?;
    if phi.index() != level {
        return Err(MaassError::IndexMismatch { index: phi.index(), level });
    }
    let needed = bx.n_max * bx.m_max;
    if phi.n_max() < needed {
        return Err(MaassError::InsufficientBox { needed, available: phi.n_max() });
    }
    let k = phi.weight();
    let ratio = constant_ratio(k)?;
    let values: Vec<(FourierIndex, Rational)> = bx
        .indices(level)
        .into_par_iter()
        .map(|t| {
            let v = lift_coefficient(k, &ratio, t, |n, r| phi.known(n, r)).expect("box checked above");
            (t, v)
        })
        .collect();
    Ok(ParamodularExpansion::from_coeffs(k, level, bx, values)?)
}

/// The lift of a Jacobi form evaluated on demand. Coefficients are read
/// through the periodicity of `phi`, so every index whose discriminant is
/// covered by the truncation of `phi` is known.
#[derive(Debug, Clone)]
pub struct LiftSource {
    phi: JacobiExpansion,
    level: i64,
    ratio: Rational,
}

impl LiftSource {
    pub fn new(phi: JacobiExpansion, level: i64) -> Result<Self, MaassError> {
        paramod::validate_level(level)?;
        if phi.index() != level {
            return Err(MaassError::IndexMismatch { index: phi.index(), level });
        }
        let report = crate::jacobi::validate_jacobi(&phi);
        if let Some(v) = report.violations.first() {
            return Err(MaassError::NotJacobi(format!("{v:?}")));
        }
        let ratio = constant_ratio(phi.weight())?;
        Ok(Self { phi, level, ratio })
    }

    pub fn jacobi(&self) -> &JacobiExpansion {
        &self.phi
    }

    /// The lift on a box, which must be covered.
    pub fn expand(&self, bx: ExpansionBox) -> Result<ParamodularExpansion, MaassError> {
        let values = bx
            .indices(self.level)
            .into_par_iter()
            .map(|t| self.coeff_at(t).map(|v| (t, v)).ok_or(ParamodError::OutOfBox(t)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ParamodularExpansion::from_coeffs(self.phi.weight(), self.level, bx, values)?)
    }
}

impl CoefficientSource for LiftSource {
    fn weight(&self) -> i64 {
        self.phi.weight()
    }

    fn level(&self) -> i64 {
        self.level
    }

    fn coeff_at(&self, t: FourierIndex) -> Option<Rational> {
        if !t.is_semidefinite(self.level) {
            return Some(Rational::zero());
        }
        lift_coefficient(self.phi.weight(), &self.ratio, t, |n, r| self.phi.reduced_known(n, r))
    }

    fn caps(&self) -> ExpansionBox {
        let c = ntheory::isqrt(self.phi.n_max()).max(1);
        ExpansionBox::new(c, c)
    }
}

/// Tests the Maass relations on every nonzero index of the box whose
/// right-hand side is in the box, plus the constant-term relation.
pub fn maass_check(f: &ParamodularExpansion) -> CheckReport {
    let k = f.weight();
    let level = f.level();
    let bx = f.expansion_box();
    let ratio = constant_ratio(k).ok();
    let outcomes: Vec<Outcome> = bx
        .indices(level)
        .into_par_iter()
        .map(|t| {
            if t.is_zero() {
                let Some(ratio) = &ratio else { return Outcome::Skipped };
                let lhs = f.known(0, 0, 1);
                let rhs = Some(ratio * f.coeff(t));
                return compare(FourierIndex::new(0, 0, 1), lhs, rhs);
            }
            let mut rhs = Some(Rational::zero());
            for delta in ntheory::divisors(t.content() as u64) {
                let delta = delta as i64;
                match f.known(t.n * t.m / (delta * delta), t.r / delta, 1) {
                    Some(c) => {
                        if let Some(acc) = rhs.as_mut() {
                            *acc += pow_rat(delta, k - 1) * c;
                        }
                    }
                    None => rhs = None,
                }
            }
            if t.m == 1 && t.content() == 1 {
                return Outcome::Trivial;
            }
            compare(t, Some(f.coeff(t)), rhs)
        })
        .collect();
    CheckReport::from_outcomes(outcomes)
}

/// The two coefficient conditions characterising the Maass space one prime
/// at a time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Lemma1Mode {
    /// `alpha(n,r,pm) + p^(k-1) alpha(n,r/p,m/p) = alpha(pn,r,m) + p^(k-1) alpha(n/p,r/p,m)`.
    ConditionII,
    /// The closed p-power recursions.
    ConditionIII,
}

fn rat_index(n: i64, r: i64, m: i64, den: i64) -> Option<(i64, i64, i64)> {
    (n % den == 0 && r % den == 0 && m % den == 0).then(|| (n / den, r / den, m / den))
}

/// Known value at `(n/dn, r/dr, m/dm)`, zero when not integral.
fn known_scaled(f: &ParamodularExpansion, (n, dn): (i64, i64), (r, dr): (i64, i64), (m, dm): (i64, i64)) -> Option<Rational> {
    if n % dn != 0 || r % dr != 0 || m % dm != 0 {
        return Some(Rational::zero());
    }
    f.known(n / dn, r / dr, m / dm)
}

fn condition_ii_instance(f: &ParamodularExpansion, p: i64, n: i64, r: i64, m: i64) -> Outcome {
    let level = f.level();
    let terms = [(n, r, p * m), (p * n, r, m)];
    let scaled = [(n, r, m, [1, p, p]), (n, r, m, [p, p, 1])];
    let any_psd = terms.iter().any(|&(a, b, c)| FourierIndex::new(a, b, c).is_semidefinite(level))
        || scaled.iter().any(|&(a, b, c, d)| {
            rat_index(a * d[1] * d[2], b * d[0] * d[2], c * d[0] * d[1], d[0] * d[1] * d[2])
                .is_some_and(|(x, y, z)| FourierIndex::new(x, y, z).is_semidefinite(level))
        });
    if !any_psd || (n == 0 && r == 0 && m == 0) {
        return Outcome::Trivial;
    }
    let w = pow_rat(p, f.weight() - 1);
    let lhs = f
        .known(n, r, p * m)
        .zip(known_scaled(f, (n, 1), (r, p), (m, p)))
        .map(|(a, b)| a + &w * b);
    let rhs = f
        .known(p * n, r, m)
        .zip(known_scaled(f, (n, p), (r, p), (m, 1)))
        .map(|(a, b)| a + &w * b);
    let mut o = compare(FourierIndex::new(n, r, m), lhs, rhs);
    if let Outcome::Failed(wit) = &mut o {
        wit.prime = Some(p);
    }
    o
}

fn valuation(mut x: i64, p: i64) -> (u32, i64) {
    let mut v = 0;
    while x != 0 && x % p == 0 {
        x /= p;
        v += 1;
    }
    (v, x)
}

fn condition_iii_instance(f: &ParamodularExpansion, p: i64, t: FourierIndex) -> Outcome {
    let k = f.weight();
    let w = pow_rat(p, k - 1);
    let (nu, n) = valuation(t.n, p);
    let (rho, r) = valuation(t.r, p);
    let (mu, m) = valuation(t.m, p);
    let sigma = |e: u32| big_rat(ntheory::divisor_sigma((k - 1) as u32, p.pow(e)).expect("positive argument"));
    let lhs = Some(f.coeff(t));
    let rhs = match (t.n != 0, t.r != 0, t.m != 0) {
        (true, true, true) | (true, false, true) => {
            let top = if t.r != 0 { nu.min(rho).min(mu) } else { nu.min(mu) };
            if mu == 0 && (t.r == 0 || top == 0) {
                return Outcome::Trivial;
            }
            let mut acc = Some(Rational::zero());
            for delta in 0..=top {
                let e = nu + mu - 2 * delta;
                let rr = if t.r != 0 { p.pow(rho - delta) * r } else { 0 };
                let term = f.known(p.pow(e) * n, rr, m);
                acc = acc.zip(term).map(|(a, c)| a + w.pow(delta as i32) * c);
            }
            acc
        }
        (true, false, false) => {
            if nu == 0 {
                return Outcome::Trivial;
            }
            f.known(n, 0, 0).map(|c| sigma(nu) * c)
        }
        (false, false, true) => {
            if mu == 0 {
                return Outcome::Trivial;
            }
            f.known(0, 0, m).map(|c| sigma(mu) * c)
        }
        _ => return Outcome::Trivial,
    };
    let mut o = compare(t, lhs, rhs);
    if let Outcome::Failed(wit) = &mut o {
        wit.prime = Some(p);
    }
    o
}

/// Checks one of the two per-prime conditions on every instance the box
/// determines; instances needing data outside the box are skipped.
pub fn lemma1_check(f: &ParamodularExpansion, p: i64, mode: Lemma1Mode) -> Result<CheckReport, MaassError> {
    if !ntheory::is_prime(p.max(0) as u64) {
        return Err(MaassError::NotPrime(p));
    }
    let level = f.level();
    let bx = f.expansion_box();
    let outcomes: Vec<Outcome> = match mode {
        Lemma1Mode::ConditionII => {
            let mut triples = Vec::new();
            for m in 0..=bx.m_max {
                for n in 0..=bx.n_max {
                    let bound = ntheory::isqrt(4 * p * n * m * level);
                    for r in -bound..=bound {
                        triples.push((n, r, m));
                    }
                }
            }
            triples.into_par_iter().map(|(n, r, m)| condition_ii_instance(f, p, n, r, m)).collect()
        }
        Lemma1Mode::ConditionIII => {
            bx.indices(level).into_par_iter().map(|t| condition_iii_instance(f, p, t)).collect()
        }
    };
    Ok(CheckReport::from_outcomes(outcomes))
}

/// Primes that can occur in a nontrivial in-box instance of condition (ii).
pub fn relevant_primes(f: &ParamodularExpansion) -> Vec<i64> {
    let bx = f.expansion_box();
    ntheory::primes_up_to(bx.n_max.max(bx.m_max).max(2) as u64).into_iter().map(|p| p as i64).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrimeCriterion {
    pub consistent: bool,
    pub tested: Vec<i64>,
    pub exceptional: Vec<i64>,
    pub failing: Vec<i64>,
}

/// Runs condition (ii) for every prime of `primes` outside `exceptional`. On
/// a truncated expansion this is a consistency check of the box only.
pub fn finite_prime_criterion(
    f: &ParamodularExpansion,
    primes: &[i64],
    exceptional: &[i64],
) -> Result<PrimeCriterion, MaassError> {
    let mut tested = Vec::new();
    let mut failing = Vec::new();
    for &p in primes {
        if exceptional.contains(&p) {
            continue;
        }
        tested.push(p);
        if !lemma1_check(f, p, Lemma1Mode::ConditionII)?.passed() {
            failing.push(p);
        }
    }
    Ok(PrimeCriterion { consistent: failing.is_empty(), tested, exceptional: exceptional.to_vec(), failing })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Profile {
    /// `alpha*(D)` for every discriminant `D = 4nmN - r^2` realised in the box.
    Consistent(BTreeMap<i64, Rational>),
    /// Two indices demanding different values of `alpha*(D)`.
    Conflict { first: FourierIndex, second: FourierIndex, discriminant: i64 },
}

/// Solves `alpha(T) = sum_{delta | gcd} delta^(k-1) alpha*(D/delta^2)` for
/// `alpha*`, discriminant by discriminant.
pub fn corollary2_profile(f: &ParamodularExpansion) -> Profile {
    let level = f.level();
    let k = f.weight();
    let mut indices: Vec<FourierIndex> = f.expansion_box().indices(level).into_iter().filter(|t| !t.is_zero()).collect();
    indices.sort_by_key(|t| (t.discriminant(level), *t));
    let mut profile: BTreeMap<i64, (Rational, FourierIndex)> = BTreeMap::new();
    for t in indices {
        let d = t.discriminant(level);
        let mut known = Rational::zero();
        let mut weight = Rational::zero();
        for delta in ntheory::divisors(t.content() as u64) {
            let delta = delta as i64;
            let w = pow_rat(delta, k - 1);
            let sub = d / (delta * delta);
            if sub == d {
                weight += w;
            } else {
                known += w * &profile[&sub].0;
            }
        }
        let value = (f.coeff(t) - known) / weight;
        match profile.get(&d) {
            Some((v, first)) if *v != value => {
                return Profile::Conflict { first: *first, second: t, discriminant: d };
            }
            Some(_) => {}
            None => {
                profile.insert(d, (value, t));
            }
        }
    }
    Profile::Consistent(profile.into_iter().map(|(d, (v, _))| (d, v)).collect())
}

/// Reads off `epsilon` with `alpha(n, r, 1) = epsilon alpha(n', r', 1)` for all
/// pairs of equal discriminant with `r = -r' mod 2d` and `r = r' mod 2N/d`.
/// `None` when no pair has a nonzero member or neither sign fits.
pub fn theorem2_eigen_check(f: &ParamodularExpansion, d: i64) -> Result<Option<i8>, MaassError> {
    let level = f.level();
    if d <= 0 || level % d != 0 {
        return Err(ParamodError::Divisor { level, d }.into());
    }
    let report = maass_check(f);
    if let Some(w) = report.witnesses.first() {
        return Err(MaassError::NotMaass(w.index));
    }
    let e = level / d;
    let bx = f.expansion_box();
    let row: Vec<FourierIndex> = if bx.m_max >= 1 {
        bx.indices(level).into_iter().filter(|t| t.m == 1).collect()
    } else {
        Vec::new()
    };
    let (mut plus, mut minus, mut nonzero) = (true, true, false);
    for a in &row {
        for b in &row {
            if a.discriminant(level) != b.discriminant(level)
                || (a.r + b.r).rem_euclid(2 * d) != 0
                || (a.r - b.r).rem_euclid(2 * e) != 0
            {
                continue;
            }
            let (x, y) = (f.coeff(*a), f.coeff(*b));
            if x.is_zero() && y.is_zero() {
                continue;
            }
            nonzero = true;
            plus &= x == y;
            minus &= x == -y;
        }
    }
    Ok(match (nonzero, plus, minus) {
        (false, _, _) => None,
        (true, true, _) => Some(1),
        (true, false, true) => Some(-1),
        _ => None,
    })
}

/// Compares `f | W_d` with `epsilon f` on the box where `f | W_d` is known;
/// `epsilon = -1` only when the first nonzero coefficient flips sign.
pub fn fricke_check(f: &ParamodularExpansion, d: i64) -> Result<CheckReport, MaassError> {
    let g = paramod::apply_fricke(f, d)?;
    let indices = g.expansion_box().indices(f.level());
    let sign = indices
        .iter()
        .find(|t| !f.coeff(**t).is_zero())
        .map(|t| if g.coeff(*t) == -f.coeff(*t) { -Rational::one() } else { Rational::one() })
        .unwrap_or_else(Rational::one);
    Ok(CheckReport::from_outcomes(indices.into_iter().map(|t| compare(t, Some(g.coeff(t)), Some(&sign * f.coeff(t))))))
}

/// `sum_{d | N} f | W_d`, on `target` or else on the common box of the
/// largest determined boxes of all terms.
pub fn fricke_symmetrize(f: &ParamodularExpansion, target: Option<ExpansionBox>) -> Result<ParamodularExpansion, MaassError> {
    let level = f.level();
    let parts = paramod::divisors_of_level(level)
        .into_iter()
        .map(|d| match target {
            Some(bx) => paramod::apply_fricke_in(f, &paramod::fricke_matrix(level, d)?, bx),
            None => paramod::apply_fricke(f, d),
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut bx = f.expansion_box();
    for p in &parts {
        bx = bx.intersect(&p.expansion_box());
    }
    let mut acc = ParamodularExpansion::zero(f.weight(), level, bx)?;
    for p in &parts {
        acc = acc.add_scaled(&p.restrict(bx), &Rational::one())?;
    }
    Ok(acc)
}

/// [`fricke_symmetrize`] read from any coefficient source, on `out`.
pub fn fricke_symmetrize_from(src: &dyn CoefficientSource, out: ExpansionBox) -> Result<ParamodularExpansion, MaassError> {
    let level = src.level();
    let maps = paramod::divisors_of_level(level)
        .into_iter()
        .map(|d| paramod::fricke_matrix(level, d))
        .collect::<Result<Vec<_>, _>>()?;
    let mut coeffs = Vec::new();
    for t in out.indices(level) {
        let mut acc = Rational::zero();
        for v in &maps {
            let s = paramod::fricke_index_map(t, v);
            acc += src.coeff_at(s).ok_or(ParamodError::OutOfBox(s))?;
        }
        coeffs.push((t, acc));
    }
    Ok(ParamodularExpansion::from_coeffs(src.weight(), level, out, coeffs)?)
}

/// Input box from which [`fricke_symmetrize`] determines `out`.
pub fn fricke_symmetrize_box(level: i64, out: ExpansionBox) -> Result<ExpansionBox, MaassError> {
    let mut need = out;
    for d in paramod::divisors_of_level(level) {
        let s = paramod::fricke_source_box(level, &paramod::fricke_matrix(level, d)?, out);
        need = ExpansionBox::new(need.n_max.max(s.n_max), need.m_max.max(s.m_max));
    }
    Ok(need)
}
