//! Jacobi Eisenstein series of squarefree index, the paramodular Eisenstein
//! series as a lift, and the identities tying them to the Hecke operators.

use num_traits::Zero;

use crate::hecke::{apply_op, eigenvalue_of, jacobi_bound, reps_for, required_discriminant, Eigen, EngineStats, HeckeError, OpLabel};
use crate::jacobi::{index_raise, jacobi_eisenstein_index1, JacobiExpansion};
use crate::maass::{constant_ratio, gritsenko_lift, LiftSource, MaassError};
use crate::ntheory::{big_rat, divisor_sigma, frac, Rational};
use crate::paramod::{
    fj_slice, validate_level, CoefficientSource, ExpansionBox, FourierIndex, JacobiSlice, ParamodularExpansion,
};

fn check_weight(k: i64) -> Result<(), MaassError> {
    if k < 4 || k % 2 != 0 {
        return Err(MaassError::Nt(crate::ntheory::NtError::Weight(k)));
    }
    Ok(())
}

/// `e*_{k,N}` from an index-1 Eisenstein series truncated at `n_max * N` or
/// beyond.
pub fn jacobi_eisenstein_from(e1: &JacobiExpansion, level: i64, n_max: i64) -> Result<JacobiExpansion, MaassError> {
    validate_level(level)?;
    if e1.index() != 1 || e1.n_max() < n_max * level {
        return Err(MaassError::InsufficientBox { needed: n_max * level, available: e1.n_max() });
    }
    let raised = index_raise(&e1.truncate(n_max * level), level).map_err(|e| MaassError::NotJacobi(e.to_string()))?;
    let sigma = big_rat(divisor_sigma((e1.weight() - 1) as u32, level)?);
    Ok(raised.scale(&(Rational::from_integer(1.into()) / sigma)))
}

/// `e*_{k,N}`, normalized by `c(0, 0) = 1`.
pub fn jacobi_eisenstein(k: i64, level: i64, n_max: i64) -> Result<JacobiExpansion, MaassError> {
    check_weight(k)?;
    validate_level(level)?;
    let e1 = jacobi_eisenstein_index1(k, n_max * level).map_err(|e| MaassError::NotJacobi(e.to_string()))?;
    jacobi_eisenstein_from(&e1, level, n_max)
}

/// The Jacobi form lifting to `E_{k,N}`: `(-2k/B_k) e*_{k,N}`.
pub fn eisenstein_seed(k: i64, level: i64, n_max: i64) -> Result<JacobiExpansion, MaassError> {
    Ok(jacobi_eisenstein(k, level, n_max)?.scale(&constant_ratio(k)?))
}

/// `E_{k,N}` on a box, with `alpha(0, 0, 0) = 1`.
pub fn siegel_eisenstein(k: i64, level: i64, bx: ExpansionBox) -> Result<ParamodularExpansion, MaassError> {
    let seed = eisenstein_seed(k, level, bx.n_max * bx.m_max + 1)?;
    gritsenko_lift(&seed, level, bx)
}

/// `E_{k,N}` as a lazily evaluated source, reading Jacobi coefficients up to
/// `n_max`.
pub fn siegel_eisenstein_source(k: i64, level: i64, n_max: i64) -> Result<LiftSource, MaassError> {
    LiftSource::new(eisenstein_seed(k, level, n_max)?, level)
}

/// The constant of the `N`-th Fourier-Jacobi coefficient of `E_{k,N}` in
/// front of `e*_{k,N}` forced by the lift, and its reciprocal `-B_k/2k`.
pub fn first_jacobi_constant(k: i64) -> Result<(Rational, Rational), MaassError> {
    let derived = constant_ratio(k)?;
    let reciprocal = Rational::from_integer(1.into()) / &derived;
    Ok((derived, reciprocal))
}

/// Outcome of a comparison between two independent computations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Agreement {
    pub compared: usize,
    /// `(n, r, first value, second value)`.
    pub mismatch: Option<(i64, i64, Rational, Rational)>,
    pub stats: EngineStats,
}

impl Agreement {
    pub fn passed(&self) -> bool {
        self.mismatch.is_none() && self.stats.fractional_residues == 0 && self.stats.irrational_totals == 0
    }
}

/// `(1/l) phi | (Jacobi coset of l^(-1/2) diag(1, l, l, 1))` read off the
/// engine, a Jacobi expansion of index `l M`.
pub fn engine_raise(phi: &JacobiExpansion, l: i64, n_max: Option<i64>) -> Result<(JacobiExpansion, EngineStats), HeckeError> {
    let level = phi.index();
    let op = reps_for(OpLabel::FjRaise, l, level)?;
    let phi = match n_max {
        Some(n) => phi.truncate(jacobi_bound(required_discriminant(&op, ExpansionBox::new(n, l)), level).min(phi.n_max())),
        None => phi.clone(),
    };
    let src = JacobiSlice::periodic(phi, level, 1)?;
    let app = apply_op(&src, &op, n_max.map(|n| ExpansionBox::new(n, l)))?;
    if app.expansion.expansion_box().m_max < l {
        return Err(HeckeError::EmptyBox);
    }
    Ok((fj_slice(&app.expansion, l)?.scale(&frac(1, l)), app.stats))
}

/// `sigma_{k-1}(N) e*_{k,N}` against `(1/N) e*_{k,1} | (Jacobi coset of
/// N^(-1/2) diag(1, N, N, 1))`, the latter evaluated by the engine.
pub fn index_raise_crosscheck(e1: &JacobiExpansion, level: i64, n_max: i64) -> Result<Agreement, HeckeError> {
    let k = e1.weight();
    let direct = jacobi_eisenstein_from(e1, level, n_max)?
        .scale(&big_rat(divisor_sigma((k - 1) as u32, level).map_err(MaassError::from)?));
    let (via_engine, stats) = engine_raise(e1, level, Some(n_max))?;
    Ok(compare_jacobi(&direct, &via_engine, stats))
}

/// Compares two Jacobi expansions on their common truncation.
pub fn compare_jacobi(a: &JacobiExpansion, b: &JacobiExpansion, stats: EngineStats) -> Agreement {
    let n_max = a.n_max().min(b.n_max());
    let mut compared = 0;
    for (n, r) in a.truncate(n_max).indices() {
        compared += 1;
        let (x, y) = (a.coeff(n, r), b.coeff(n, r));
        if x != y {
            return Agreement { compared, mismatch: Some((n, r, x, y)), stats };
        }
    }
    Agreement { compared, mismatch: None, stats }
}

/// `e*_{k,N}` under the Jacobi coset of `q^(-1) diag(1, q, q^2, q)`, `q` prime
/// to `N`: returns the eigenvalue found (expected `q^k + q^(3-k)`).
pub fn jacobi_eigenvalue(e: &JacobiExpansion, q: i64, n_out: i64) -> Result<(Eigen, EngineStats), HeckeError> {
    let level = e.index();
    let src = JacobiSlice::periodic(e.clone(), level, 1)?;
    let op = reps_for(OpLabel::JDiag, q, level)?;
    let (eigen, app) = eigenvalue_of(&src, &op, Some(ExpansionBox::new(n_out, 1)))?;
    Ok((eigen, app.stats))
}

/// `q^k + q^2 + q + q^(3-k)`.
pub fn expected_paramodular_eigenvalue(k: i64, q: i64) -> Rational {
    let p = |e: i64| Rational::from_integer(q.into()).pow(e as i32);
    p(k) + p(2) + p(1) + p(3 - k)
}

/// `q^k + q^(3-k)`.
pub fn expected_jacobi_eigenvalue(k: i64, q: i64) -> Rational {
    let p = |e: i64| Rational::from_integer(q.into()).pow(e as i32);
    p(k) + p(3 - k)
}

/// The `m = 1` slice of `f | T_N(q)` against `phi | (Jacobi coset) +
/// (q^2 + q) phi`, where `phi` is the first Fourier-Jacobi coefficient of `f`.
/// Without `n_out` the largest determined box is used.
pub fn slice_identity_check(
    src: &dyn CoefficientSource,
    phi: &JacobiExpansion,
    q: i64,
    n_out: Option<i64>,
) -> Result<Agreement, HeckeError> {
    let level = src.level();
    let g = apply_op(src, &reps_for(OpLabel::TN, q, level)?, n_out.map(|n| ExpansionBox::new(n, 1)))?;
    let gb = g.expansion.expansion_box();
    if gb.m_max < 1 {
        return Err(HeckeError::EmptyBox);
    }
    let lhs = fj_slice(&g.expansion, 1)?;
    let slice = JacobiSlice::periodic(phi.clone(), level, 1).or_else(|_| JacobiSlice::new(phi.clone(), level, 1))?;
    let h = apply_op(&slice, &reps_for(OpLabel::JDiag, q, level)?, Some(ExpansionBox::new(gb.n_max, 1)))?;
    let rhs = fj_slice(&h.expansion, 1)?;
    let base = JacobiExpansion::from_coeffs(
        phi.weight(),
        phi.index(),
        rhs.n_max(),
        rhs.indices().into_iter().map(|(n, r)| ((n, r), slice.coeff_at(FourierIndex::new(n, r, 1)).unwrap_or_default())),
    )
    .map_err(|e| MaassError::NotJacobi(e.to_string()))?;
    let rhs = rhs.add_scaled(&base, &Rational::from_integer((q * q + q).into())).map_err(|e| MaassError::NotJacobi(e.to_string()))?;
    let mut stats = g.stats;
    stats.fractional_residues += h.stats.fractional_residues;
    stats.irrational_totals += h.stats.irrational_totals;
    Ok(compare_jacobi(&lhs, &rhs, stats))
}

/// Whether every coefficient of `E_{k,N}` with `m = 0` equals the elliptic
/// `E_k` coefficient.
pub fn phi_matches_elliptic(f: &ParamodularExpansion) -> Result<bool, MaassError> {
    let phi = crate::paramod::phi_operator(f);
    let e = crate::ntheory::elliptic_eisenstein(f.weight(), f.expansion_box().n_max as usize)?;
    Ok(phi == e && !phi.iter().all(Zero::is_zero))
}
