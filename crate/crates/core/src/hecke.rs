//! Hecke operators of paramodular and Jacobi type, given by explicit right
//! coset representatives, and an exact engine applying them to expansions.
//!
//! A representative is `s (A B; 0 D)` with `s^2 A^tr D = I`. It sends the term
//! of index `T` to the index `s^2 A^tr T A`, multiplied by `(s^2 det D)^(-k)`
//! and by the root of unity `e(s^2 tr(T B A^tr))`. Operators are unnormalized:
//! the sum over representatives is taken as it stands.
//!
//! Symplecticity of a block upper triangular representative means
//! `s^2 A^tr D = I` together with `B^tr D` symmetric (equivalently `A B^tr`
//! symmetric). `A^tr B` need not be symmetric; the fifth family of the
//! `T*_N(q)` list is a counterexample.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::matrix::{
    is_integral, mat2_det, mat2_inverse, mat2_is_symmetric, mat2_mul, mat2_transpose, mat4_blocks, mat4_mul,
    mat4_scale, Mat2, Mat4,
};
use crate::maass::MaassError;
use crate::ntheory::{self, big_rat, format_rational, frac, ipow, isqrt, rat, rational_sqrt, Rational};
use crate::paramod::{
    self, is_jacobi_member, largest_box, CoefficientSource, ExpansionBox, FourierIndex, ParamodError,
    ParamodularExpansion,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HeckeError {
    #[error("{0} is not a valid parameter for {1}")]
    Parameter(i64, &'static str),
    #[error("{label} is not available for q = {q} dividing the level {level}")]
    Unsupported { label: &'static str, q: i64, level: i64 },
    #[error("operator of level {op} applied to a form of level {form}")]
    LevelMismatch { op: i64, form: i64 },
    #[error("no output coefficient is determined by the input")]
    EmptyBox,
    #[error("output index {0} is not determined by the input")]
    Undetermined(FourierIndex),
    #[error("{count} fractional output indices keep a nonzero total, first at {first}")]
    FractionalResidue { count: usize, first: String },
    #[error("{count} output coefficients are not rational, first at {first}")]
    Irrational { count: usize, first: FourierIndex },
    #[error("the form vanishes on the output box")]
    ZeroForm,
    #[error(transparent)]
    Paramod(#[from] ParamodError),
    #[error(transparent)]
    Maass(#[from] MaassError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum OpLabel {
    Identity,
    /// `T_N(q)`, the double coset of `q^(-1/2) diag(1, 1, q, q)`.
    TN,
    /// `T*_N(q)`, the double coset of `q^(-1) diag(1, q, q^2, q)`.
    TStarN,
    /// Jacobi double coset of `l^(-1/2) diag(1, l, l, 1)`; for prime `l` it
    /// equals the one of `l^(-1/2) diag(l, l, 1, 1)`.
    FjRaise,
    /// Jacobi double coset of `q^(-1) diag(1, q, q^2, q)`, for `q` prime to `N`.
    JDiag,
    /// The single coset `p^(-1) diag(p, p^2, p, 1)`.
    L1Diag,
    /// `sum_{u mod p} I x (1 u/p; 0 1)`.
    USum,
}

impl OpLabel {
    pub const ALL: [OpLabel; 7] =
        [Self::Identity, Self::TN, Self::TStarN, Self::FjRaise, Self::JDiag, Self::L1Diag, Self::USum];

    pub fn name(self) -> &'static str {
        match self {
            Self::Identity => "identity",
            Self::TN => "tnq",
            Self::TStarN => "tstarq",
            Self::FjRaise => "fjraise",
            Self::JDiag => "jdiag",
            Self::L1Diag => "l1diag",
            Self::USum => "usum",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|l| l.name() == s)
    }
}

impl std::fmt::Display for OpLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// `s^2` as a power of the operator parameter `q`.
#[derive(Debug, Clone, Copy)]
enum Scale {
    One,
    InvQ,
    InvQ2,
    InvQ3,
}

#[derive(Debug, Clone, Copy)]
enum Range {
    /// Residues mod `q`.
    Mod,
    /// Residues mod `q^2`.
    ModSq,
    /// Nonzero residues mod `q`.
    NonzeroMod,
    /// Positive divisors of `q`.
    Divisor,
    /// `q` divided by an earlier parameter.
    Cofactor(char),
    /// Residues modulo an earlier parameter.
    ModParam(char),
}

#[derive(Debug, Clone, Copy)]
enum Exclude {
    None,
    /// Not all of the parameters vanish mod `q`.
    NotAllZero(&'static [char]),
    /// The product of the parameters is nonzero mod `q`.
    ProductNonzero(&'static [char]),
    /// The parameters are coprime.
    Coprime(&'static [char]),
}

/// One displayed family of representatives: matrix entries are written as in
/// the source display, rows of `A`, `B` and `D` flattened.
struct Template {
    family: &'static str,
    scale: Scale,
    a: [&'static str; 4],
    b: [&'static str; 4],
    d: [&'static str; 4],
    params: &'static [(char, Range)],
    exclude: Exclude,
}

const ZERO: [&str; 4] = ["0", "0", "0", "0"];
const ONE: [&str; 4] = ["1", "0", "0", "1"];

const IDENTITY: &[Template] =
    &[Template { family: "I", scale: Scale::One, a: ONE, b: ZERO, d: ONE, params: &[], exclude: Exclude::None }];

const TN_BASE: &[Template] = &[
    Template {
        family: "T1",
        scale: Scale::InvQ,
        a: ["q", "0", "0", "q"],
        b: ZERO,
        d: ONE,
        params: &[],
        exclude: Exclude::None,
    },
    Template {
        family: "T2",
        scale: Scale::InvQ,
        a: ["1", "0", "0", "q"],
        b: ["a", "0", "0", "0"],
        d: ["q", "0", "0", "1"],
        params: &[('a', Range::Mod)],
        exclude: Exclude::None,
    },
    Template {
        family: "T3",
        scale: Scale::InvQ,
        a: ONE,
        b: ["a", "b", "b", "c/N"],
        d: ["q", "0", "0", "q"],
        params: &[('a', Range::Mod), ('b', Range::Mod), ('c', Range::Mod)],
        exclude: Exclude::None,
    },
    Template {
        family: "T4",
        scale: Scale::InvQ,
        a: ["q", "0", "-d", "1"],
        b: ["0", "0", "0", "c/N"],
        d: ["1", "d", "0", "q"],
        params: &[('c', Range::Mod), ('d', Range::Mod)],
        exclude: Exclude::None,
    },
];

const TN_EXTRA: &[Template] = &[Template {
    family: "T5",
    scale: Scale::InvQ2,
    a: ["q", "0", "-d", "q"],
    b: ["0", "b", "b", "0"],
    d: ["q", "d", "0", "q"],
    params: &[('b', Range::Mod), ('d', Range::Mod)],
    exclude: Exclude::NotAllZero(&['b', 'd']),
}];

const TSTAR_BASE: &[Template] = &[
    Template {
        family: "S1",
        scale: Scale::InvQ2,
        a: ["q", "0", "0", "q^2"],
        b: ZERO,
        d: ["q", "0", "0", "1"],
        params: &[],
        exclude: Exclude::None,
    },
    Template {
        family: "S2",
        scale: Scale::InvQ2,
        a: ["q^2", "0", "-qd", "q"],
        b: ZERO,
        d: ["1", "d", "0", "q"],
        params: &[('d', Range::Mod)],
        exclude: Exclude::None,
    },
    Template {
        family: "S3",
        scale: Scale::InvQ2,
        a: ["1", "0", "0", "q"],
        b: ["a", "b", "qb", "0"],
        d: ["q^2", "0", "0", "q"],
        params: &[('a', Range::ModSq), ('b', Range::Mod)],
        exclude: Exclude::None,
    },
    Template {
        family: "S4",
        scale: Scale::InvQ2,
        a: ["q", "0", "0", "q"],
        b: ["u", "ub", "ub", "ub^2"],
        d: ["q", "0", "0", "q"],
        params: &[('u', Range::NonzeroMod), ('b', Range::Mod)],
        exclude: Exclude::None,
    },
    Template {
        family: "S5",
        scale: Scale::InvQ2,
        a: ["q", "0", "-d", "1"],
        b: ["0", "qb", "b", "c/N"],
        d: ["q", "qd", "0", "q^2"],
        params: &[('b', Range::Mod), ('d', Range::Mod), ('c', Range::ModSq)],
        exclude: Exclude::None,
    },
    Template {
        family: "S6",
        scale: Scale::InvQ2,
        a: ["q", "0", "0", "q"],
        b: ["0", "0", "0", "u/N"],
        d: ["q", "0", "0", "q"],
        params: &[('u', Range::NonzeroMod)],
        exclude: Exclude::None,
    },
];

const TSTAR_EXTRA: &[Template] = &[
    Template {
        family: "S7",
        scale: Scale::InvQ2,
        a: ["q", "0", "0", "q"],
        b: ["0", "b", "b", "c/N"],
        d: ["q", "0", "0", "q"],
        params: &[('b', Range::NonzeroMod), ('c', Range::NonzeroMod)],
        exclude: Exclude::None,
    },
    Template {
        family: "S8",
        scale: Scale::InvQ2,
        a: ["q", "0", "-d", "q"],
        b: ["0", "b", "b", "c/N"],
        d: ["q", "d", "0", "q"],
        params: &[('b', Range::Mod), ('c', Range::Mod), ('d', Range::Mod)],
        exclude: Exclude::ProductNonzero(&['c', 'd']),
    },
    Template {
        family: "S9",
        scale: Scale::InvQ3,
        a: ["q^2", "0", "-qd", "q^2"],
        b: ZERO,
        d: ["q", "d", "0", "q"],
        params: &[('d', Range::NonzeroMod)],
        exclude: Exclude::None,
    },
    Template {
        family: "S10",
        scale: Scale::InvQ3,
        a: ["q", "0", "0", "q^2"],
        b: ["qa", "b", "qb", "0"],
        d: ["q^2", "0", "0", "q"],
        params: &[('a', Range::Mod), ('b', Range::NonzeroMod)],
        exclude: Exclude::None,
    },
    Template {
        family: "S11",
        scale: Scale::InvQ3,
        a: ["q^2", "0", "-qd", "q"],
        b: ["0", "qb", "b", "bd+qc/N"],
        d: ["q", "qd", "0", "q^2"],
        params: &[('b', Range::NonzeroMod), ('c', Range::Mod), ('d', Range::Mod)],
        exclude: Exclude::None,
    },
    Template {
        family: "S12",
        scale: Scale::InvQ3,
        a: ["q", "0", "-d", "q"],
        b: ["qa", "qb", "-ad+qb", "bd+qc/N"],
        d: ["q^2", "qd", "0", "q^2"],
        params: &[('a', Range::Mod), ('b', Range::Mod), ('c', Range::Mod), ('d', Range::NonzeroMod)],
        exclude: Exclude::None,
    },
];

const FJ_RAISE: &[Template] = &[Template {
    family: "F",
    scale: Scale::InvQ,
    a: ["a", "0", "0", "q"],
    b: ["b", "0", "0", "0"],
    d: ["d", "0", "0", "1"],
    params: &[('a', Range::Divisor), ('d', Range::Cofactor('a')), ('b', Range::ModParam('d'))],
    exclude: Exclude::Coprime(&['a', 'b', 'd']),
}];

const L1_DIAG: &[Template] = &[Template {
    family: "L",
    scale: Scale::InvQ2,
    a: ["q", "0", "0", "q^2"],
    b: ZERO,
    d: ["q", "0", "0", "1"],
    params: &[],
    exclude: Exclude::None,
}];

const U_SUM: &[Template] = &[Template {
    family: "U",
    scale: Scale::One,
    a: ONE,
    b: ["0", "0", "0", "u/qN"],
    d: ONE,
    params: &[('u', Range::Mod)],
    exclude: Exclude::None,
}];

/// Evaluates an entry such as `bd+qc/N`, `-ad+qb`, `ub^2` or `u/qN`.
fn eval_entry(expr: &str, vars: &[(char, i64)], q: i64, level: i64) -> Rational {
    let value = |c: char| -> i64 {
        match c {
            'q' => q,
            'N' => level,
            _ => vars.iter().find(|(v, _)| *v == c).map(|(_, x)| *x).unwrap_or_else(|| panic!("unbound {c} in {expr}")),
        }
    };
    let s: Vec<char> = expr.chars().filter(|c| !c.is_whitespace()).collect();
    let mut i = 0;
    let mut total = Rational::zero();
    while i < s.len() {
        let mut sign = 1;
        if s[i] == '+' || s[i] == '-' {
            if s[i] == '-' {
                sign = -1;
            }
            i += 1;
        }
        let mut coef: i64 = 1;
        let start = i;
        while i < s.len() && s[i].is_ascii_digit() {
            i += 1;
        }
        if i > start {
            coef = s[start..i].iter().collect::<String>().parse().expect("digits");
        }
        while i < s.len() && s[i].is_ascii_alphabetic() {
            let mut v = value(s[i]);
            i += 1;
            if i < s.len() && s[i] == '^' {
                let e = s[i + 1].to_digit(10).expect("exponent digit");
                v = v.pow(e);
                i += 2;
            }
            coef *= v;
        }
        let mut term = rat(sign * coef);
        if i < s.len() && s[i] == '/' {
            i += 1;
            let mut den = 1;
            while i < s.len() && s[i].is_ascii_alphabetic() {
                den *= value(s[i]);
                i += 1;
            }
            term /= rat(den);
        }
        total += term;
    }
    total
}

fn symmetric_residues(modulus: i64) -> impl Iterator<Item = i64> {
    -((modulus - 1) / 2)..=modulus / 2
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UpperRep {
    pub family: &'static str,
    pub params: Vec<(char, i64)>,
    pub s2: Rational,
    pub a: Mat2,
    pub b: Mat2,
    pub d: Mat2,
}

impl UpperRep {
    /// `(A B; 0 D)` without the scalar.
    pub fn unscaled(&self) -> Mat4 {
        let zero = crate::matrix::mat2_zero();
        mat4_blocks(&self.a, &self.b, &zero, &self.d)
    }

    /// `s^2 A^tr D = I` and `B^tr D` symmetric.
    pub fn invariants_hold(&self) -> bool {
        let id = crate::matrix::mat2_identity();
        let ad = crate::matrix::mat2_scale(&mat2_mul(&mat2_transpose(&self.a), &self.d), &self.s2);
        ad == id && mat2_is_symmetric(&mat2_mul(&mat2_transpose(&self.b), &self.d)) && self.s2.is_positive()
    }

    /// `det(sD)^(-k) = (s^2 det D)^(-k)`.
    pub fn weight_factor(&self, k: i64) -> Rational {
        (&self.s2 * mat2_det(&self.d)).pow(-(k as i32))
    }

    /// Coefficients of `(n', r', m')` in terms of `(n, r, m)`.
    fn index_map(s2: &Rational, a: &Mat2, level: i64) -> [[Rational; 3]; 3] {
        let nr = rat(level);
        let (a00, a01, a10, a11) = (&a[0][0], &a[0][1], &a[1][0], &a[1][1]);
        let two = rat(2);
        [
            [s2 * a00 * a00, s2 * a00 * a10, s2 * a10 * a10 * &nr],
            [s2 * &two * a00 * a01, s2 * (a00 * a11 + a10 * a01), s2 * &two * a10 * a11 * &nr],
            [s2 * a01 * a01 / &nr, s2 * a01 * a11 / &nr, s2 * a11 * a11],
        ]
    }

    /// `nu = s^2 tr(T B A^tr)` as a linear form in `(n, r, m)`.
    fn phase_form(&self, level: i64) -> [Rational; 3] {
        let x = mat2_mul(&self.b, &mat2_transpose(&self.a));
        [&self.s2 * &x[0][0], &self.s2 * (&x[0][1] + &x[1][0]) / rat(2), &self.s2 * &x[1][1] * rat(level)]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DoubleCosetOp {
    pub label: OpLabel,
    pub q: i64,
    pub level: i64,
    pub reps: Vec<UpperRep>,
}

fn enumerate_params(
    params: &[(char, Range)],
    q: i64,
    acc: &mut Vec<(char, i64)>,
    out: &mut Vec<Vec<(char, i64)>>,
) {
    let Some(&(name, range)) = params.first() else {
        out.push(acc.clone());
        return;
    };
    let lookup = |c: char, acc: &Vec<(char, i64)>| acc.iter().find(|(v, _)| *v == c).map(|(_, x)| *x).expect("earlier parameter");
    let values: Vec<i64> = match range {
        Range::Mod => symmetric_residues(q).collect(),
        Range::ModSq => symmetric_residues(q * q).collect(),
        Range::NonzeroMod => symmetric_residues(q).filter(|v| v.rem_euclid(q) != 0).collect(),
        Range::Divisor => ntheory::divisors(q as u64).into_iter().map(|d| d as i64).collect(),
        Range::Cofactor(c) => vec![q / lookup(c, acc)],
        Range::ModParam(c) => symmetric_residues(lookup(c, acc)).collect(),
    };
    for v in values {
        acc.push((name, v));
        enumerate_params(&params[1..], q, acc, out);
        acc.pop();
    }
}

fn excluded(rule: Exclude, vals: &[(char, i64)], q: i64) -> bool {
    let get = |c: &char| vals.iter().find(|(v, _)| v == c).map(|(_, x)| *x).expect("parameter");
    match rule {
        Exclude::None => false,
        Exclude::NotAllZero(cs) => cs.iter().all(|c| get(c).rem_euclid(q) == 0),
        Exclude::ProductNonzero(cs) => cs.iter().map(get).fold(1i64, |p, x| (p * x).rem_euclid(q)) == 0,
        Exclude::Coprime(cs) => cs.iter().map(get).fold(0, ntheory::gcd) != 1,
    }
}

fn expand_templates(templates: &[Template], q: i64, level: i64, out: &mut Vec<UpperRep>) {
    for t in templates {
        let mut combos = Vec::new();
        enumerate_params(t.params, q, &mut Vec::new(), &mut combos);
        let s2 = match t.scale {
            Scale::One => Rational::one(),
            Scale::InvQ => frac(1, q),
            Scale::InvQ2 => frac(1, q * q),
            Scale::InvQ3 => frac(1, q * q * q),
        };
        for vals in combos {
            if excluded(t.exclude, &vals, q) {
                continue;
            }
            let m = |e: &[&str; 4]| -> Mat2 {
                let v: Vec<Rational> = e.iter().map(|x| eval_entry(x, &vals, q, level)).collect();
                [[v[0].clone(), v[1].clone()], [v[2].clone(), v[3].clone()]]
            };
            out.push(UpperRep { family: t.family, params: vals.clone(), s2: s2.clone(), a: m(&t.a), b: m(&t.b), d: m(&t.d) });
        }
    }
}

/// Right coset representatives of the labelled operator at parameter `q` and
/// level `N`. For `q | N` the lists of `T_N(q)` and `T*_N(q)` are extended by
/// the additional cosets.
pub fn reps_for(label: OpLabel, q: i64, level: i64) -> Result<DoubleCosetOp, HeckeError> {
    paramod::validate_level(level)?;
    let prime = q >= 2 && ntheory::is_prime(q as u64);
    let divides = level % q == 0;
    let mut reps = Vec::new();
    match label {
        OpLabel::Identity => expand_templates(IDENTITY, 1, level, &mut reps),
        OpLabel::FjRaise => {
            if q < 1 || !ntheory::is_squarefree(q as u64) {
                return Err(HeckeError::Parameter(q, "fjraise"));
            }
            expand_templates(FJ_RAISE, q, level, &mut reps);
        }
        _ if !prime => return Err(HeckeError::Parameter(q, label.name())),
        OpLabel::TN => {
            expand_templates(TN_BASE, q, level, &mut reps);
            if divides {
                expand_templates(TN_EXTRA, q, level, &mut reps);
            }
        }
        OpLabel::TStarN => {
            expand_templates(TSTAR_BASE, q, level, &mut reps);
            if divides {
                expand_templates(TSTAR_EXTRA, q, level, &mut reps);
            }
        }
        OpLabel::JDiag => {
            if divides {
                return Err(HeckeError::Unsupported { label: label.name(), q, level });
            }
            expand_templates(&TSTAR_BASE[1..4], q, level, &mut reps);
        }
        OpLabel::L1Diag => expand_templates(L1_DIAG, q, level, &mut reps),
        OpLabel::USum => expand_templates(U_SUM, q, level, &mut reps),
    }
    Ok(DoubleCosetOp { label, q: if label == OpLabel::Identity { 1 } else { q }, level, reps })
}

/// The number of right cosets the operator is expected to have.
pub fn expected_count(label: OpLabel, q: i64, level: i64) -> usize {
    let q = q as usize;
    let divides = (level as usize).is_multiple_of(q);
    match label {
        OpLabel::Identity => 1,
        OpLabel::TN => 1 + q + q * q + q * q * q + if divides { q * q - 1 } else { 0 },
        OpLabel::TStarN => {
            let base = q.pow(4) + q.pow(3) + q.pow(2) + q;
            let p = q - 1;
            base + if divides { p * p + q * p * p + p + q * p + q * q * p + q.pow(3) * p } else { 0 }
        }
        OpLabel::FjRaise => ntheory::factorize(q as u64).iter().map(|(p, _)| (*p + 1) as usize).product(),
        OpLabel::JDiag => q.pow(3) + q.pow(2),
        OpLabel::L1Diag => 1,
        OpLabel::USum => q,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SanityReport {
    pub passed: bool,
    pub cardinality: usize,
    pub expected: usize,
    pub invariant_failures: Vec<usize>,
    pub equivalent_pairs: Vec<(usize, usize)>,
}

/// `s_i/s_j (A_i B_i; 0 D_i)(A_j B_j; 0 D_j)^(-1)` when the scalar is rational.
fn quotient(ri: &UpperRep, rj: &UpperRep) -> Option<Mat4> {
    let scale = rational_sqrt(&(&ri.s2 / &rj.s2))?;
    let ainv = mat2_inverse(&rj.a)?;
    let top = crate::matrix::mat2_scale(&mat2_mul(&ri.a, &ainv), &scale);
    // Cheap rejection on the upper-left block of a Jacobi element.
    let unit = |x: &Rational| x.is_one() || (-x).is_one();
    if !(top[0][1].is_zero() && unit(&top[1][1]) && is_integral(&top[0][0]) && is_integral(&top[1][0])) {
        return None;
    }
    let dinv = mat2_inverse(&rj.d)?;
    let zero = crate::matrix::mat2_zero();
    let binv = crate::matrix::mat2_scale(&mat2_mul(&mat2_mul(&ainv, &rj.b), &dinv), &rat(-1));
    let inv = mat4_blocks(&ainv, &binv, &zero, &dinv);
    Some(mat4_scale(&mat4_mul(&ri.unscaled(), &inv), &scale))
}

/// Checks the symplectic invariants of each representative, pairwise
/// inequivalence modulo the Jacobi group, and the cardinality.
pub fn coset_sanity(op: &DoubleCosetOp) -> SanityReport {
    let invariant_failures: Vec<usize> =
        op.reps.iter().enumerate().filter(|(_, r)| !r.invariants_hold()).map(|(i, _)| i).collect();
    let n = op.reps.len();
    let equivalent_pairs: Vec<(usize, usize)> = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            let reps = &op.reps;
            (i + 1..n).filter_map(move |j| {
                quotient(&reps[i], &reps[j]).filter(|m| is_jacobi_member(m, op.level)).map(|_| (i, j))
            })
        })
        .collect();
    let expected = expected_count(op.label, op.q, op.level);
    SanityReport {
        passed: invariant_failures.is_empty() && equivalent_pairs.is_empty() && n == expected,
        cardinality: n,
        expected,
        invariant_failures,
        equivalent_pairs,
    }
}

#[derive(Serialize)]
struct RepView {
    family: &'static str,
    params: BTreeMap<String, i64>,
    s2: String,
    #[serde(rename = "A")]
    a: [[String; 2]; 2],
    #[serde(rename = "B")]
    b: [[String; 2]; 2],
    #[serde(rename = "D")]
    d: [[String; 2]; 2],
}

#[derive(Serialize)]
struct OpView {
    label: &'static str,
    q: i64,
    level: i64,
    reps: Vec<RepView>,
}

/// The representative table as JSON, entries as `"num/den"` strings.
pub fn op_to_json(op: &DoubleCosetOp) -> serde_json::Value {
    let s = |m: &Mat2| m.clone().map(|row| row.map(|x| format_rational(&x)));
    let view = OpView {
        label: op.label.name(),
        q: op.q,
        level: op.level,
        reps: op
            .reps
            .iter()
            .map(|r| RepView {
                family: r.family,
                params: r.params.iter().map(|(c, v)| (c.to_string(), *v)).collect(),
                s2: format_rational(&r.s2),
                a: s(&r.a),
                b: s(&r.b),
                d: s(&r.d),
            })
            .collect(),
    };
    serde_json::to_value(view).expect("serializable")
}

/// An integer 3x3 matrix over a common positive denominator.
#[derive(Debug, Clone)]
struct IntMap {
    num: [[i64; 3]; 3],
    den: i64,
}

impl IntMap {
    fn new(m: &[[Rational; 3]; 3]) -> Self {
        let den = m.iter().flatten().fold(1i64, |acc, x| {
            num_integer::lcm(acc, ntheory::to_i64(x.denom()).expect("small denominator"))
        });
        let num = std::array::from_fn(|i| {
            std::array::from_fn(|j| ntheory::to_i64((&m[i][j] * rat(den)).numer()).expect("small entry"))
        });
        Self { num, den }
    }

    fn apply(&self, v: [i64; 3]) -> [i64; 3] {
        std::array::from_fn(|i| self.num[i][0] * v[0] + self.num[i][1] * v[1] + self.num[i][2] * v[2])
    }
}

/// Arithmetic in `Q(zeta_M)` through the basis obtained from the prime-power
/// factors of `M` (the ring is their tensor product).
#[derive(Debug, Clone)]
struct Cyclotomic {
    m: i64,
    /// `(p, p^a, M/p^a, (M/p^a)^(-1) mod p^a)` per prime power `p^a || M`.
    factors: Vec<(i64, i64, i64, i64)>,
    strides: Vec<usize>,
}

fn mod_inverse(a: i64, m: i64) -> i64 {
    (0..m).find(|x| (a * x).rem_euclid(m) == 1 % m).expect("coprime")
}

impl Cyclotomic {
    fn new(m: i64) -> Self {
        let mut factors = Vec::new();
        for (p, e) in ntheory::factorize(m as u64) {
            let pa = (p as i64).pow(e);
            let co = m / pa;
            factors.push((p as i64, pa, co, mod_inverse(co % pa, pa)));
        }
        let mut strides = Vec::new();
        let mut s = 1usize;
        for f in factors.iter().rev() {
            strides.push(s);
            s *= f.1 as usize;
        }
        strides.reverse();
        Self { m, factors, strides }
    }

    fn len(&self) -> usize {
        self.m as usize
    }

    /// Slot of `zeta_M^e` in the tensor coordinates.
    fn slot(&self, e: i64) -> usize {
        let e = e.rem_euclid(self.m);
        self.factors.iter().zip(&self.strides).map(|(&(_, pa, _, inv), &s)| ((e * inv).rem_euclid(pa)) as usize * s).sum()
    }

    /// Rewrites a coefficient vector so that along every prime-power axis
    /// only exponents below `phi(p^a)` remain; this is the unique
    /// representation in the power basis.
    fn reduce(&self, v: &mut [i64]) {
        for (&(p, pa, _, _), &stride) in self.factors.iter().zip(&self.strides) {
            let block = (pa / p) as usize;
            let top = (p - 1) as usize * block;
            let outer = self.len() / (pa as usize * stride);
            for o in 0..outer {
                for inner in 0..stride {
                    let base = o * pa as usize * stride + inner;
                    for i in 0..block {
                        let c = v[base + (top + i) * stride];
                        if c != 0 {
                            v[base + (top + i) * stride] = 0;
                            for j in 0..(p - 1) as usize {
                                v[base + (j * block + i) * stride] -= c;
                            }
                        }
                    }
                }
            }
        }
    }
}

/// Representatives sharing `(s^2, A, D)`; they differ only in `B`, hence in
/// the phase.
struct Family {
    fwd: IntMap,
    back: IntMap,
    back_rational: [[Rational; 3]; 3],
    weight: Rational,
    /// Integer phase coefficients, exponents of `zeta_M`.
    phases: Vec<[i64; 3]>,
    a_inv: Mat2,
    s2: Rational,
}

fn build_families(op: &DoubleCosetOp, k: i64) -> (Vec<Family>, i64) {
    let level = op.level;
    let mut groups: Vec<(&UpperRep, Vec<&UpperRep>)> = Vec::new();
    for r in &op.reps {
        match groups.iter_mut().find(|(h, _)| h.s2 == r.s2 && h.a == r.a && h.d == r.d) {
            Some((_, v)) => v.push(r),
            None => groups.push((r, vec![r])),
        }
    }
    let mut modulus = 1i64;
    for r in &op.reps {
        for c in r.phase_form(level) {
            modulus = num_integer::lcm(modulus, ntheory::to_i64(c.denom()).expect("small denominator"));
        }
    }
    let families = groups
        .into_iter()
        .map(|(head, members)| {
            let a_inv = mat2_inverse(&head.a).expect("invertible A");
            let fwd = UpperRep::index_map(&head.s2, &head.a, level);
            let back_rational = UpperRep::index_map(&head.s2.recip(), &a_inv, level);
            let phases = members
                .iter()
                .map(|r| {
                    r.phase_form(level).map(|c| ntheory::to_i64((c * rat(modulus)).numer()).expect("small phase").rem_euclid(modulus))
                })
                .collect();
            Family {
                fwd: IntMap::new(&fwd),
                back: IntMap::new(&back_rational),
                back_rational,
                weight: head.weight_factor(k),
                phases,
                a_inv,
                s2: head.s2.clone(),
            }
        })
        .collect();
    (families, modulus)
}

impl Family {
    /// The unique index mapped to `key / den` by this family, if integral.
    fn preimage(&self, key: [i64; 3], den: i64) -> Option<FourierIndex> {
        let v = self.back.apply(key);
        let total = self.back.den * den;
        if v.iter().all(|x| x % total == 0) {
            Some(FourierIndex::new(v[0] / total, v[1] / total, v[2] / total))
        } else {
            None
        }
    }

    /// Upper bounds for `n` and `m` over the preimage of an output box.
    fn input_bounds(&self, out: ExpansionBox, level: i64) -> (i64, i64) {
        let (a, b) = (rat(out.n_max), rat(out.m_max));
        let root = rat(isqrt(out.n_max * out.m_max * level) + 1);
        let nr = rat(level);
        let bound = |v0: &Rational, v1: &Rational| -> Rational {
            (&a * v0 * v0 + &b * &nr * v1 * v1 + rat(2) * &root * (v0 * v1).abs()) / &self.s2
        };
        let nb = bound(&self.a_inv[0][0], &self.a_inv[1][0]).floor();
        let mb = (bound(&self.a_inv[0][1], &self.a_inv[1][1]) / &nr).floor();
        let _ = &self.back_rational;
        (ntheory::to_i64(nb.numer()).expect("bound"), ntheory::to_i64(mb.numer()).expect("bound"))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct EngineStats {
    pub representatives: usize,
    pub families: usize,
    pub modulus: i64,
    pub contributions: usize,
    pub integral_indices: usize,
    pub fractional_checked: usize,
    pub fractional_undetermined: usize,
    pub fractional_residues: usize,
    pub irrational_totals: usize,
}

#[derive(Debug, Clone)]
pub struct Application {
    pub expansion: ParamodularExpansion,
    pub stats: EngineStats,
    /// Fractional indices `(n', r', m')` with a nonzero total, as strings.
    pub residues: Vec<String>,
    pub irrational: Vec<FourierIndex>,
}

fn determined(families: &[Family], src: &dyn CoefficientSource, key: [i64; 3], den: i64) -> bool {
    families.iter().all(|f| match f.preimage(key, den) {
        Some(t) if t.is_semidefinite(src.level()) => src.coeff_at(t).is_some(),
        _ => true,
    })
}

/// Applies the operator, reporting but not rejecting non-cancelling
/// fractional indices and irrational totals.
pub fn apply_op_unchecked(
    src: &dyn CoefficientSource,
    op: &DoubleCosetOp,
    target: Option<ExpansionBox>,
) -> Result<Application, HeckeError> {
    let level = src.level();
    if op.level != level {
        return Err(HeckeError::LevelMismatch { op: op.level, form: level });
    }
    let k = src.weight();
    let (families, modulus) = build_families(op, k);
    let cyc = Cyclotomic::new(modulus);
    let out_box = match target {
        Some(bx) => {
            if let Some(t) = bx.indices(level).into_iter().find(|t| !determined(&families, src, [t.n, t.r, t.m], 1)) {
                return Err(HeckeError::Undetermined(t));
            }
            bx
        }
        None => largest_box(level, src.caps(), |t| determined(&families, src, [t.n, t.r, t.m], 1))
            .ok_or(HeckeError::EmptyBox)?,
    };
    let den = families.iter().fold(1i64, |acc, f| num_integer::lcm(acc, f.fwd.den));

    type Acc = HashMap<[i64; 3], Vec<Rational>>;
    let tasks: Vec<(usize, i64)> = families
        .iter()
        .enumerate()
        .flat_map(|(i, f)| {
            let (_, mb) = f.input_bounds(out_box, level);
            (0..=mb).map(move |m| (i, m))
        })
        .collect();
    let (acc, contributions) = tasks
        .into_par_iter()
        .fold(
            || (Acc::new(), 0usize),
            |(mut acc, mut count), (fi, m)| {
                let fam = &families[fi];
                let (nb, _) = fam.input_bounds(out_box, level);
                let scale = den / fam.fwd.den;
                let lim_n = out_box.n_max * fam.fwd.den;
                let lim_m = out_box.m_max * fam.fwd.den;
                let mut cnt = vec![0i64; cyc.len()];
                for n in 0..=nb {
                    let rb = isqrt(4 * n * m * level);
                    let (lo, hi) = r_window(&fam.fwd, n, m, lim_n, lim_m, rb);
                    for r in lo..=hi {
                        let img = fam.fwd.apply([n, r, m]);
                        if img[0] > lim_n || img[2] > lim_m {
                            continue;
                        }
                        cnt.iter_mut().for_each(|x| *x = 0);
                        for ph in &fam.phases {
                            cnt[cyc.slot(ph[0] * n + ph[1] * r + ph[2] * m)] += 1;
                        }
                        cyc.reduce(&mut cnt);
                        if cnt.iter().all(|x| *x == 0) {
                            continue;
                        }
                        let Some(alpha) = src.coeff_at(FourierIndex::new(n, r, m)) else { continue };
                        if alpha.is_zero() {
                            continue;
                        }
                        count += 1;
                        let c = &alpha * &fam.weight;
                        let key = [img[0] * scale, img[1] * scale, img[2] * scale];
                        let slot = acc.entry(key).or_insert_with(|| vec![Rational::zero(); cyc.len()]);
                        for (s, &x) in slot.iter_mut().zip(&cnt) {
                            if x != 0 {
                                *s += &c * rat(x);
                            }
                        }
                    }
                }
                (acc, count)
            },
        )
        .reduce(
            || (Acc::new(), 0),
            |(mut a, ca), (b, cb)| {
                for (key, v) in b {
                    match a.get_mut(&key) {
                        Some(w) => w.iter_mut().zip(v).for_each(|(x, y)| *x += y),
                        None => {
                            a.insert(key, v);
                        }
                    }
                }
                (a, ca + cb)
            },
        );

    let mut stats = EngineStats {
        representatives: op.reps.len(),
        families: families.len(),
        modulus,
        contributions,
        ..EngineStats::default()
    };
    let constant = cyc.slot(0);
    let mut values = Vec::new();
    let mut residues = Vec::new();
    let mut irrational = Vec::new();
    let mut keys: Vec<&[i64; 3]> = acc.keys().collect();
    keys.sort_by_key(|k| (k[2], k[0], k[1]));
    for key in keys {
        let v = &acc[key];
        if key.iter().all(|x| x % den == 0) {
            let t = FourierIndex::new(key[0] / den, key[1] / den, key[2] / den);
            stats.integral_indices += 1;
            if v.iter().enumerate().any(|(i, x)| i != constant && !x.is_zero()) {
                stats.irrational_totals += 1;
                irrational.push(t);
            }
            values.push((t, v[constant].clone()));
        } else if determined(&families, src, *key, den) {
            stats.fractional_checked += 1;
            if v.iter().any(|x| !x.is_zero()) {
                stats.fractional_residues += 1;
                let g = |x: i64| format_rational(&frac(x, den));
                residues.push(format!("({}, {}, {})", g(key[0]), g(key[1]), g(key[2])));
            }
        } else {
            stats.fractional_undetermined += 1;
        }
    }
    let expansion = ParamodularExpansion::from_coeffs(k, level, out_box, values)?;
    Ok(Application { expansion, stats, residues, irrational })
}

/// `r` range where the image can still lie in the output box, intersected
/// with `|r| <= rb`.
fn r_window(map: &IntMap, n: i64, m: i64, lim_n: i64, lim_m: i64, rb: i64) -> (i64, i64) {
    let (mut lo, mut hi) = (-rb, rb);
    for (row, lim) in [(0, lim_n), (2, lim_m)] {
        let c = map.num[row][1];
        let rest = lim - map.num[row][0] * n - map.num[row][2] * m;
        if c > 0 {
            hi = hi.min(rest.div_euclid(c));
        } else if c < 0 {
            lo = lo.max(-((rest).div_euclid(-c)));
        } else if rest < 0 {
            return (1, 0);
        }
    }
    (lo, hi)
}

/// Applies the operator; fractional residues and irrational totals are
/// errors.
pub fn apply_op(
    src: &dyn CoefficientSource,
    op: &DoubleCosetOp,
    target: Option<ExpansionBox>,
) -> Result<Application, HeckeError> {
    let app = apply_op_unchecked(src, op, target)?;
    if let Some(first) = app.residues.first() {
        return Err(HeckeError::FractionalResidue { count: app.stats.fractional_residues, first: first.clone() });
    }
    if let Some(first) = app.irrational.first() {
        return Err(HeckeError::Irrational { count: app.stats.irrational_totals, first: *first });
    }
    Ok(app)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Eigen {
    Value(Rational),
    NotEigen { index: FourierIndex, expected: Rational, actual: Rational },
}

/// Compares `f | op` with `f` on the output box. The candidate eigenvalue is
/// read at the first index (in `(m, n, r)` order) where `f` is nonzero.
pub fn eigenvalue_of(
    src: &dyn CoefficientSource,
    op: &DoubleCosetOp,
    target: Option<ExpansionBox>,
) -> Result<(Eigen, Application), HeckeError> {
    let app = apply_op(src, op, target)?;
    let g = &app.expansion;
    let indices: Vec<(FourierIndex, Rational)> = g
        .expansion_box()
        .indices(g.level())
        .into_iter()
        .filter_map(|t| src.coeff_at(t).map(|v| (t, v)))
        .collect();
    let (t0, f0) = indices.iter().find(|(_, v)| !v.is_zero()).ok_or(HeckeError::ZeroForm)?;
    let lambda = g.coeff(*t0) / f0;
    for (t, v) in &indices {
        let expected = &lambda * v;
        let actual = g.coeff(*t);
        if expected != actual {
            return Ok((Eigen::NotEigen { index: *t, expected, actual }, app));
        }
    }
    Ok((Eigen::Value(lambda), app))
}

/// Smallest input box that determines `out` for `op`, for box-shaped inputs.
pub fn required_input_box(op: &DoubleCosetOp, k: i64, out: ExpansionBox) -> ExpansionBox {
    let (families, _) = build_families(op, k);
    let level = op.level;
    let mut need = ExpansionBox::new(0, 0);
    for t in out.indices(level) {
        for f in &families {
            if let Some(s) = f.preimage([t.n, t.r, t.m], 1) {
                need.n_max = need.n_max.max(s.n);
                need.m_max = need.m_max.max(s.m);
            }
        }
    }
    need
}

/// Largest discriminant `4nmN - r^2` among preimages of indices in `out`.
/// The discriminant scales by `(s^2 det A)^(-2)` under a representative.
pub fn required_discriminant(op: &DoubleCosetOp, out: ExpansionBox) -> i64 {
    let growth = op
        .reps
        .iter()
        .map(|r| (&r.s2 * mat2_det(&r.a)).pow(-2))
        .max()
        .unwrap_or_else(Rational::one);
    let top = rat(4 * out.n_max * out.m_max * op.level) * growth;
    ntheory::to_i64(&top.floor().to_integer()).expect("small discriminant")
}

/// Truncation of a Jacobi form of index `N` for which every coefficient of
/// discriminant up to `disc` is reachable through periodicity.
pub fn jacobi_bound(disc: i64, level: i64) -> i64 {
    disc / (4 * level) + level + 1
}

/// The coefficient families of the elliptic Hecke operators acting through
/// the two `SL_2` factors, indexed by `(n, r, m)` for the term
/// `e(n tau + r z / sqrt(p) + mN tau')`. The common factor `p^(k/2 - 1)` is
/// left out of both.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoefficientFamily {
    pub p: i64,
    pub bx: ExpansionBox,
    pub coeffs: BTreeMap<FourierIndex, Rational>,
}

fn family_indices(bx: ExpansionBox, p: i64, level: i64) -> Vec<FourierIndex> {
    let mut out = Vec::new();
    for m in 0..=bx.m_max {
        for n in 0..=bx.n_max {
            let b = isqrt(4 * p * n * m * level);
            for r in -b..=b {
                out.push(FourierIndex::new(n, r, m));
            }
        }
    }
    out
}

fn scaled(f: &ParamodularExpansion, n: i64, r: i64, m: i64, dn: i64, dr: i64, dm: i64) -> Rational {
    if n % dn != 0 || r % dr != 0 || m % dm != 0 {
        return Rational::zero();
    }
    f.known(n / dn, r / dr, m / dm).expect("index inside the family box")
}

fn coefficient_family<F>(f: &ParamodularExpansion, p: i64, term: F) -> Result<CoefficientFamily, HeckeError>
where
    F: Fn(i64, i64, i64, &Rational) -> Rational,
{
    if !(p >= 2 && ntheory::is_prime(p as u64)) {
        return Err(HeckeError::Parameter(p, "t_up/t_down"));
    }
    let bx = f.expansion_box();
    let fb = ExpansionBox::new(bx.n_max / p, bx.m_max / p);
    let w = big_rat(ipow(p, (f.weight() - 1) as u32));
    let coeffs = family_indices(fb, p, f.level())
        .into_iter()
        .map(|t| (t, term(t.n, t.r, t.m, &w)))
        .filter(|(_, v)| !v.is_zero())
        .collect();
    Ok(CoefficientFamily { p, bx: fb, coeffs })
}

/// `alpha(pn, r, m) + p^(k-1) alpha(n/p, r/p, m)`.
pub fn t_up(f: &ParamodularExpansion, p: i64) -> Result<CoefficientFamily, HeckeError> {
    coefficient_family(f, p, |n, r, m, w| scaled(f, p * n, r, m, 1, 1, 1) + w * scaled(f, n, r, m, p, p, 1))
}

/// `alpha(n, r, pm) + p^(k-1) alpha(n, r/p, m/p)`.
pub fn t_down(f: &ParamodularExpansion, p: i64) -> Result<CoefficientFamily, HeckeError> {
    coefficient_family(f, p, |n, r, m, w| scaled(f, n, r, p * m, 1, 1, 1) + w * scaled(f, n, r, m, 1, p, p))
}

impl CoefficientFamily {
    pub fn coeff(&self, t: FourierIndex) -> Rational {
        self.coeffs.get(&t).cloned().unwrap_or_else(Rational::zero)
    }

    /// First index of the common box where the two families differ.
    pub fn first_difference(&self, other: &Self, level: i64) -> Option<FourierIndex> {
        let bx = self.bx.intersect(&other.bx);
        family_indices(bx, self.p, level).into_iter().find(|t| self.coeff(*t) != other.coeff(*t))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jacobi::{index_raise, jacobi_eisenstein_index1};
    use crate::maass::{gritsenko_lift, LiftSource};
    use crate::paramod::JacobiSlice;

    fn eis_phi(k: i64, level: i64, n_max: i64) -> crate::jacobi::JacobiExpansion {
        let e = jacobi_eisenstein_index1(k, n_max * level).unwrap();
        index_raise(&e, level).unwrap()
    }

    #[test]
    fn entry_parser() {
        let v = [('a', 2), ('b', -1), ('c', 3), ('d', 4), ('u', 2)];
        assert_eq!(eval_entry("bd+qc/N", &v, 5, 10), rat(-4) + frac(15, 10));
        assert_eq!(eval_entry("-ad+qb", &v, 5, 10), rat(-8 - 5));
        assert_eq!(eval_entry("ub^2", &v, 5, 10), rat(2));
        assert_eq!(eval_entry("u/qN", &v, 5, 10), frac(2, 50));
        assert_eq!(eval_entry("q^2", &v, 3, 1), rat(9));
        assert_eq!(eval_entry("-qd", &v, 3, 1), rat(-12));
        assert_eq!(eval_entry("0", &v, 3, 1), rat(0));
    }

    #[test]
    fn counts_match_closed_forms() {
        for q in [2, 3, 5] {
            for level in [1, 2, 3, 5, 6] {
                for label in [OpLabel::TN, OpLabel::TStarN, OpLabel::L1Diag, OpLabel::USum] {
                    let op = reps_for(label, q, level).unwrap();
                    assert_eq!(op.reps.len(), expected_count(label, q, level), "{label} q={q} N={level}");
                }
                if level % q != 0 {
                    assert_eq!(reps_for(OpLabel::JDiag, q, level).unwrap().reps.len(), q as usize * q as usize * (q as usize + 1));
                } else {
                    assert!(reps_for(OpLabel::JDiag, q, level).is_err());
                }
            }
        }
        assert_eq!(reps_for(OpLabel::FjRaise, 6, 1).unwrap().reps.len(), 12);
        assert!(reps_for(OpLabel::TN, 4, 1).is_err());
        assert!(reps_for(OpLabel::FjRaise, 4, 1).is_err());
    }

    #[test]
    fn representatives_are_scaled_symplectic() {
        for (label, q, level) in [(OpLabel::TN, 3, 1), (OpLabel::TN, 3, 3), (OpLabel::TStarN, 2, 2), (OpLabel::TStarN, 3, 1), (OpLabel::FjRaise, 6, 1)] {
            let op = reps_for(label, q, level).unwrap();
            assert!(op.reps.iter().all(UpperRep::invariants_hold), "{label} {q} {level}");
        }
    }

    #[test]
    fn sanity_and_duplicates() {
        let op = reps_for(OpLabel::TN, 2, 1).unwrap();
        let report = coset_sanity(&op);
        assert!(report.passed, "{report:?}");
        assert_eq!(report.cardinality, 15);
        let mut dup = op.clone();
        dup.reps.push(dup.reps[3].clone());
        let bad = coset_sanity(&dup);
        assert!(!bad.passed);
        assert_eq!(bad.equivalent_pairs, vec![(3, 15)]);
    }

    #[test]
    fn single_representative_index_map() {
        // s^2 = 1/q^2, A = [[q^2, 0], [-qd, q]]: (n, r, m) -> (nq^2 - rqd + mNd^2, qr - 2mNd, m).
        let (q, d, level) = (3i64, 2i64, 2i64);
        let a = [[rat(q * q), rat(0)], [rat(-q * d), rat(q)]];
        let map = IntMap::new(&UpperRep::index_map(&frac(1, q * q), &a, level));
        let (n, r, m) = (2, 1, 3);
        let img = map.apply([n, r, m]);
        let den = map.den;
        assert_eq!([img[0] / den, img[1] / den, img[2] / den], [n * q * q - r * q * d + m * level * d * d, q * r - 2 * m * level * d, m]);
    }

    #[test]
    fn identity_operator_is_identity() {
        let phi = eis_phi(4, 2, 12);
        let f = gritsenko_lift(&phi, 2, ExpansionBox::new(3, 3)).unwrap();
        let app = apply_op(&f, &reps_for(OpLabel::Identity, 1, 2).unwrap(), None).unwrap();
        assert_eq!(app.expansion, f);
    }

    #[test]
    fn cyclotomic_reduction() {
        for m in [1, 2, 4, 5, 6, 9, 12, 25, 30] {
            let cyc = Cyclotomic::new(m);
            let mut v = vec![0i64; cyc.len()];
            for e in 0..m {
                v[cyc.slot(e)] += 1;
            }
            cyc.reduce(&mut v);
            let expect_const = if m == 1 { 1 } else { 0 };
            assert_eq!(v[cyc.slot(0)], expect_const, "m={m}");
            assert!(v.iter().enumerate().all(|(i, x)| i == cyc.slot(0) || *x == 0), "m={m}");
            if m > 2 {
                let mut w = vec![0i64; cyc.len()];
                w[cyc.slot(1)] += 1;
                cyc.reduce(&mut w);
                assert!(w.iter().any(|x| *x != 0));
            }
        }
        // zeta_6 + zeta_6^5 = 1
        let cyc = Cyclotomic::new(6);
        let mut v = vec![0i64; 6];
        v[cyc.slot(1)] += 1;
        v[cyc.slot(5)] += 1;
        cyc.reduce(&mut v);
        assert_eq!(v[cyc.slot(0)], 1);
        assert_eq!(v.iter().filter(|x| **x != 0).count(), 1);
    }

    #[test]
    fn eisenstein_eigenvalue_small() {
        let (k, level, q) = (4, 1, 2);
        let phi = eis_phi(k, level, 40).scale(&crate::maass::constant_ratio(k).unwrap());
        let src = LiftSource::new(phi, level).unwrap();
        let op = reps_for(OpLabel::TN, q, level).unwrap();
        let (eigen, app) = eigenvalue_of(&src, &op, Some(ExpansionBox::new(2, 2))).unwrap();
        assert_eq!(eigen, Eigen::Value(frac(45, 2)));
        assert_eq!(app.stats.fractional_residues, 0);
        assert_eq!(app.stats.irrational_totals, 0);
    }

    #[test]
    fn jacobi_eigenvalue_small() {
        let (k, level, q) = (4, 1, 2);
        let src = JacobiSlice::periodic(eis_phi(k, level, 12), level, 1).unwrap();
        let op = reps_for(OpLabel::JDiag, q, level).unwrap();
        let (eigen, _) = eigenvalue_of(&src, &op, Some(ExpansionBox::new(2, 1))).unwrap();
        assert_eq!(eigen, Eigen::Value(frac(33, 2)));
    }

    #[test]
    fn box_input_matches_lazy_input() {
        let (k, level, q) = (4, 2, 3);
        let phi = eis_phi(k, level, 200);
        let op = reps_for(OpLabel::TN, q, level).unwrap();
        let out = ExpansionBox::new(1, 1);
        let need = required_input_box(&op, k, out);
        let f = gritsenko_lift(&phi, level, need).unwrap();
        let a = apply_op(&f, &op, Some(out)).unwrap().expansion;
        let b = apply_op(&LiftSource::new(phi, level).unwrap(), &op, Some(out)).unwrap().expansion;
        assert_eq!(a, b);
        assert!(matches!(apply_op(&f.restrict(ExpansionBox::new(need.n_max - 1, need.m_max)), &op, Some(out)), Err(HeckeError::Undetermined(_))));
    }

    #[test]
    fn t_up_equals_t_down_on_lifts() {
        let phi = eis_phi(6, 3, 36);
        let f = gritsenko_lift(&phi, 3, ExpansionBox::new(6, 6)).unwrap();
        for p in [2, 3, 5] {
            let up = t_up(&f, p).unwrap();
            let down = t_down(&f, p).unwrap();
            assert_eq!(up.first_difference(&down, 3), None);
            assert!(!up.coeffs.is_empty());
        }
        let z = ParamodularExpansion::zero(4, 1, ExpansionBox::new(4, 4)).unwrap();
        assert!(t_up(&z, 2).unwrap().coeffs.is_empty());
    }
}
