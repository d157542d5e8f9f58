//! JSON files for expansions. Every index of the truncation is written, one
//! coefficient per line, in `(m, n, r)` order; files written by this module
//! read back to an identical value and re-emit byte for byte.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::Deserialize;
use thiserror::Error;

use crate::jacobi::{JacobiError, JacobiExpansion};
use crate::ntheory::{format_rational, parse_rational, Rational};
use crate::paramod::{ExpansionBox, FourierIndex, ParamodError, ParamodularExpansion};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Schema(String),
    #[error(transparent)]
    Paramod(#[from] ParamodError),
    #[error(transparent)]
    Jacobi(#[from] JacobiError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Document {
    Paramodular(ParamodularExpansion),
    Jacobi(JacobiExpansion),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCoeff {
    n: i64,
    r: i64,
    #[serde(default)]
    m: Option<i64>,
    c: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDocument {
    weight: i64,
    #[serde(default)]
    level: Option<i64>,
    #[serde(default)]
    index: Option<i64>,
    nmax: i64,
    #[serde(default)]
    mmax: Option<i64>,
    coeffs: Vec<RawCoeff>,
}

fn coefficient(raw: &RawCoeff) -> Result<Rational, IoError> {
    parse_rational(&raw.c).ok_or_else(|| IoError::Schema(format!("bad coefficient {:?} at n={} r={}", raw.c, raw.n, raw.r)))
}

pub fn paramodular_to_json(f: &ParamodularExpansion) -> String {
    let bx = f.expansion_box();
    let mut s = format!(
        "{{\"weight\":{},\"level\":{},\"nmax\":{},\"mmax\":{},\"coeffs\":[",
        f.weight(),
        f.level(),
        bx.n_max,
        bx.m_max
    );
    for (i, t) in bx.indices(f.level()).into_iter().enumerate() {
        let sep = if i == 0 { "\n" } else { ",\n" };
        let _ = write!(s, "{sep}{{\"n\":{},\"r\":{},\"m\":{},\"c\":\"{}\"}}", t.n, t.r, t.m, format_rational(&f.coeff(t)));
    }
    s.push_str("\n]}\n");
    s
}

pub fn jacobi_to_json(phi: &JacobiExpansion) -> String {
    let mut s = format!("{{\"weight\":{},\"index\":{},\"nmax\":{},\"coeffs\":[", phi.weight(), phi.index(), phi.n_max());
    for (i, (n, r)) in phi.indices().into_iter().enumerate() {
        let sep = if i == 0 { "\n" } else { ",\n" };
        let _ = write!(s, "{sep}{{\"n\":{n},\"r\":{r},\"c\":\"{}\"}}", format_rational(&phi.coeff(n, r)));
    }
    s.push_str("\n]}\n");
    s
}

pub fn document_to_json(doc: &Document) -> String {
    match doc {
        Document::Paramodular(f) => paramodular_to_json(f),
        Document::Jacobi(phi) => jacobi_to_json(phi),
    }
}

/// Reads either kind of file; a Jacobi file is recognized by its `index` key.
/// Indices missing from the file have coefficient zero; repeated indices are
/// rejected.
pub fn read_document(text: &str) -> Result<Document, IoError> {
    let raw: RawDocument = serde_json::from_str(text)?;
    match (raw.level, raw.index, raw.mmax) {
        (Some(level), None, Some(mmax)) => {
            let mut seen = BTreeSet::new();
            let mut coeffs = Vec::with_capacity(raw.coeffs.len());
            for c in &raw.coeffs {
                let m = c.m.ok_or_else(|| IoError::Schema(format!("coefficient at n={} r={} lacks m", c.n, c.r)))?;
                let t = FourierIndex::new(c.n, c.r, m);
                if !seen.insert(t) {
                    return Err(IoError::Schema(format!("repeated index {t}")));
                }
                coeffs.push((t, coefficient(c)?));
            }
            Ok(Document::Paramodular(ParamodularExpansion::from_coeffs(
                raw.weight,
                level,
                ExpansionBox::new(raw.nmax, mmax),
                coeffs,
            )?))
        }
        (None, Some(index), None) => {
            let mut seen = BTreeSet::new();
            let mut coeffs = Vec::with_capacity(raw.coeffs.len());
            for c in &raw.coeffs {
                if c.m.is_some() {
                    return Err(IoError::Schema("Jacobi coefficients carry no m".into()));
                }
                if !seen.insert((c.n, c.r)) {
                    return Err(IoError::Schema(format!("repeated index ({}, {})", c.n, c.r)));
                }
                if c.r * c.r > 4 * c.n * index {
                    return Err(IoError::Schema(format!("index ({}, {}) violates r^2 <= 4nM", c.n, c.r)));
                }
                coeffs.push(((c.n, c.r), coefficient(c)?));
            }
            Ok(Document::Jacobi(JacobiExpansion::from_coeffs(raw.weight, index, raw.nmax, coeffs)?))
        }
        _ => Err(IoError::Schema("expected either level and mmax, or index".into())),
    }
}

pub fn read_paramodular(text: &str) -> Result<ParamodularExpansion, IoError> {
    match read_document(text)? {
        Document::Paramodular(f) => Ok(f),
        Document::Jacobi(_) => Err(IoError::Schema("expected a paramodular expansion, found a Jacobi expansion".into())),
    }
}

pub fn read_jacobi(text: &str) -> Result<JacobiExpansion, IoError> {
    match read_document(text)? {
        Document::Jacobi(phi) => Ok(phi),
        Document::Paramodular(_) => Err(IoError::Schema("expected a Jacobi expansion, found a paramodular expansion".into())),
    }
}
