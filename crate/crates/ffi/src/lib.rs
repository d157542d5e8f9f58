//! C ABI over the `paramodular` crate.
//!
//! Every function returns a [`PmStatus`]. Results come back through out
//! pointers; on failure the message is available from
//! [`pm_last_error_message`] on the same thread. Handles and strings returned
//! by this library are released with the matching `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use paramodular::eisenstein::siegel_eisenstein;
use paramodular::hecke::{apply_op, eigenvalue_of, reps_for, Eigen, HeckeError, OpLabel};
use paramodular::io::{jacobi_to_json, paramodular_to_json, read_jacobi, read_paramodular};
use paramodular::jacobi::JacobiExpansion;
use paramodular::maass::{gritsenko_lift, maass_check};
use paramodular::ntheory::format_rational;
use paramodular::paramod::{ExpansionBox, FourierIndex, ParamodularExpansion};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    /// The computation ran but its mathematical precondition failed, for
    /// example a Hecke image with a non-cancelling fractional index.
    Math = 4,
    Panic = 5,
}

/// A truncated paramodular Fourier expansion.
pub struct PmExpansion(ParamodularExpansion);

/// A truncated Jacobi form expansion.
pub struct PmJacobi(JacobiExpansion);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Fail(PmStatus, String);

impl Fail {
    fn invalid(msg: impl Into<String>) -> Self {
        Fail(PmStatus::InvalidArgument, msg.into())
    }
}

impl From<HeckeError> for Fail {
    fn from(e: HeckeError) -> Self {
        let status = match e {
            HeckeError::FractionalResidue { .. } | HeckeError::Irrational { .. } | HeckeError::ZeroForm => PmStatus::Math,
            _ => PmStatus::InvalidArgument,
        };
        Fail(status, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> PmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            PmStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            PmStatus::Panic
        }
    }
}

unsafe fn borrow<'a, T>(p: *const T) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail(PmStatus::NullPointer, "null handle".into()))
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(PmStatus::NullPointer, "null string".into()));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail::invalid("string is not UTF-8"))
}

unsafe fn put<T>(out: *mut T, v: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail(PmStatus::NullPointer, "null out pointer".into()));
    }
    out.write(v);
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    let c = CString::new(s).map_err(|_| Fail::invalid("output contains a nul byte"))?;
    put(out, c.into_raw())
}

fn target_box(n_max: i64, m_max: i64) -> Option<ExpansionBox> {
    (n_max >= 0 && m_max >= 0).then(|| ExpansionBox::new(n_max, m_max))
}

/// Message for the last failing call on this thread, or NULL. The pointer
/// stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn pm_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` is NULL or a string obtained from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `h` is NULL or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pm_expansion_free(h: *mut PmExpansion) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// # Safety
/// `h` is NULL or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pm_jacobi_free(h: *mut PmJacobi) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// The Eisenstein series of weight `k` and level `level` on the box
/// `n <= n_max`, `m <= m_max`.
///
/// # Safety
/// `out` is a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pm_eisenstein(k: i64, level: i64, n_max: i64, m_max: i64, out: *mut *mut PmExpansion) -> PmStatus {
    guard(|| {
        let f = siegel_eisenstein(k, level, ExpansionBox::new(n_max, m_max)).map_err(|e| Fail::invalid(e.to_string()))?;
        put(out, Box::into_raw(Box::new(PmExpansion(f))))
    })
}

/// Parses a paramodular expansion from its JSON text.
///
/// # Safety
/// `json` is a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pm_expansion_from_json(json: *const c_char, out: *mut *mut PmExpansion) -> PmStatus {
    guard(|| {
        let f = read_paramodular(text(json)?).map_err(|e| Fail(PmStatus::Parse, e.to_string()))?;
        put(out, Box::into_raw(Box::new(PmExpansion(f))))
    })
}

/// # Safety
/// `h` is a live handle and `out` a valid pointer; free the result with
/// [`pm_string_free`].
#[no_mangle]
pub unsafe extern "C" fn pm_expansion_to_json(h: *const PmExpansion, out: *mut *mut c_char) -> PmStatus {
    guard(|| put_string(out, paramodular_to_json(&borrow(h)?.0)))
}

/// Weight, level and box of an expansion. Any out pointer may be NULL.
///
/// # Safety
/// `h` is a live handle; non-NULL out pointers are valid.
#[no_mangle]
pub unsafe extern "C" fn pm_expansion_info(
    h: *const PmExpansion,
    weight: *mut i64,
    level: *mut i64,
    n_max: *mut i64,
    m_max: *mut i64,
) -> PmStatus {
    guard(|| {
        let f = &borrow(h)?.0;
        let bx = f.expansion_box();
        for (p, v) in [(weight, f.weight()), (level, f.level()), (n_max, bx.n_max), (m_max, bx.m_max)] {
            if !p.is_null() {
                p.write(v);
            }
        }
        Ok(())
    })
}

/// The coefficient at `(n, r, m)` as `"num/den"`. Indices outside the box are
/// an error.
///
/// # Safety
/// `h` is a live handle and `out` a valid pointer; free the result with
/// [`pm_string_free`].
#[no_mangle]
pub unsafe extern "C" fn pm_expansion_coeff(h: *const PmExpansion, n: i64, r: i64, m: i64, out: *mut *mut c_char) -> PmStatus {
    guard(|| {
        let f = &borrow(h)?.0;
        let t = FourierIndex::new(n, r, m);
        if !f.expansion_box().contains(t, f.level()) {
            return Err(Fail::invalid(format!("{t} is outside the expansion box")));
        }
        put_string(out, format_rational(&f.coeff(t)))
    })
}

/// Sets `*passed` to whether the expansion satisfies the Maass relations on
/// its box.
///
/// # Safety
/// `h` is a live handle and `passed` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pm_maass_check(h: *const PmExpansion, passed: *mut bool) -> PmStatus {
    guard(|| put(passed, maass_check(&borrow(h)?.0).passed()))
}

fn operator(name: *const c_char, q: i64, level: i64) -> Result<paramodular::hecke::DoubleCosetOp, Fail> {
    let name = unsafe { text(name)? };
    let label = OpLabel::parse(name).ok_or_else(|| Fail::invalid(format!("unknown operator {name:?}")))?;
    Ok(reps_for(label, q, level)?)
}

/// Applies the operator named `op` (`identity`, `tnq`, `tstarq`, `fjraise`,
/// `jdiag`, `l1diag`, `usum`) at `q`. A negative `n_max` or `m_max` selects
/// the largest box the input determines.
///
/// # Safety
/// `h` is a live handle, `op` a nul-terminated string and `out` a valid
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn pm_hecke_apply(
    h: *const PmExpansion,
    op: *const c_char,
    q: i64,
    n_max: i64,
    m_max: i64,
    out: *mut *mut PmExpansion,
) -> PmStatus {
    guard(|| {
        let f = &borrow(h)?.0;
        let op = operator(op, q, f.level())?;
        let app = apply_op(f, &op, target_box(n_max, m_max))?;
        put(out, Box::into_raw(Box::new(PmExpansion(app.expansion))))
    })
}

/// Eigenvalue of the operator on the expansion as `"num/den"`. A form that is
/// not an eigenform gives [`PmStatus::Math`].
///
/// # Safety
/// As for [`pm_hecke_apply`], with `out` receiving a string to free with
/// [`pm_string_free`].
#[no_mangle]
pub unsafe extern "C" fn pm_hecke_eigenvalue(
    h: *const PmExpansion,
    op: *const c_char,
    q: i64,
    n_max: i64,
    m_max: i64,
    out: *mut *mut c_char,
) -> PmStatus {
    guard(|| {
        let f = &borrow(h)?.0;
        let op = operator(op, q, f.level())?;
        match eigenvalue_of(f, &op, target_box(n_max, m_max))?.0 {
            Eigen::Value(v) => put_string(out, format_rational(&v)),
            Eigen::NotEigen { index, expected, actual } => Err(Fail(
                PmStatus::Math,
                format!("not an eigenform: at {index} expected {} found {}", format_rational(&expected), format_rational(&actual)),
            )),
        }
    })
}

/// Parses a Jacobi form expansion from its JSON text.
///
/// # Safety
/// `json` is a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pm_jacobi_from_json(json: *const c_char, out: *mut *mut PmJacobi) -> PmStatus {
    guard(|| {
        let phi = read_jacobi(text(json)?).map_err(|e| Fail(PmStatus::Parse, e.to_string()))?;
        put(out, Box::into_raw(Box::new(PmJacobi(phi))))
    })
}

/// # Safety
/// `h` is a live handle and `out` a valid pointer; free the result with
/// [`pm_string_free`].
#[no_mangle]
pub unsafe extern "C" fn pm_jacobi_to_json(h: *const PmJacobi, out: *mut *mut c_char) -> PmStatus {
    guard(|| put_string(out, jacobi_to_json(&borrow(h)?.0)))
}

/// The lift of a Jacobi form of index `level` on the given box.
///
/// # Safety
/// `h` is a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pm_lift(h: *const PmJacobi, level: i64, n_max: i64, m_max: i64, out: *mut *mut PmExpansion) -> PmStatus {
    guard(|| {
        let f = gritsenko_lift(&borrow(h)?.0, level, ExpansionBox::new(n_max, m_max)).map_err(|e| Fail::invalid(e.to_string()))?;
        put(out, Box::into_raw(Box::new(PmExpansion(f))))
    })
}
