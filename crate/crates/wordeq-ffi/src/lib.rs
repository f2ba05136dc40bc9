//! C interface to the `wordeq` solver.
//!
//! Handles are opaque and owned by the caller until passed to the matching
//! `_free` function. Every fallible call returns a [`WqStatus`]; on failure
//! the message is available from [`wq_last_error_message`] on the same
//! thread. Strings returned by the library must be released with
//! [`wq_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use wordeq::engine::Arc;
use wordeq::format::{parse_certificate, parse_equation_file, parse_problem, render_certificate};
use wordeq::frontend::{Equation, Solution};
use wordeq::solver::{
    oracle_solve, solve_equation, solve_group_formula, GroupVerdict, SearchConfig, Verdict,
};
use wordeq::Error;

/// Result of a call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WqStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Resource = 4,
    Contract = 5,
    OutOfRange = 6,
    Panic = 7,
}

/// Answer of a solver call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WqVerdict {
    Sat = 0,
    Unsat = 1,
    Unknown = 2,
}

/// Search limits. Fill with [`wq_config_default`].
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct WqConfig {
    pub max_len: usize,
    pub cap: u64,
    pub max_depth: usize,
    pub node_budget: usize,
    pub branch_budget: usize,
    pub dedup: bool,
}

/// A parsed equation.
pub struct WqEquation {
    equation: Equation,
}

/// A solution together with the equation it solves and, when it came from
/// the search, the path of arcs that certifies it.
pub struct WqSolution {
    equation: Equation,
    solution: Solution,
    path: Option<Vec<Arc>>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(e: &Error) -> WqStatus {
    set_error(&e.to_string());
    match e {
        Error::Parse { .. } => WqStatus::Parse,
        Error::Resource { .. } => WqStatus::Resource,
        Error::Contract(_) => WqStatus::Contract,
        Error::OutOfRange(_) => WqStatus::OutOfRange,
    }
}

fn guard(f: impl FnOnce() -> WqStatus) -> WqStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => {
            set_error("internal panic");
            WqStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, WqStatus> {
    if p.is_null() {
        set_error("null argument");
        return Err(WqStatus::NullArgument);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error("input is not UTF-8");
        WqStatus::InvalidUtf8
    })
}

fn owned(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).map_or(ptr::null_mut(), CString::into_raw)
}

impl From<WqConfig> for SearchConfig {
    fn from(c: WqConfig) -> Self {
        SearchConfig {
            max_len: c.max_len,
            cap: c.cap,
            max_depth: c.max_depth,
            node_budget: c.node_budget,
            branch_budget: c.branch_budget,
            dedup: c.dedup,
            ..SearchConfig::default()
        }
    }
}

/// The library defaults.
#[no_mangle]
pub extern "C" fn wq_config_default() -> WqConfig {
    let d = SearchConfig::default();
    WqConfig {
        max_len: d.max_len,
        cap: d.cap,
        max_depth: d.max_depth,
        node_budget: d.node_budget,
        branch_budget: d.branch_budget,
        dedup: d.dedup,
    }
}

/// Message of the last failed call on this thread, or null. Valid until
/// the next failing call.
#[no_mangle]
pub extern "C" fn wq_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parse an equation file.
///
/// # Safety
/// `src` must be a NUL terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wq_equation_parse(
    src: *const c_char,
    out: *mut *mut WqEquation,
) -> WqStatus {
    guard(|| {
        if out.is_null() {
            set_error("null argument");
            return WqStatus::NullArgument;
        }
        let s = match text(src) {
            Ok(s) => s,
            Err(st) => return st,
        };
        match parse_equation_file(s) {
            Ok(f) => {
                *out = Box::into_raw(Box::new(WqEquation {
                    equation: f.equation,
                }));
                WqStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// # Safety
/// `eq` must come from [`wq_equation_parse`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn wq_equation_free(eq: *mut WqEquation) {
    if !eq.is_null() {
        drop(Box::from_raw(eq));
    }
}

/// Search for a solution. On `Sat`, `*solution` receives a new handle;
/// otherwise it is set to null.
///
/// # Safety
/// `eq` must be a live handle; `verdict` and `solution` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn wq_solve(
    eq: *const WqEquation,
    config: WqConfig,
    verdict: *mut WqVerdict,
    solution: *mut *mut WqSolution,
) -> WqStatus {
    guard(|| {
        if eq.is_null() || verdict.is_null() || solution.is_null() {
            set_error("null argument");
            return WqStatus::NullArgument;
        }
        *solution = ptr::null_mut();
        match solve_equation(&(*eq).equation, &config.into()) {
            Ok((out, e)) => {
                *verdict = match out.verdict {
                    Verdict::Sat { solution: s, path } => {
                        *solution = Box::into_raw(Box::new(WqSolution {
                            equation: e,
                            solution: s,
                            path: Some(path),
                        }));
                        WqVerdict::Sat
                    }
                    Verdict::Unsat => WqVerdict::Unsat,
                    Verdict::Unknown => WqVerdict::Unknown,
                };
                WqStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Exhaustive search over values of length at most `max_len`. `*solution`
/// is null when there is none.
///
/// # Safety
/// `eq` must be a live handle and `solution` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wq_oracle(
    eq: *const WqEquation,
    max_len: usize,
    cap: u64,
    solution: *mut *mut WqSolution,
) -> WqStatus {
    guard(|| {
        if eq.is_null() || solution.is_null() {
            set_error("null argument");
            return WqStatus::NullArgument;
        }
        *solution = ptr::null_mut();
        let e = &(*eq).equation;
        match oracle_solve(e, max_len, cap) {
            Ok(Some(s)) => {
                *solution = Box::into_raw(Box::new(WqSolution {
                    equation: e.clone(),
                    solution: s,
                    path: None,
                }));
                WqStatus::Ok
            }
            Ok(None) => WqStatus::Ok,
            Err(e) => fail(&e),
        }
    })
}

/// `X = w` lines, one per variable pair.
///
/// # Safety
/// `sol` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn wq_solution_render(sol: *const WqSolution) -> *mut c_char {
    if sol.is_null() {
        set_error("null argument");
        return ptr::null_mut();
    }
    let s = &*sol;
    let al = &s.equation.syms;
    let mut out = String::new();
    for x in al
        .symbols()
        .filter(|&x| s.equation.omega.contains(&x) && x <= al.bar(x))
    {
        let w = s.solution.get(x).map_or(&[][..], |w| &w[..]);
        out.push_str(&format!("{} = {}\n", al.name(x), al.render(w)));
    }
    owned(out)
}

/// # Safety
/// `sol` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn wq_solution_free(sol: *mut WqSolution) {
    if !sol.is_null() {
        drop(Box::from_raw(sol));
    }
}

/// Certificate text for a solution found by [`wq_solve`].
///
/// # Safety
/// `sol` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wq_certificate_build(
    sol: *const WqSolution,
    out: *mut *mut c_char,
) -> WqStatus {
    guard(|| {
        if sol.is_null() || out.is_null() {
            set_error("null argument");
            return WqStatus::NullArgument;
        }
        let s = &*sol;
        let Some(path) = &s.path else {
            set_error("solution has no path; only search results carry one");
            return WqStatus::Contract;
        };
        match render_certificate(&s.equation, Some(&s.solution), path) {
            Ok(t) => {
                *out = owned(t);
                WqStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Check a certificate. `*valid` is false when it parses but is wrong; the
/// reason is then the last error message.
///
/// # Safety
/// `src` must be a NUL terminated string and `valid` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wq_certificate_verify(
    src: *const c_char,
    cap: u64,
    valid: *mut bool,
) -> WqStatus {
    guard(|| {
        if valid.is_null() {
            set_error("null argument");
            return WqStatus::NullArgument;
        }
        let s = match text(src) {
            Ok(s) => s,
            Err(st) => return st,
        };
        match parse_certificate(s, cap).and_then(|c| c.defect(cap)) {
            Ok(None) => {
                *valid = true;
                WqStatus::Ok
            }
            Ok(Some(d)) => {
                set_error(&d);
                *valid = false;
                WqStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Decide a formula file over a free group.
///
/// # Safety
/// `src` must be a NUL terminated string and `verdict` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wq_group_solve(
    src: *const c_char,
    config: WqConfig,
    verdict: *mut WqVerdict,
) -> WqStatus {
    guard(|| {
        if verdict.is_null() {
            set_error("null argument");
            return WqStatus::NullArgument;
        }
        let s = match text(src) {
            Ok(s) => s,
            Err(st) => return st,
        };
        match parse_problem(s).and_then(|p| solve_group_formula(&p, &config.into())) {
            Ok(out) => {
                *verdict = match out.verdict {
                    GroupVerdict::True => WqVerdict::Sat,
                    GroupVerdict::False => WqVerdict::Unsat,
                    GroupVerdict::FalseWithinBudget => WqVerdict::Unknown,
                };
                WqStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn wq_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
