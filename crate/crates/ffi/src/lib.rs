//! C ABI over the divhull toolkit.
//!
//! Conventions: surfaces are opaque handles created from fixture JSON;
//! results come back as heap-allocated JSON strings the caller releases with
//! `divhull_string_free`. Every entry point returns a `DivhullStatus`; on
//! failure the thread-local message from `divhull_last_error_message`
//! explains what went wrong.

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::os::raw::c_char;

use divhull::budget::Budget;
use divhull::error::Error;
use divhull::fiberlab::{fiber_scan, prime_density_scan, specialize, torsion_scan};
use divhull::surface::{decide_bound, load_fixture_str, LoadedSurface};
use divhull::{ramtree, tateoracle, tower};

/// Status codes mirroring the CLI exit contract.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq)]
pub enum DivhullStatus {
    Ok = 0,
    InputError = 1,
    MathError = 2,
    BudgetError = 3,
    NullPointer = 4,
}

/// Opaque surface handle: a loaded fixture (model, sections, optional t0).
pub struct DivhullSurface {
    inner: LoadedSurface,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> DivhullStatus {
    match err.exit_code() {
        1 => DivhullStatus::InputError,
        2 => DivhullStatus::MathError,
        _ => DivhullStatus::BudgetError,
    }
}

fn fail(err: Error) -> DivhullStatus {
    let s = status_of(&err);
    set_error(&err.to_string());
    s
}

/// # Safety
/// `ptr` must be a valid NUL-terminated string or null.
unsafe fn read_cstr<'a>(ptr: *const c_char) -> Result<&'a str, DivhullStatus> {
    if ptr.is_null() {
        set_error("null string argument");
        return Err(DivhullStatus::NullPointer);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error("argument is not valid UTF-8");
        DivhullStatus::InputError
    })
}

fn write_string(out: *mut *mut c_char, value: String) -> DivhullStatus {
    if out.is_null() {
        set_error("null output pointer");
        return DivhullStatus::NullPointer;
    }
    match CString::new(value) {
        Ok(c) => {
            unsafe { *out = c.into_raw() };
            DivhullStatus::Ok
        }
        Err(_) => {
            set_error("interior NUL in result");
            DivhullStatus::InputError
        }
    }
}

fn budget_from(limit: u64) -> Budget {
    if limit == 0 {
        Budget::from_env()
    } else {
        Budget::new(limit)
    }
}

/// Last error message for this thread, or null if none; free with
/// `divhull_string_free`.
#[no_mangle]
pub extern "C" fn divhull_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|e| match e.borrow().as_ref() {
        Some(c) => c.clone().into_raw(),
        None => std::ptr::null_mut(),
    })
}

/// Release a string returned by any divhull entry point.
///
/// # Safety
/// `s` must have been returned by this library and not freed before.
#[no_mangle]
pub unsafe extern "C" fn divhull_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Load a surface fixture from JSON:
/// {"A": "...", "B": "...", "sections": [{"x","y"}], "t0": "..."}.
///
/// # Safety
/// `json` must be a valid NUL-terminated string; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn divhull_surface_load_json(
    json: *const c_char,
    out: *mut *mut DivhullSurface,
) -> DivhullStatus {
    if out.is_null() {
        set_error("null output pointer");
        return DivhullStatus::NullPointer;
    }
    let text = match read_cstr(json) {
        Ok(t) => t,
        Err(s) => return s,
    };
    match load_fixture_str(text) {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(DivhullSurface { inner }));
            DivhullStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Release a surface handle.
///
/// # Safety
/// `surface` must come from `divhull_surface_load_json` and not be reused.
#[no_mangle]
pub unsafe extern "C" fn divhull_surface_free(surface: *mut DivhullSurface) {
    if !surface.is_null() {
        drop(Box::from_raw(surface));
    }
}

unsafe fn surface_ref<'a>(
    surface: *const DivhullSurface,
) -> Result<&'a LoadedSurface, DivhullStatus> {
    if surface.is_null() {
        set_error("null surface handle");
        return Err(DivhullStatus::NullPointer);
    }
    Ok(&(*surface).inner)
}

/// Full surface analysis as JSON: j, discriminant, poles, special primes,
/// geometric pole count, and per-place reduction types.
///
/// # Safety
/// `surface` from `divhull_surface_load_json`; `out_json` valid.
#[no_mangle]
pub unsafe extern "C" fn divhull_surface_analyze(
    surface: *const DivhullSurface,
    out_json: *mut *mut c_char,
) -> DivhullStatus {
    let loaded = match surface_ref(surface) {
        Ok(s) => s,
        Err(s) => return s,
    };
    match loaded.model.analyze() {
        Ok(analysis) => match serde_json::to_string(&analysis.report()) {
            Ok(s) => write_string(out_json, s),
            Err(e) => fail(Error::input(e.to_string())),
        },
        Err(e) => fail(e),
    }
}

/// Per-fiber hull bound decision as JSON
/// ({"verdict":"Bound","value":9} or {"verdict":"NotApplicable"}).
///
/// # Safety
/// As for `divhull_surface_analyze`.
#[no_mangle]
pub unsafe extern "C" fn divhull_decide_bound(
    surface: *const DivhullSurface,
    ell: u64,
    p_is_ell_multiple: bool,
    base_genus: i64,
    out_json: *mut *mut c_char,
) -> DivhullStatus {
    let loaded = match surface_ref(surface) {
        Ok(s) => s,
        Err(s) => return s,
    };
    let analysis = match loaded.model.analyze() {
        Ok(a) => a,
        Err(e) => return fail(e),
    };
    let decision = decide_bound(&analysis, ell, p_is_ell_multiple, base_genus);
    match serde_json::to_string(&decision) {
        Ok(s) => write_string(out_json, s),
        Err(e) => fail(Error::input(e.to_string())),
    }
}

/// Ramification-tree level summary as JSON; `budget` 0 means the default.
///
/// # Safety
/// `out_json` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn divhull_ramtree_summary(
    ell: u64,
    m: u32,
    depth: u32,
    budget: u64,
    out_json: *mut *mut c_char,
) -> DivhullStatus {
    match ramtree::build_tree(ell, m, depth, &budget_from(budget)) {
        Ok((_, summary)) => match serde_json::to_string(&summary) {
            Ok(s) => write_string(out_json, s),
            Err(e) => fail(Error::input(e.to_string())),
        },
        Err(e) => fail(e),
    }
}

/// Cross-check the rule-based tree against the enumeration oracle; writes 1
/// into `out_match` when the weighted typed trees are isomorphic.
///
/// # Safety
/// `out_match` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn divhull_ramtree_oracle_check(
    ell: u64,
    m: u32,
    depth: u32,
    budget: u64,
    out_match: *mut i32,
) -> DivhullStatus {
    if out_match.is_null() {
        set_error("null output pointer");
        return DivhullStatus::NullPointer;
    }
    let budget = budget_from(budget);
    let rule = match ramtree::build_tree(ell, m, depth, &budget) {
        Ok((root, _)) => root,
        Err(e) => return fail(e),
    };
    let oracle = match tateoracle::oracle_tree(ell, m, depth, &budget) {
        Ok((root, _)) => root,
        Err(e) => return fail(e),
    };
    let same = ramtree::canonical_form(&rule) == tateoracle::canonical_form(&oracle);
    *out_match = i32::from(same);
    DivhullStatus::Ok
}

/// The four genus lower bounds as JSON.
///
/// # Safety
/// `out_json` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn divhull_genus_bounds(
    ell: u64,
    n_poles: u64,
    base_genus: i64,
    out_json: *mut *mut c_char,
) -> DivhullStatus {
    let bounds = ramtree::genus_bounds(ell, n_poles, base_genus);
    match serde_json::to_string(&bounds) {
        Ok(s) => write_string(out_json, s),
        Err(e) => fail(Error::input(e.to_string())),
    }
}

/// Tower constants for linear-bound constants c1, c2 (exact rationals as
/// strings), with N(B) and the shallow-level count bound for `ell`.
///
/// # Safety
/// `c1`, `c2` valid strings; `out_json` valid.
#[no_mangle]
pub unsafe extern "C" fn divhull_tower_params(
    c1: *const c_char,
    c2: *const c_char,
    b_height: u64,
    ell: u64,
    out_json: *mut *mut c_char,
) -> DivhullStatus {
    let c1 = match read_cstr(c1).and_then(|s| divhull::exactalg::parse_rational(s).map_err(fail)) {
        Ok(v) => v,
        Err(s) => return s,
    };
    let c2 = match read_cstr(c2).and_then(|s| divhull::exactalg::parse_rational(s).map_err(fail)) {
        Ok(v) => v,
        Err(s) => return s,
    };
    let params = match tower::derive_params(&c1, &c2) {
        Ok(p) => p,
        Err(e) => return fail(e),
    };
    let n_of_b = if b_height >= 1 {
        match tower::n_of_b(&params, b_height) {
            Ok(n) => Some(n),
            Err(e) => return fail(e),
        }
    } else {
        None
    };
    let doc = serde_json::json!({
        "params": params.report(),
        "B": if b_height >= 1 { Some(b_height) } else { None },
        "N_of_B": n_of_b,
        "count_bound": tower::count_bound(ell, params.n0).to_string(),
    });
    write_string(out_json, doc.to_string())
}

/// Fiber scan as a single JSON report. `bound` is the hull bound to flag
/// against; pass `has_bound = false` to scan without a claim.
///
/// # Safety
/// As for `divhull_surface_analyze`.
#[no_mangle]
pub unsafe extern "C" fn divhull_fiber_scan(
    surface: *const DivhullSurface,
    section_index: usize,
    ell: u64,
    height_max: u64,
    n_max: u32,
    has_bound: bool,
    bound: u64,
    out_json: *mut *mut c_char,
) -> DivhullStatus {
    let loaded = match surface_ref(surface) {
        Ok(s) => s,
        Err(s) => return s,
    };
    let Some(section) = loaded.sections.get(section_index) else {
        return fail(Error::input(format!(
            "section index {section_index} out of range"
        )));
    };
    match fiber_scan(
        &loaded.model,
        section,
        ell,
        height_max,
        n_max,
        has_bound.then_some(bound),
    ) {
        Ok(report) => match serde_json::to_string(&report) {
            Ok(s) => write_string(out_json, s),
            Err(e) => fail(Error::input(e.to_string())),
        },
        Err(e) => fail(e),
    }
}

/// Torsion scan as a single JSON report.
///
/// # Safety
/// As for `divhull_surface_analyze`.
#[no_mangle]
pub unsafe extern "C" fn divhull_torsion_scan(
    surface: *const DivhullSurface,
    height_max: u64,
    out_json: *mut *mut c_char,
) -> DivhullStatus {
    let loaded = match surface_ref(surface) {
        Ok(s) => s,
        Err(s) => return s,
    };
    match torsion_scan(&loaded.model, height_max) {
        Ok(report) => match serde_json::to_string(&report) {
            Ok(s) => write_string(out_json, s),
            Err(e) => fail(Error::input(e.to_string())),
        },
        Err(e) => fail(e),
    }
}

/// Prime-density scan at the fiber `t0` (a rational string, or null to use
/// the fixture's own t0), as a single JSON report.
///
/// # Safety
/// As for `divhull_surface_analyze`; `t0` may be null.
#[no_mangle]
pub unsafe extern "C" fn divhull_prime_scan(
    surface: *const DivhullSurface,
    section_index: usize,
    t0: *const c_char,
    ell: u64,
    threshold_m: u64,
    p_max: u64,
    out_json: *mut *mut c_char,
) -> DivhullStatus {
    let loaded = match surface_ref(surface) {
        Ok(s) => s,
        Err(s) => return s,
    };
    let Some(section) = loaded.sections.get(section_index) else {
        return fail(Error::input(format!(
            "section index {section_index} out of range"
        )));
    };
    let t0 = if t0.is_null() {
        match &loaded.t0 {
            Some(t) => t.clone(),
            None => {
                return fail(Error::input(
                    "no fiber parameter: pass t0 or add one to the fixture",
                ))
            }
        }
    } else {
        let text = match read_cstr(t0) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match divhull::exactalg::parse_rational(text) {
            Ok(v) => v,
            Err(e) => return fail(e),
        }
    };
    let (curve, point) = match specialize(&loaded.model, section, &t0) {
        Ok(v) => v,
        Err(e) => return fail(e),
    };
    match prime_density_scan(&curve, &point, ell, threshold_m, p_max) {
        Ok(report) => match serde_json::to_string(&report) {
            Ok(s) => write_string(out_json, s),
            Err(e) => fail(Error::input(e.to_string())),
        },
        Err(e) => fail(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIXTURE: &str = r#"{"A": "-t", "B": "t", "sections": [{"x": "1", "y": "1"}], "t0": "8"}"#;

    unsafe fn load() -> *mut DivhullSurface {
        let json = CString::new(FIXTURE).unwrap();
        let mut handle: *mut DivhullSurface = std::ptr::null_mut();
        let status = divhull_surface_load_json(json.as_ptr(), &mut handle);
        assert!(status == DivhullStatus::Ok);
        handle
    }

    unsafe fn take_string(ptr: *mut c_char) -> String {
        let s = CStr::from_ptr(ptr).to_str().unwrap().to_string();
        divhull_string_free(ptr);
        s
    }

    #[test]
    fn load_analyze_free_roundtrip() {
        unsafe {
            let handle = load();
            let mut out: *mut c_char = std::ptr::null_mut();
            let status = divhull_surface_analyze(handle, &mut out);
            assert!(status == DivhullStatus::Ok);
            let json = take_string(out);
            let doc: serde_json::Value = serde_json::from_str(&json).unwrap();
            assert_eq!(doc["j"], "6912*t/(4*t-27)");
            assert_eq!(doc["special_primes"][0], 2);
            divhull_surface_free(handle);
        }
    }

    #[test]
    fn bad_json_reports_input_error() {
        unsafe {
            let json = CString::new("{\"A\": \"-t\"").unwrap();
            let mut handle: *mut DivhullSurface = std::ptr::null_mut();
            let status = divhull_surface_load_json(json.as_ptr(), &mut handle);
            assert!(status == DivhullStatus::InputError);
            let msg = divhull_last_error_message();
            assert!(!msg.is_null());
            let text = take_string(msg);
            assert!(!text.is_empty());
        }
    }

    #[test]
    fn oracle_check_through_abi() {
        unsafe {
            let mut matched: i32 = -1;
            let status = divhull_ramtree_oracle_check(3, 1, 2, 0, &mut matched);
            assert!(status == DivhullStatus::Ok);
            assert_eq!(matched, 1);
        }
    }

    #[test]
    fn genus_and_tower_through_abi() {
        unsafe {
            let mut out: *mut c_char = std::ptr::null_mut();
            assert!(divhull_genus_bounds(3, 5, 0, &mut out) == DivhullStatus::Ok);
            let doc: serde_json::Value = serde_json::from_str(&take_string(out)).unwrap();
            assert_eq!(doc["gamma1"], 2);
            assert_eq!(doc["gamma2"], 4);

            let c1 = CString::new("1").unwrap();
            let c2 = CString::new("0").unwrap();
            let mut out: *mut c_char = std::ptr::null_mut();
            assert!(
                divhull_tower_params(c1.as_ptr(), c2.as_ptr(), 16, 3, &mut out)
                    == DivhullStatus::Ok
            );
            let doc: serde_json::Value = serde_json::from_str(&take_string(out)).unwrap();
            assert_eq!(doc["N_of_B"], 4);
            assert_eq!(doc["params"]["delta"], "2");
        }
    }

    #[test]
    fn budget_error_code() {
        unsafe {
            let mut out: *mut c_char = std::ptr::null_mut();
            let status = divhull_ramtree_summary(3, 0, 9, 10, &mut out);
            assert!(status == DivhullStatus::BudgetError);
        }
    }

    #[test]
    fn small_scans_through_abi() {
        unsafe {
            let handle = load();
            let mut out: *mut c_char = std::ptr::null_mut();
            let status = divhull_fiber_scan(handle, 0, 3, 2, 2, true, 9, &mut out);
            assert!(status == DivhullStatus::Ok);
            let doc: serde_json::Value = serde_json::from_str(&take_string(out)).unwrap();
            assert!(doc["scanned"].as_u64().unwrap() > 0);

            let t0 = CString::new("8").unwrap();
            let mut out: *mut c_char = std::ptr::null_mut();
            let status = divhull_prime_scan(handle, 0, t0.as_ptr(), 3, 1, 200, &mut out);
            assert!(status == DivhullStatus::Ok);
            let doc: serde_json::Value = serde_json::from_str(&take_string(out)).unwrap();
            assert_eq!(doc["theory_floor"], "1/243");
            divhull_surface_free(handle);
        }
    }
}
