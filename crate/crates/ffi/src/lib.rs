//! C ABI for the cpscope solver.
//!
//! Handles are opaque and owned by the caller once returned; free them
//! with the matching `_free` function. Every fallible call returns a
//! [`CpsStatus`] and leaves a message for [`cps_last_error`] on failure.
//! Strings going in must be NUL-terminated UTF-8.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use cpscope::constraints::FilterLevel;
use cpscope::models::{self, ModelConfig, ModelError};
use cpscope::run::{run_model, RunOutput, RunSpec};
use cpscope::search::{Direction, Strategy, TaskOrder};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CpsStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    UnknownModel = 3,
    InvalidModel = 4,
    /// The requested value does not exist, e.g. no solution was found.
    NoValue = 5,
    Io = 6,
    /// A Rust panic was caught at the boundary.
    Internal = 7,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CpsFilterLevel {
    Basic = 0,
    Bounds = 1,
    Extended = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CpsOrder {
    Increasing = 0,
    Decreasing = 1,
    Sequential = 2,
}

enum Source {
    Reference(String),
    Json(String),
}

/// A model and the options it will be solved with.
pub struct CpsModel {
    source: Source,
    spec: RunSpec,
}

/// The result of one search, with its trace.
pub struct CpsRun {
    out: RunOutput,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let c = CString::new(msg.into().replace('\0', " ")).expect("NULs were replaced");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: CpsStatus, msg: impl Into<String>) -> CpsStatus {
    set_error(msg);
    status
}

fn guard(f: impl FnOnce() -> CpsStatus) -> CpsStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        let why = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "unknown panic".into());
        fail(CpsStatus::Internal, format!("internal error: {why}"))
    })
}

unsafe fn text<'a>(s: *const c_char, what: &str) -> Result<&'a str, CpsStatus> {
    if s.is_null() {
        return Err(fail(CpsStatus::NullArgument, format!("{what} is NULL")));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| fail(CpsStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

fn model_status(e: &ModelError) -> CpsStatus {
    match e {
        ModelError::Unknown(_) => CpsStatus::UnknownModel,
        _ => CpsStatus::InvalidModel,
    }
}

fn load(m: &CpsModel) -> Result<models::Model, ModelError> {
    match &m.source {
        Source::Reference(r) => models::load(r, &m.spec.config),
        Source::Json(j) => models::json::parse(j, &m.spec.config),
    }
}

unsafe fn new_model(source: Source, name: String, out: *mut *mut CpsModel) -> CpsStatus {
    if out.is_null() {
        return fail(CpsStatus::NullArgument, "out is NULL");
    }
    let m = CpsModel {
        source,
        spec: RunSpec::new(name),
    };
    if let Err(e) = load(&m) {
        return fail(model_status(&e), e.to_string());
    }
    *out = Box::into_raw(Box::new(m));
    CpsStatus::Ok
}

/// Library version, a static string.
#[no_mangle]
pub extern "C" fn cps_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or NULL. Valid until
/// the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn cps_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Loads a built-in model by name (see `cpscope list-models`) or a JSON
/// model file by path.
#[no_mangle]
pub unsafe extern "C" fn cps_model_load(reference: *const c_char, out: *mut *mut CpsModel) -> CpsStatus {
    guard(|| match text(reference, "reference") {
        Ok(r) => new_model(Source::Reference(r.into()), r.into(), out),
        Err(s) => s,
    })
}

/// Parses a model from JSON text.
#[no_mangle]
pub unsafe extern "C" fn cps_model_from_json(json: *const c_char, out: *mut *mut CpsModel) -> CpsStatus {
    guard(|| match text(json, "json") {
        Ok(j) => {
            let name = models::json::parse(j, &ModelConfig::default()).map(|m| m.name).unwrap_or_default();
            new_model(Source::Json(j.into()), name, out)
        }
        Err(s) => s,
    })
}

#[no_mangle]
pub unsafe extern "C" fn cps_model_free(model: *mut CpsModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

unsafe fn with_model(model: *mut CpsModel, f: impl FnOnce(&mut CpsModel) -> CpsStatus) -> CpsStatus {
    guard(|| match model.as_mut() {
        Some(m) => f(m),
        None => fail(CpsStatus::NullArgument, "model is NULL"),
    })
}

#[no_mangle]
pub unsafe extern "C" fn cps_model_set_filter_level(model: *mut CpsModel, level: CpsFilterLevel) -> CpsStatus {
    with_model(model, |m| {
        m.spec.config.filter_level = match level {
            CpsFilterLevel::Basic => FilterLevel::Basic,
            CpsFilterLevel::Bounds => FilterLevel::Bounds,
            CpsFilterLevel::Extended => FilterLevel::Extended,
        };
        CpsStatus::Ok
    })
}

/// Task order of the ranking procedure; ignored by models without one.
#[no_mangle]
pub unsafe extern "C" fn cps_model_set_order(model: *mut CpsModel, order: CpsOrder) -> CpsStatus {
    with_model(model, |m| {
        m.spec.config.order = match order {
            CpsOrder::Increasing => TaskOrder::ByEarliestStart(Direction::Increasing),
            CpsOrder::Decreasing => TaskOrder::ByEarliestStart(Direction::Decreasing),
            CpsOrder::Sequential => TaskOrder::Sequential,
        };
        CpsStatus::Ok
    })
}

/// Limited discrepancy search up to `max_discrepancies`; a negative value
/// selects depth-first search.
#[no_mangle]
pub unsafe extern "C" fn cps_model_set_lds(model: *mut CpsModel, max_discrepancies: i32) -> CpsStatus {
    with_model(model, |m| {
        m.spec.strategy = match u32::try_from(max_discrepancies) {
            Ok(k) => Strategy::Lds { max_discrepancies: k },
            Err(_) => Strategy::Dfs,
        };
        CpsStatus::Ok
    })
}

/// Records every propagation event in the trace.
#[no_mangle]
pub unsafe extern "C" fn cps_model_set_spy(model: *mut CpsModel, on: bool) -> CpsStatus {
    with_model(model, |m| {
        m.spec.spy = on;
        CpsStatus::Ok
    })
}

/// Stops after `limit` nodes; 0 means no limit.
#[no_mangle]
pub unsafe extern "C" fn cps_model_set_node_limit(model: *mut CpsModel, limit: u64) -> CpsStatus {
    with_model(model, |m| {
        m.spec.node_limit = (limit > 0).then_some(limit);
        CpsStatus::Ok
    })
}

/// Solves the model from scratch. The model stays usable.
#[no_mangle]
pub unsafe extern "C" fn cps_model_solve(model: *mut CpsModel, out: *mut *mut CpsRun) -> CpsStatus {
    with_model(model, |m| {
        if out.is_null() {
            return fail(CpsStatus::NullArgument, "out is NULL");
        }
        match load(m) {
            Ok(model) => {
                let run = CpsRun {
                    out: run_model(model, &m.spec),
                };
                *out = Box::into_raw(Box::new(run));
                CpsStatus::Ok
            }
            Err(e) => fail(model_status(&e), e.to_string()),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn cps_run_free(run: *mut CpsRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}

unsafe fn get<T>(run: *const CpsRun, f: impl FnOnce(&CpsRun) -> T, default: T) -> T {
    match run.as_ref() {
        Some(r) => f(r),
        None => {
            set_error("run is NULL");
            default
        }
    }
}

/// Tree nodes, white and black ones included.
#[no_mangle]
pub unsafe extern "C" fn cps_run_node_count(run: *const CpsRun) -> u64 {
    get(run, |r| r.out.result.summary.nodes as u64, 0)
}

#[no_mangle]
pub unsafe extern "C" fn cps_run_solution_count(run: *const CpsRun) -> u64 {
    get(run, |r| r.out.result.summary.solutions as u64, 0)
}

/// Propagation events over the whole run.
#[no_mangle]
pub unsafe extern "C" fn cps_run_event_count(run: *const CpsRun) -> u64 {
    get(run, |r| r.out.result.summary.events, 0)
}

/// Whether the search space was exhausted, which for an optimization
/// model proves the best objective optimal.
#[no_mangle]
pub unsafe extern "C" fn cps_run_proven(run: *const CpsRun) -> bool {
    get(run, |r| r.out.result.summary.proven, false)
}

/// Number of right subtrees in the search tree.
#[no_mangle]
pub unsafe extern "C" fn cps_run_right_subtree_count(run: *const CpsRun) -> u64 {
    get(run, |r| r.out.result.tree.right_subtree_report().len() as u64, 0)
}

/// Best objective value; `NoValue` for satisfaction models or when no
/// solution was found.
#[no_mangle]
pub unsafe extern "C" fn cps_run_best_objective(run: *const CpsRun, value: *mut i64) -> CpsStatus {
    guard(|| {
        let (Some(r), false) = (run.as_ref(), value.is_null()) else {
            return fail(CpsStatus::NullArgument, "run or value is NULL");
        };
        match r.out.result.summary.best_objective {
            Some(v) => {
                *value = v;
                CpsStatus::Ok
            }
            None => fail(CpsStatus::NoValue, "no objective value"),
        }
    })
}

/// Value of a decision variable in the last (best) solution.
#[no_mangle]
pub unsafe extern "C" fn cps_run_solution_value(run: *const CpsRun, var: *const c_char, value: *mut i64) -> CpsStatus {
    guard(|| {
        let (Some(r), false) = (run.as_ref(), value.is_null()) else {
            return fail(CpsStatus::NullArgument, "run or value is NULL");
        };
        let name = match text(var, "var") {
            Ok(n) => n,
            Err(s) => return s,
        };
        let Some(sol) = r.out.result.best() else {
            return fail(CpsStatus::NoValue, "the run found no solution");
        };
        match sol.values.iter().find(|(k, _)| k == name) {
            Some((_, v)) => {
                *value = *v;
                CpsStatus::Ok
            }
            None => fail(CpsStatus::NoValue, format!("no decision variable `{name}`")),
        }
    })
}

/// Writes the run's trace file.
#[no_mangle]
pub unsafe extern "C" fn cps_run_write_trace(run: *const CpsRun, path: *const c_char) -> CpsStatus {
    guard(|| {
        let Some(r) = run.as_ref() else {
            return fail(CpsStatus::NullArgument, "run is NULL");
        };
        let p = match text(path, "path") {
            Ok(p) => p,
            Err(s) => return s,
        };
        match r.out.trace.write(Path::new(p)) {
            Ok(()) => CpsStatus::Ok,
            Err(e) => fail(CpsStatus::Io, format!("cannot write {p}: {e}")),
        }
    })
}

/// The trace as newline-delimited JSON. Free with [`cps_string_free`].
#[no_mangle]
pub unsafe extern "C" fn cps_run_trace_text(run: *const CpsRun) -> *mut c_char {
    get(
        run,
        |r| CString::new(r.out.trace.to_text()).map_or(ptr::null_mut(), CString::into_raw),
        ptr::null_mut(),
    )
}

#[no_mangle]
pub unsafe extern "C" fn cps_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
