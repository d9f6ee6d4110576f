//! C ABI for running experiments.
//!
//! Handles are opaque and owned by the caller, who releases them with the
//! matching `*_free` function. Every fallible call returns an [`AicStatus`];
//! on failure [`aic_last_error`] describes the most recent error on the
//! calling thread. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use adaptive_ic::harness::{write_csv, Experiment, ExperimentConfig, ReportRow, Summary};
use adaptive_ic::protocols::Outcome;
use adaptive_ic::Error;

/// Result of a call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AicStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Config = 3,
    Io = 4,
    OutOfRange = 5,
    Internal = 6,
}

/// Outcome of one run.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AicOutcome {
    Correct = 0,
    Wrong = 1,
    Abort = 2,
    Fault = 3,
}

/// Numeric columns of a report row.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AicRow {
    pub trial: u64,
    pub seed: u64,
    pub cc: u64,
    pub nc: u64,
    /// `nc / cc`; infinite when only noise was sent.
    pub nr: f64,
    pub rounds: u64,
    pub outcome: AicOutcome,
    pub within_budget: bool,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct AicSummary {
    pub rows: u64,
    pub correct: u64,
    pub wrong: u64,
    pub abort: u64,
    pub fault: u64,
    pub within_budget: u64,
    pub suite_failures: u64,
}

/// A validated experiment.
pub struct AicExperiment(Experiment);

/// The rows of a finished experiment.
pub struct AicReport(Vec<ReportRow>);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn fail(status: AicStatus, msg: impl Into<String>) -> AicStatus {
    set_error(msg);
    status
}

fn status_of(err: &Error) -> AicStatus {
    match err {
        Error::Io(_) | Error::Csv(_) => AicStatus::Io,
        _ => AicStatus::Config,
    }
}

fn guard(f: impl FnOnce() -> AicStatus) -> AicStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => fail(AicStatus::Internal, "internal panic"),
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, AicStatus> {
    if p.is_null() {
        return Err(fail(AicStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| fail(AicStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

/// Message of the last error on this thread, or null. Valid until the next
/// call on the same thread.
#[no_mangle]
pub extern "C" fn aic_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn aic_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Validates a JSON experiment configuration (same fields as the CLI flags).
///
/// # Safety
/// `config_json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn aic_experiment_new(config_json: *const c_char, out: *mut *mut AicExperiment) -> AicStatus {
    guard(|| {
        if out.is_null() {
            return fail(AicStatus::NullPointer, "out is null");
        }
        *out = ptr::null_mut();
        let text = match str_arg(config_json, "config_json") {
            Ok(t) => t,
            Err(s) => return s,
        };
        match ExperimentConfig::from_json(text).and_then(|c| Experiment::new(&c)) {
            Ok(e) => {
                *out = Box::into_raw(Box::new(AicExperiment(e)));
                AicStatus::Ok
            }
            Err(e) => fail(status_of(&e), e.to_string()),
        }
    })
}

/// # Safety
/// `experiment` must come from [`aic_experiment_new`] and not be used after.
#[no_mangle]
pub unsafe extern "C" fn aic_experiment_free(experiment: *mut AicExperiment) {
    if !experiment.is_null() {
        drop(Box::from_raw(experiment));
    }
}

/// Number of rows the experiment will produce.
///
/// # Safety
/// `experiment` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn aic_experiment_row_count(experiment: *const AicExperiment) -> u64 {
    experiment.as_ref().map_or(0, |e| u64::try_from(e.0.row_count()).unwrap_or(u64::MAX))
}

/// Runs every trial.
///
/// # Safety
/// `experiment` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn aic_experiment_run(experiment: *const AicExperiment, out: *mut *mut AicReport) -> AicStatus {
    guard(|| {
        if out.is_null() {
            return fail(AicStatus::NullPointer, "out is null");
        }
        *out = ptr::null_mut();
        let Some(e) = experiment.as_ref() else {
            return fail(AicStatus::NullPointer, "experiment is null");
        };
        *out = Box::into_raw(Box::new(AicReport(e.0.run())));
        AicStatus::Ok
    })
}

/// # Safety
/// `report` must come from [`aic_experiment_run`] and not be used after.
#[no_mangle]
pub unsafe extern "C" fn aic_report_free(report: *mut AicReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// # Safety
/// `report` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn aic_report_len(report: *const AicReport) -> usize {
    report.as_ref().map_or(0, |r| r.0.len())
}

/// Copies row `index` into `out`.
///
/// # Safety
/// `report` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn aic_report_row(report: *const AicReport, index: usize, out: *mut AicRow) -> AicStatus {
    guard(|| {
        let (Some(r), false) = (report.as_ref(), out.is_null()) else {
            return fail(AicStatus::NullPointer, "report or out is null");
        };
        let Some(row) = r.0.get(index) else {
            return fail(AicStatus::OutOfRange, format!("row {index} of {}", r.0.len()));
        };
        let outcome = match row.outcome {
            Outcome::Correct => AicOutcome::Correct,
            Outcome::Wrong => AicOutcome::Wrong,
            Outcome::Abort => AicOutcome::Abort,
            Outcome::Fault => AicOutcome::Fault,
        };
        *out = AicRow {
            trial: row.trial,
            seed: row.seed,
            cc: row.cc,
            nc: row.nc,
            nr: row.rate().as_f64(),
            rounds: row.rounds,
            outcome,
            within_budget: row.within_budget,
        };
        AicStatus::Ok
    })
}

/// # Safety
/// `report` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn aic_report_summary(report: *const AicReport, out: *mut AicSummary) -> AicStatus {
    guard(|| {
        let (Some(r), false) = (report.as_ref(), out.is_null()) else {
            return fail(AicStatus::NullPointer, "report or out is null");
        };
        let s = Summary::of(&r.0);
        *out = AicSummary {
            rows: s.rows,
            correct: s.correct,
            wrong: s.wrong,
            abort: s.abort,
            fault: s.fault,
            within_budget: s.within_budget,
            suite_failures: s.suite_failures,
        };
        AicStatus::Ok
    })
}

/// Writes the report as CSV.
///
/// # Safety
/// `report` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn aic_report_write_csv(report: *const AicReport, path: *const c_char) -> AicStatus {
    guard(|| {
        let Some(r) = report.as_ref() else {
            return fail(AicStatus::NullPointer, "report is null");
        };
        let path = match str_arg(path, "path") {
            Ok(p) => p,
            Err(s) => return s,
        };
        match write_csv(&r.0, Path::new(path)) {
            Ok(()) => AicStatus::Ok,
            Err(e) => fail(status_of(&e), e.to_string()),
        }
    })
}
