use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use adaptive_ic_ffi::*;

fn experiment(json: &str) -> Result<*mut AicExperiment, (AicStatus, String)> {
    let json = CString::new(json).unwrap();
    let mut out = ptr::null_mut();
    let status = unsafe { aic_experiment_new(json.as_ptr(), &mut out) };
    if status == AicStatus::Ok {
        Ok(out)
    } else {
        assert!(out.is_null());
        let msg = unsafe { CStr::from_ptr(aic_last_error()) }.to_string_lossy().into_owned();
        Err((status, msg))
    }
}

#[test]
fn run_and_read_rows() {
    let e = experiment(r#"{"protocol": "two_thirds", "adversary": "random:0.05", "trials": 5, "seed": 3}"#).unwrap();
    assert_eq!(unsafe { aic_experiment_row_count(e) }, 5);
    let mut report = ptr::null_mut();
    assert_eq!(unsafe { aic_experiment_run(e, &mut report) }, AicStatus::Ok);
    assert_eq!(unsafe { aic_report_len(report) }, 5);
    let mut row = AicRow { trial: 0, seed: 0, cc: 0, nc: 0, nr: 0.0, rounds: 0, outcome: AicOutcome::Fault, within_budget: false };
    for i in 0..5 {
        assert_eq!(unsafe { aic_report_row(report, i, &mut row) }, AicStatus::Ok);
        assert_eq!(row.trial, i as u64);
        assert_ne!(row.outcome, AicOutcome::Fault);
    }
    assert_eq!(unsafe { aic_report_row(report, 5, &mut row) }, AicStatus::OutOfRange);
    let mut summary = AicSummary::default();
    assert_eq!(unsafe { aic_report_summary(report, &mut summary) }, AicStatus::Ok);
    assert_eq!(summary.rows, 5);
    assert_eq!(summary.correct + summary.wrong + summary.abort + summary.fault, 5);

    let path = std::env::temp_dir().join(format!("aic-ffi-{}.csv", std::process::id()));
    let cpath = CString::new(path.to_str().unwrap()).unwrap();
    assert_eq!(unsafe { aic_report_write_csv(report, cpath.as_ptr()) }, AicStatus::Ok);
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("protocol,adversary,trial,seed,cc,nc,nr,rounds,outcome,within_budget\n"));
    assert_eq!(text.lines().count(), 6);
    std::fs::remove_file(path).unwrap();

    unsafe {
        aic_report_free(report);
        aic_experiment_free(e);
    }
}

#[test]
fn errors_are_reported() {
    let (status, msg) = experiment(r#"{"protocol": "nope"}"#).unwrap_err();
    assert_eq!(status, AicStatus::Config);
    assert!(msg.contains("unknown protocol"), "{msg}");
    let (status, _) = experiment("{not json").unwrap_err();
    assert_eq!(status, AicStatus::Config);
    let (status, _) = experiment(r#"{"protocol": "two_thirds", "trials": 0}"#).unwrap_err();
    assert_eq!(status, AicStatus::Config);

    let mut out = ptr::null_mut();
    assert_eq!(unsafe { aic_experiment_new(ptr::null(), &mut out) }, AicStatus::NullPointer);
    let bad = [0xffu8, 0];
    assert_eq!(unsafe { aic_experiment_new(bad.as_ptr().cast(), &mut out) }, AicStatus::InvalidUtf8);
    let mut report = ptr::null_mut();
    assert_eq!(unsafe { aic_experiment_run(ptr::null(), &mut report) }, AicStatus::NullPointer);
    assert_eq!(unsafe { aic_report_len(ptr::null()) }, 0);
    unsafe {
        aic_report_free(ptr::null_mut());
        aic_experiment_free(ptr::null_mut());
    }
}

#[test]
fn version_is_a_string() {
    let v = unsafe { CStr::from_ptr(aic_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

fn header() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/adaptive_ic.h")
}

#[test]
fn header_declares_the_api() {
    let text = std::fs::read_to_string(header()).unwrap();
    for name in [
        "aic_experiment_new",
        "aic_experiment_run",
        "aic_experiment_free",
        "aic_report_row",
        "aic_report_free",
        "aic_last_error",
        "typedef struct AicExperiment AicExperiment",
        "AIC_STATUS_OK = 0",
        "AIC_OUTCOME_WRONG = 1",
    ] {
        assert!(text.contains(name), "{name} missing from the header");
    }
}

/// Compiles and runs a C program against the static library, when a C
/// compiler is available.
#[test]
fn c_program_links_and_runs() {
    if Command::new("cc").arg("--version").output().is_err() {
        eprintln!("no C compiler; skipping");
        return;
    }
    // target/<profile>/deps/<test> -> target/<profile>
    let profile_dir = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    let lib = profile_dir.join("libadaptive_ic_ffi.a");
    if !lib.exists() {
        eprintln!("{} not built; skipping", lib.display());
        return;
    }
    let dir = std::env::temp_dir().join(format!("aic-c-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let src = dir.join("main.c");
    std::fs::write(
        &src,
        r#"
#include <stdio.h>
#include "adaptive_ic.h"
int main(void) {
    AicExperiment *e = NULL;
    if (aic_experiment_new("{\"protocol\":\"one_third\",\"trials\":2}", &e) != AIC_STATUS_OK) return 10;
    AicReport *r = NULL;
    if (aic_experiment_run(e, &r) != AIC_STATUS_OK) return 11;
    AicRow row;
    if (aic_report_row(r, 1, &row) != AIC_STATUS_OK) return 12;
    if (row.outcome != AIC_OUTCOME_CORRECT || row.nc != 0) return 13;
    aic_experiment_free(e);
    if (aic_experiment_new("{}", &e) == AIC_STATUS_OK || aic_last_error() == NULL) return 14;
    printf("%llu %s\n", (unsigned long long)row.cc, aic_version());
    aic_report_free(r);
    return 0;
}
"#,
    )
    .unwrap();
    let exe = dir.join("main");
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(header().parent().unwrap())
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "C program exited with {:?}", out.status);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), format!("384 {}", env!("CARGO_PKG_VERSION")));
    std::fs::remove_dir_all(dir).unwrap();
}
