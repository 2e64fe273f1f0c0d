use std::ffi::{c_char, CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use climact_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0 as c_char; 512];
    unsafe {
        climact_last_error(buf.as_mut_ptr(), buf.len());
        CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned()
    }
}

fn small_config() -> ClimactFitConfig {
    let mut cfg = ClimactFitConfig {
        learning_rate: 0.0,
        n_restarts: 0,
        n_steps: 0,
        n_predictive_samples: 0,
        seed: 0,
        var_s: 0.0,
        early_stop_tol: 0.0,
    };
    assert_eq!(unsafe { climact_fit_config_default(&mut cfg) }, ClimactStatus::Ok);
    cfg.n_restarts = 2;
    cfg.n_steps = 200;
    cfg.n_predictive_samples = 10;
    cfg
}

#[test]
fn defaults_match_library() {
    let cfg = {
        let mut c = small_config();
        unsafe { climact_fit_config_default(&mut c) };
        c
    };
    assert_eq!(cfg.learning_rate, 0.05);
    assert_eq!(cfg.n_restarts, 10);
    assert_eq!(cfg.n_predictive_samples, 100);
    assert_eq!(cfg.var_s, 1.0);
    let v = unsafe { CStr::from_ptr(climact_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn simulate_fit_and_query() {
    unsafe {
        let mut ds = ptr::null_mut();
        assert_eq!(climact_dataset_simulate(6, 150, 1.0, 4, &mut ds), ClimactStatus::Ok);
        assert_eq!(climact_dataset_n_users(ds), 150);
        assert_eq!(climact_dataset_n_subreddits(ds), 6);
        let rate = climact_dataset_activation_rate(ds);
        assert!(rate > 0.0 && rate < 1.0);

        let cfg = small_config();
        let mut fit = ptr::null_mut();
        assert_eq!(climact_fit(ds, &cfg, ptr::null(), &mut fit), ClimactStatus::Ok, "{}", last_error());
        assert_eq!(climact_fit_n_parameters(fit), 39);
        let acc = climact_fit_accuracy(fit);
        assert!((0.0..=1.0).contains(&acc));

        let name = CString::new("beta_A2").unwrap();
        let idx = climact_fit_parameter_index(fit, name.as_ptr());
        assert!(idx >= 0);
        let mut p = ClimactParameter::default();
        assert_eq!(climact_fit_parameter(fit, idx as usize, &mut p), ClimactStatus::Ok);
        assert!(p.ci_low <= p.mean && p.mean <= p.ci_high && p.sd > 0.0);
        let mut buf = vec![0 as c_char; 64];
        let n = climact_fit_parameter_name(fit, idx as usize, buf.as_mut_ptr(), buf.len());
        assert_eq!(n, 7);
        assert_eq!(CStr::from_ptr(buf.as_ptr()).to_str().unwrap(), "beta_A2");

        assert_eq!(climact_fit_parameter(fit, 999, &mut p), ClimactStatus::OutOfRange);
        assert!(last_error().contains("999"));

        let len = climact_fit_to_json(fit, ptr::null_mut(), 0);
        let mut json = vec![0 as c_char; len + 1];
        assert_eq!(climact_fit_to_json(fit, json.as_mut_ptr(), json.len()), len);
        let text = CStr::from_ptr(json.as_ptr()).to_str().unwrap();
        assert!(text.starts_with('{') && text.contains("\"parameters\""));

        let mut ablated = ptr::null_mut();
        let groups = CString::new("E,M").unwrap();
        assert_eq!(climact_fit(ds, &cfg, groups.as_ptr(), &mut ablated), ClimactStatus::Ok);
        assert_eq!(climact_fit_n_parameters(ablated), 39 - 8 - 9);
        climact_fit_free(ablated);

        climact_fit_free(fit);
        climact_dataset_free(ds);
    }
}

#[test]
fn error_codes() {
    unsafe {
        let mut ds = ptr::null_mut();
        assert_eq!(climact_dataset_load(ptr::null(), true, true, &mut ds), ClimactStatus::InvalidArgument);
        let missing = CString::new("/nonexistent/dir").unwrap();
        assert_eq!(climact_dataset_load(missing.as_ptr(), true, true, &mut ds), ClimactStatus::Io);
        assert!(last_error().contains("catalog.csv"));
        assert_eq!(climact_dataset_simulate(0, 10, 1.0, 0, &mut ds), ClimactStatus::Validation);
        assert_eq!(climact_dataset_simulate(3, 10, -1.0, 0, &mut ds), ClimactStatus::Validation);
        assert!(ds.is_null());

        assert_eq!(climact_dataset_simulate(3, 40, 1.0, 0, &mut ds), ClimactStatus::Ok);
        let cfg = small_config();
        let mut fit = ptr::null_mut();
        let bad = CString::new("E,Q").unwrap();
        assert_eq!(climact_fit(ds, &cfg, bad.as_ptr(), &mut fit), ClimactStatus::Validation);
        assert!(last_error().contains("\"Q\""));
        assert_eq!(climact_fit(ptr::null(), &cfg, ptr::null(), &mut fit), ClimactStatus::InvalidArgument);
        let mut zero = cfg;
        zero.n_restarts = 0;
        assert_eq!(climact_fit(ds, &zero, ptr::null(), &mut fit), ClimactStatus::Validation);
        assert!(fit.is_null());

        // null handles are tolerated by queries and destructors
        assert_eq!(climact_dataset_n_users(ptr::null()), 0);
        assert!(climact_fit_accuracy(ptr::null()).is_nan());
        climact_fit_free(ptr::null_mut());
        climact_dataset_free(ds);
    }
}

#[test]
fn loads_directory_written_by_core() {
    let dir = tempfile::tempdir().unwrap();
    let catalog = climact::model::random_catalog(4, 1).unwrap();
    let (users, _) = climact::model::forward_sample(
        &climact::model::ModelParameters::example(),
        &catalog,
        &climact::model::Hyperparameters::default(),
        30,
        &Default::default(),
        2,
    )
    .unwrap();
    climact::ingestion::save_catalog(&catalog, &dir.path().join("catalog.csv")).unwrap();
    climact::ingestion::save_users(&users, &dir.path().join("users.csv")).unwrap();
    let path = CString::new(dir.path().to_str().unwrap()).unwrap();
    unsafe {
        let mut ds = ptr::null_mut();
        assert_eq!(climact_dataset_load(path.as_ptr(), false, true, &mut ds), ClimactStatus::Ok);
        assert_eq!(climact_dataset_n_users(ds), 30);
        assert_eq!(climact_dataset_n_subreddits(ds), 4);
        climact_dataset_free(ds);
    }
}

fn target_dir() -> PathBuf {
    // <target>/<profile>/deps/<test binary>
    std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn header_compiles_and_links_from_c() {
    let header_dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let header = std::fs::read_to_string(header_dir.join("climact.h")).unwrap();
    for f in ["climact_dataset_load", "climact_fit", "climact_fit_free", "climact_last_error", "CLIMACT_STATUS_OK"] {
        assert!(header.contains(f), "{f} missing from header");
    }
    let lib = target_dir().join("libclimact_ffi.a");
    assert!(lib.exists(), "static library not found at {}", lib.display());

    let work = tempfile::tempdir().unwrap();
    let src = work.path().join("main.c");
    std::fs::write(
        &src,
        r#"
#include <stdio.h>
#include "climact.h"

int main(void) {
    ClimactDataset *ds = NULL;
    if (climact_dataset_simulate(5, 80, 1.0, 7, &ds) != CLIMACT_STATUS_OK) return 10;
    ClimactFitConfig cfg;
    climact_fit_config_default(&cfg);
    cfg.n_restarts = 1;
    cfg.n_steps = 100;
    cfg.n_predictive_samples = 5;
    ClimactFit *fit = NULL;
    if (climact_fit(ds, &cfg, "I", &fit) != CLIMACT_STATUS_OK) return 11;
    ClimactParameter p;
    ClimactStatus s = climact_fit_parameter(fit, 1000, &p);
    char msg[128];
    climact_last_error(msg, sizeof msg);
    printf("%zu %d %s\n", climact_fit_n_parameters(fit), (int)s, msg);
    climact_fit_free(fit);
    climact_dataset_free(ds);
    return 0;
}
"#,
    )
    .unwrap();
    let exe = work.path().join("main");
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(&header_dir)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("C compiler available");
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status);
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(stdout.trim(), "32 5 parameter index 1000 out of range");
}
