use std::ffi::{CStr, CString};
use std::ptr;

use seesaw_ffi::*;

fn last_error() -> String {
    let p = seesaw_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn builtin(name: &str) -> *mut SeesawScenario {
    let name = CString::new(name).unwrap();
    let mut s = ptr::null_mut();
    assert_eq!(
        unsafe { seesaw_scenario_builtin(name.as_ptr(), &mut s) },
        SeesawStatus::Ok
    );
    assert!(!s.is_null());
    s
}

#[test]
fn runs_builtin_and_reads_columns() {
    let s = builtin("bell-negativity");
    let mut t = ptr::null_mut();
    assert_eq!(unsafe { seesaw_run(s, &mut t) }, SeesawStatus::Ok);
    let (mut rows, mut cols) = (0usize, 0usize);
    unsafe {
        assert_eq!(seesaw_table_rows(t, &mut rows), SeesawStatus::Ok);
        assert_eq!(seesaw_table_columns(t, &mut cols), SeesawStatus::Ok);
    }
    assert_eq!(cols, 2);
    let name = unsafe { CStr::from_ptr(seesaw_table_column_name(t, 0)) };
    assert_eq!(name.to_str().unwrap(), "negativity");
    assert!(unsafe { seesaw_table_column_name(t, 5) }.is_null());

    let mut times = vec![0.0; rows];
    let mut neg = vec![0.0; rows];
    unsafe {
        assert_eq!(
            seesaw_table_times(t, times.as_mut_ptr(), rows),
            SeesawStatus::Ok
        );
        assert_eq!(
            seesaw_table_column(t, 0, neg.as_mut_ptr(), rows),
            SeesawStatus::Ok
        );
    }
    for (t, n) in times.iter().zip(&neg) {
        assert!((n - (2.0 * t).sin().abs() / 2.0).abs() < 1e-8);
    }
    unsafe {
        assert_eq!(
            seesaw_table_column(t, 0, neg.as_mut_ptr(), rows - 1),
            SeesawStatus::OutOfRange
        );
        assert_eq!(
            seesaw_table_column(t, 9, neg.as_mut_ptr(), rows),
            SeesawStatus::OutOfRange
        );
        seesaw_table_free(t);
        seesaw_scenario_free(s);
    }
}

#[test]
fn reports_config_errors_with_messages() {
    let text = CString::new("[scenario]\nname = x\nmodel = nonsense\n").unwrap();
    let mut s = ptr::null_mut();
    assert_eq!(
        unsafe { seesaw_scenario_from_config(text.as_ptr(), &mut s) },
        SeesawStatus::Config
    );
    assert!(s.is_null());
    assert!(last_error().contains("model"));

    let unknown = CString::new("no-such-scenario").unwrap();
    assert_eq!(
        unsafe { seesaw_scenario_builtin(unknown.as_ptr(), &mut s) },
        SeesawStatus::Config
    );

    let bad_utf8 = [0xffu8, 0xfe, 0];
    assert_eq!(
        unsafe { seesaw_scenario_from_config(bad_utf8.as_ptr().cast(), &mut s) },
        SeesawStatus::InvalidUtf8
    );
}

#[test]
fn rejects_null_arguments() {
    let mut s = ptr::null_mut();
    unsafe {
        assert_eq!(
            seesaw_scenario_from_config(ptr::null(), &mut s),
            SeesawStatus::NullArgument
        );
        assert_eq!(
            seesaw_run(ptr::null(), ptr::null_mut()),
            SeesawStatus::NullArgument
        );
        assert_eq!(
            seesaw_scenario_set_seed(ptr::null_mut(), 1),
            SeesawStatus::NullArgument
        );
        seesaw_scenario_free(ptr::null_mut());
        seesaw_table_free(ptr::null_mut());
    }
    assert!(last_error().contains("null"));
}

#[test]
fn overrides_and_writes_files() {
    let s = builtin("damped-cavity");
    let dir = tempfile::tempdir().unwrap();
    let path = CString::new(dir.path().to_str().unwrap()).unwrap();
    unsafe {
        assert_eq!(seesaw_scenario_set_trajectories(s, 0), SeesawStatus::Config);
        assert_eq!(seesaw_scenario_set_trajectories(s, 8), SeesawStatus::Ok);
        assert_eq!(seesaw_scenario_set_seed(s, 42), SeesawStatus::Ok);
        assert_eq!(seesaw_run_to_dir(s, path.as_ptr()), SeesawStatus::Ok);
        seesaw_scenario_free(s);
    }
    let meta = std::fs::read_to_string(dir.path().join("meta.txt")).unwrap();
    assert!(meta.contains("master_seed = 42"));
    assert!(meta.contains("n_traj = 8"));
    assert!(dir.path().join("timeseries.csv").exists());
}

#[test]
fn version_is_set() {
    let v = unsafe { CStr::from_ptr(seesaw_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
