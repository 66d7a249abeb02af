//! C interface to the seesaw simulator.
//!
//! Scenarios and result tables are opaque heap handles owned by the caller
//! and released with the matching `*_free` function. Every fallible call
//! returns a [`SeesawStatus`]; on failure the message is available from
//! [`seesaw_last_error_message`] on the same thread until the next failing
//! call. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use seesaw::experiments::{builtin_scenario, execute, run_scenario, Scenario, ScenarioOutput};
use seesaw::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeesawStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// Malformed or invalid scenario configuration.
    Config = 3,
    /// The integrator or a numerical check failed.
    Numerical = 4,
    /// File system error.
    Io = 5,
    /// Row or column index out of range, or a too-small buffer.
    OutOfRange = 6,
    /// Internal panic; the library state is unaffected.
    Panic = 7,
}

/// Parsed, validated scenario.
pub struct SeesawScenario {
    inner: Scenario,
}

/// Time series produced by a run.
pub struct SeesawTable {
    output: ScenarioOutput,
    names: Vec<CString>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(SeesawStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = if e.is_config() {
            SeesawStatus::Config
        } else if matches!(e, Error::Io(_)) {
            SeesawStatus::Io
        } else {
            SeesawStatus::Numerical
        };
        Failure(status, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> SeesawStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SeesawStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_last_error(message);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("internal panic: {msg}"));
            SeesawStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(SeesawStatus::NullArgument, format!("`{what}` is null"))
}

/// # Safety
/// `p` must be null or a NUL-terminated string.
unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        Failure(
            SeesawStatus::InvalidUtf8,
            format!("`{what}` is not valid UTF-8"),
        )
    })
}

/// # Safety
/// `p` must be null or a live handle from this library.
unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

fn store<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    // SAFETY: checked non-null; the caller guarantees it is writable.
    unsafe { *out = Box::into_raw(Box::new(value)) };
    Ok(())
}

/// Message of the most recent failure on this thread, or null if none.
/// The pointer stays valid until the next failing call on this thread.
#[no_mangle]
pub extern "C" fn seesaw_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn seesaw_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses scenario text.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn seesaw_scenario_from_config(
    text: *const c_char,
    out: *mut *mut SeesawScenario,
) -> SeesawStatus {
    guard(|| {
        let text = read_str(text, "text")?;
        store(
            out,
            SeesawScenario {
                inner: Scenario::from_config_str(text)?,
            },
        )
    })
}

/// Loads a scenario file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn seesaw_scenario_load(
    path: *const c_char,
    out: *mut *mut SeesawScenario,
) -> SeesawStatus {
    guard(|| {
        let path = read_str(path, "path")?;
        store(
            out,
            SeesawScenario {
                inner: Scenario::load(Path::new(path))?,
            },
        )
    })
}

/// Loads a built-in scenario by name (`fig2` … `fig6`, `damped-cavity`, …).
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn seesaw_scenario_builtin(
    name: *const c_char,
    out: *mut *mut SeesawScenario,
) -> SeesawStatus {
    guard(|| {
        let name = read_str(name, "name")?;
        let s = builtin_scenario(name).ok_or_else(|| {
            Failure(
                SeesawStatus::Config,
                format!("no built-in scenario named `{name}`"),
            )
        })??;
        store(out, SeesawScenario { inner: s })
    })
}

/// # Safety
/// `scenario` must be null or a live scenario handle.
#[no_mangle]
pub unsafe extern "C" fn seesaw_scenario_set_seed(
    scenario: *mut SeesawScenario,
    seed: u64,
) -> SeesawStatus {
    guard(|| {
        scenario
            .as_mut()
            .ok_or_else(|| null("scenario"))?
            .inner
            .master_seed = seed;
        Ok(())
    })
}

/// # Safety
/// `scenario` must be null or a live scenario handle.
#[no_mangle]
pub unsafe extern "C" fn seesaw_scenario_set_trajectories(
    scenario: *mut SeesawScenario,
    n_traj: usize,
) -> SeesawStatus {
    guard(|| {
        let s = scenario.as_mut().ok_or_else(|| null("scenario"))?;
        if n_traj == 0 {
            return Err(Failure(SeesawStatus::Config, "n_traj must be >= 1".into()));
        }
        s.inner.n_traj = n_traj;
        Ok(())
    })
}

/// # Safety
/// `scenario` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn seesaw_scenario_free(scenario: *mut SeesawScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

fn table(output: ScenarioOutput) -> SeesawTable {
    let names = output
        .columns
        .iter()
        .map(|c| CString::new(c.as_str()).expect("column names have no NUL"))
        .collect();
    SeesawTable { output, names }
}

/// Runs a scenario in memory.
///
/// # Safety
/// `scenario` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn seesaw_run(
    scenario: *const SeesawScenario,
    out: *mut *mut SeesawTable,
) -> SeesawStatus {
    guard(|| {
        let s = deref(scenario, "scenario")?;
        store(out, table(execute(&s.inner)?))
    })
}

/// Runs a scenario and writes `timeseries.csv` and `meta.txt` into `dir`.
///
/// # Safety
/// `scenario` must be a live handle; `dir` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn seesaw_run_to_dir(
    scenario: *const SeesawScenario,
    dir: *const c_char,
) -> SeesawStatus {
    guard(|| {
        let s = deref(scenario, "scenario")?;
        let dir = read_str(dir, "dir")?;
        run_scenario(&s.inner, Path::new(dir))?;
        Ok(())
    })
}

/// Number of recorded times.
///
/// # Safety
/// `t` must be a live table handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn seesaw_table_rows(t: *const SeesawTable, out: *mut usize) -> SeesawStatus {
    guard(|| {
        let t = deref(t, "table")?;
        *out.as_mut().ok_or_else(|| null("out"))? = t.output.rows.len();
        Ok(())
    })
}

/// Number of observable columns, not counting time.
///
/// # Safety
/// `t` must be a live table handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn seesaw_table_columns(
    t: *const SeesawTable,
    out: *mut usize,
) -> SeesawStatus {
    guard(|| {
        let t = deref(t, "table")?;
        *out.as_mut().ok_or_else(|| null("out"))? = t.output.columns.len();
        Ok(())
    })
}

/// Name of column `j`, owned by the table; null when out of range.
///
/// # Safety
/// `t` must be null or a live table handle.
#[no_mangle]
pub unsafe extern "C" fn seesaw_table_column_name(
    t: *const SeesawTable,
    j: usize,
) -> *const c_char {
    t.as_ref()
        .and_then(|t| t.names.get(j))
        .map_or(ptr::null(), |c| c.as_ptr())
}

/// Copies the recorded times into `buf`, which must hold `rows` values.
///
/// # Safety
/// `t` must be a live table handle; `buf` must have room for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn seesaw_table_times(
    t: *const SeesawTable,
    buf: *mut f64,
    len: usize,
) -> SeesawStatus {
    guard(|| {
        let t = deref(t, "table")?;
        copy_out(
            t.output.times.iter().copied(),
            t.output.times.len(),
            buf,
            len,
        )
    })
}

/// Copies column `j` into `buf`, which must hold `rows` values.
///
/// # Safety
/// `t` must be a live table handle; `buf` must have room for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn seesaw_table_column(
    t: *const SeesawTable,
    j: usize,
    buf: *mut f64,
    len: usize,
) -> SeesawStatus {
    guard(|| {
        let t = deref(t, "table")?;
        if j >= t.output.columns.len() {
            return Err(Failure(
                SeesawStatus::OutOfRange,
                format!(
                    "column {j} out of range ({} columns)",
                    t.output.columns.len()
                ),
            ));
        }
        copy_out(
            t.output.rows.iter().map(|r| r[j]),
            t.output.rows.len(),
            buf,
            len,
        )
    })
}

unsafe fn copy_out(
    values: impl Iterator<Item = f64>,
    n: usize,
    buf: *mut f64,
    len: usize,
) -> Result<(), Failure> {
    if buf.is_null() {
        return Err(null("buf"));
    }
    if len < n {
        return Err(Failure(
            SeesawStatus::OutOfRange,
            format!("buffer holds {len} values, {n} needed"),
        ));
    }
    let dst = std::slice::from_raw_parts_mut(buf, n);
    for (d, v) in dst.iter_mut().zip(values) {
        *d = v;
    }
    Ok(())
}

/// # Safety
/// `t` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn seesaw_table_free(t: *mut SeesawTable) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}
