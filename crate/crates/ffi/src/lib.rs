//! C ABI for the lineup toolkit.
//!
//! Objects cross the boundary as opaque handles that the caller frees with
//! the matching `*_free` function. Every fallible call returns a
//! [`LineupStatus`]; on failure the message is available from
//! [`lineup_last_error`] until the next call on the same thread.
//! Strings in are NUL-terminated UTF-8; strings out are owned by the caller
//! and released with [`lineup_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use lineup::render::{render_lineup, PanelLayout};
use lineup::{Dataset, ErrorClass, Lineup, MetricKind, NullMechanism, PlotType, Schema};

/// Opaque dataset handle.
pub struct LineupDataset(Dataset);

/// Opaque lineup handle.
pub struct LineupLineup(Lineup);

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LineupStatus {
    Ok = 0,
    /// File could not be read or written.
    Io = 1,
    /// Malformed input: bad schema, CSV, JSON or UTF-8.
    Schema = 2,
    /// Input is well formed but violates an operation's requirements.
    Precondition = 3,
    /// A required pointer argument was null.
    NullArgument = 4,
    /// Internal failure; the call had no effect.
    Panic = 5,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct LineupDifficulty {
    pub delta: f64,
    pub gamma: usize,
    /// True when delta > 0.
    pub easy: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior NUL");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(LineupStatus, String);

impl From<lineup::Error> for Failure {
    fn from(e: lineup::Error) -> Self {
        let status = match e.class() {
            ErrorClass::Io => LineupStatus::Io,
            ErrorClass::Schema => LineupStatus::Schema,
            ErrorClass::Precondition => LineupStatus::Precondition,
        };
        Failure(status, e.to_string())
    }
}

fn null_arg(name: &str) -> Failure {
    Failure(LineupStatus::NullArgument, format!("`{name}` is null"))
}

/// Runs `f`, records any failure and converts it to a status.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> LineupStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => LineupStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            LineupStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null_arg(name));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(LineupStatus::Schema, format!("`{name}` is not valid UTF-8")))
}

unsafe fn ref_arg<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null_arg(name))
}

unsafe fn out_arg<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null_arg(name))
}

/// Message for the last failed call on this thread, or null. Valid until
/// the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn lineup_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Loads a CSV file validated against a JSON schema file.
///
/// # Safety
/// Path arguments must be NUL-terminated strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lineup_dataset_load(
    csv_path: *const c_char,
    schema_path: *const c_char,
    out: *mut *mut LineupDataset,
) -> LineupStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let csv = str_arg(csv_path, "csv_path")?;
        let schema = Schema::load(Path::new(str_arg(schema_path, "schema_path")?))?;
        let data = lineup::load_dataset(Path::new(csv), &schema)?;
        *out = Box::into_raw(Box::new(LineupDataset(data)));
        Ok(())
    })
}

/// Number of rows, or 0 for a null handle.
///
/// # Safety
/// `data` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lineup_dataset_rows(data: *const LineupDataset) -> usize {
    data.as_ref().map_or(0, |d| d.0.n())
}

/// # Safety
/// `data` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lineup_dataset_free(data: *mut LineupDataset) {
    if !data.is_null() {
        drop(Box::from_raw(data));
    }
}

/// Builds a lineup of `m` panels. `plot_type` is one of `scatter`,
/// `scatter_with_regression`, `boxplot_pair`, `projection_1d`,
/// `projection_2d`; `question` may be null.
///
/// # Safety
/// Pointer arguments must be valid; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lineup_generate(
    data: *const LineupDataset,
    mechanism_json: *const c_char,
    m: usize,
    seed: u64,
    plot_type: *const c_char,
    question: *const c_char,
    out: *mut *mut LineupLineup,
) -> LineupStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let data = ref_arg(data, "data")?;
        let mech = NullMechanism::from_json_str(str_arg(mechanism_json, "mechanism_json")?)?;
        let plot: PlotType = str_arg(plot_type, "plot_type")?.parse()?;
        let question = if question.is_null() { "" } else { str_arg(question, "question")? };
        let l = lineup::generate_lineup(&data.0, &mech, m, seed, plot, question)?;
        *out = Box::into_raw(Box::new(LineupLineup(l)));
        Ok(())
    })
}

/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lineup_lineup_load(path: *const c_char, out: *mut *mut LineupLineup) -> LineupStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let l = Lineup::load(Path::new(str_arg(path, "path")?))?;
        *out = Box::into_raw(Box::new(LineupLineup(l)));
        Ok(())
    })
}

/// # Safety
/// `lineup` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn lineup_lineup_save(lineup: *const LineupLineup, path: *const c_char) -> LineupStatus {
    guard(|| {
        let l = ref_arg(lineup, "lineup")?;
        l.0.save(Path::new(str_arg(path, "path")?))?;
        Ok(())
    })
}

/// Panel count, or 0 for a null handle.
///
/// # Safety
/// `lineup` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lineup_lineup_m(lineup: *const LineupLineup) -> usize {
    lineup.as_ref().map_or(0, |l| l.0.m())
}

/// 1-based position of the real-data panel, or 0 for a null handle.
///
/// # Safety
/// `lineup` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lineup_lineup_true_position(lineup: *const LineupLineup) -> usize {
    lineup.as_ref().map_or(0, |l| l.0.true_position())
}

/// # Safety
/// `lineup` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lineup_lineup_free(lineup: *mut LineupLineup) {
    if !lineup.is_null() {
        drop(Box::from_raw(lineup));
    }
}

/// Distance between two datasets under a metric given as JSON, e.g.
/// `{"kind":"BN","p":8,"q":8}`.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lineup_distance(
    x: *const LineupDataset,
    y: *const LineupDataset,
    metric_json: *const c_char,
    out: *mut f64,
) -> LineupStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let (x, y) = (ref_arg(x, "x")?, ref_arg(y, "y")?);
        let kind = MetricKind::from_json_str(str_arg(metric_json, "metric_json")?)?;
        *out = lineup::distance(&x.0, &y.0, &kind)?;
        Ok(())
    })
}

/// δ, γ and verdict of a lineup under a metric.
///
/// # Safety
/// `lineup` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lineup_difficulty(
    lineup: *const LineupLineup,
    metric_json: *const c_char,
    out: *mut LineupDifficulty,
) -> LineupStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let l = ref_arg(lineup, "lineup")?;
        let kind = MetricKind::from_json_str(str_arg(metric_json, "metric_json")?)?;
        let report = lineup::difficulty(&lineup::mean_distances(&l.0, &kind)?)?;
        *out = LineupDifficulty {
            delta: report.delta,
            gamma: report.gamma,
            easy: report.verdict == lineup::Verdict::Easy,
        };
        Ok(())
    })
}

/// Fills `samples[0..n]` with the empirical null distribution of the mean
/// distance.
///
/// # Safety
/// `samples` must point to at least `n` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn lineup_empirical_distribution(
    data: *const LineupDataset,
    mechanism_json: *const c_char,
    metric_json: *const c_char,
    m: usize,
    n: usize,
    seed: u64,
    samples: *mut f64,
) -> LineupStatus {
    guard(|| {
        if samples.is_null() {
            return Err(null_arg("samples"));
        }
        let data = ref_arg(data, "data")?;
        let mech = NullMechanism::from_json_str(str_arg(mechanism_json, "mechanism_json")?)?;
        let kind = MetricKind::from_json_str(str_arg(metric_json, "metric_json")?)?;
        let dist = lineup::empirical_distribution(&data.0, &mech, &kind, m, n, seed)?;
        std::slice::from_raw_parts_mut(samples, n).copy_from_slice(&dist.samples);
        Ok(())
    })
}

/// Renders the lineup as SVG; the true panel is marked only if `reveal`.
///
/// # Safety
/// `lineup` must be live; `out` must be writable. Free the result with
/// [`lineup_string_free`].
#[no_mangle]
pub unsafe extern "C" fn lineup_render_svg(
    lineup: *const LineupLineup,
    reveal: bool,
    out: *mut *mut c_char,
) -> LineupStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let l = ref_arg(lineup, "lineup")?;
        let svg = render_lineup(&l.0, &PanelLayout::for_lineup(&l.0)?, reveal)?;
        *out = CString::new(svg)
            .map_err(|_| Failure(LineupStatus::Panic, "SVG contains NUL".into()))?
            .into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lineup_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
