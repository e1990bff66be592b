//! C interface to `hnslab`.
//!
//! Objects cross the boundary as opaque handles created by `hns_*_new` or
//! `hns_*_from_*` and released with the matching `hns_*_free`. Every
//! fallible call returns an [`HnsStatus`]; on failure the message is kept
//! per thread and can be read with [`hns_last_error`]. Panics are caught
//! and reported as [`HnsStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{self, AssertUnwindSafe};
use std::path::Path;

use hnslab::dynamics::{critical_exponents, Mode, RecordRow, Simulation, TrajectoryRecord};
use hnslab::experiments::{run_experiment, write_table, ExperimentSpec, ResultTable};
use hnslab::spectral::SpectralField;
use hnslab::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HnsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidString = 2,
    /// Config or argument rejected before running.
    InvalidInput = 3,
    /// A run aborted: step rejected or non-finite state.
    Runtime = 4,
    Io = 5,
    OutOfRange = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HnsMode {
    Deterministic = 0,
    Stochastic = 1,
    StochasticCutoff = 2,
}

impl From<HnsMode> for Mode {
    fn from(m: HnsMode) -> Self {
        match m {
            HnsMode::Deterministic => Mode::Deterministic,
            HnsMode::Stochastic => Mode::Stochastic,
            HnsMode::StochasticCutoff => Mode::StochasticCutoff,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct HnsExponents {
    pub gamma: f64,
    pub delta: f64,
    pub p_critical: f64,
    pub beta: f64,
}

/// One trajectory row, in the column order of the trajectory CSV.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct HnsRow {
    pub t: f64,
    pub l2: f64,
    pub hr: f64,
    pub hgamma: f64,
    pub besov: f64,
    pub energy_defect: f64,
    pub cutoff_factor: f64,
}

impl From<&RecordRow> for HnsRow {
    fn from(r: &RecordRow) -> Self {
        Self {
            t: r.t,
            l2: r.l2,
            hr: r.hr,
            hgamma: r.hgamma,
            besov: r.besov,
            energy_defect: r.energy_defect,
            cutoff_factor: r.cutoff_factor,
        }
    }
}

pub struct HnsSpec(ExperimentSpec);

pub struct HnsField(SpectralField);

pub struct HnsSimulation(Simulation);

pub struct HnsRecord(TrajectoryRecord);

pub struct HnsTable {
    table: ResultTable,
    csv: CString,
    names: Vec<CString>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure {
    status: HnsStatus,
    message: String,
}

fn fail(status: HnsStatus, message: impl Into<String>) -> Failure {
    Failure {
        status,
        message: message.into(),
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Io(_) => HnsStatus::Io,
            Error::StepRejected { .. } | Error::NonFinite { .. } => HnsStatus::Runtime,
            _ => HnsStatus::InvalidInput,
        };
        fail(status, e.to_string())
    }
}

type Outcome = std::result::Result<(), Failure>;

fn guard(f: impl FnOnce() -> Outcome) -> HnsStatus {
    match panic::catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HnsStatus::Ok,
        Ok(Err(e)) => {
            set_error(&e.message);
            e.status
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(&format!("panic: {msg}"));
            HnsStatus::Panic
        }
    }
}

unsafe fn get<'a, T>(p: *const T, name: &str) -> std::result::Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| fail(HnsStatus::NullPointer, format!("`{name}` is null")))
}

unsafe fn get_mut<'a, T>(p: *mut T, name: &str) -> std::result::Result<&'a mut T, Failure> {
    p.as_mut()
        .ok_or_else(|| fail(HnsStatus::NullPointer, format!("`{name}` is null")))
}

unsafe fn text<'a>(p: *const c_char, name: &str) -> std::result::Result<&'a str, Failure> {
    if p.is_null() {
        return Err(fail(HnsStatus::NullPointer, format!("`{name}` is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| fail(HnsStatus::InvalidString, format!("`{name}`: {e}")))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Outcome {
    let slot = get_mut(out, "out")?;
    *slot = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn release<T>(p: *mut T) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn hns_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn hns_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hns_critical_exponents(gamma: f64, out: *mut HnsExponents) -> HnsStatus {
    guard(|| {
        let slot = get_mut(out, "out")?;
        let e = critical_exponents(gamma)?;
        *slot = HnsExponents {
            gamma: e.gamma,
            delta: e.delta,
            p_critical: e.p_critical,
            beta: e.beta,
        };
        Ok(())
    })
}

/// Parses an experiment document in JSON.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hns_spec_from_json(json: *const c_char, out: *mut *mut HnsSpec) -> HnsStatus {
    guard(|| {
        let spec = ExperimentSpec::from_json(text(json, "json")?)?;
        put(out, HnsSpec(spec))
    })
}

/// Reads an experiment document, TOML or JSON by extension.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hns_spec_from_path(path: *const c_char, out: *mut *mut HnsSpec) -> HnsStatus {
    guard(|| {
        let spec = ExperimentSpec::from_path(Path::new(text(path, "path")?))?;
        put(out, HnsSpec(spec))
    })
}

/// Checks the simulation config and, when the document names one, the
/// rules of its experiment kind.
///
/// # Safety
/// `spec` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn hns_spec_validate(spec: *const HnsSpec) -> HnsStatus {
    guard(|| {
        let spec = &get(spec, "spec")?.0;
        spec.sim.validate()?;
        if let Some(kind) = spec.kind {
            spec.validate(kind)?;
        }
        Ok(())
    })
}

/// # Safety
/// `spec` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hns_spec_free(spec: *mut HnsSpec) {
    release(spec);
}

/// Builds the document's initial field on its grid.
///
/// # Safety
/// `spec` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hns_spec_initial_field(spec: *const HnsSpec, out: *mut *mut HnsField) -> HnsStatus {
    guard(|| {
        let spec = &get(spec, "spec")?.0;
        let field = spec.init.build(spec.sim.grid()?)?;
        put(out, HnsField(field))
    })
}

/// Grid size `N` of the field, 0 for a null handle.
///
/// # Safety
/// `field` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hns_field_grid(field: *const HnsField) -> usize {
    field.as_ref().map_or(0, |f| f.0.grid().points())
}

/// `‖v‖²_{L²}`.
///
/// # Safety
/// `field` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hns_field_energy(field: *const HnsField, out: *mut f64) -> HnsStatus {
    guard(|| {
        let f = &get(field, "field")?.0;
        *get_mut(out, "out")? = f.energy();
        Ok(())
    })
}

/// Coefficient at wavevector `k[0..3]`, written to `out[0..6]` as
/// `re0, im0, re1, im1, re2, im2`.
///
/// # Safety
/// `field` must be a live handle, `k` must point to 3 ints and `out` to 6
/// writable doubles.
#[no_mangle]
pub unsafe extern "C" fn hns_field_coefficient(field: *const HnsField, k: *const i32, out: *mut f64) -> HnsStatus {
    guard(|| {
        let f = &get(field, "field")?.0;
        get(k, "k")?;
        get_mut(out, "out")?;
        let k = std::slice::from_raw_parts(k, 3);
        let k = [k[0], k[1], k[2]];
        let half = f.grid().half();
        if k.iter().any(|c| c.abs() > half) {
            return Err(fail(HnsStatus::OutOfRange, format!("wavevector {k:?} outside |k_i| <= {half}")));
        }
        let c = f.get(k);
        let out = std::slice::from_raw_parts_mut(out, 6);
        for d in 0..3 {
            out[2 * d] = c[d].re;
            out[2 * d + 1] = c[d].im;
        }
        Ok(())
    })
}

/// # Safety
/// `field` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hns_field_free(field: *mut HnsField) {
    release(field);
}

/// Prepares an integrator for the document's simulation config.
///
/// # Safety
/// `spec` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hns_simulation_new(
    spec: *const HnsSpec,
    mode: HnsMode,
    out: *mut *mut HnsSimulation,
) -> HnsStatus {
    guard(|| {
        let spec = &get(spec, "spec")?.0;
        let sim = Simulation::new(&spec.sim, mode.into())?;
        put(out, HnsSimulation(sim))
    })
}

/// Runs sample `sample` from `v0`. A run stopped by the guard still
/// succeeds; see [`hns_record_blowup`].
///
/// # Safety
/// `sim` and `v0` must be live handles; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hns_simulation_run(
    sim: *mut HnsSimulation,
    v0: *const HnsField,
    sample: u64,
    out: *mut *mut HnsRecord,
) -> HnsStatus {
    guard(|| {
        let sim = &mut get_mut(sim, "sim")?.0;
        let v0 = &get(v0, "v0")?.0;
        let rec = sim.run(v0, sample)?;
        put(out, HnsRecord(rec))
    })
}

/// # Safety
/// `sim` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hns_simulation_free(sim: *mut HnsSimulation) {
    release(sim);
}

/// Number of recorded rows, 0 for a null handle.
///
/// # Safety
/// `rec` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hns_record_len(rec: *const HnsRecord) -> usize {
    rec.as_ref().map_or(0, |r| r.0.rows.len())
}

/// # Safety
/// `rec` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hns_record_row(rec: *const HnsRecord, index: usize, out: *mut HnsRow) -> HnsStatus {
    guard(|| {
        let rows = &get(rec, "rec")?.0.rows;
        let slot = get_mut(out, "out")?;
        let row = rows
            .get(index)
            .ok_or_else(|| fail(HnsStatus::OutOfRange, format!("row {index} of {}", rows.len())))?;
        *slot = row.into();
        Ok(())
    })
}

/// Whether the run crossed its guard.
///
/// # Safety
/// `rec` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hns_record_blowup(rec: *const HnsRecord) -> bool {
    rec.as_ref().is_some_and(|r| r.0.blowup)
}

/// Copy of the final field.
///
/// # Safety
/// `rec` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hns_record_final_field(rec: *const HnsRecord, out: *mut *mut HnsField) -> HnsStatus {
    guard(|| {
        let f = get(rec, "rec")?.0.final_field.clone();
        put(out, HnsField(f))
    })
}

/// Trajectory CSV as a new string; release it with [`hns_string_free`].
/// Returns null for a null handle.
///
/// # Safety
/// `rec` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hns_record_csv(rec: *const HnsRecord) -> *mut c_char {
    match rec.as_ref() {
        Some(r) => CString::new(r.0.to_csv()).map_or(std::ptr::null_mut(), CString::into_raw),
        None => std::ptr::null_mut(),
    }
}

/// # Safety
/// `rec` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hns_record_free(rec: *mut HnsRecord) {
    release(rec);
}

/// # Safety
/// `s` must be null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hns_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Runs the experiment named by the document's `kind` with `workers`
/// threads (0 picks the default).
///
/// # Safety
/// `spec` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hns_experiment_run(spec: *const HnsSpec, workers: usize, out: *mut *mut HnsTable) -> HnsStatus {
    guard(|| {
        let spec = &get(spec, "spec")?.0;
        get_mut(out, "out")?;
        let kind = spec
            .kind
            .ok_or_else(|| fail(HnsStatus::InvalidInput, "document has no `kind`"))?;
        let workers = if workers == 0 {
            hnslab::experiments::workers_from_env()
        } else {
            workers
        };
        let table = run_experiment(kind, spec, workers)?;
        let csv = CString::new(table.to_csv()).map_err(|e| fail(HnsStatus::InvalidString, e.to_string()))?;
        let names = table
            .columns
            .iter()
            .map(|c| CString::new(c.as_str()).expect("column names have no NUL"))
            .collect();
        put(out, HnsTable { table, csv, names })
    })
}

/// # Safety
/// `table` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hns_table_rows(table: *const HnsTable) -> usize {
    table.as_ref().map_or(0, |t| t.table.rows.len())
}

/// # Safety
/// `table` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hns_table_columns(table: *const HnsTable) -> usize {
    table.as_ref().map_or(0, |t| t.table.columns.len())
}

/// Name of column `col`, owned by the table; null when out of range.
///
/// # Safety
/// `table` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hns_table_column_name(table: *const HnsTable, col: usize) -> *const c_char {
    table
        .as_ref()
        .and_then(|t| t.names.get(col))
        .map_or(std::ptr::null(), |c| c.as_ptr())
}

/// # Safety
/// `table` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hns_table_value(table: *const HnsTable, row: usize, col: usize, out: *mut f64) -> HnsStatus {
    guard(|| {
        let t = &get(table, "table")?.table;
        let slot = get_mut(out, "out")?;
        *slot = *t
            .rows
            .get(row)
            .and_then(|r| r.get(col))
            .ok_or_else(|| fail(HnsStatus::OutOfRange, format!("cell ({row}, {col})")))?;
        Ok(())
    })
}

/// CSV text of the table, owned by the table.
///
/// # Safety
/// `table` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hns_table_csv(table: *const HnsTable) -> *const c_char {
    table.as_ref().map_or(std::ptr::null(), |t| t.csv.as_ptr())
}

/// Writes the CSV and its `.meta.json` sidecar under `outdir`.
///
/// # Safety
/// `table` and `spec` must be live handles and `outdir` a NUL-terminated
/// string.
#[no_mangle]
pub unsafe extern "C" fn hns_table_write(table: *const HnsTable, spec: *const HnsSpec, outdir: *const c_char) -> HnsStatus {
    guard(|| {
        let t = &get(table, "table")?.table;
        let spec = &get(spec, "spec")?.0;
        write_table(t, spec, Path::new(text(outdir, "outdir")?))?;
        Ok(())
    })
}

/// # Safety
/// `table` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hns_table_free(table: *mut HnsTable) {
    release(table);
}
