//! C ABI over `fdo-core`.
//!
//! All state lives behind an opaque [`FdoContext`]. Functions return an
//! [`FdoStatus`]; on failure a description is available from
//! [`fdo_last_error_message`] on the same thread. Strings handed out by the
//! library must be released with [`fdo_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use fdo_core::conformance::{render_report, ReportFormat};
use fdo_core::record::{parse_record, serialize_record};
use fdo_core::registry::RegistryError;
use fdo_core::types::TypeError;
use fdo_core::{FdoSpace, Pid, RecordError, SpaceError, ValueType};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FdoStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    MalformedDocument = 3,
    ValidationFailed = 4,
    NotFound = 5,
    InvalidPid = 6,
    TypeError = 7,
    Io = 8,
    Conflict = 9,
    InvalidArgument = 10,
    Internal = 11,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FdoExportFormat {
    Triples = 0,
    Dot = 1,
}

/// Opaque handle owning a type registry, PID registry and engines.
pub struct FdoContext {
    space: FdoSpace,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(FdoStatus, String);

type FfiResult = Result<(), Failure>;

fn set_last_error(message: &str) {
    let text = CString::new(message.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(text));
}

fn guard(body: impl FnOnce() -> FfiResult) -> FdoStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
            FdoStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_last_error(&message);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            FdoStatus::Internal
        }
    }
}

unsafe fn text<'a>(ptr: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if ptr.is_null() {
        return Err(Failure(FdoStatus::NullArgument, format!("{name} is null")));
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map_err(|e| Failure(FdoStatus::InvalidUtf8, format!("{name}: {e}")))
}

unsafe fn context<'a>(ctx: *const FdoContext) -> Result<&'a FdoContext, Failure> {
    ctx.as_ref().ok_or_else(|| Failure(FdoStatus::NullArgument, "context is null".into()))
}

unsafe fn write_out<T>(out: *mut T, value: T, name: &str) -> FfiResult {
    if out.is_null() {
        return Err(Failure(FdoStatus::NullArgument, format!("{name} is null")));
    }
    out.write(value);
    Ok(())
}

unsafe fn write_string(out: *mut *mut c_char, value: String, name: &str) -> FfiResult {
    let c = CString::new(value).map_err(|e| Failure(FdoStatus::Internal, e.to_string()))?;
    write_out(out, c.into_raw(), name)
}

fn parse_pid(text: &str) -> Result<Pid, Failure> {
    Pid::parse(text).map_err(|e| Failure(FdoStatus::InvalidPid, e.to_string()))
}

impl From<RegistryError> for Failure {
    fn from(e: RegistryError) -> Self {
        let status = match e {
            RegistryError::NotFound(_) => FdoStatus::NotFound,
            RegistryError::MalformedRecordDocument { .. } => FdoStatus::MalformedDocument,
            RegistryError::Io { .. } => FdoStatus::Io,
            RegistryError::InvalidPrefix(_) => FdoStatus::InvalidArgument,
            RegistryError::ImmutableEntry(_) | RegistryError::AlreadyRegistered(_) => FdoStatus::Conflict,
            RegistryError::RemoteUnavailable(_) => FdoStatus::NotFound,
        };
        Failure(status, e.to_string())
    }
}

impl From<RecordError> for Failure {
    fn from(e: RecordError) -> Self {
        match e {
            RecordError::Registry(inner) => inner.into(),
            RecordError::MalformedRecordDocument(_) => Failure(FdoStatus::MalformedDocument, e.to_string()),
            RecordError::ValidationFailed(_) | RecordError::InvalidProfile { .. } => {
                Failure(FdoStatus::ValidationFailed, e.to_string())
            }
            RecordError::UnknownProfile(_) => Failure(FdoStatus::NotFound, e.to_string()),
            RecordError::AlreadyRegistered(_) => Failure(FdoStatus::Conflict, e.to_string()),
        }
    }
}

impl From<TypeError> for Failure {
    fn from(e: TypeError) -> Self {
        Failure(FdoStatus::TypeError, e.to_string())
    }
}

impl From<SpaceError> for Failure {
    fn from(e: SpaceError) -> Self {
        match e {
            SpaceError::Type(t) => t.into(),
            SpaceError::Registry(r) => r.into(),
            SpaceError::Io { .. } => Failure(FdoStatus::Io, e.to_string()),
            SpaceError::Operation(_) => Failure(FdoStatus::Internal, e.to_string()),
        }
    }
}

/// Creates a context with the bundled profiles registered. `pid_prefix` may
/// be null for the default prefix. Returns null on failure.
///
/// # Safety
/// `pid_prefix` must be null or a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn fdo_context_new(pid_prefix: *const c_char) -> *mut FdoContext {
    let mut handle = ptr::null_mut();
    guard(|| {
        let mut builder = FdoSpace::builder();
        if !pid_prefix.is_null() {
            builder = builder.prefix(text(pid_prefix, "pid_prefix")?);
        }
        let space = builder.build()?;
        handle = Box::into_raw(Box::new(FdoContext { space }));
        Ok(())
    });
    handle
}

/// # Safety
/// `ctx` must be null or a pointer returned by [`fdo_context_new`] that has
/// not been freed.
#[no_mangle]
pub unsafe extern "C" fn fdo_context_free(ctx: *mut FdoContext) {
    if !ctx.is_null() {
        drop(Box::from_raw(ctx));
    }
}

/// Loads every record document in `dir` as read-only fixtures.
///
/// # Safety
/// Pointers must be valid; `out_count` may be null.
#[no_mangle]
pub unsafe extern "C" fn fdo_load_fixtures(
    ctx: *mut FdoContext,
    dir: *const c_char,
    out_count: *mut libc::size_t,
) -> FdoStatus {
    guard(|| {
        let ctx = context(ctx)?;
        let count = ctx.space.registry().load_fixture_set(text(dir, "dir")?)?;
        if !out_count.is_null() {
            out_count.write(count);
        }
        Ok(())
    })
}

/// Registers a kernel information profile snapshot (JSON).
///
/// # Safety
/// Pointers must be valid NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn fdo_import_profile(ctx: *mut FdoContext, snapshot_json: *const c_char) -> FdoStatus {
    guard(|| {
        let ctx = context(ctx)?;
        ctx.space.import_profile(text(snapshot_json, "snapshot_json")?)?;
        Ok(())
    })
}

/// Validates a record document. Writes the validity flag and, when
/// `out_report` is non-null, the validation outcome as JSON.
///
/// # Safety
/// Pointers must be valid; `out_report` may be null.
#[no_mangle]
pub unsafe extern "C" fn fdo_validate_record(
    ctx: *mut FdoContext,
    record_json: *const c_char,
    out_valid: *mut bool,
    out_report: *mut *mut c_char,
) -> FdoStatus {
    guard(|| {
        let ctx = context(ctx)?;
        let record = parse_record(text(record_json, "record_json")?)?;
        let outcome = ctx.space.records().validate_record(&record, None)?;
        write_out(out_valid, outcome.valid, "out_valid")?;
        if !out_report.is_null() {
            let json = serde_json::to_string(&outcome).map_err(|e| Failure(FdoStatus::Internal, e.to_string()))?;
            write_string(out_report, json, "out_report")?;
        }
        Ok(())
    })
}

/// Validates and registers a record document without a PID; writes the
/// newly minted PID.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fdo_register_record(
    ctx: *mut FdoContext,
    record_json: *const c_char,
    out_pid: *mut *mut c_char,
) -> FdoStatus {
    guard(|| {
        let ctx = context(ctx)?;
        if out_pid.is_null() {
            return Err(Failure(FdoStatus::NullArgument, "out_pid is null".into()));
        }
        let mut record = parse_record(text(record_json, "record_json")?)?;
        let pid = ctx.space.records().register_record(&mut record)?;
        write_string(out_pid, pid.to_string(), "out_pid")
    })
}

/// Resolves a PID and writes its record document.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fdo_resolve(ctx: *mut FdoContext, pid: *const c_char, out_json: *mut *mut c_char) -> FdoStatus {
    guard(|| {
        let ctx = context(ctx)?;
        if out_json.is_null() {
            return Err(Failure(FdoStatus::NullArgument, "out_json is null".into()));
        }
        let record = ctx.space.resolve(&parse_pid(text(pid, "pid")?)?)?;
        let doc = serialize_record(&record, ctx.space.types()).to_string();
        write_string(out_json, doc, "out_json")
    })
}

/// Exports the graph over all loaded records.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fdo_graph_export(
    ctx: *mut FdoContext,
    format: FdoExportFormat,
    out_text: *mut *mut c_char,
) -> FdoStatus {
    guard(|| {
        let ctx = context(ctx)?;
        if out_text.is_null() {
            return Err(Failure(FdoStatus::NullArgument, "out_text is null".into()));
        }
        let graph = ctx.space.graph();
        let body = match format {
            FdoExportFormat::Triples => graph.export_triples(),
            FdoExportFormat::Dot => graph.export_dot(),
        };
        write_string(out_text, body, "out_text")
    })
}

/// Checks a record snapshot for model conformance and writes the report
/// document. `out_overall` may be null.
///
/// # Safety
/// Pointers must be valid; `out_overall` may be null.
#[no_mangle]
pub unsafe extern "C" fn fdo_check_conformance(
    ctx: *mut FdoContext,
    snapshot_json: *const c_char,
    out_report: *mut *mut c_char,
    out_overall: *mut bool,
) -> FdoStatus {
    guard(|| {
        let ctx = context(ctx)?;
        if out_report.is_null() {
            return Err(Failure(FdoStatus::NullArgument, "out_report is null".into()));
        }
        let report = ctx
            .space
            .conformance()
            .check_document(text(snapshot_json, "snapshot_json")?)
            .map_err(|e| Failure(FdoStatus::MalformedDocument, e.to_string()))?;
        if !out_overall.is_null() {
            out_overall.write(report.overall);
        }
        write_string(out_report, render_report(&report, ReportFormat::Document), "out_report")
    })
}

/// Checks `value` against a value type given by name (for example
/// `"url"` or `"date-time-rfc3339"`).
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fdo_validate_value(
    type_name: *const c_char,
    value: *const c_char,
    out_valid: *mut bool,
) -> FdoStatus {
    guard(|| {
        let kind: ValueType = text(type_name, "type_name")?
            .parse()
            .map_err(|e: fdo_core::types::UnknownValueType| Failure(FdoStatus::InvalidArgument, e.to_string()))?;
        write_out(out_valid, kind.validate(text(value, "value")?), "out_valid")
    })
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn fdo_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Frees a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string obtained from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn fdo_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
