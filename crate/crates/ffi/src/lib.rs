//! C ABI for the kecss solvers.
//!
//! Instances and solutions are opaque handles created and freed by this
//! library. Every fallible call returns a [`KecssStatus`]; on failure
//! [`kecss_last_error`] describes the problem. Strings returned through out
//! parameters are owned by the caller and released with [`kecss_string_free`].
//! Rationals cross the boundary as `"p/q"` text.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use kecss::ghost_rounding::RoundingOptions;
use kecss::harness::io::{emit_instance, parse_instance};
use kecss::multigraph::{MultiGraph, VertexId};
use kecss::problems::{
    instance_lp_value, solve, verify_solution, Claims, Instance, Mode, ProblemError, SolveReport,
    VerifyDepth,
};
use kecss::rational::{format_rational, parse_rational, Rational};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KecssStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// Malformed instance text, rational or UTF-8.
    Parse = 2,
    /// The instance has no feasible solution (or no LP solution).
    Infeasible = 3,
    /// A solver invariant failed; this is a bug report, not bad input.
    Invariant = 4,
    /// Well-formed but invalid input, such as k < 1 or a vertex out of range.
    InvalidArgument = 5,
    /// Output buffer too small.
    BufferTooSmall = 6,
    /// Any other failure, including a caught panic.
    Internal = 7,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KecssMode {
    Ecss = 0,
    Ecsm = 1,
    Subset = 2,
}

impl From<KecssMode> for Mode {
    fn from(m: KecssMode) -> Self {
        match m {
            KecssMode::Ecss => Mode::Ecss,
            KecssMode::Ecsm => Mode::Ecsm,
            KecssMode::Subset => Mode::Subset,
        }
    }
}

/// Opaque problem instance.
pub struct KecssInstance {
    inner: Instance,
}

/// Opaque solver result.
pub struct KecssSolution {
    report: SolveReport,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(KecssStatus, String);

fn set_error(message: &str) {
    let text = CString::new(message.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(text));
}

fn problem(e: ProblemError) -> Failure {
    let status = if e.is_invariant_violation() {
        KecssStatus::Invariant
    } else if e.is_infeasible() {
        KecssStatus::Infeasible
    } else if matches!(
        e,
        ProblemError::InvalidK(_) | ProblemError::CostLength { .. } | ProblemError::NegativeCost(_)
    ) {
        KecssStatus::InvalidArgument
    } else {
        KecssStatus::Internal
    };
    Failure(status, e.to_string())
}

/// Runs `body`, records any failure and converts panics.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> KecssStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            KecssStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_error(&message);
            status
        }
        Err(_) => {
            set_error("internal panic");
            KecssStatus::Internal
        }
    }
}

fn non_null<T>(p: *const T, name: &str) -> Result<(), Failure> {
    if p.is_null() {
        Err(Failure(
            KecssStatus::NullArgument,
            format!("`{name}` is null"),
        ))
    } else {
        Ok(())
    }
}

unsafe fn c_str<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    non_null(p, name)?;
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(KecssStatus::Parse, format!("`{name}` is not UTF-8")))
}

fn owned_string(s: &str) -> *mut c_char {
    CString::new(s).expect("no interior nul").into_raw()
}

/// Message for the last failed call on this thread, or null after a
/// success. Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn kecss_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version, a static string.
#[no_mangle]
pub extern "C" fn kecss_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn kecss_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses instance text (the `kecss` instance file format).
///
/// # Safety
/// `text` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kecss_instance_parse(
    text: *const c_char,
    out: *mut *mut KecssInstance,
) -> KecssStatus {
    guard(|| {
        non_null(out, "out")?;
        let s = c_str(text, "text")?;
        let inner = parse_instance(s).map_err(|e| Failure(KecssStatus::Parse, e.to_string()))?;
        *out = Box::into_raw(Box::new(KecssInstance { inner }));
        Ok(())
    })
}

/// Creates an instance on `n` vertices with no edges, rooted at vertex 0.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kecss_instance_new(
    mode: KecssMode,
    n: usize,
    k: i64,
    out: *mut *mut KecssInstance,
) -> KecssStatus {
    guard(|| {
        non_null(out, "out")?;
        if n == 0 {
            return Err(Failure(
                KecssStatus::InvalidArgument,
                "need at least one vertex".into(),
            ));
        }
        let graph = MultiGraph::new(n, VertexId(0))
            .map_err(|e| Failure(KecssStatus::InvalidArgument, e.to_string()))?;
        let mut inner = Instance::new(mode.into(), k, graph, Vec::new());
        if inner.mode == Mode::Subset {
            inner.terminals = inner.graph.vertices().collect();
        }
        *out = Box::into_raw(Box::new(KecssInstance { inner }));
        Ok(())
    })
}

/// Appends an edge `u v` with cost given as rational text (`"3"`, `"3/2"`,
/// `"0.25"`). Edge ids follow insertion order.
///
/// # Safety
/// `instance` must be a live handle; `cost` a nul-terminated string.
#[no_mangle]
pub unsafe extern "C" fn kecss_instance_add_edge(
    instance: *mut KecssInstance,
    u: usize,
    v: usize,
    cost: *const c_char,
) -> KecssStatus {
    guard(|| {
        non_null(instance, "instance")?;
        let c: Rational = parse_rational(c_str(cost, "cost")?)
            .map_err(|e| Failure(KecssStatus::Parse, e.to_string()))?;
        let inst = &mut (*instance).inner;
        inst.graph
            .add_edge(VertexId(u), VertexId(v))
            .map_err(|e| Failure(KecssStatus::InvalidArgument, e.to_string()))?;
        inst.cost.push(c);
        Ok(())
    })
}

/// Replaces the terminal set of a subset instance.
///
/// # Safety
/// `instance` must be a live handle; `terminals` must point to `len` values.
#[no_mangle]
pub unsafe extern "C" fn kecss_instance_set_terminals(
    instance: *mut KecssInstance,
    terminals: *const usize,
    len: usize,
) -> KecssStatus {
    guard(|| {
        non_null(instance, "instance")?;
        non_null(terminals, "terminals")?;
        let inst = &mut (*instance).inner;
        let list = std::slice::from_raw_parts(terminals, len);
        if let Some(t) = list
            .iter()
            .find(|t| !inst.graph.contains_vertex(VertexId(**t)))
        {
            return Err(Failure(
                KecssStatus::InvalidArgument,
                format!("terminal {t} is not a vertex"),
            ));
        }
        inst.terminals = list.iter().map(|&t| VertexId(t)).collect();
        Ok(())
    })
}

/// Number of vertices, or 0 for a null handle.
///
/// # Safety
/// `instance` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn kecss_instance_vertex_count(instance: *const KecssInstance) -> usize {
    instance
        .as_ref()
        .map_or(0, |i| i.inner.graph.vertex_count())
}

/// Number of edges, or 0 for a null handle.
///
/// # Safety
/// `instance` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn kecss_instance_edge_count(instance: *const KecssInstance) -> usize {
    instance.as_ref().map_or(0, |i| i.inner.graph.edge_slots())
}

/// Instance in file format; free with [`kecss_string_free`].
///
/// # Safety
/// `instance` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kecss_instance_to_text(
    instance: *const KecssInstance,
    out: *mut *mut c_char,
) -> KecssStatus {
    guard(|| {
        non_null(instance, "instance")?;
        non_null(out, "out")?;
        *out = owned_string(&emit_instance(&(*instance).inner));
        Ok(())
    })
}

/// # Safety
/// `instance` must be null or a live handle; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn kecss_instance_free(instance: *mut KecssInstance) {
    if !instance.is_null() {
        drop(Box::from_raw(instance));
    }
}

/// Exact LP optimum at connectivity `k` for the instance's mode, as text.
///
/// # Safety
/// `instance` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kecss_lp_value(
    instance: *const KecssInstance,
    k: i64,
    out: *mut *mut c_char,
) -> KecssStatus {
    guard(|| {
        non_null(instance, "instance")?;
        non_null(out, "out")?;
        let value = instance_lp_value(&(*instance).inner, k).map_err(problem)?;
        *out = owned_string(&format_rational(&value));
        Ok(())
    })
}

/// Runs the solver for the instance's mode and k.
///
/// # Safety
/// `instance` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kecss_solve(
    instance: *const KecssInstance,
    out: *mut *mut KecssSolution,
) -> KecssStatus {
    guard(|| {
        non_null(instance, "instance")?;
        non_null(out, "out")?;
        let outcome = solve(&(*instance).inner, &RoundingOptions::default()).map_err(problem)?;
        *out = Box::into_raw(Box::new(KecssSolution {
            report: outcome.report,
        }));
        Ok(())
    })
}

/// Number of entries in the multiplicity vector, or 0 for a null handle.
///
/// # Safety
/// `solution` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn kecss_solution_len(solution: *const KecssSolution) -> usize {
    solution.as_ref().map_or(0, |s| s.report.z.len())
}

/// Copies the multiplicity of every edge into `buffer`, which must hold
/// [`kecss_solution_len`] entries.
///
/// # Safety
/// `solution` must be a live handle; `buffer` must hold `capacity` values.
#[no_mangle]
pub unsafe extern "C" fn kecss_solution_multiplicities(
    solution: *const KecssSolution,
    buffer: *mut u64,
    capacity: usize,
) -> KecssStatus {
    guard(|| {
        non_null(solution, "solution")?;
        non_null(buffer, "buffer")?;
        let z = &(*solution).report.z;
        if capacity < z.len() {
            return Err(Failure(
                KecssStatus::BufferTooSmall,
                format!("need {} entries, got {capacity}", z.len()),
            ));
        }
        ptr::copy_nonoverlapping(z.as_ptr(), buffer, z.len());
        Ok(())
    })
}

/// Solution cost as rational text.
///
/// # Safety
/// `solution` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kecss_solution_cost(
    solution: *const KecssSolution,
    out: *mut *mut c_char,
) -> KecssStatus {
    guard(|| {
        non_null(solution, "solution")?;
        non_null(out, "out")?;
        *out = owned_string(&format_rational(&(*solution).report.cost));
        Ok(())
    })
}

/// Full solve report as JSON (the CLI's solution format).
///
/// # Safety
/// `solution` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kecss_solution_report_json(
    solution: *const KecssSolution,
    out: *mut *mut c_char,
) -> KecssStatus {
    guard(|| {
        non_null(solution, "solution")?;
        non_null(out, "out")?;
        let json = serde_json::to_string(&(*solution).report)
            .map_err(|e| Failure(KecssStatus::Internal, e.to_string()))?;
        *out = owned_string(&json);
        Ok(())
    })
}

/// # Safety
/// `solution` must be null or a live handle; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn kecss_solution_free(solution: *mut KecssSolution) {
    if !solution.is_null() {
        drop(Box::from_raw(solution));
    }
}

/// Checks that multiplicities `z` (one per edge) satisfy the instance's
/// connectivity requirement. Enumerates every cut when `exhaustive` and the
/// graph has at most 16 vertices; uses minimum cuts otherwise.
///
/// # Safety
/// `instance` must be a live handle, `z` must point to `len` values and
/// `passed` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kecss_verify(
    instance: *const KecssInstance,
    z: *const u64,
    len: usize,
    exhaustive: bool,
    passed: *mut bool,
) -> KecssStatus {
    guard(|| {
        non_null(instance, "instance")?;
        non_null(z, "z")?;
        non_null(passed, "passed")?;
        let z = std::slice::from_raw_parts(z, len);
        let depth = if exhaustive {
            VerifyDepth::Exhaustive
        } else {
            VerifyDepth::Fast
        };
        let report =
            verify_solution(&(*instance).inner, z, &Claims::default(), depth).map_err(problem)?;
        *passed = report.passed;
        Ok(())
    })
}
