//! C ABI for the simulator: opaque handles, status codes, and JSON strings.
//!
//! Every constructor hands back an owned pointer that must be released with
//! the matching `_free` function; strings returned through `char**` out
//! parameters are released with [`tqsim_string_free`]. Functions never
//! panic across the boundary; failures return a status code and leave a
//! thread-local message readable via [`tqsim_last_error_message`].

#![allow(non_camel_case_types)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use tqsim::error::Error;
use tqsim::noise::{load_noise_model, NoiseModel};
use tqsim::partition::CopyCostProfile;
use tqsim::qasm::parse_qasm;
use tqsim::report::{plan_only, run_simulation, ResultsDoc, RunMode, RunOptions};
use tqsim::Circuit;

/// Status codes returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum tqsim_status {
    TQSIM_OK = 0,
    TQSIM_ERR_INVALID_ARGUMENT = 1,
    TQSIM_ERR_PARSE = 2,
    TQSIM_ERR_CAPACITY = 3,
    TQSIM_ERR_NULL_POINTER = 4,
    TQSIM_ERR_UTF8 = 5,
    TQSIM_ERR_INTERNAL = 6,
}

use tqsim_status::*;

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let sanitized = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = sanitized);
}

fn status_of(err: &Error) -> tqsim_status {
    match err {
        Error::Capacity(_) => TQSIM_ERR_CAPACITY,
        Error::QasmSyntax { .. }
        | Error::UnsupportedGate { .. }
        | Error::NoiseSchema { .. }
        | Error::Json(_) => TQSIM_ERR_PARSE,
        _ => TQSIM_ERR_INVALID_ARGUMENT,
    }
}

/// Message for the most recent failure on this thread. Valid until the next
/// failing call on the same thread; never null.
#[no_mangle]
pub extern "C" fn tqsim_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Run a closure behind the FFI boundary, translating errors and panics.
fn guarded<T>(out: *mut T, body: impl FnOnce() -> Result<T, Error>) -> tqsim_status {
    if out.is_null() {
        set_error("output pointer is null");
        return TQSIM_ERR_NULL_POINTER;
    }
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(value)) => {
            unsafe { ptr::write(out, value) };
            TQSIM_OK
        }
        Ok(Err(err)) => {
            set_error(&err.to_string());
            status_of(&err)
        }
        Err(_) => {
            set_error("internal panic");
            TQSIM_ERR_INTERNAL
        }
    }
}

/// # Safety
/// `text` must be a valid NUL-terminated string.
unsafe fn utf8_arg<'a>(text: *const c_char) -> Result<&'a str, Error> {
    if text.is_null() {
        return Err(Error::InvalidArgument("null string argument".into()));
    }
    unsafe { CStr::from_ptr(text) }
        .to_str()
        .map_err(|_| Error::InvalidArgument("string argument is not valid UTF-8".into()))
}

fn into_c_string(text: String) -> *mut c_char {
    CString::new(text.replace('\0', " "))
        .unwrap_or_default()
        .into_raw()
}

/// An immutable parsed circuit.
pub struct tqsim_circuit(Circuit);

/// An immutable validated noise model.
pub struct tqsim_noise_model(NoiseModel);

/// Results of a completed run.
pub struct tqsim_result(ResultsDoc);

/// Parse an OpenQASM 2.0 program. On success `*out` owns the circuit.
///
/// # Safety
/// `text` must be a valid NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tqsim_circuit_parse_qasm(
    text: *const c_char,
    out: *mut *mut tqsim_circuit,
) -> tqsim_status {
    guarded(out, || {
        let src = unsafe { utf8_arg(text) }?;
        Ok(Box::into_raw(Box::new(tqsim_circuit(parse_qasm(src)?))))
    })
}

/// Number of qubits in the circuit.
///
/// # Safety
/// `circuit` must be a live pointer from this library; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tqsim_circuit_n_qubits(
    circuit: *const tqsim_circuit,
    out: *mut u32,
) -> tqsim_status {
    guarded(out, || {
        let c = unsafe { circuit.as_ref() }
            .ok_or_else(|| Error::InvalidArgument("null circuit".into()))?;
        Ok(c.0.n_qubits() as u32)
    })
}

/// Number of gates in the circuit.
///
/// # Safety
/// `circuit` must be a live pointer from this library; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tqsim_circuit_n_gates(
    circuit: *const tqsim_circuit,
    out: *mut u64,
) -> tqsim_status {
    guarded(out, || {
        let c = unsafe { circuit.as_ref() }
            .ok_or_else(|| Error::InvalidArgument("null circuit".into()))?;
        Ok(c.0.n_gates() as u64)
    })
}

/// Release a circuit handle. Null is ignored.
///
/// # Safety
/// `circuit` must be null or a pointer previously returned by this library,
/// released at most once.
#[no_mangle]
pub unsafe extern "C" fn tqsim_circuit_free(circuit: *mut tqsim_circuit) {
    if !circuit.is_null() {
        drop(unsafe { Box::from_raw(circuit) });
    }
}

/// Build a noise model from its JSON document.
///
/// # Safety
/// `json` must be a valid NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tqsim_noise_model_from_json(
    json: *const c_char,
    out: *mut *mut tqsim_noise_model,
) -> tqsim_status {
    guarded(out, || {
        let src = unsafe { utf8_arg(json) }?;
        Ok(Box::into_raw(Box::new(tqsim_noise_model(load_noise_model(
            src,
        )?))))
    })
}

/// A noise-free model (ideal simulation).
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tqsim_noise_model_ideal(
    out: *mut *mut tqsim_noise_model,
) -> tqsim_status {
    guarded(out, || {
        Ok(Box::into_raw(Box::new(tqsim_noise_model(
            NoiseModel::noise_free(),
        ))))
    })
}

/// Release a noise-model handle. Null is ignored.
///
/// # Safety
/// `model` must be null or a pointer previously returned by this library,
/// released at most once.
#[no_mangle]
pub unsafe extern "C" fn tqsim_noise_model_free(model: *mut tqsim_noise_model) {
    if !model.is_null() {
        drop(unsafe { Box::from_raw(model) });
    }
}

/// Scalar options for a run; zero-initialize and fill what you need.
/// `mem_budget_bytes == 0` selects the default budget, and
/// `copy_cost_gates <= 0` the default planning copy cost.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct tqsim_run_options {
    pub shots: u64,
    pub seed: u64,
    pub mem_budget_bytes: u64,
    pub copy_cost_gates: f64,
}

fn build_options(mode: RunMode, raw: &tqsim_run_options) -> Result<RunOptions, Error> {
    let mut options = RunOptions::new(raw.shots, mode, raw.seed);
    if raw.mem_budget_bytes > 0 {
        options.memory_budget_bytes = raw.mem_budget_bytes;
    }
    if raw.copy_cost_gates > 0.0 {
        options.copy_cost = CopyCostProfile::uniform(raw.copy_cost_gates)?;
    }
    Ok(options)
}

unsafe fn run_with(
    circuit: *const tqsim_circuit,
    model: *const tqsim_noise_model,
    options: *const tqsim_run_options,
    mode: RunMode,
    arities: *const u64,
    n_arities: usize,
    out: *mut *mut tqsim_result,
) -> tqsim_status {
    guarded(out, || {
        let circuit = unsafe { circuit.as_ref() }
            .ok_or_else(|| Error::InvalidArgument("null circuit".into()))?;
        let model = unsafe { model.as_ref() }
            .ok_or_else(|| Error::InvalidArgument("null noise model".into()))?;
        let raw = unsafe { options.as_ref() }
            .ok_or_else(|| Error::InvalidArgument("null run options".into()))?;
        let mut options = build_options(mode, raw)?;
        if !arities.is_null() && n_arities > 0 {
            options.arities = Some(unsafe { std::slice::from_raw_parts(arities, n_arities) }.to_vec());
        }
        let doc = run_simulation(&circuit.0, &model.0, &options)?;
        Ok(Box::into_raw(Box::new(tqsim_result(doc))))
    })
}

/// Flat baseline run: `shots` independent full-circuit trajectories.
///
/// # Safety
/// All pointers must be valid; see the crate docs.
#[no_mangle]
pub unsafe extern "C" fn tqsim_run_baseline(
    circuit: *const tqsim_circuit,
    model: *const tqsim_noise_model,
    options: *const tqsim_run_options,
    out: *mut *mut tqsim_result,
) -> tqsim_status {
    unsafe { run_with(circuit, model, options, RunMode::Baseline, ptr::null(), 0, out) }
}

/// Tree run with a planner-chosen structure.
///
/// # Safety
/// All pointers must be valid; see the crate docs.
#[no_mangle]
pub unsafe extern "C" fn tqsim_run_tree(
    circuit: *const tqsim_circuit,
    model: *const tqsim_noise_model,
    options: *const tqsim_run_options,
    out: *mut *mut tqsim_result,
) -> tqsim_status {
    unsafe { run_with(circuit, model, options, RunMode::Tree, ptr::null(), 0, out) }
}

/// Tree run with explicit per-level arities (slice boundaries are chosen
/// near-equal). `arities` points at `n_arities` entries whose product must
/// be at least `options->shots`.
///
/// # Safety
/// All pointers must be valid; `arities` must point at `n_arities` entries.
#[no_mangle]
pub unsafe extern "C" fn tqsim_run_tree_with_arities(
    circuit: *const tqsim_circuit,
    model: *const tqsim_noise_model,
    options: *const tqsim_run_options,
    arities: *const u64,
    n_arities: usize,
    out: *mut *mut tqsim_result,
) -> tqsim_status {
    unsafe { run_with(circuit, model, options, RunMode::Tree, arities, n_arities, out) }
}

/// Baseline and tree in one call, reporting the measured speedup.
///
/// # Safety
/// All pointers must be valid; see the crate docs.
#[no_mangle]
pub unsafe extern "C" fn tqsim_run_both(
    circuit: *const tqsim_circuit,
    model: *const tqsim_noise_model,
    options: *const tqsim_run_options,
    out: *mut *mut tqsim_result,
) -> tqsim_status {
    unsafe { run_with(circuit, model, options, RunMode::Both, ptr::null(), 0, out) }
}

/// Plan a partition without running; `*json_out` receives the plan JSON.
///
/// # Safety
/// All pointers must be valid; free the string with `tqsim_string_free`.
#[no_mangle]
pub unsafe extern "C" fn tqsim_plan_json(
    circuit: *const tqsim_circuit,
    model: *const tqsim_noise_model,
    options: *const tqsim_run_options,
    json_out: *mut *mut c_char,
) -> tqsim_status {
    guarded(json_out, || {
        let circuit = unsafe { circuit.as_ref() }
            .ok_or_else(|| Error::InvalidArgument("null circuit".into()))?;
        let model = unsafe { model.as_ref() }
            .ok_or_else(|| Error::InvalidArgument("null noise model".into()))?;
        let raw = unsafe { options.as_ref() }
            .ok_or_else(|| Error::InvalidArgument("null run options".into()))?;
        let opts = build_options(RunMode::Tree, raw)?;
        let plan = plan_only(
            &circuit.0,
            &model.0,
            opts.shots,
            &opts.copy_cost,
            opts.memory_budget_bytes,
            None,
        )?;
        Ok(into_c_string(serde_json::to_string_pretty(&plan.to_json())?))
    })
}

/// Full results document as JSON.
///
/// # Safety
/// `result` must be live; free the string with `tqsim_string_free`.
#[no_mangle]
pub unsafe extern "C" fn tqsim_result_document_json(
    result: *const tqsim_result,
    json_out: *mut *mut c_char,
) -> tqsim_status {
    guarded(json_out, || {
        let r = unsafe { result.as_ref() }
            .ok_or_else(|| Error::InvalidArgument("null result".into()))?;
        Ok(into_c_string(r.0.to_json_pretty()?))
    })
}

/// Only the counts object, as JSON mapping bitstrings to counts.
///
/// # Safety
/// `result` must be live; free the string with `tqsim_string_free`.
#[no_mangle]
pub unsafe extern "C" fn tqsim_result_counts_json(
    result: *const tqsim_result,
    json_out: *mut *mut c_char,
) -> tqsim_status {
    guarded(json_out, || {
        let r = unsafe { result.as_ref() }
            .ok_or_else(|| Error::InvalidArgument("null result".into()))?;
        Ok(into_c_string(serde_json::to_string_pretty(&r.0.counts)?))
    })
}

/// Release a result handle. Null is ignored.
///
/// # Safety
/// `result` must be null or a pointer previously returned by this library,
/// released at most once.
#[no_mangle]
pub unsafe extern "C" fn tqsim_result_free(result: *mut tqsim_result) {
    if !result.is_null() {
        drop(unsafe { Box::from_raw(result) });
    }
}

/// Release a string returned through a `char**` out parameter.
///
/// # Safety
/// `text` must be null or a string returned by this library, released at
/// most once.
#[no_mangle]
pub unsafe extern "C" fn tqsim_string_free(text: *mut c_char) {
    if !text.is_null() {
        drop(unsafe { CString::from_raw(text) });
    }
}
