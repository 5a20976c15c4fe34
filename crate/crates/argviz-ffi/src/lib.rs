//! C ABI for the argviz toolkit.
//!
//! Frameworks are opaque handles created by the parse/generate functions and
//! released with [`argviz_framework_free`]. Every fallible function returns an
//! [`ArgvizStatus`] code; on failure a human-readable message is available
//! from [`argviz_last_error`] until the next call on the same thread.
//!
//! The matching C header is generated into `include/argviz.h` at build time.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};

use argviz::generators::gen_sembuster;
use argviz::graph_core::{self, LabeledFramework};
use argviz::hope::{hope_embed, node_feature_matrix};
use argviz::metrics::{knn_label_agreement, silhouette, LabeledPoints};
use argviz::numerics::Matrix;
use argviz::pipeline::stage_seed;
use argviz::tsne::{tsne_embed, TsneConfig};

/// Result code of every fallible FFI call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArgvizStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// The input text could not be parsed as APX/TGF.
    ParseError = 3,
    /// A generator rejected its parameters or is unavailable.
    GeneratorError = 4,
    /// An embedding, projection or metric computation failed.
    ComputeError = 5,
    /// A numeric argument was out of range (e.g. wrong buffer length).
    InvalidArgument = 6,
}

/// Opaque framework handle.
pub struct ArgvizFramework {
    inner: LabeledFramework,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: impl std::fmt::Display) {
    let text = message.to_string().replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(text).expect("NUL bytes stripped");
    });
}

/// Message describing the most recent failure on this thread. The pointer is
/// owned by the library and valid until the next failing call on the thread.
#[no_mangle]
pub extern "C" fn argviz_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

unsafe fn read_utf8<'a>(text: *const c_char) -> Result<&'a str, ArgvizStatus> {
    if text.is_null() {
        set_error("null string argument");
        return Err(ArgvizStatus::NullPointer);
    }
    CStr::from_ptr(text).to_str().map_err(|e| {
        set_error(e);
        ArgvizStatus::InvalidUtf8
    })
}

fn emit(out: *mut *mut ArgvizFramework, lf: LabeledFramework) -> ArgvizStatus {
    if out.is_null() {
        set_error("null output handle");
        return ArgvizStatus::NullPointer;
    }
    unsafe {
        *out = Box::into_raw(Box::new(ArgvizFramework { inner: lf }));
    }
    ArgvizStatus::Ok
}

/// Parses APX text (`arg(x).` / `att(a,b).`) into a new framework handle.
///
/// # Safety
/// `text` must point to a NUL-terminated string; `out` must be a valid
/// pointer to receive the handle.
#[no_mangle]
pub unsafe extern "C" fn argviz_framework_parse_apx(
    text: *const c_char,
    out: *mut *mut ArgvizFramework,
) -> ArgvizStatus {
    let text = match read_utf8(text) {
        Ok(t) => t,
        Err(status) => return status,
    };
    match graph_core::parse_apx(text) {
        Ok(af) => emit(out, LabeledFramework::unlabeled(af)),
        Err(e) => {
            set_error(e);
            ArgvizStatus::ParseError
        }
    }
}

/// Parses TGF text (node ids, `#`, edge pairs) into a new framework handle.
///
/// # Safety
/// `text` must point to a NUL-terminated string; `out` must be a valid
/// pointer to receive the handle.
#[no_mangle]
pub unsafe extern "C" fn argviz_framework_parse_tgf(
    text: *const c_char,
    out: *mut *mut ArgvizFramework,
) -> ArgvizStatus {
    let text = match read_utf8(text) {
        Ok(t) => t,
        Err(status) => return status,
    };
    match graph_core::parse_tgf(text) {
        Ok(af) => emit(out, LabeledFramework::unlabeled(af)),
        Err(e) => {
            set_error(e);
            ArgvizStatus::ParseError
        }
    }
}

/// Generates a Sembuster instance with 3k arguments and k²+3k attacks.
///
/// # Safety
/// `out` must be a valid pointer to receive the handle.
#[no_mangle]
pub unsafe extern "C" fn argviz_framework_sembuster(
    k: usize,
    out: *mut *mut ArgvizFramework,
) -> ArgvizStatus {
    match gen_sembuster(k) {
        Ok(lf) => emit(out, lf),
        Err(e) => {
            set_error(e);
            ArgvizStatus::GeneratorError
        }
    }
}

/// Releases a framework handle. Null is ignored.
///
/// # Safety
/// `framework` must be a handle returned by this library, released at most
/// once.
#[no_mangle]
pub unsafe extern "C" fn argviz_framework_free(framework: *mut ArgvizFramework) {
    if !framework.is_null() {
        drop(Box::from_raw(framework));
    }
}

/// Number of arguments in the framework.
///
/// # Safety
/// `framework` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn argviz_framework_argument_count(
    framework: *const ArgvizFramework,
    out: *mut usize,
) -> ArgvizStatus {
    if framework.is_null() || out.is_null() {
        set_error("null argument");
        return ArgvizStatus::NullPointer;
    }
    *out = (*framework).inner.framework.argument_count();
    ArgvizStatus::Ok
}

/// Number of attacks in the framework.
///
/// # Safety
/// `framework` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn argviz_framework_attack_count(
    framework: *const ArgvizFramework,
    out: *mut usize,
) -> ArgvizStatus {
    if framework.is_null() || out.is_null() {
        set_error("null argument");
        return ArgvizStatus::NullPointer;
    }
    *out = (*framework).inner.framework.attack_count();
    ArgvizStatus::Ok
}

/// Serializes the framework to APX. The returned string must be released
/// with [`argviz_string_free`].
///
/// # Safety
/// `framework` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn argviz_framework_to_apx(
    framework: *const ArgvizFramework,
    out: *mut *mut c_char,
) -> ArgvizStatus {
    if framework.is_null() || out.is_null() {
        set_error("null argument");
        return ArgvizStatus::NullPointer;
    }
    let text = graph_core::serialize_apx(&(*framework).inner.framework);
    match CString::new(text) {
        Ok(s) => {
            *out = s.into_raw();
            ArgvizStatus::Ok
        }
        Err(e) => {
            set_error(e);
            ArgvizStatus::ComputeError
        }
    }
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library, released at most once.
#[no_mangle]
pub unsafe extern "C" fn argviz_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Computes a 2-D node layout: HOPE embedding with `d` dimensions per half,
/// then t-SNE with the given perplexity, iteration count and seed. `out_xy`
/// must hold exactly `2 * argument_count` doubles and is filled with
/// x0,y0,x1,y1,... in argument order.
///
/// # Safety
/// `framework` must be a live handle; `out_xy` must point to `out_len`
/// writable doubles.
#[no_mangle]
pub unsafe extern "C" fn argviz_node_layout(
    framework: *const ArgvizFramework,
    d: usize,
    perplexity: f64,
    iterations: usize,
    seed: u64,
    out_xy: *mut f64,
    out_len: usize,
) -> ArgvizStatus {
    if framework.is_null() || out_xy.is_null() {
        set_error("null argument");
        return ArgvizStatus::NullPointer;
    }
    let af = &(*framework).inner.framework;
    let n = af.argument_count();
    if out_len != 2 * n {
        set_error(format!("buffer holds {out_len} doubles, layout needs {}", 2 * n));
        return ArgvizStatus::InvalidArgument;
    }
    let emb = match hope_embed(af, d, None, stage_seed(seed, "hope")) {
        Ok(e) => e,
        Err(e) => {
            set_error(e);
            return ArgvizStatus::ComputeError;
        }
    };
    let config = TsneConfig {
        perplexity,
        iterations,
        exaggeration_iters: TsneConfig::default().exaggeration_iters.min(iterations / 4),
        seed: stage_seed(seed, "tsne"),
        ..TsneConfig::default()
    };
    match tsne_embed(&node_feature_matrix(&emb), &config) {
        Ok(layout) => {
            let out = std::slice::from_raw_parts_mut(out_xy, out_len);
            out.copy_from_slice(layout.y.data());
            ArgvizStatus::Ok
        }
        Err(e) => {
            set_error(e);
            ArgvizStatus::ComputeError
        }
    }
}

/// Cluster metrics over a 2-D layout: k-nearest-neighbour label agreement and
/// mean silhouette. `xy` holds `2 * n` doubles, `labels` holds `n`
/// NUL-terminated strings.
///
/// # Safety
/// All pointers must be valid for the stated lengths.
#[no_mangle]
pub unsafe extern "C" fn argviz_layout_metrics(
    xy: *const f64,
    n: usize,
    labels: *const *const c_char,
    k: usize,
    out_knn: *mut f64,
    out_silhouette: *mut f64,
) -> ArgvizStatus {
    if xy.is_null() || labels.is_null() || out_knn.is_null() || out_silhouette.is_null() {
        set_error("null argument");
        return ArgvizStatus::NullPointer;
    }
    let data = std::slice::from_raw_parts(xy, 2 * n).to_vec();
    let mut owned_labels = Vec::with_capacity(n);
    for i in 0..n {
        let label = *labels.add(i);
        match read_utf8(label) {
            Ok(s) => owned_labels.push(s.to_string()),
            Err(status) => return status,
        }
    }
    let points = match Matrix::from_vec(n, 2, data) {
        Ok(m) => m,
        Err(e) => {
            set_error(e);
            return ArgvizStatus::InvalidArgument;
        }
    };
    let lp = match LabeledPoints::new(points, owned_labels) {
        Ok(lp) => lp,
        Err(e) => {
            set_error(e);
            return ArgvizStatus::InvalidArgument;
        }
    };
    let knn = match knn_label_agreement(&lp, k) {
        Ok(v) => v,
        Err(e) => {
            set_error(e);
            return ArgvizStatus::ComputeError;
        }
    };
    let sil = match silhouette(&lp) {
        Ok(v) => v,
        Err(e) => {
            set_error(e);
            return ArgvizStatus::ComputeError;
        }
    };
    *out_knn = knn;
    *out_silhouette = sil;
    ArgvizStatus::Ok
}
