//! C ABI over the mwelex core.
//!
//! Handles are opaque. Functions return an [`MwelexStatus`]; on failure the
//! message is available from [`mwelex_last_error_message`] on the same
//! thread. Strings handed out by the library are released with
//! [`mwelex_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use mwelex::classify::classify_entries;
use mwelex::registry::derive_features;
use mwelex::stats::{cohen_kappa, pearson_pair, Estimate, JudgedColumn};
use mwelex::variant::matcher::{match_documents, parse_corpus};
use mwelex::variant::{compile_variants, MatchConfig};
use mwelex::{
    parse_table, serialize_table, standard_registry, validate_table, FeatureRegistry,
    FeatureValue, LanguageConfig, Table,
};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MwelexStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    InvalidArgument = 4,
    /// The statistic exists only as a reason, e.g. zero variance.
    Undefined = 5,
    Panic = 6,
}

pub struct MwelexRegistry(FeatureRegistry);

pub struct MwelexTable(Table);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

struct Fail(MwelexStatus, String);

impl Fail {
    fn new(status: MwelexStatus, msg: impl Into<String>) -> Self {
        Fail(status, msg.into())
    }
}

/// Runs `f`, recording the error message and mapping panics.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> MwelexStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            MwelexStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            MwelexStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail::new(MwelexStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail::new(MwelexStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref()
        .ok_or_else(|| Fail::new(MwelexStatus::NullPointer, format!("{what} is null")))
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::new(MwelexStatus::NullPointer, "output pointer is null"));
    }
    let c = CString::new(s).map_err(|_| Fail::new(MwelexStatus::InvalidArgument, "output contains NUL"))?;
    *out = c.into_raw();
    Ok(())
}

fn json<T: serde::Serialize + ?Sized>(v: &T) -> Result<String, Fail> {
    serde_json::to_string(v).map_err(|e| Fail::new(MwelexStatus::Panic, e.to_string()))
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next call into the library on this thread.
#[no_mangle]
pub extern "C" fn mwelex_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version, static storage.
#[no_mangle]
pub extern "C" fn mwelex_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must be null or a string returned by this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn mwelex_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

#[no_mangle]
pub extern "C" fn mwelex_registry_standard() -> *mut MwelexRegistry {
    Box::into_raw(Box::new(MwelexRegistry(standard_registry())))
}

/// # Safety
/// `reg` must be null or a handle from `mwelex_registry_standard`, freed once.
#[no_mangle]
pub unsafe extern "C" fn mwelex_registry_free(reg: *mut MwelexRegistry) {
    if !reg.is_null() {
        drop(Box::from_raw(reg));
    }
}

/// Parses a TSV table. On success `*out` receives a handle to free with
/// `mwelex_table_free`.
///
/// # Safety
/// Pointers must be valid; `source` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn mwelex_table_parse(
    reg: *const MwelexRegistry,
    source: *const c_char,
    out: *mut *mut MwelexTable,
) -> MwelexStatus {
    guard(|| {
        let reg = deref(reg, "registry")?;
        let source = text(source, "source")?;
        if out.is_null() {
            return Err(Fail::new(MwelexStatus::NullPointer, "output pointer is null"));
        }
        let t = parse_table(source, &reg.0).map_err(|e| Fail::new(MwelexStatus::ParseError, e.to_string()))?;
        *out = Box::into_raw(Box::new(MwelexTable(t)));
        Ok(())
    })
}

/// # Safety
/// `t` must be null or a handle from `mwelex_table_parse`, freed once.
#[no_mangle]
pub unsafe extern "C" fn mwelex_table_free(t: *mut MwelexTable) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// Number of entries, 0 for a null handle.
///
/// # Safety
/// `t` must be null or a live table handle.
#[no_mangle]
pub unsafe extern "C" fn mwelex_table_entry_count(t: *const MwelexTable) -> usize {
    t.as_ref().map_or(0, |t| t.0.entries.len())
}

/// Canonical TSV text of the table.
///
/// # Safety
/// `t` must be a live table handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mwelex_table_serialize(t: *const MwelexTable, out: *mut *mut c_char) -> MwelexStatus {
    guard(|| put_string(out, serialize_table(&deref(t, "table")?.0)))
}

/// Violations as a JSON array.
///
/// # Safety
/// Handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mwelex_table_validate_json(
    t: *const MwelexTable,
    reg: *const MwelexRegistry,
    has_copula: bool,
    out: *mut *mut c_char,
) -> MwelexStatus {
    guard(|| {
        let (t, reg) = (deref(t, "table")?, deref(reg, "registry")?);
        let v = validate_table(&t.0, &reg.0, LanguageConfig { has_copula });
        put_string(out, json(&v)?)
    })
}

/// Per-entry outcomes of both trees and their cross-check, as a JSON array.
///
/// # Safety
/// Handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mwelex_table_classify_json(
    t: *const MwelexTable,
    reg: *const MwelexRegistry,
    has_copula: bool,
    out: *mut *mut c_char,
) -> MwelexStatus {
    guard(|| {
        let (t, reg) = (deref(t, "table")?, deref(reg, "registry")?);
        let entries: Vec<_> = t
            .0
            .materialized_entries()
            .iter()
            .map(|e| derive_features(e, &reg.0).entry)
            .collect();
        let checks = classify_entries(&entries, LanguageConfig { has_copula });
        put_string(out, json(&checks)?)
    })
}

/// Pearson's r between two binary features over pairwise-complete rows.
/// Returns `MWELEX_STATUS_UNDEFINED` when r does not exist; `*n_complete`
/// is written in both cases.
///
/// # Safety
/// Handles and strings must be valid; output pointers writable or null.
#[no_mangle]
pub unsafe extern "C" fn mwelex_pearson(
    t: *const MwelexTable,
    reg: *const MwelexRegistry,
    feature_f: *const c_char,
    feature_g: *const c_char,
    r: *mut f64,
    n_complete: *mut usize,
) -> MwelexStatus {
    guard(|| {
        let (t, reg) = (deref(t, "table")?, deref(reg, "registry")?);
        let (f, g) = (text(feature_f, "feature_f")?, text(feature_g, "feature_g")?);
        let res = pearson_pair(&t.0, f, g, &reg.0)
            .map_err(|e| Fail::new(MwelexStatus::InvalidArgument, e.to_string()))?;
        if !n_complete.is_null() {
            *n_complete = res.n_complete;
        }
        match res.r {
            Estimate::Value(v) => {
                if !r.is_null() {
                    *r = v;
                }
                Ok(())
            }
            Estimate::Undefined(why) => Err(Fail::new(MwelexStatus::Undefined, why.to_string())),
        }
    })
}

fn cells(s: &str) -> Result<JudgedColumn, Fail> {
    s.split_whitespace()
        .enumerate()
        .map(|(i, c)| {
            c.parse::<FeatureValue>()
                .map(|v| (format!("{i:08}"), v))
                .map_err(|e| Fail::new(MwelexStatus::ParseError, format!("cell {}: {e}", i + 1)))
        })
        .collect()
}

/// Cohen's kappa between two judges' columns, given as whitespace-separated
/// cells (`+ - ? ...`) in the same entry order.
///
/// # Safety
/// Strings must be valid; `kappa` writable or null.
#[no_mangle]
pub unsafe extern "C" fn mwelex_kappa(
    judge_a: *const c_char,
    judge_b: *const c_char,
    kappa: *mut f64,
) -> MwelexStatus {
    guard(|| {
        let a = cells(text(judge_a, "judge_a")?)?;
        let b = cells(text(judge_b, "judge_b")?)?;
        let k = cohen_kappa(&a, &b).map_err(|e| Fail::new(MwelexStatus::InvalidArgument, e.to_string()))?;
        match k.kappa {
            Estimate::Value(v) => {
                if !kappa.is_null() {
                    *kappa = v;
                }
                Ok(())
            }
            Estimate::Undefined(why) => Err(Fail::new(MwelexStatus::Undefined, why.to_string())),
        }
    })
}

/// Matches the table's variants against a corpus of one sentence per line
/// (`surface/lemma` tokens or bare words). Spans come back as a JSON array.
///
/// # Safety
/// Handles and strings must be valid; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mwelex_match_json(
    t: *const MwelexTable,
    corpus: *const c_char,
    max_slot_len: usize,
    max_gap: usize,
    out: *mut *mut c_char,
) -> MwelexStatus {
    guard(|| {
        let t = deref(t, "table")?;
        let corpus = text(corpus, "corpus")?;
        let mut variants = Vec::new();
        for e in t.0.materialized_entries() {
            let c = compile_variants(&e)
                .map_err(|err| Fail::new(MwelexStatus::ParseError, format!("entry {}: {err}", e.id)))?;
            variants.extend(c.variants);
        }
        let cfg = MatchConfig {
            max_slot_len,
            max_gap,
            ..MatchConfig::default()
        };
        let spans = match_documents(&variants, &parse_corpus(corpus), &cfg);
        put_string(out, json(&spans)?)
    })
}
