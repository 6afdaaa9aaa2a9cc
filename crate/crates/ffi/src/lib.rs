//! C interface to `ordlog`.
//!
//! Objects are opaque handles created by `ordlog_*_load`/`_read`/`ordlog_parse`
//! and released with the matching `_free`. Functions return an
//! [`OrdlogStatus`]; on failure `ordlog_last_error_message` describes the
//! error. Strings returned through `char **` belong to the caller and are
//! released with `ordlog_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::time::Duration;

use ordlog::dot::{to_dot, DotOptions};
use ordlog::grammar::{load_grammar, Grammar};
use ordlog::parser::{parse, recognize, ParseError, ParseResult, ParseTask, SearchLimits};
use ordlog::{read_structure, write_structure, DependencyStructure};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrdlogStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    SyntaxError = 3,
    InvalidStructure = 4,
    UnknownToken = 5,
    ParseFailed = 6,
    Panic = 7,
}

pub struct OrdlogGrammar {
    inner: Grammar,
}

pub struct OrdlogStructure {
    inner: DependencyStructure,
}

pub struct OrdlogParseResult {
    structures: Vec<OrdlogStructure>,
    exhausted: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl ToString) {
    let msg = CString::new(msg.to_string().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

struct Fail(OrdlogStatus, String);

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> OrdlogStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            OrdlogStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal error");
            OrdlogStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(OrdlogStatus::NullArgument, format!("{what} is NULL")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Fail(OrdlogStatus::InvalidUtf8, format!("{what}: {e}")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref()
        .ok_or_else(|| Fail(OrdlogStatus::NullArgument, format!("{what} is NULL")))
}

fn out_ptr<T>(p: *mut T) -> Result<(), Fail> {
    if p.is_null() {
        Err(Fail(OrdlogStatus::NullArgument, "output pointer is NULL".into()))
    } else {
        Ok(())
    }
}

fn give_string(s: String, out: *mut *mut c_char) -> Result<(), Fail> {
    out_ptr(out)?;
    let c = CString::new(s).map_err(|e| Fail(OrdlogStatus::InvalidUtf8, e.to_string()))?;
    unsafe { *out = c.into_raw() };
    Ok(())
}

fn parse_failure(e: ParseError) -> Fail {
    let status = match e {
        ParseError::UnknownToken { .. } => OrdlogStatus::UnknownToken,
        _ => OrdlogStatus::ParseFailed,
    };
    Fail(status, e.to_string())
}

/// Message for the last failed call on this thread; empty after a success.
/// Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn ordlog_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// # Safety
/// `s` must be NULL or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn ordlog_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Loads a grammar from its source text.
///
/// # Safety
/// `source` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ordlog_grammar_load(source: *const c_char, out: *mut *mut OrdlogGrammar) -> OrdlogStatus {
    guard(|| {
        out_ptr(out)?;
        let g = load_grammar(text(source, "source")?).map_err(|e| Fail(OrdlogStatus::SyntaxError, e.to_string()))?;
        *out = Box::into_raw(Box::new(OrdlogGrammar { inner: g }));
        Ok(())
    })
}

/// The built-in German demo grammar.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ordlog_grammar_demo(out: *mut *mut OrdlogGrammar) -> OrdlogStatus {
    guard(|| {
        out_ptr(out)?;
        *out = Box::into_raw(Box::new(OrdlogGrammar {
            inner: Grammar::german_demo(),
        }));
        Ok(())
    })
}

/// # Safety
/// `g` must be NULL or a grammar from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ordlog_grammar_free(g: *mut OrdlogGrammar) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Reads a structure file's text.
///
/// # Safety
/// `source` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ordlog_structure_read(source: *const c_char, out: *mut *mut OrdlogStructure) -> OrdlogStatus {
    guard(|| {
        out_ptr(out)?;
        let s = read_structure(text(source, "source")?).map_err(|e| Fail(OrdlogStatus::SyntaxError, e.to_string()))?;
        *out = Box::into_raw(Box::new(OrdlogStructure { inner: s }));
        Ok(())
    })
}

/// # Safety
/// `s` must be NULL or a structure from `ordlog_structure_read`, not yet
/// freed. Structures borrowed from a parse result must not be passed here.
#[no_mangle]
pub unsafe extern "C" fn ordlog_structure_free(s: *mut OrdlogStructure) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Writes a structure in the structure file format.
///
/// # Safety
/// `s` must be a live structure and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ordlog_structure_write(s: *const OrdlogStructure, out: *mut *mut c_char) -> OrdlogStatus {
    guard(|| give_string(write_structure(&handle(s, "structure")?.inner), out))
}

/// Counts well-formedness violations; the message lists them.
///
/// # Safety
/// `s` must be a live structure and `count` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ordlog_structure_validate(s: *const OrdlogStructure, count: *mut usize) -> OrdlogStatus {
    let mut report = String::new();
    let status = guard(|| {
        out_ptr(count)?;
        let violations = handle(s, "structure")?.inner.validate();
        *count = violations.len();
        report = violations.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n");
        Ok(())
    });
    if status == OrdlogStatus::Ok {
        set_error(report);
    }
    status
}

/// Renders a valid structure as a Graphviz digraph.
///
/// # Safety
/// `s` must be a live structure and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ordlog_structure_to_dot(
    s: *const OrdlogStructure,
    all_domains: bool,
    out: *mut *mut c_char,
) -> OrdlogStatus {
    guard(|| {
        let dot = to_dot(&handle(s, "structure")?.inner, DotOptions { all_domains })
            .map_err(|e| Fail(OrdlogStatus::InvalidStructure, e.to_string()))?;
        give_string(dot, out)
    })
}

fn task<'g>(g: &'g Grammar, sentence: &str, max_structures: usize, timeout_ms: u64) -> ParseTask<'g> {
    ParseTask::new(g, sentence).with_limits(SearchLimits {
        max_structures: (max_structures > 0).then_some(max_structures),
        max_steps: None,
        timeout: (timeout_ms > 0).then(|| Duration::from_millis(timeout_ms)),
    })
}

/// Parses a whitespace-separated sentence. `max_structures` and
/// `timeout_ms` of 0 mean unlimited.
///
/// # Safety
/// `g` must be a live grammar, `sentence` a NUL-terminated string and `out`
/// a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ordlog_parse(
    g: *const OrdlogGrammar,
    sentence: *const c_char,
    max_structures: usize,
    timeout_ms: u64,
    out: *mut *mut OrdlogParseResult,
) -> OrdlogStatus {
    guard(|| {
        out_ptr(out)?;
        let g = &handle(g, "grammar")?.inner;
        let ParseResult {
            structures, exhausted, ..
        } = parse(&task(g, text(sentence, "sentence")?, max_structures, timeout_ms)).map_err(parse_failure)?;
        *out = Box::into_raw(Box::new(OrdlogParseResult {
            structures: structures.into_iter().map(|inner| OrdlogStructure { inner }).collect(),
            exhausted,
        }));
        Ok(())
    })
}

/// # Safety
/// `r` must be a live parse result.
#[no_mangle]
pub unsafe extern "C" fn ordlog_result_count(r: *const OrdlogParseResult) -> usize {
    r.as_ref().map_or(0, |r| r.structures.len())
}

/// False if a limit cut the search short.
///
/// # Safety
/// `r` must be a live parse result.
#[no_mangle]
pub unsafe extern "C" fn ordlog_result_exhausted(r: *const OrdlogParseResult) -> bool {
    r.as_ref().is_some_and(|r| r.exhausted)
}

/// The `i`-th structure, borrowed from the result; NULL if out of range.
///
/// # Safety
/// `r` must be a live parse result.
#[no_mangle]
pub unsafe extern "C" fn ordlog_result_structure(r: *const OrdlogParseResult, i: usize) -> *const OrdlogStructure {
    r.as_ref()
        .and_then(|r| r.structures.get(i))
        .map_or(ptr::null(), |s| s as *const OrdlogStructure)
}

/// # Safety
/// `r` must be NULL or a parse result from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ordlog_result_free(r: *mut OrdlogParseResult) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Whether the sentence has at least one structure.
///
/// # Safety
/// `g` must be a live grammar, `sentence` a NUL-terminated string and `out`
/// a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ordlog_recognize(
    g: *const OrdlogGrammar,
    sentence: *const c_char,
    timeout_ms: u64,
    out: *mut bool,
) -> OrdlogStatus {
    guard(|| {
        out_ptr(out)?;
        let g = &handle(g, "grammar")?.inner;
        *out = recognize(&task(g, text(sentence, "sentence")?, 0, timeout_ms)).map_err(parse_failure)?;
        Ok(())
    })
}
