//! C ABI over the `besg` library.
//!
//! Graphs, rules and grammars cross the boundary as opaque handles built
//! from the library's JSON documents. Every function returns a
//! [`BesgStatus`]; on anything other than `Ok` or `False` a message is
//! available from [`besg_last_error`] on the same thread. Strings handed
//! out must be released with [`besg_string_free`], handles with their own
//! `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use besg::besg::Besg;
use besg::decision::membership;
use besg::dpo::{apply_rule, Rule};
use besg::format;
use besg::graph::{graph_isomorphic, minimal_representative, wire_homeomorphic};
use besg::matching::find_matchings;
use besg::{Error, Graph};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BesgStatus {
    /// Success, or an affirmative answer.
    Ok = 0,
    /// A well-formed negative answer.
    False = 1,
    /// A null pointer or a string that is not UTF-8.
    InvalidArgument = 2,
    /// A document that does not parse or does not fit its schema.
    Parse = 3,
    /// Input that parses but is rejected by the library.
    Invalid = 4,
    /// A search gave up at its budget.
    Budget = 5,
    /// A bug: the library panicked.
    Internal = 6,
}

/// Opaque string graph handle.
pub struct BesgGraph(Graph);

/// Opaque rewrite rule handle.
pub struct BesgRule(Rule);

/// Opaque grammar handle: a grammar together with its decoding system.
pub struct BesgGrammar(Besg);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> BesgStatus {
    match e {
        Error::Format(_) | Error::Json(_) => BesgStatus::Parse,
        Error::BudgetExceeded(_) => BesgStatus::Budget,
        _ => BesgStatus::Invalid,
    }
}

struct Fail(BesgStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), format!("{}: {e}", e.kind()))
    }
}

fn guard(f: impl FnOnce() -> Result<BesgStatus, Fail>) -> BesgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(s)) => s,
        Ok(Err(Fail(s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("internal: library panicked".into());
            BesgStatus::Internal
        }
    }
}

fn arg<'a, T>(p: *const T, name: &str) -> Result<&'a T, Fail> {
    // SAFETY: callers pass either null or a pointer obtained from this library.
    unsafe { p.as_ref() }.ok_or_else(|| Fail(BesgStatus::InvalidArgument, format!("usage: `{name}` is null")))
}

fn out<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, Fail> {
    // SAFETY: callers pass either null or a valid location to write to.
    unsafe { p.as_mut() }.ok_or_else(|| Fail(BesgStatus::InvalidArgument, format!("usage: `{name}` is null")))
}

fn text<'a>(p: *const c_char, name: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(BesgStatus::InvalidArgument, format!("usage: `{name}` is null")));
    }
    // SAFETY: non-null and, by contract, NUL-terminated.
    unsafe { CStr::from_ptr(p) }
        .to_str()
        .map_err(|_| Fail(BesgStatus::InvalidArgument, format!("usage: `{name}` is not UTF-8")))
}

fn give_string(s: String) -> *mut c_char {
    CString::new(s).map(CString::into_raw).unwrap_or(ptr::null_mut())
}

fn answer(b: bool) -> BesgStatus {
    if b {
        BesgStatus::Ok
    } else {
        BesgStatus::False
    }
}

/// Message for the last failure on this thread, or null. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn besg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn besg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

/// # Safety
/// `json` must be a NUL-terminated string; `out_graph` must be writable.
#[no_mangle]
pub unsafe extern "C" fn besg_graph_from_json(json: *const c_char, out_graph: *mut *mut BesgGraph) -> BesgStatus {
    guard(|| {
        let slot = out(out_graph, "out_graph")?;
        let g = format::graph_from_json(text(json, "json")?)?;
        *slot = Box::into_raw(Box::new(BesgGraph(g)));
        Ok(BesgStatus::Ok)
    })
}

/// # Safety
/// `graph` must be a live handle; `out_json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn besg_graph_to_json(graph: *const BesgGraph, out_json: *mut *mut c_char) -> BesgStatus {
    guard(|| {
        let g = arg(graph, "graph")?;
        *out(out_json, "out_json")? = give_string(format::graph_to_json(&g.0));
        Ok(BesgStatus::Ok)
    })
}

/// # Safety
/// `graph` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn besg_graph_free(graph: *mut BesgGraph) {
    if !graph.is_null() {
        drop(unsafe { Box::from_raw(graph) });
    }
}

/// `Ok` if the graph is a string graph, `False` otherwise.
///
/// # Safety
/// `graph` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn besg_graph_is_string_graph(graph: *const BesgGraph) -> BesgStatus {
    guard(|| Ok(answer(arg(graph, "graph")?.0.is_string_graph())))
}

/// # Safety
/// `graph` must be a live handle; `out_graph` must be writable.
#[no_mangle]
pub unsafe extern "C" fn besg_graph_minimal_representative(
    graph: *const BesgGraph,
    out_graph: *mut *mut BesgGraph,
) -> BesgStatus {
    guard(|| {
        let slot = out(out_graph, "out_graph")?;
        let m = minimal_representative(&arg(graph, "graph")?.0)?;
        *slot = Box::into_raw(Box::new(BesgGraph(m)));
        Ok(BesgStatus::Ok)
    })
}

/// # Safety
/// `a` and `b` must be live handles.
#[no_mangle]
pub unsafe extern "C" fn besg_graph_homeomorphic(a: *const BesgGraph, b: *const BesgGraph) -> BesgStatus {
    guard(|| Ok(answer(wire_homeomorphic(&arg(a, "a")?.0, &arg(b, "b")?.0)?)))
}

/// # Safety
/// `a` and `b` must be live handles.
#[no_mangle]
pub unsafe extern "C" fn besg_graph_isomorphic(a: *const BesgGraph, b: *const BesgGraph) -> BesgStatus {
    guard(|| Ok(answer(graph_isomorphic(&arg(a, "a")?.0, &arg(b, "b")?.0).is_some())))
}

/// # Safety
/// `json` must be a NUL-terminated string; `out_rule` must be writable.
#[no_mangle]
pub unsafe extern "C" fn besg_rule_from_json(json: *const c_char, out_rule: *mut *mut BesgRule) -> BesgStatus {
    guard(|| {
        let slot = out(out_rule, "out_rule")?;
        let r = format::rule_from_json(text(json, "json")?)?;
        r.validate()?;
        *slot = Box::into_raw(Box::new(BesgRule(r)));
        Ok(BesgStatus::Ok)
    })
}

/// # Safety
/// `rule` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn besg_rule_free(rule: *mut BesgRule) {
    if !rule.is_null() {
        drop(unsafe { Box::from_raw(rule) });
    }
}

/// Number of matching classes of `pattern` into `target`.
///
/// # Safety
/// `pattern` and `target` must be live handles; `out_count` must be writable.
#[no_mangle]
pub unsafe extern "C" fn besg_match_count(
    pattern: *const BesgGraph,
    target: *const BesgGraph,
    out_count: *mut usize,
) -> BesgStatus {
    guard(|| {
        let slot = out(out_count, "out_count")?;
        *slot = find_matchings(&arg(pattern, "pattern")?.0, &arg(target, "target")?.0)?.len();
        Ok(BesgStatus::Ok)
    })
}

/// Rewrites `target` at the matching class numbered `index`.
///
/// # Safety
/// `rule` and `target` must be live handles; `out_graph` must be writable.
#[no_mangle]
pub unsafe extern "C" fn besg_rule_apply(
    rule: *const BesgRule,
    target: *const BesgGraph,
    index: usize,
    out_graph: *mut *mut BesgGraph,
) -> BesgStatus {
    guard(|| {
        let slot = out(out_graph, "out_graph")?;
        let g = apply_rule(&arg(rule, "rule")?.0, &arg(target, "target")?.0, index)?;
        *slot = Box::into_raw(Box::new(BesgGraph(g)));
        Ok(BesgStatus::Ok)
    })
}

/// Parses a grammar document and checks every grammar condition.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out_grammar` must be writable.
#[no_mangle]
pub unsafe extern "C" fn besg_grammar_from_json(json: *const c_char, out_grammar: *mut *mut BesgGrammar) -> BesgStatus {
    guard(|| {
        let slot = out(out_grammar, "out_grammar")?;
        let b = format::grammar_from_json(text(json, "json")?)?;
        b.validate()?;
        *slot = Box::into_raw(Box::new(BesgGrammar(b)));
        Ok(BesgStatus::Ok)
    })
}

/// # Safety
/// `grammar` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn besg_grammar_free(grammar: *mut BesgGrammar) {
    if !grammar.is_null() {
        drop(unsafe { Box::from_raw(grammar) });
    }
}

/// `Ok` if `graph` is in the grammar's language up to wire-homeomorphism,
/// `False` if not. When `out_trace_json` is non-null and the answer is
/// `Ok`, it receives the witness derivation trace document.
///
/// # Safety
/// `grammar` and `graph` must be live handles; `out_trace_json` must be
/// null or writable.
#[no_mangle]
pub unsafe extern "C" fn besg_grammar_member(
    grammar: *const BesgGrammar,
    graph: *const BesgGraph,
    out_trace_json: *mut *mut c_char,
) -> BesgStatus {
    guard(|| {
        let ans = membership(&arg(graph, "graph")?.0, &arg(grammar, "grammar")?.0)?;
        if let (Some(slot), Some(w)) = (unsafe { out_trace_json.as_mut() }, &ans.witness) {
            *slot = give_string(format::trace_to_json(&w.trace));
        }
        Ok(answer(ans.member))
    })
}

/// Runs a derivation trace document to completion and decodes the result.
///
/// # Safety
/// `grammar` must be a live handle, `trace_json` a NUL-terminated string and
/// `out_graph` writable.
#[no_mangle]
pub unsafe extern "C" fn besg_grammar_concrete_derive(
    grammar: *const BesgGrammar,
    trace_json: *const c_char,
    out_graph: *mut *mut BesgGraph,
) -> BesgStatus {
    guard(|| {
        let slot = out(out_graph, "out_graph")?;
        let trace = format::trace_from_json(text(trace_json, "trace_json")?)?;
        let g = arg(grammar, "grammar")?.0.concrete_derive(&trace)?;
        *slot = Box::into_raw(Box::new(BesgGraph(g)));
        Ok(BesgStatus::Ok)
    })
}
