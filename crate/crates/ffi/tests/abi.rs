use std::ffi::{CStr, CString};
use std::ptr;

use ordlog_ffi::*;

const GOLDEN: &str = include_str!("../../core/examples/golden.struct");

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(ordlog_last_error_message()) }.to_str().unwrap().to_string()
}

unsafe fn take(s: *mut std::ffi::c_char) -> String {
    let out = CStr::from_ptr(s).to_str().unwrap().to_string();
    ordlog_string_free(s);
    out
}

#[test]
fn parse_the_demo_sentence() {
    unsafe {
        let mut g = ptr::null_mut();
        assert_eq!(ordlog_grammar_demo(&mut g), OrdlogStatus::Ok);
        let mut r = ptr::null_mut();
        let sentence = c("Den Mann hat der Junge gesehen");
        assert_eq!(ordlog_parse(g, sentence.as_ptr(), 0, 0, &mut r), OrdlogStatus::Ok);
        assert_eq!(ordlog_result_count(r), 1);
        assert!(ordlog_result_exhausted(r));
        assert!(ordlog_result_structure(r, 1).is_null());
        let mut text = ptr::null_mut();
        assert_eq!(ordlog_structure_write(ordlog_result_structure(r, 0), &mut text), OrdlogStatus::Ok);
        assert_eq!(take(text), GOLDEN);
        ordlog_result_free(r);

        let mut yes = false;
        assert_eq!(ordlog_recognize(g, sentence.as_ptr(), 0, &mut yes), OrdlogStatus::Ok);
        assert!(yes);
        assert_eq!(ordlog_recognize(g, c("hat").as_ptr(), 0, &mut yes), OrdlogStatus::Ok);
        assert!(!yes);
        ordlog_grammar_free(g);
    }
}

#[test]
fn truncated_parse() {
    unsafe {
        let mut g = ptr::null_mut();
        assert_eq!(ordlog_grammar_demo(&mut g), OrdlogStatus::Ok);
        let mut r = ptr::null_mut();
        let sentence = c("Der Junge hat den Mann gesehen");
        assert_eq!(ordlog_parse(g, sentence.as_ptr(), 1, 0, &mut r), OrdlogStatus::Ok);
        assert_eq!(ordlog_result_count(r), 1);
        assert!(!ordlog_result_exhausted(r));
        ordlog_result_free(r);
        ordlog_grammar_free(g);
    }
}

#[test]
fn structures_and_dot() {
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(ordlog_structure_read(c(GOLDEN).as_ptr(), &mut s), OrdlogStatus::Ok);
        let mut n = 99;
        assert_eq!(ordlog_structure_validate(s, &mut n), OrdlogStatus::Ok);
        assert_eq!(n, 0);
        let mut dot = ptr::null_mut();
        assert_eq!(ordlog_structure_to_dot(s, false, &mut dot), OrdlogStatus::Ok);
        assert_eq!(take(dot).matches("subgraph cluster_").count(), 7);
        ordlog_structure_free(s);

        let broken = GOLDEN.replace("(2 1 (0 1))", "(2 1 (0))");
        assert_eq!(ordlog_structure_read(c(&broken).as_ptr(), &mut s), OrdlogStatus::Ok);
        assert_eq!(ordlog_structure_validate(s, &mut n), OrdlogStatus::Ok);
        assert!(n > 0);
        assert!(!last_error().is_empty());
        assert_eq!(ordlog_structure_to_dot(s, false, &mut dot), OrdlogStatus::InvalidStructure);
        ordlog_structure_free(s);
    }
}

#[test]
fn errors() {
    unsafe {
        let mut g = ptr::null_mut();
        assert_eq!(ordlog_grammar_load(ptr::null(), &mut g), OrdlogStatus::NullArgument);
        assert_eq!(ordlog_grammar_load(c("(grammar").as_ptr(), &mut g), OrdlogStatus::SyntaxError);
        assert!(last_error().contains("1:"), "{}", last_error());
        assert_eq!(ordlog_grammar_load(c("(grammar (classes X))").as_ptr(), ptr::null_mut()), OrdlogStatus::NullArgument);
        assert_eq!(
            ordlog_grammar_load(c("(grammar (classes X) (word \"x\" :class X))").as_ptr(), &mut g),
            OrdlogStatus::Ok
        );
        assert_eq!(last_error(), "");
        let mut r = ptr::null_mut();
        assert_eq!(ordlog_parse(g, c("x y").as_ptr(), 0, 0, &mut r), OrdlogStatus::UnknownToken);
        assert!(last_error().contains("\"y\""));
        assert_eq!(ordlog_parse(g, c("  ").as_ptr(), 0, 0, &mut r), OrdlogStatus::ParseFailed);
        let bad = [0x78u8, 0xff, 0];
        assert_eq!(ordlog_parse(g, bad.as_ptr().cast(), 0, 0, &mut r), OrdlogStatus::InvalidUtf8);
        ordlog_grammar_free(g);
        ordlog_grammar_free(ptr::null_mut());
        ordlog_result_free(ptr::null_mut());
        ordlog_string_free(ptr::null_mut());
        assert_eq!(ordlog_result_count(ptr::null()), 0);
    }
}
