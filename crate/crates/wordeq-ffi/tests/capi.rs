use std::ffi::{CStr, CString};
use std::ptr;

use wordeq_ffi::*;

const RUNNING: &str = "constants a b c\nvariables X Y\nequation a X X' a' = Y b' Y a' b Y'\n";

fn parse(text: &str) -> *mut WqEquation {
    let src = CString::new(text).unwrap();
    let mut eq = ptr::null_mut();
    assert_eq!(
        unsafe { wq_equation_parse(src.as_ptr(), &mut eq) },
        WqStatus::Ok
    );
    eq
}

fn take(s: *mut std::ffi::c_char) -> String {
    assert!(!s.is_null());
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_string();
    unsafe { wq_string_free(s) };
    out
}

#[test]
fn solve_certify_verify() {
    let eq = parse(RUNNING);
    let mut verdict = WqVerdict::Unknown;
    let mut sol = ptr::null_mut();
    let st = unsafe { wq_solve(eq, wq_config_default(), &mut verdict, &mut sol) };
    assert_eq!((st, verdict), (WqStatus::Ok, WqVerdict::Sat));
    let rendered = take(unsafe { wq_solution_render(sol) });
    assert!(rendered.contains("X = "));

    let mut cert = ptr::null_mut();
    assert_eq!(
        unsafe { wq_certificate_build(sol, &mut cert) },
        WqStatus::Ok
    );
    let text = take(cert);
    let c = CString::new(text.clone()).unwrap();
    let mut valid = false;
    assert_eq!(
        unsafe { wq_certificate_verify(c.as_ptr(), 1 << 20, &mut valid) },
        WqStatus::Ok
    );
    assert!(valid);

    let bad = CString::new(text.replacen("equation a X", "equation b X", 1)).unwrap();
    let st = unsafe { wq_certificate_verify(bad.as_ptr(), 1 << 20, &mut valid) };
    assert!(st != WqStatus::Ok || !valid);

    unsafe {
        wq_solution_free(sol);
        wq_equation_free(eq);
    }
}

#[test]
fn unsat_and_oracle() {
    let eq = parse("constants a b\nvariables X\nequation a X = X b\n");
    let mut verdict = WqVerdict::Sat;
    let mut sol = ptr::null_mut();
    assert_eq!(
        unsafe { wq_solve(eq, wq_config_default(), &mut verdict, &mut sol) },
        WqStatus::Ok
    );
    assert_eq!(verdict, WqVerdict::Unsat);
    assert!(sol.is_null());
    assert_eq!(unsafe { wq_oracle(eq, 4, 1 << 20, &mut sol) }, WqStatus::Ok);
    assert!(sol.is_null());
    // Oracle solutions carry no path.
    let eq2 = parse(RUNNING);
    assert_eq!(
        unsafe { wq_oracle(eq2, 8, 1 << 20, &mut sol) },
        WqStatus::Ok
    );
    assert!(!sol.is_null());
    let mut cert = ptr::null_mut();
    assert_eq!(
        unsafe { wq_certificate_build(sol, &mut cert) },
        WqStatus::Contract
    );
    unsafe {
        wq_solution_free(sol);
        wq_equation_free(eq);
        wq_equation_free(eq2);
    }
}

#[test]
fn errors() {
    let src = CString::new("constants a\nequation a Z = a\n").unwrap();
    let mut eq = ptr::null_mut();
    assert_eq!(
        unsafe { wq_equation_parse(src.as_ptr(), &mut eq) },
        WqStatus::Parse
    );
    assert!(eq.is_null());
    let msg = unsafe { CStr::from_ptr(wq_last_error_message()) }
        .to_str()
        .unwrap();
    assert!(msg.contains("parse error"));
    assert_eq!(
        unsafe { wq_equation_parse(ptr::null(), &mut eq) },
        WqStatus::NullArgument
    );
    let bytes = [0xffu8, 0];
    assert_eq!(
        unsafe { wq_equation_parse(bytes.as_ptr().cast(), &mut eq) },
        WqStatus::InvalidUtf8
    );
    unsafe {
        wq_equation_free(ptr::null_mut());
        wq_string_free(ptr::null_mut());
    }
}

#[test]
fn group_formula() {
    let f =
        CString::new("constants a b\nvariables X\nformula (and (eq X a X' a') (neq X))\n").unwrap();
    let mut v = WqVerdict::Unknown;
    assert_eq!(
        unsafe { wq_group_solve(f.as_ptr(), wq_config_default(), &mut v) },
        WqStatus::Ok
    );
    assert_eq!(v, WqVerdict::Sat);
}

#[test]
fn header_compiles_as_c() {
    let dir = env!("CARGO_MANIFEST_DIR");
    let header = format!("{dir}/include/wordeq.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for f in [
        "wq_equation_parse",
        "wq_solve",
        "wq_certificate_verify",
        "wq_last_error_message",
        "WQ_STATUS_OK",
    ] {
        assert!(text.contains(f), "{f} missing from the header");
    }
    let Ok(out) = std::process::Command::new("cc")
        .args(["-fsyntax-only", "-std=c99", "-x", "c", &header])
        .output()
    else {
        eprintln!("no C compiler; skipped the syntax check");
        return;
    };
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}
