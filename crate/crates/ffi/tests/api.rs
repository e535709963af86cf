use std::f64::consts::PI;
use std::ffi::{c_char, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use sltransfer_ffi::*;

fn free_problem(m: [f64; 4]) -> *mut SlProblem {
    let q = [0.0; 3];
    let mut p = ptr::null_mut();
    let s = unsafe {
        sl_problem_new(
            PI / 2.0,
            q.as_ptr(),
            q.len(),
            m[0],
            m[1],
            m[2],
            m[3],
            0,
            &mut p,
        )
    };
    assert_eq!(s, SlStatus::Ok);
    assert!(!p.is_null());
    p
}

fn last_error() -> String {
    let len = unsafe { sl_last_error_message(ptr::null_mut(), 0) };
    let mut buf = vec![0 as c_char; len + 1];
    unsafe { sl_last_error_message(buf.as_mut_ptr(), buf.len()) };
    let bytes: Vec<u8> = buf[..len].iter().map(|&c| c as u8).collect();
    String::from_utf8(bytes).unwrap()
}

#[test]
fn dirichlet_eigenvalues_through_c_abi() {
    let p = free_problem([1.0, 0.0, 0.0, 1.0]);
    let mut out = [0.0; 5];
    let s = unsafe { sl_eigenvalues(p, 0.0, PI, 5, out.as_mut_ptr()) };
    assert_eq!(s, SlStatus::Ok);
    for (n, l) in out.iter().enumerate() {
        let want = ((n + 1) * (n + 1)) as f64;
        assert!((l - want).abs() < 1e-8, "{l} vs {want}");
    }
    let mut a = 0.0;
    assert_eq!(
        unsafe { sl_norming_constant(p, 0.0, PI, 1.0, &mut a) },
        SlStatus::Ok
    );
    assert!((a - PI / 2.0).abs() < 1e-8);
    unsafe { sl_problem_free(p) };
}

#[test]
fn m_function_and_delta_closed_forms() {
    let p = free_problem([1.0, 0.0, 0.0, 1.0]);
    let mut m = SlComplex { re: 0.0, im: 0.0 };
    let s = unsafe { sl_m_function(p, 0.0, PI, SlComplex { re: -1.0, im: 0.0 }, &mut m) };
    assert_eq!(s, SlStatus::Ok);
    assert!((m.re - 1.0 / PI.tanh()).abs() < 1e-8 && m.im == 0.0);
    let mut d = SlComplex { re: 1.0, im: 0.0 };
    let s = unsafe { sl_delta(p, 0.0, PI, SlComplex { re: 4.0, im: 0.0 }, &mut d) };
    assert_eq!(s, SlStatus::Ok);
    assert!(d.re.abs() < 1e-10);
    unsafe { sl_problem_free(p) };
}

#[test]
fn scattering_constants_for_diagonal_jump() {
    let p = free_problem([2.0, 0.0, 0.0, 0.5]);
    let mut a = SlComplex { re: 0.0, im: 0.0 };
    let mut b = a;
    assert_eq!(
        unsafe { sl_scattering_coefficients(p, 1.3, &mut a, &mut b) },
        SlStatus::Ok
    );
    assert!((a.re - 1.25).abs() < 1e-8 && a.im.abs() < 1e-8);
    assert!((b.re - 0.75).abs() < 1e-8 && b.im.abs() < 1e-8);
    unsafe { sl_problem_free(p) };
}

#[test]
fn error_codes_and_messages() {
    let p = free_problem([1.0, 0.0, 0.0, 1.0]);
    let mut m = SlComplex { re: 0.0, im: 0.0 };
    let s = unsafe { sl_m_function(p, 0.0, PI, SlComplex { re: 4.0, im: 0.0 }, &mut m) };
    assert_eq!(s, SlStatus::Pole);
    assert!(last_error().contains("pole"), "{}", last_error());

    let mut a = SlComplex { re: 0.0, im: 0.0 };
    let mut b = a;
    assert_eq!(
        unsafe { sl_scattering_coefficients(p, 0.0, &mut a, &mut b) },
        SlStatus::Singular
    );
    assert_eq!(
        unsafe { sl_m_function(p, 0.0, PI, m, ptr::null_mut()) },
        SlStatus::NullPointer
    );
    assert_eq!(
        unsafe { sl_m_function(ptr::null(), 0.0, PI, m, &mut a) },
        SlStatus::NullPointer
    );
    assert_eq!(
        unsafe { sl_m_function(p, 4.0, PI, m, &mut a) },
        SlStatus::Config
    );
    unsafe { sl_problem_free(p) };
    unsafe { sl_problem_free(ptr::null_mut()) };

    let q = [0.0; 4];
    let mut h = ptr::null_mut();
    let s = unsafe { sl_problem_new(1.0, q.as_ptr(), 4, 1.0, 0.0, 0.0, 1.0, 0, &mut h) };
    assert_eq!(s, SlStatus::Config);
    assert!(h.is_null());
    let s = unsafe { sl_problem_new(1.0, q.as_ptr(), 3, 1.0, 0.0, 0.0, -1.0, 0, &mut h) };
    assert_eq!(s, SlStatus::Config);

    let bad = CString::new("{\"S\": 1,").unwrap();
    assert_eq!(
        unsafe { sl_problem_from_json(bad.as_ptr(), &mut h) },
        SlStatus::Parse
    );
}

#[test]
fn problem_from_json_normalizes_transfer_matrix() {
    let json = CString::new(
        r#"{"S": 1.5707963267948966, "q_samples": [0, 0, 0], "M": [[4, 0], [0, 1]], "alpha": 0, "beta": 3.141592653589793}"#,
    )
    .unwrap();
    let mut p = ptr::null_mut();
    assert_eq!(
        unsafe { sl_problem_from_json(json.as_ptr(), &mut p) },
        SlStatus::Ok
    );
    let mut a = SlComplex { re: 0.0, im: 0.0 };
    let mut b = a;
    assert_eq!(
        unsafe { sl_scattering_coefficients(p, 2.0, &mut a, &mut b) },
        SlStatus::Ok
    );
    // diag(4, 1) scales to diag(2, 1/2)
    assert!((a.re - 1.25).abs() < 1e-8);
    unsafe { sl_problem_free(p) };
}

#[test]
fn header_declares_the_api_and_compiles_as_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/sltransfer.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in [
        "sl_problem_new",
        "sl_problem_from_json",
        "sl_problem_free",
        "sl_delta",
        "sl_m_function",
        "sl_eigenvalues",
        "sl_norming_constant",
        "sl_scattering_coefficients",
        "sl_last_error_message",
        "SL_STATUS_POLE",
        "typedef struct SlProblem SlProblem",
    ] {
        assert!(text.contains(name), "header lacks {name}");
    }
    let dir = tempfile_dir();
    let src = dir.join("use_header.c");
    std::fs::write(
        &src,
        "#include \"sltransfer.h\"\nint main(void) { SlProblem *p = 0; sl_problem_free(p); return SL_STATUS_OK; }\n",
    )
    .unwrap();
    match Command::new("cc")
        .arg("-fsyntax-only")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(header.parent().unwrap())
        .arg(&src)
        .output()
    {
        Ok(out) => assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        ),
        Err(_) => eprintln!("no C compiler found; header syntax not checked"),
    }
}

fn tempfile_dir() -> std::path::PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("ffi_header_check");
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
