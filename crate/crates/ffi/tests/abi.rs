use std::ffi::{CStr, CString};
use std::ptr;

use entrofunc_ffi::*;

fn continuous(values: &[f64], dim: usize) -> *mut EntrofuncSample {
    let mut s = ptr::null_mut();
    let st = unsafe { entrofunc_sample_continuous(values.as_ptr(), values.len() / dim, dim, &mut s) };
    assert_eq!(st, EntrofuncStatus::Ok);
    s
}

fn discrete(values: &[i64]) -> *mut EntrofuncSample {
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { entrofunc_sample_discrete(values.as_ptr(), values.len(), 1, &mut s) }, EntrofuncStatus::Ok);
    s
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(entrofunc_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn estimates_through_handles() {
    let x = continuous(&[0.0, 0.1, 0.5], 1);
    unsafe {
        assert_eq!(entrofunc_sample_len(x), 3);
        assert_eq!(entrofunc_sample_dim(x), 1);
        let mut q = 0.0;
        assert_eq!(entrofunc_estimate_q(x, ptr::null(), 2, 0, 0.2, &mut q), EntrofuncStatus::Ok);
        assert!((q - 1.0 / 3.0 / 0.4).abs() < 1e-12);

        let mut rep = EntrofuncReport::default();
        assert_eq!(entrofunc_analyze(x, ptr::null(), 2, 0, 0.2, 0.95, &mut rep), EntrofuncStatus::Ok);
        assert_eq!(rep.q, q);
        assert_eq!(rep.has_entropy, 1);
        assert_eq!(rep.has_interval, 1);
        assert!(rep.ci_lower < rep.h_hat && rep.h_hat < rep.ci_upper);
        assert!(rep.kappa_hat >= 1.0 / 3.0);
        entrofunc_sample_free(x);
    }
}

#[test]
fn discrete_and_composites() {
    let x = discrete(&[1, 1, 2]);
    let y = discrete(&[1, 2, 2]);
    unsafe {
        let mut q = 0.0;
        assert_eq!(entrofunc_estimate_q(x, y, 1, 1, 0.0, &mut q), EntrofuncStatus::Ok);
        assert!((q - 4.0 / 9.0).abs() < 1e-15);
        let mut v = 0.0;
        assert_eq!(entrofunc_variability(x, y, 0.0, &mut v), EntrofuncStatus::Ok);
        assert!((v + (4.0f64 / 9.0).ln()).abs() < 1e-15);
        let (mut b, mut k) = (0.0, 0.0);
        assert_eq!(entrofunc_bregman(x, y, 2, 0.0, 0, &mut b), EntrofuncStatus::Ok);
        assert_eq!(entrofunc_bregman(x, y, 2, 0.0, 1, &mut k), EntrofuncStatus::Ok);
        let mut k2 = 0.0;
        assert_eq!(entrofunc_bregman(y, x, 2, 0.0, 1, &mut k2), EntrofuncStatus::Ok);
        assert_eq!(k, k2);
        let mut h = 0.0;
        let z = discrete(&[1, 1, 2, 2, 3, 3]);
        assert_eq!(entrofunc_renyi_entropy(z, 2, 0.0, &mut h), EntrofuncStatus::Ok);
        assert!((h - 5f64.ln()).abs() < 1e-12);
        for s in [x, y, z] {
            entrofunc_sample_free(s);
        }
    }
}

#[test]
fn scalar_functions() {
    unsafe {
        let mut out = 0.0;
        let v = (2.0 * std::f64::consts::PI.sqrt() * 1f64.exp()).ln();
        assert_eq!(entrofunc_join_size(1000, 1000, 0.1, 1, v, &mut out), EntrofuncStatus::Ok);
        assert!((out - 20_755.4).abs() < 0.5);
        assert_eq!(entrofunc_select_epsilon(300, 2, 3, 2.0, 1.0, &mut out), EntrofuncStatus::Ok);
        assert!((out - (300f64.ln() / 300.0).sqrt()).abs() < 1e-15);
        let (mut d, mut p) = (0.0, 0.0);
        assert_eq!(entrofunc_ks_test([0.0].as_ptr(), 1, &mut d, &mut p), EntrofuncStatus::Ok);
        assert_eq!(d, 0.5);
        assert!((p - 0.9639).abs() < 1e-4);
        let x = CString::new("bernoulliProduct(3,0.8)").unwrap();
        assert_eq!(entrofunc_true_q(x.as_ptr(), ptr::null(), 3, 0, &mut out), EntrofuncStatus::Ok);
        assert!((out - 0.140_608).abs() < 1e-15);
    }
}

#[test]
fn error_codes() {
    unsafe {
        let mut out = 0.0;
        let one = continuous(&[1.0], 1);
        assert_eq!(entrofunc_estimate_q(one, ptr::null(), 2, 0, 0.1, &mut out), EntrofuncStatus::InsufficientSample);
        assert!(last_error().contains("insufficient"));
        assert_eq!(entrofunc_estimate_q(one, ptr::null(), 0, 0, 0.1, &mut out), EntrofuncStatus::InvalidOrder);
        assert_eq!(entrofunc_estimate_q(ptr::null(), ptr::null(), 2, 0, 0.1, &mut out), EntrofuncStatus::NullPointer);
        assert_eq!(entrofunc_ks_test(ptr::null(), 0, &mut out, &mut out), EntrofuncStatus::EmptyInput);
        let bad = CString::new("cauchy(0,1)").unwrap();
        assert_ne!(entrofunc_true_q(bad.as_ptr(), ptr::null(), 2, 0, &mut out), EntrofuncStatus::Ok);
        let sr = CString::new("uniformDiscrete(3)").unwrap();
        let g = CString::new("gaussian1d(0,1)").unwrap();
        assert_ne!(entrofunc_true_q(sr.as_ptr(), g.as_ptr(), 1, 1, &mut out), EntrofuncStatus::Ok);
        let mut s = ptr::null_mut();
        assert_eq!(entrofunc_sample_continuous([f64::NAN].as_ptr(), 1, 1, &mut s), EntrofuncStatus::InvalidArgument);
        assert!(s.is_null());
        entrofunc_sample_free(one);
        entrofunc_sample_free(ptr::null_mut());
    }
}
