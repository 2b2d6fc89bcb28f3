use super::*;

fn c(re: f64, im: f64) -> Qd3Complex {
    Qd3Complex { re, im }
}

fn last_error() -> String {
    let n = unsafe { qd3_last_error_message(ptr::null_mut(), 0) };
    let mut buf = vec![0 as c_char; n + 1];
    unsafe { qd3_last_error_message(buf.as_mut_ptr(), buf.len()) };
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

fn params(n: usize) -> *mut Qd3Params {
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { qd3_params_default(n, &mut p) }, Qd3Status::Ok);
    p
}

#[test]
fn derive_c3_matches_the_constraint() {
    let mut out = Qd3Complex::default();
    assert_eq!(unsafe { qd3_derive_c3(c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), &mut out) }, Qd3Status::Ok);
    assert!((out.re - 2.0).abs() < 1e-15 && out.im == 0.0);
    assert_eq!(unsafe { qd3_derive_c3(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), &mut out) }, Qd3Status::NearPole);
    assert!(last_error().contains("zero divisor"));
    assert_eq!(
        unsafe { qd3_derive_c3(c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), ptr::null_mut()) },
        Qd3Status::NullPointer
    );
}

#[test]
fn local_operator_follows_the_size_query_convention() {
    let p = params(1);
    let mut len = 0usize;
    let st =
        unsafe { qd3_local_operator(p, Qd3LocalOperator::RVector as i32, c(0.3, 0.1), ptr::null_mut(), 0, &mut len) };
    assert_eq!(st, Qd3Status::BufferTooSmall);
    assert_eq!(len, 36 * 36);
    let mut buf = vec![Qd3Complex::default(); len];
    let st = unsafe {
        qd3_local_operator(p, Qd3LocalOperator::RVector as i32, c(0.3, 0.1), buf.as_mut_ptr(), buf.len(), &mut len)
    };
    assert_eq!(st, Qd3Status::Ok);
    let ops = LocalOps::from_params(&unsafe { &*p }.0);
    let r = ops.r_vector(C64::new(0.3, 0.1)).matrix;
    for i in 0..36 {
        for j in 0..36 {
            assert_eq!(C64::from(buf[i * 36 + j]), r[(i, j)]);
        }
    }
    for (which, dim) in [
        (Qd3LocalOperator::RPlus, 24),
        (Qd3LocalOperator::RMinus, 24),
        (Qd3LocalOperator::RSpinorial, 16),
        (Qd3LocalOperator::KMinus, 6),
        (Qd3LocalOperator::KBar, 6),
        (Qd3LocalOperator::KPlusFused, 4),
        (Qd3LocalOperator::KMinusFused, 4),
    ] {
        unsafe { qd3_local_operator(p, which as i32, c(0.2, 0.0), ptr::null_mut(), 0, &mut len) };
        assert_eq!(len, dim * dim, "{which:?}");
    }
    unsafe { qd3_params_free(p) };
}

#[test]
fn transfer_matrices_commute_through_the_c_surface() {
    let p = params(1);
    let mut chain = ptr::null_mut();
    assert_eq!(unsafe { qd3_chain_new(p, &mut chain) }, Qd3Status::Ok);
    let d = unsafe { qd3_chain_dim(chain) };
    assert_eq!(d, 6);
    let mut a = vec![Qd3Complex::default(); d * d];
    let mut b = vec![Qd3Complex::default(); d * d];
    let mut len = 0;
    assert_eq!(unsafe { qd3_chain_transfer(chain, c(0.31, 0.2), a.as_mut_ptr(), a.len(), &mut len) }, Qd3Status::Ok);
    assert_eq!(
        unsafe {
            qd3_chain_transfer_fused(chain, c(-0.4, 0.1), Qd3Sign::Plus as i32, b.as_mut_ptr(), b.len(), &mut len)
        },
        Qd3Status::Ok
    );
    let m = |v: &[Qd3Complex]| CMat::from_fn(d, d, |i, j| C64::from(v[i * d + j]));
    let (ma, mb) = (m(&a), m(&b));
    let comm = &ma * &mb - &mb * &ma;
    assert!(qd3::la::frob(&comm) < 1e-9 * qd3::la::frob(&ma) * qd3::la::frob(&mb));
    unsafe { qd3_chain_free(chain) };
    unsafe { qd3_params_free(p) };
}

#[test]
fn invalid_json_and_parameters_are_reported() {
    let mut p = ptr::null_mut();
    let bad = CString::new("{ not json").unwrap();
    assert_eq!(unsafe { qd3_params_from_json(bad.as_ptr(), &mut p) }, Qd3Status::Config);
    assert!(p.is_null());
    assert!(last_error().contains("malformed config"));

    let mut m = ModelParams::default_profile(2);
    m.theta[0] = m.eta * 2.0;
    let json = CString::new(serde_json::to_string(&Config::from_params(&m)).unwrap()).unwrap();
    assert_eq!(unsafe { qd3_params_from_json(json.as_ptr(), &mut p) }, Qd3Status::InvalidParams);
    assert!(last_error().contains("theta hits degeneration point"));

    let ok =
        CString::new(serde_json::to_string(&Config::from_params(&ModelParams::default_profile(2))).unwrap()).unwrap();
    assert_eq!(unsafe { qd3_params_from_json(ok.as_ptr(), &mut p) }, Qd3Status::Ok);
    assert_eq!(unsafe { qd3_params_n_sites(p) }, 2);
    unsafe { qd3_params_free(p) };
}

#[test]
fn null_handles_are_rejected_or_ignored() {
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { qd3_chain_new(ptr::null(), &mut out) }, Qd3Status::NullPointer);
    assert_eq!(unsafe { qd3_verify(ptr::null(), Qd3Scope::Local as i32, 1, &mut out.cast()) }, Qd3Status::NullPointer);
    assert_eq!(unsafe { qd3_params_n_sites(ptr::null()) }, 0);
    assert_eq!(unsafe { qd3_report_passed(ptr::null()) }, 0);
    assert!(unsafe { qd3_report_json(ptr::null()) }.is_null());
    unsafe {
        qd3_params_free(ptr::null_mut());
        qd3_chain_free(ptr::null_mut());
        qd3_report_free(ptr::null_mut());
    }
}

#[test]
fn verify_report_round_trips_and_is_seed_deterministic() {
    let p = params(1);
    let run = || {
        let mut r = ptr::null_mut();
        assert_eq!(unsafe { qd3_verify(p, Qd3Scope::Local as i32, 2, &mut r) }, Qd3Status::Ok);
        let json = unsafe { CStr::from_ptr(qd3_report_json(r)) }.to_str().unwrap().to_string();
        let passed = unsafe { qd3_report_passed(r) };
        let n = unsafe { qd3_report_record_count(r) };
        unsafe { qd3_report_free(r) };
        (json, passed, n)
    };
    let (a, passed, n) = run();
    assert_eq!(passed, 1);
    assert!(n > 0);
    assert_eq!(run().0, a);
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["schema"], "qd3/1");
    assert_eq!(v["records"].as_array().unwrap().len(), n);
    assert_eq!(unsafe { qd3_params_set_seed(p, 7) }, Qd3Status::Ok);
    assert_ne!(run().0, a);
    unsafe { qd3_params_free(p) };
}

#[test]
fn spectrum_and_bae_commands_are_exposed() {
    let p = params(1);
    let mut r = ptr::null_mut();
    assert_eq!(unsafe { qd3_spectrum(p, 8, 40.0, &mut r) }, Qd3Status::Ok);
    assert_eq!(unsafe { qd3_report_passed(r) }, 1);
    unsafe { qd3_report_free(r) };
    assert_eq!(unsafe { qd3_bae(p, 2, 0, 0, 4, 8, 40.0, &mut r) }, Qd3Status::CountingRule);
    assert_eq!(unsafe { qd3_bae(p, 1, 0, 0, 8, 8, 40.0, &mut r) }, Qd3Status::Ok);
    unsafe { qd3_report_free(r) };
    let long = params(4);
    assert_eq!(unsafe { qd3_spectrum(long, 8, 40.0, &mut r) }, Qd3Status::Config);
    unsafe { qd3_params_free(long) };
    unsafe { qd3_params_free(p) };
}

#[test]
fn version_is_the_crate_version() {
    let v = unsafe { CStr::from_ptr(qd3_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn out_of_range_selectors_are_invalid_arguments() {
    let p = params(1);
    let mut len = 0;
    assert_eq!(
        unsafe { qd3_local_operator(p, 99, c(0.2, 0.0), ptr::null_mut(), 0, &mut len) },
        Qd3Status::InvalidArgument
    );
    assert!(last_error().contains("99 is not a valid Qd3LocalOperator"));
    let mut r = ptr::null_mut();
    assert_eq!(unsafe { qd3_verify(p, -1, 1, &mut r) }, Qd3Status::InvalidArgument);
    let mut chain = ptr::null_mut();
    assert_eq!(unsafe { qd3_chain_new(p, &mut chain) }, Qd3Status::Ok);
    assert_eq!(
        unsafe { qd3_chain_transfer_fused(chain, c(0.1, 0.0), 2, ptr::null_mut(), 0, &mut len) },
        Qd3Status::InvalidArgument
    );
    unsafe { qd3_chain_free(chain) };
    unsafe { qd3_params_free(p) };
}
