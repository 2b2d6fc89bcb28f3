use super::*;
use crate::params::validate;
use std::collections::HashSet;

fn params(n: usize) -> ValidatedParams {
    validate(&ModelParams::default_profile(n)).unwrap()
}

fn find<'a>(records: &'a [ResidualRecord], id: &str) -> &'a ResidualRecord {
    records.iter().find(|r| r.check_id == id).unwrap_or_else(|| panic!("{id} missing"))
}

#[test]
fn catalog_ids_are_unique() {
    let ids: HashSet<_> = CATALOG.iter().map(|e| e.id).collect();
    assert_eq!(ids.len(), CATALOG.len());
    assert!(CATALOG.iter().all(|e| e.scope != Scope::All));
}

#[test]
fn suite_covers_catalog_in_order_and_passes() {
    let records = run_suite(&params(1), Scope::All, 2);
    let got: Vec<&str> = records.iter().map(|r| r.check_id.as_str()).collect();
    let want: Vec<&str> = CATALOG.iter().filter(|e| e.scope != Scope::Spectral).map(|e| e.id).collect();
    assert_eq!(got, want);
    for r in &records {
        assert!(r.passed, "{} residual {:.3e} > {:.1e}: {:?}", r.check_id, r.residual, r.threshold, r.diagnostics);
        assert_eq!(r.passed, r.residual <= r.threshold);
    }
}

#[test]
fn scopes_select_their_groups() {
    let p = params(1);
    for scope in [Scope::Local, Scope::Fusion] {
        let records = run_suite(&p, scope, 1);
        assert!(records.iter().all(|r| catalog_entry(&r.check_id).unwrap().scope == scope));
        assert_eq!(records.len(), CATALOG.iter().filter(|e| e.scope == scope).count());
    }
    assert_eq!(check_local(&p, 1).len(), 40);
}

#[test]
fn records_are_deterministic_and_independent_of_order() {
    let p = params(1);
    let a = check_local(&p, 3);
    let b = check_local(&p, 3);
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    let fused = check_fusion_r(&p, 3);
    let all = run_suite(&p, Scope::Fusion, 3);
    assert_eq!(find(&fused, "FUSE.R.P16"), find(&all, "FUSE.R.P16"));
}

#[test]
fn seed_changes_sample_points() {
    let p = params(1);
    let mut q = p.clone().into_inner();
    q.rng_seed += 1;
    let q = validate(&q).unwrap();
    let a = find(&check_local(&p, 1), "YBE.vector").sample_points.clone();
    let b = find(&check_local(&q, 1), "YBE.vector").sample_points.clone();
    assert_ne!(a, b);
    assert_eq!(a[0].len(), 3);
}

#[test]
fn rank_one_fusion_names_the_matching_label() {
    let records = check_fusion_r(&params(1), 2);
    for id in ["FUSE.R.P1", "FUSE.R.P1.reversed"] {
        let r = find(&records, id);
        assert!(
            r.diagnostics.iter().any(|d| d.starts_with("right-hand projector label matched: P")),
            "{:?}",
            r.diagnostics
        );
    }
}

#[test]
fn degeneration_records_report_ranks() {
    let records = check_degenerations(&params(1));
    let r = find(&records, "DEG.vector.4eta");
    assert!(r.diagnostics.iter().any(|d| d == "rank 16 (expected 16)"));
    assert!(r.passed);
}

#[test]
fn transfer_suite_at_two_sites() {
    let records = check_transfer(&params(2));
    for r in &records {
        assert!(r.passed, "{} residual {:.3e}: {:?}", r.check_id, r.residual, r.diagnostics);
    }
    let q = find(&records, "QDET");
    assert_eq!(q.sample_points.len(), 4);
    assert!(q.diagnostics.iter().any(|d| d.contains("only u = θj independent")));
}

#[test]
fn long_chains_fail_transfer_records_without_panicking() {
    let records = check_transfer(&params(4));
    assert_eq!(records.len(), CATALOG.iter().filter(|e| e.scope == Scope::Transfer).count());
    for r in &records {
        assert!(!r.passed);
        assert!(r.diagnostics.iter().any(|d| d.starts_with("error:")));
    }
}

#[test]
fn tiny_threshold_fails_fusion_records() {
    let mut p = ModelParams::default_profile(1);
    p.tol_identity = 1e-300;
    let records = check_fusion_k(&validate(&p).unwrap(), 1);
    assert!(records.iter().any(|r| !r.passed));
}

#[test]
fn diagonal_boundary_still_fuses() {
    // c = 0 makes c₃ = 0: upper-triangular off-diagonal K entries only.
    let mut p = ModelParams::default_profile(1);
    p.left = crate::params::BoundaryParams::real(0.0, 0.7, 0.2).unwrap();
    p.right = crate::params::BoundaryParams::real(0.0, 0.5, -0.35).unwrap();
    let records = check_fusion_k(&validate(&p).unwrap(), 2);
    assert!(all_passed(&records), "{records:?}");
}

#[test]
fn scope_parses() {
    assert_eq!("all".parse::<Scope>().unwrap(), Scope::All);
    assert!("nope".parse::<Scope>().is_err());
}

#[test]
fn digest_tracks_parameters() {
    let a = ModelParams::default_profile(1);
    let mut b = a.clone();
    b.eta = C64::new(0.11, 0.0);
    assert_eq!(params_digest(&a).len(), 64);
    assert_ne!(params_digest(&a), params_digest(&b));
}
