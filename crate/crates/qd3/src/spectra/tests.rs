use super::bethe::{BAE_TOLERANCE, DEDUP_DISTANCE};
use super::*;
use crate::params::validate;
use crate::verify::CATALOG;
use std::sync::OnceLock;

fn params(n: usize) -> ValidatedParams {
    validate(&ModelParams::default_profile(n)).unwrap()
}

fn family1() -> &'static SpectralFamily {
    static F: OnceLock<SpectralFamily> = OnceLock::new();
    F.get_or_init(|| {
        let p = params(1);
        diagonalize_family(&p, &SpectralGrid::standard(&p, DEFAULT_GRID_POINTS, DEFAULT_UMAX)).unwrap()
    })
}

fn solved(sector: [usize; 3]) -> &'static BaeSolveReport {
    static S: OnceLock<Vec<BaeSolveReport>> = OnceLock::new();
    let all = S.get_or_init(|| {
        [[1, 0, 0], [2, 1, 0], [2, 0, 1]].iter().map(|l| solve_bae(l[0], l[1], l[2], &params(1), 64).unwrap()).collect()
    });
    all.iter().find(|r| r.sector == sector).unwrap()
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[test]
fn grid_has_generic_and_special_points() {
    let p = params(2);
    let g = SpectralGrid::standard(&p, 24, 40.0);
    assert_eq!(g.generic().len(), 24);
    assert_eq!(g.points.len(), 24 + 2 * 2 * 4 + 4 + 2);
    assert!(g.points.contains(&c(40.0, 0.0)) && g.points.contains(&c(-40.0, 0.0)));
    for &u in g.generic() {
        for k in -20..=20 {
            assert!(params::dist_mod_2pi_i(u, p.eta * k as f64) >= params::EXCLUSION_DISTANCE);
        }
    }
}

#[test]
fn family_has_six_states_and_passes_every_relation() {
    let f = family1();
    assert_eq!(f.n_states(), 6);
    assert!(f.eigen_residual < 100.0 * f.params.tol_spectral);
    let records = check_eigen_relations(f);
    let spectral = CATALOG.iter().filter(|e| e.scope == verify::Scope::Spectral).count();
    assert_eq!(records.len(), spectral * 6);
    for r in &records {
        assert!(r.passed, "{} state {:?}: {:.3e} {:?}", r.check_id, r.state, r.residual, r.diagnostics);
        assert_eq!(verify::catalog_entry(&r.check_id).unwrap().scope, verify::Scope::Spectral);
    }
    let constants: Vec<_> = records.iter().filter(|r| r.check_id == "EIG.asymptotic.constant.plus").collect();
    assert!(constants.iter().all(|r| r.diagnostics.iter().any(|d| d.starts_with("(m1, m2) = "))));
}

#[test]
fn projection_agrees_with_direct_eigenvalues() {
    let f = family1();
    let u = f.u_grid.generic()[5];
    let direct = f.chain().transfer(u).unwrap().matrix.eigenvalues().unwrap();
    let scale = direct.iter().map(|z| z.norm()).fold(0.0, f64::max);
    for row in &f.lambda {
        assert!(direct.iter().any(|d| (d - row[5]).norm() < 1e-8 * scale));
    }
}

#[test]
fn lambda_minus_equals_direct_projection() {
    let f = family1();
    let u = c(0.21, -0.17);
    let lm = f.lambda_minus_at(u).unwrap();
    let direct = f.project(&f.chain().transfer_fused(u, Sign::Minus).unwrap().matrix).0;
    for (a, b) in lm.iter().zip(&direct) {
        assert!(rel(*a, *b) < 1e-9);
    }
}

#[test]
fn long_chains_are_refused() {
    let p = params(4);
    let g = SpectralGrid::standard(&p, 4, 40.0);
    assert!(matches!(diagonalize_family(&p, &g), Err(Error::Config(_))));
}

#[test]
fn tq_crossing_holds_for_arbitrary_roots() {
    let p = params(1);
    let eta = p.eta;
    let roots = [
        (vec![c(0.4, 0.3)], vec![], vec![]),
        (vec![c(0.4, 0.3), c(-1.1, 0.2)], vec![c(0.7, -0.5)], vec![]),
        (vec![c(0.4, 0.3), c(-1.1, 0.2)], vec![], vec![c(0.9, 0.6)]),
    ];
    for (m1, m2, m3) in roots {
        let s = BetheState::new(m1, m2, m3, &p).unwrap();
        for u in [c(0.23, 0.11), c(-0.6, 0.35), c(1.27, -0.23)] {
            let a = tq_lambda(u, &s, &p).unwrap();
            let b = tq_lambda(-u + 8.0 * eta, &s, &p).unwrap();
            assert!(rel(a, b) < 1e-12, "{a} vs {b}");
        }
    }
}

#[test]
fn tq_near_pole_is_reported() {
    let p = params(1);
    let s = BetheState::new(vec![c(0.4, 0.3)], vec![], vec![], &p).unwrap();
    let pole = 2.0 * p.eta + c(0.4, 0.3);
    assert!(matches!(tq_lambda(pole, &s, &p), Err(Error::NearPole(_))));
    assert!(matches!(tq_lambda(2.0 * p.eta, &s, &p), Err(Error::NearPole(_))));
}

#[test]
fn counting_rule_is_enforced() {
    let p = params(1);
    assert!(matches!(BetheState::new(vec![], vec![], vec![], &p), Err(Error::CountingRule(_))));
    assert!(matches!(solve_bae(2, 0, 0, &p, 4), Err(Error::CountingRule(_))));
    assert!(matches!(solve_bae(3, 1, 1, &p, 4), Err(Error::CountingRule(_))));
    assert!(check_counting(2, 1, 0, 1).is_ok());
}

#[test]
fn coincident_roots_are_rejected() {
    let p = params(1);
    let s = BetheState::new(vec![c(0.4, 0.3), c(-0.4, -0.3)], vec![c(1.0, 0.1)], vec![], &p).unwrap();
    assert!(matches!(bae_residuals(&s, &p), Err(Error::CoincidentRoots(_))));
}

#[test]
fn x_follows_the_first_level_count() {
    let p = params(1);
    let a = BetheState::new(vec![c(0.4, 0.3)], vec![], vec![], &p).unwrap();
    let b = BetheState::new(vec![c(0.4, 0.3), c(0.1, 0.2)], vec![c(0.5, 0.0)], vec![], &p).unwrap();
    assert_ne!(a.x, b.x);
    assert_eq!((b.m1, b.m2), (1, 0));
}

#[test]
fn solver_finds_matching_states_in_every_sector() {
    let f = family1();
    for sector in [[1, 0, 0], [2, 1, 0], [2, 0, 1]] {
        let rep = solved(sector);
        assert!(!rep.states.is_empty(), "{sector:?}: {:?}", rep.diagnostics);
        let m = match_tq_to_spectrum(f, &rep.states);
        let best = m.matches.iter().map(|x| x.deviation).fold(f64::INFINITY, f64::min);
        assert!(best < 1e-6, "{sector:?}: best deviation {best:.3e}");
        for s in &rep.states {
            assert_eq!(s.counts(), sector);
            assert!(max_bae_residual(s, &f.params).unwrap() < BAE_TOLERANCE);
        }
    }
}

#[test]
fn solved_states_have_no_residues() {
    let p = params(1);
    let s = &solved([1, 0, 0]).states[0];
    assert!(residue_check(s, &p, 1e-3).unwrap() < 1e-6);
    let mut off = s.clone();
    off.mu1[0] += c(1e-2, 0.0);
    assert!(residue_check(&off, &p, 1e-3).unwrap() > 1e-4);
}

#[test]
fn perturbed_roots_give_small_nonzero_residuals() {
    let p = params(1);
    let s = &solved([2, 1, 0]).states[0];
    let mut q = s.clone();
    for m in q.mu1.iter_mut().chain(q.mu2.iter_mut()) {
        *m += 1e-3;
    }
    let r = max_bae_residual(&q, &p).unwrap();
    assert!(r > 1e-7 && r < 1e-1, "{r:.3e}");
}

#[test]
fn solver_is_deterministic_and_deduplicates() {
    let p = params(1);
    let a = solve_bae(1, 0, 0, &p, 16).unwrap();
    let b = solve_bae(1, 0, 0, &p, 16).unwrap();
    assert_eq!(a, b);
    for (i, x) in a.states.iter().enumerate() {
        for y in &a.states[i + 1..] {
            assert!((x.mu1[0].cosh() - y.mu1[0].cosh()).norm() > DEDUP_DISTANCE);
        }
    }
    assert!(a.converged >= a.states.len());
}

#[test]
fn empty_state_list_leaves_every_row_unmatched() {
    let f = family1();
    let m = match_tq_to_spectrum(f, &[]);
    assert!(m.matches.is_empty());
    assert_eq!(m.unmatched_rows, (0..6).collect::<Vec<_>>());
}

#[test]
fn repeated_state_is_flagged_as_conflict() {
    let f = family1();
    let s = solved([1, 0, 0]).states[0].clone();
    let m = match_tq_to_spectrum(f, &[s.clone(), s]);
    assert_eq!(m.matches[0].row, m.matches[1].row);
    assert!(!m.matches[0].conflict && m.matches[1].conflict);
}

#[test]
fn energies_agree_between_routes_and_with_the_hamiltonian() {
    let p = params(1);
    let hom = p.homogeneous().unwrap();
    let fam = diagonalize_family(&hom, &SpectralGrid::standard(&hom, DEFAULT_GRID_POINTS, DEFAULT_UMAX)).unwrap();
    let s = continue_state(&solved([1, 0, 0]).states[0], &p, &hom).unwrap();
    let m = match_tq_to_spectrum(&fam, std::slice::from_ref(&s));
    let row = m.matches[0].row.unwrap();
    assert!(m.matches[0].deviation < 1e-6, "{:.3e}", m.matches[0].deviation);
    let a = energy_tq(&s, &hom).unwrap();
    let b = energy_spectral(&fam, row).unwrap();
    assert!((a.value - b.value).norm() < 1e-5, "{} vs {}", a.value, b.value);
    assert!(a.observed_order > 1.8, "{}", a.observed_order);
    let (h, off) = hamiltonian_eigenvalues(&fam).unwrap();
    assert!(off < 1e-6);
    assert!((h[row] - 0.5 * b.value).norm() < 1e-5, "{} vs {}", h[row], b.value);
    assert!(matches!(energy_tq(&s, &p), Err(Error::Config(_))));
}

#[test]
fn csv_lists_every_curve_value() {
    let f = family1();
    let text = f.to_csv().unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("curve,state,u_re,u_im,re,im"));
    assert_eq!(lines.count(), 2 * 6 * f.u_grid.points.len());
}

#[test]
fn laurent_support_is_within_the_degree_bound() {
    let f = family1();
    let n_sites = f.params.n_sites as i64;
    let bound = 2 * (4 * n_sites + 4);
    for (lo, hi) in f.laurent_support().unwrap() {
        assert!(lo >= -bound && hi <= bound, "({lo}, {hi})");
        assert!(hi > 0 && lo < 0);
    }
}
