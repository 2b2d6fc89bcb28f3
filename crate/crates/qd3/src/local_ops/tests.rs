use super::*;
use crate::la::{numerical_rank, rel_distance, RANK_TOL};
use sha2::{Digest, Sha256};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn ops() -> LocalOps {
    LocalOps::new(
        c(0.1, 0.0),
        BoundaryParams::real(0.3, 0.7, 0.2).unwrap(),
        BoundaryParams::real(-0.4, 0.5, -0.35).unwrap(),
    )
}

fn digest<W: std::fmt::Debug>(t: &[Entry<W>]) -> String {
    let h = Sha256::digest(format!("{t:?}").as_bytes());
    h.iter().map(|b| format!("{b:02x}")).collect::<String>()[..16].to_string()
}

#[test]
fn table_digests() {
    let got = [
        digest(&tables::R_VECTOR),
        digest(&tables::R_PLUS),
        digest(&tables::R_MINUS),
        digest(&tables::R_PM),
        digest(&tables::R_SPIN),
        digest(&tables::S_TRANSFORM),
    ];
    let pinned = [
        "03e08a3563f1a0df",
        "512c58025cfbde9a",
        "007eef753c9c77fe",
        "ce98afc60561aacd",
        "33985a8f7ace2217",
        "80cf53b19892058d",
    ];
    for (g, p) in got.iter().zip(pinned) {
        assert_eq!(g, p, "{got:?}");
    }
}

#[test]
fn regularity_of_vector_r() {
    let o = ops();
    let r0 = o.r_vector(C64::new(0.0, 0.0));
    let p = la::scale(&la::swap(6, 6), o.w.a(C64::new(0.0, 0.0)));
    assert!(la::rel_residual(&r0.matrix, &p) <= 1e-12);
}

#[test]
fn entry_spot_value() {
    let r = ops().r_vector(c(0.7, 0.0));
    let a = 2.0 * 0.15f64.sinh() * (-0.05f64).sinh();
    assert!((r.matrix[(0, 0)] - c(a, 0.0)).norm() < 1e-16);
    assert!((a + 0.0150626).abs() < 1e-7);
}

#[test]
fn degeneration_ranks() {
    let o = ops();
    let eta = o.eta();
    let rank = |m: &CMat| numerical_rank(m, RANK_TOL).unwrap();
    assert_eq!(rank(&o.r_vector(8.0 * eta).matrix), 1);
    assert_eq!(rank(&o.r_vector(4.0 * eta).matrix), 16);
    assert_eq!(rank(&o.r_vector(-4.0 * eta).matrix), 20);
    assert_eq!(rank(&o.r_vector(-8.0 * eta).matrix), 35);
    assert_eq!(rank(&o.r_plus(6.0 * eta).matrix), 4);
    assert_eq!(rank(&o.r_minus(6.0 * eta).matrix), 4);
    assert_eq!(rank(&o.r_spinorial(4.0 * eta).matrix), 6);
}

#[test]
fn twist_identities() {
    let o = ops();
    let v = o.v_twist().matrix;
    let vb = o.v_bar().matrix;
    assert!(rel_distance(&(&v * &v), &la::identity(6)) < 1e-15);
    assert!(rel_distance(&(la::transpose(&v) * &v), &o.m_twist().matrix) < 1e-15);
    assert!(rel_distance(&(la::transpose(&vb) * &vb), &o.m_bar().matrix) < 1e-15);
    assert!(rel_distance(&(&vb * &vb), &la::scale(&la::identity(4), -ONE)) < 1e-15);
}

#[test]
fn m_commutes_with_r() {
    let o = ops();
    let mm = la::kron_mat(&o.m_twist().matrix, &o.m_twist().matrix);
    let r = o.r_vector(c(0.41, -0.2)).matrix;
    assert!(rel_distance(&(&mm * &r), &(&r * &mm)) < 1e-14);
}

#[test]
fn fused_unitarity_and_spot_value() {
    let o = ops();
    let u = c(0.53, 0.17);
    assert!((o.w.fused(c(0.7, 0.0))[tables::Fw::A1 as usize] - c(0.050021, 0.0)).norm() < 5e-7);
    for s in [Sign::Plus, Sign::Minus] {
        // R₂₁(−u) on reversed legs is the full transpose; as an operator on [4,6] it is R(−u)ᵀ.
        let lhs = &o.r_fused(s, u).matrix * la::transpose(&o.r_fused(s, -u).matrix);
        let rhs = la::scale(&la::identity(24), o.w.rho_s(u));
        assert!(la::rel_residual(&lhs, &rhs) < 1e-13);
    }
}

#[test]
fn mixed_unitarity_and_crossing_unitarity() {
    let o = ops();
    let eta = o.eta();
    let u = c(0.29, 0.31);
    let lhs = &o.r_pm(u).matrix * &o.r_mp(-u).matrix;
    let scal = -((u - 8.0 * eta) / 2.0).sinh() * ((u + 8.0 * eta) / 2.0).sinh();
    assert!(la::rel_residual(&lhs, &la::scale(&la::identity(16), scal)) < 1e-13);
    let mb = la::kron_mat(&la::identity(4), &o.m_bar().matrix);
    let mbi = la::inverse(&mb).unwrap();
    let l = LabeledOperator::new(o.r_pm(u).matrix, &[4, 4]).unwrap();
    let r = LabeledOperator::new(la::transpose(&o.r_pm(-u + 16.0 * eta).matrix), &[4, 4]).unwrap();
    let lt = la::partial_transpose(&l, 1).unwrap().matrix;
    let rt = la::partial_transpose(&r, 1).unwrap().matrix;
    let lhs = &lt * &mbi * &rt * &mb;
    assert!(la::rel_residual(&lhs, &la::scale(&la::identity(16), o.w.rho_ss(u))) < 1e-12);
}

#[test]
fn spinorial_unitarity() {
    let o = ops();
    let eta = o.eta();
    let u = c(-0.44, 0.12);
    let sw = la::swap(4, 4);
    let r21 = &sw * &o.r_spinorial(-u).matrix * &sw;
    let lhs = &o.r_spinorial(u).matrix * &r21;
    let scal = -(u / 2.0 - 2.0 * eta).sinh() * (u / 2.0 + 2.0 * eta).sinh();
    assert!(la::rel_residual(&lhs, &la::scale(&la::identity(16), scal)) < 1e-13);
}

#[test]
fn k_matrix_values() {
    let o = ops();
    let eta = o.eta();
    let k = o.k_minus(2.0 * eta).matrix;
    assert!((k[(0, 0)] - (-o.left.bp.c2).sinh()).norm() < 1e-15);
    let diag_bp = BoundaryParams { c: ZERO, c1: ZERO, c2: c(0.2, 0.0), c3: ZERO };
    let h = BoundaryWeights::new(eta, diag_bp);
    for m in [
        LocalOps::k_matrix(&h, c(0.3, 0.2)).matrix,
        LocalOps::k_plus_with(&h, c(0.3, 0.2)).matrix,
        LocalOps::k_minus_with(&h, c(0.3, 0.2)).matrix,
    ] {
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                if i != j {
                    assert_eq!(m[(i, j)], ZERO);
                }
            }
        }
    }
    let u = c(0.61, -0.07);
    let km = o.k_minus_fused(u).matrix;
    let x = -(-4.0 * eta).exp() * o.left.h1(u - 4.0 * eta);
    assert_eq!(km[(0, 0)], x);
    assert_eq!(km[(1, 1)], x);
    assert_eq!(km[(0, 1)], ZERO);
}

#[test]
fn dual_k_follows_the_mapping() {
    let o = ops();
    let u = c(0.2, 0.4);
    let v = -u + 8.0 * o.eta();
    let expect = &o.m_twist().matrix * &LocalOps::k_matrix(&o.right, v).matrix;
    assert_eq!(rel_distance(&o.k_bar(u).matrix, &expect), 0.0);
    let expect = &o.m_bar().matrix * &LocalOps::k_minus_with(&o.right, v).matrix;
    assert_eq!(rel_distance(&o.k_bar_fused(Sign::Minus, u).matrix, &expect), 0.0);
}

#[test]
fn reflection_equation_vector() {
    let o = ops();
    let (u, v) = (c(0.33, 0.1), c(-0.21, 0.05));
    let i6 = la::identity(6);
    let k1 = la::kron_mat(&o.k_minus(u).matrix, &i6);
    let k2 = la::kron_mat(&i6, &o.k_minus(v).matrix);
    let r = |x: C64| o.r_vector(x).matrix;
    let r21 = |x: C64| o.r_vector_21(x).matrix;
    let lhs = r(u - v) * &k1 * r21(u + v) * &k2;
    let rhs = &k2 * r(u + v) * &k1 * r21(u - v);
    assert!(la::rel_residual(&lhs, &rhs) < 1e-12);
}

#[test]
fn projectors_are_idempotent_with_expected_ranks() {
    let o = ops();
    let names = [
        (ProjectorName::P1, 1),
        (ProjectorName::P16, 16),
        (ProjectorName::Pplus, 4),
        (ProjectorName::Pminus, 4),
        (ProjectorName::P6, 6),
    ];
    for (name, rank) in names {
        for side in [Side::S12, Side::S21] {
            let p = o.projector(name, side).unwrap();
            assert_eq!(p.rank, rank);
            assert!(p.idempotency_residual() < 1e-12, "{name:?} {side:?}");
            assert_eq!(numerical_rank(&p.matrix, RANK_TOL).unwrap(), rank);
            assert!(rel_distance(&p.matrix, &la::transpose(&p.matrix)) < 1e-15);
        }
    }
}

#[test]
fn psi0_prefactor_gives_unit_norm() {
    let eta = c(0.1, 0.0);
    let v = psi0(eta).unwrap();
    assert!((la::bilinear(&v, &v) - ONE).norm() < 1e-14);
}

#[test]
fn projector_images_match_degenerate_r() {
    let o = ops();
    let eta = o.eta();
    let cases = [
        (o.r_vector(8.0 * eta).matrix, ProjectorName::P1),
        (o.r_vector(4.0 * eta).matrix, ProjectorName::P16),
        (o.r_plus(6.0 * eta).matrix, ProjectorName::Pplus),
        (o.r_minus(6.0 * eta).matrix, ProjectorName::Pminus),
        (o.r_spinorial(4.0 * eta).matrix, ProjectorName::P6),
    ];
    for (r, name) in cases {
        let u = o.isometry(name, Side::S12).unwrap();
        let angle = la::max_principal_angle(&r, &u, RANK_TOL).unwrap().unwrap();
        assert!(angle < 1e-8, "{name:?}: {angle}");
    }
}

#[test]
fn branch_cut_reported() {
    // η = 0.6i: sinh 2η / sinh 6η = sin 1.2 / sin 3.6 is negative real.
    let o = LocalOps::new(c(0.0, 0.6), ops().left.bp, ops().right.bp);
    assert!(matches!(o.projector(ProjectorName::Pplus, Side::S12), Err(Error::BranchCut(_))));
    assert!(o.projector(ProjectorName::P1, Side::S12).is_ok());
}

#[test]
fn s_transforms() {
    let o = ops();
    let s = o.s_transform();
    let sb = o.s_bar_transform().unwrap();
    let s0 = 2.0 * (0.2f64.cosh() * 0.4f64.cosh() * 0.6f64.cosh()).sqrt();
    assert!((o.w.s_constants()[tables::Tw::S0 as usize] - c(s0, 0.0)).norm() < 1e-15);
    assert!((s0 - 2.286736).abs() < 1e-6);
    let back = la::scale(&(&sb.matrix * la::inverse(&o.r_mp(ZERO).matrix).unwrap()), -(4.0 * o.eta()).sinh());
    assert!(rel_distance(&back, &s.matrix) < 1e-13);
    assert!(la::condition_number(&s.matrix).unwrap() < 1e6);
}

#[test]
fn json_dump_shape() {
    let j = matrix_to_json(&la::identity(2));
    assert_eq!(j.to_string(), "[[[1.0,0.0],[0.0,0.0]],[[0.0,0.0],[1.0,0.0]]]");
}
