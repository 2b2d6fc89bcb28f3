//! Closed-form scalar weights: Boltzmann weights of every R-matrix, boundary
//! functions and the scalar prefactors that appear in unitarity, crossing and
//! fusion identities.

use super::tables::{Fw, Pw, Sw, Tw, Vw};
use crate::params::BoundaryParams;
use crate::C64;

fn sh(z: C64) -> C64 {
    z.sinh()
}

fn ch(z: C64) -> C64 {
    z.cosh()
}

fn ex(z: C64) -> C64 {
    z.exp()
}

/// Evaluator for all η-dependent scalar functions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScalarWeights {
    /// Crossing parameter.
    pub eta: C64,
}

impl ScalarWeights {
    /// Evaluator at crossing parameter `eta`.
    pub fn new(eta: C64) -> Self {
        Self { eta }
    }

    /// a(u) = 2 sinh(u/2 − 2η) sinh(u/2 − 4η).
    pub fn a(&self, u: C64) -> C64 {
        2.0 * sh(u / 2.0 - 2.0 * self.eta) * sh(u / 2.0 - 4.0 * self.eta)
    }

    /// b(u) = 2 sinh(u/2) sinh(u/2 − 4η).
    pub fn b(&self, u: C64) -> C64 {
        2.0 * sh(u / 2.0) * sh(u / 2.0 - 4.0 * self.eta)
    }

    /// e(u) = 2 sinh(u/2) sinh(u/2 − 2η).
    pub fn e(&self, u: C64) -> C64 {
        2.0 * sh(u / 2.0) * sh(u / 2.0 - 2.0 * self.eta)
    }

    /// Vector R-matrix weights indexed by [`Vw`].
    pub fn vector(&self, u: C64) -> [C64; 17] {
        let eta = self.eta;
        let s2 = sh(2.0 * eta);
        let a = self.a(u);
        let b = self.b(u);
        let e = self.e(u);
        let g = -2.0 * ex(-u / 2.0) * s2 * sh(u / 2.0 - 4.0 * eta);
        let d = 2.0 * ex(-u / 2.0 + 2.0 * eta) * s2 * sh(u / 2.0);
        let dbar = ex(u - 4.0 * eta) * d;
        let g1 = 2.0 * ex(-u) * s2 * sh(4.0 * eta);
        let g2 = 4.0 * ex(-u / 2.0) * s2 * s2 * ch(u / 2.0 - 2.0 * eta);
        let g3 = ex(u) * g1;
        let mut w = [C64::new(0.0, 0.0); 17];
        w[Vw::A as usize] = a;
        w[Vw::B as usize] = b;
        w[Vw::E as usize] = e;
        w[Vw::G as usize] = g;
        w[Vw::GBar as usize] = ex(u) * g;
        w[Vw::D as usize] = d;
        w[Vw::D1 as usize] = ex(-2.0 * eta) * d;
        w[Vw::D2 as usize] = ex(-4.0 * eta) * d;
        w[Vw::DBar as usize] = dbar;
        w[Vw::D1Bar as usize] = ex(2.0 * eta) * dbar;
        w[Vw::D2Bar as usize] = ex(4.0 * eta) * dbar;
        w[Vw::G1 as usize] = g1;
        w[Vw::G2 as usize] = g2;
        w[Vw::G3 as usize] = g3;
        w[Vw::G1Bar as usize] = ex(2.0 * u) * g1;
        w[Vw::G2Bar as usize] = ex(u) * g2;
        w[Vw::G3Bar as usize] = g3;
        w
    }

    /// a₁(u) = sinh ½(u − 6η).
    pub fn a1(&self, u: C64) -> C64 {
        sh((u - 6.0 * self.eta) / 2.0)
    }

    /// Fused R⁽±⁾ weights indexed by [`Fw`].
    pub fn fused(&self, u: C64) -> [C64; 6] {
        let eta = self.eta;
        let s2 = sh(2.0 * eta);
        let mut w = [C64::new(0.0, 0.0); 6];
        w[Fw::A1 as usize] = self.a1(u);
        w[Fw::B1 as usize] = sh((u - 2.0 * eta) / 2.0);
        w[Fw::E1 as usize] = ex(-u / 2.0 + eta) * s2;
        w[Fw::E2 as usize] = ex(-u / 2.0 - eta) * s2;
        w[Fw::E3 as usize] = ex(u / 2.0 - eta) * s2;
        w[Fw::E4 as usize] = ex(u / 2.0 + eta) * s2;
        w
    }

    /// Mixed R⁽⁺⁻⁾ weights indexed by [`Pw`].
    pub fn mixed(&self, u: C64) -> [C64; 8] {
        let eta = self.eta;
        let s = sh(2.0 * eta);
        let mut w = [C64::new(0.0, 0.0); 8];
        w[Pw::R1 as usize] = sh((u - 8.0 * eta) / 2.0);
        w[Pw::R2 as usize] = sh((u - 4.0 * eta) / 2.0);
        w[Pw::R3 as usize] = -ex(-u / 2.0 + 2.0 * eta) * s;
        w[Pw::R4 as usize] = -ex(-u / 2.0) * s;
        w[Pw::R5 as usize] = -ex(-u / 2.0 - 2.0 * eta) * s;
        w[Pw::R3Bar as usize] = -ex(u / 2.0 - 2.0 * eta) * s;
        w[Pw::R4Bar as usize] = -ex(u / 2.0) * s;
        w[Pw::R5Bar as usize] = -ex(u / 2.0 + 2.0 * eta) * s;
        w
    }

    /// Spinorial R̃ weights indexed by [`Sw`].
    pub fn spinorial(&self, u: C64) -> [C64; 4] {
        let eta = self.eta;
        let mut w = [C64::new(0.0, 0.0); 4];
        w[Sw::A2 as usize] = sh(u / 2.0 - 2.0 * eta);
        w[Sw::B2 as usize] = sh(u / 2.0);
        w[Sw::E5 as usize] = -ex(-u / 2.0) * sh(2.0 * eta);
        w[Sw::E6 as usize] = -ex(u / 2.0) * sh(2.0 * eta);
        w
    }

    /// Constants of the S transform indexed by [`Tw`].
    pub fn s_constants(&self) -> [C64; 13] {
        let eta = self.eta;
        let s0 = 2.0 * (ch(2.0 * eta) * ch(4.0 * eta) * ch(6.0 * eta)).sqrt();
        let s1 = -ex(5.0 * eta) * ch(6.0 * eta).sqrt();
        let s5 = -ex(5.0 * eta) * ch(2.0 * eta).sqrt();
        let s8 = -2.0 * ex(eta) * ch(4.0 * eta) * ch(2.0 * eta).sqrt();
        let s11 = ex(-eta) * (sh(12.0 * eta) / (2.0 * sh(2.0 * eta))).sqrt();
        let mut w = [C64::new(0.0, 0.0); 13];
        w[Tw::S0 as usize] = s0;
        w[Tw::S1 as usize] = s1;
        w[Tw::S2 as usize] = -ex(-2.0 * eta) * s1;
        w[Tw::S3 as usize] = ex(-8.0 * eta) * s1;
        w[Tw::S4 as usize] = ex(-10.0 * eta) * s1;
        w[Tw::S5 as usize] = s5;
        w[Tw::S6 as usize] = ex(-10.0 * eta) * s5;
        w[Tw::S7 as usize] = -ex(-6.0 * eta) * s5;
        w[Tw::S8 as usize] = s8;
        w[Tw::S9 as usize] = ex(-2.0 * eta) * s8;
        w[Tw::S10 as usize] = ex(-4.0 * eta) * s5;
        w[Tw::S11 as usize] = s11;
        w[Tw::S12 as usize] = -ex(2.0 * eta) * s11;
        w
    }

    /// ρ₁(u) = a(u) a(−u), the vector unitarity scalar.
    pub fn rho1(&self, u: C64) -> C64 {
        self.a(u) * self.a(-u)
    }

    /// ρ_s(u) = a₁(u) a₁(−u), the R⁽±⁾ unitarity scalar.
    pub fn rho_s(&self, u: C64) -> C64 {
        self.a1(u) * self.a1(-u)
    }

    /// ρ_ss(u) = −sinh ½(u − 4η) sinh ½(u − 12η), the R⁽⁺⁻⁾ crossing-unitarity scalar.
    pub fn rho_ss(&self, u: C64) -> C64 {
        -sh((u - 4.0 * self.eta) / 2.0) * sh((u - 12.0 * self.eta) / 2.0)
    }

    /// ρ̃₀(u) = sinh ½(u + 4η) sinh ½(u − 8η), the 16-dimensional fusion scalar.
    pub fn rho0_tilde(&self, u: C64) -> C64 {
        sh((u + 4.0 * self.eta) / 2.0) * sh((u - 8.0 * self.eta) / 2.0)
    }

    /// f(u) = a(u) e(u + 8η), the rank-1 fusion scalar.
    pub fn f(&self, u: C64) -> C64 {
        self.a(u) * self.e(u + 8.0 * self.eta)
    }

    /// f̄(u) = a(−u) e(−u + 8η), the rank-1 fusion scalar of the reversed leg.
    pub fn f_bar(&self, u: C64) -> C64 {
        self.a(-u) * self.e(-u + 8.0 * self.eta)
    }
}

/// Boundary functions h₀ … h₄ for one boundary-parameter quadruple.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryWeights {
    /// Crossing parameter.
    pub eta: C64,
    /// Boundary parameters.
    pub bp: BoundaryParams,
}

impl BoundaryWeights {
    /// Evaluator for boundary `bp` at crossing parameter `eta`.
    pub fn new(eta: C64, bp: BoundaryParams) -> Self {
        Self { eta, bp }
    }

    /// h₀(u) = e^{2η} sinh u.
    pub fn h0(&self, u: C64) -> C64 {
        ex(2.0 * self.eta) * sh(u)
    }

    /// h₁(u) = e^{−u/2} sinh(u/2 − c₂) + c e^{−u} sinh u.
    pub fn h1(&self, u: C64) -> C64 {
        let BoundaryParams { c, c2, .. } = self.bp;
        ex(-u / 2.0) * sh(u / 2.0 - c2) + c * ex(-u) * sh(u)
    }

    /// h₂(u) = e^{u/2} sinh(u/2 + c₂) + c e^{u} sinh u.
    pub fn h2(&self, u: C64) -> C64 {
        let BoundaryParams { c, c2, .. } = self.bp;
        ex(u / 2.0) * sh(u / 2.0 + c2) + c * ex(u) * sh(u)
    }

    /// h₃(u) = e^{−u/2} sinh(u/2 − c₂) − c e^{2η} sinh 2η.
    pub fn h3(&self, u: C64) -> C64 {
        let BoundaryParams { c, c2, .. } = self.bp;
        ex(-u / 2.0) * sh(u / 2.0 - c2) - c * ex(2.0 * self.eta) * sh(2.0 * self.eta)
    }

    /// h₄(u) = e^{u/2} sinh(u/2 + c₂) + c e^{2η} sinh 2η.
    pub fn h4(&self, u: C64) -> C64 {
        let BoundaryParams { c, c2, .. } = self.bp;
        ex(u / 2.0) * sh(u / 2.0 + c2) + c * ex(2.0 * self.eta) * sh(2.0 * self.eta)
    }

    /// Dual-side function h̃₁(u) = −h₁(u); meaningful when `bp` is the primed quadruple.
    pub fn h1_tilde(&self, u: C64) -> C64 {
        -self.h1(u)
    }

    /// Dual-side function h̃₂(u) = −h₂(u); meaningful when `bp` is the primed quadruple.
    pub fn h2_tilde(&self, u: C64) -> C64 {
        -self.h2(u)
    }

    /// k₁(u) = e^{−u/2−2η} sinh(c₂ − u/2 + 2η) + c sinh 4η (lower block of K⁽⁻⁾).
    pub fn k1(&self, u: C64) -> C64 {
        let BoundaryParams { c, c2, .. } = self.bp;
        let eta = self.eta;
        ex(-u / 2.0 - 2.0 * eta) * sh(c2 - u / 2.0 + 2.0 * eta) + c * sh(4.0 * eta)
    }

    /// k₂(u) = e^{u/2−2η} sinh(c₂ + u/2 + 2η) + c sinh 4η (lower block of K⁽⁻⁾).
    pub fn k2(&self, u: C64) -> C64 {
        let BoundaryParams { c, c2, .. } = self.bp;
        let eta = self.eta;
        ex(u / 2.0 - 2.0 * eta) * sh(c2 + u / 2.0 + 2.0 * eta) + c * sh(4.0 * eta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: C64, b: f64, tol: f64) -> bool {
        (a - C64::new(b, 0.0)).norm() < tol
    }

    #[test]
    fn spot_values() {
        let w = ScalarWeights::new(C64::new(0.1, 0.0));
        assert!(close(w.a(C64::new(0.7, 0.0)), 2.0 * 0.15f64.sinh() * (-0.05f64).sinh(), 1e-15));
        assert!(close(w.a(C64::new(0.7, 0.0)), -0.0150626, 1e-7));
        assert!(close(w.a1(C64::new(0.7, 0.0)), 0.050021, 5e-7));
        assert!(close(w.spinorial(C64::new(0.4, 0.0))[Sw::E5 as usize], -0.164840, 5e-7));
        assert!(close(w.s_constants()[Tw::S0 as usize], 2.286736, 1e-6));
        assert!(close(w.mixed(C64::new(0.0, 0.0))[Pw::R1 as usize], (-0.4f64).sinh(), 1e-15));
    }

    #[test]
    fn vector_weights_vanish_at_zero() {
        let w = ScalarWeights::new(C64::new(0.1, 0.0)).vector(C64::new(0.0, 0.0));
        for k in [Vw::B, Vw::E, Vw::D, Vw::D1, Vw::D2, Vw::DBar, Vw::D1Bar, Vw::D2Bar] {
            assert_eq!(w[k as usize].norm(), 0.0, "{k:?}");
        }
    }

    #[test]
    fn boundary_spot_value() {
        let eta = C64::new(0.1, 0.0);
        let bp = BoundaryParams::real(0.3, 0.7, 0.2).unwrap();
        let h = BoundaryWeights::new(eta, bp);
        assert!(close(h.h1(C64::new(0.0, 0.0)), (-0.2f64).sinh(), 1e-15));
        assert!((h.h1_tilde(C64::new(0.3, 0.1)) + h.h1(C64::new(0.3, 0.1))).norm() == 0.0);
    }
}
