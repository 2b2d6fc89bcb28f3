//! Every local matrix of the model: R-matrices, boundary K-matrices and their
//! duals, twist matrices, fusion projectors and the S / S̄ similarity
//! transforms.
//!
//! Sparse R-matrices are assembled from the frozen tables in [`tables`];
//! matrices defined by a mapping (K̄, K̄⁽±⁾, S̄, R⁽⁻⁺⁾) are always computed
//! from their defining formula, never tabulated.

pub mod tables;
pub mod weights;

use crate::la::{self, CMat, LabeledOperator, Projector};
use crate::params::{BoundaryParams, ModelParams};
use crate::{Error, Result, C64};
use tables::Entry;
pub use weights::{BoundaryWeights, ScalarWeights};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

fn build<W: Copy + Into<usize>>(n: usize, table: &[Entry<W>], w: &[C64]) -> CMat {
    let mut m = CMat::zeros(n, n);
    for &(i, j, s, k) in table {
        m[(i as usize, j as usize)] = f64::from(s) * w[k.into()];
    }
    m
}

macro_rules! index_enum {
    ($($t:ty),*) => {$(
        impl From<$t> for usize {
            fn from(w: $t) -> usize {
                w as usize
            }
        }
    )*};
}
index_enum!(tables::Vw, tables::Fw, tables::Pw, tables::Sw, tables::Tw);

fn op(m: CMat, dims: &[usize]) -> LabeledOperator {
    LabeledOperator::new(m, dims).expect("table dimensions match their layout")
}

/// Sign of a fused representation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    /// The (+) family.
    Plus,
    /// The (−) family.
    Minus,
}

impl Sign {
    /// The other sign.
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    /// +1 or −1.
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// Fusion projectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ProjectorName {
    /// Rank-1 projector on 6⊗6.
    P1,
    /// Rank-16 projector on 6⊗6.
    P16,
    /// Rank-4 projector on 4⊗6, (+) family.
    Pplus,
    /// Rank-4 projector on 4⊗6, (−) family.
    Pminus,
    /// Rank-6 projector on 4⊗4.
    P6,
}

/// Which ordering of the two fused spaces the projector refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    /// Spaces in their natural order (1, 2).
    S12,
    /// Reversed order (2, 1).
    S21,
}

/// Constructor for every local object of one model instance.
#[derive(Clone, Copy, Debug)]
pub struct LocalOps {
    /// Scalar weights at η.
    pub w: ScalarWeights,
    /// Boundary functions of the unprimed (K) side.
    pub left: BoundaryWeights,
    /// Boundary functions of the primed (K̄) side.
    pub right: BoundaryWeights,
}

impl LocalOps {
    /// Builder from η and both boundary quadruples.
    pub fn new(eta: C64, left: BoundaryParams, right: BoundaryParams) -> Self {
        Self {
            w: ScalarWeights::new(eta),
            left: BoundaryWeights::new(eta, left),
            right: BoundaryWeights::new(eta, right),
        }
    }

    /// Builder from model parameters.
    pub fn from_params(p: &ModelParams) -> Self {
        Self::new(p.eta, p.left, p.right)
    }

    /// Crossing parameter.
    pub fn eta(&self) -> C64 {
        self.w.eta
    }

    /// Vector R-matrix on `[6,6]`.
    pub fn r_vector(&self, u: C64) -> LabeledOperator {
        op(build(36, &tables::R_VECTOR, &self.w.vector(u)), &[6, 6])
    }

    /// R₂₁(u) = R(u)ᵗ¹ᵗ² on `[6,6]`.
    pub fn r_vector_21(&self, u: C64) -> LabeledOperator {
        self.r_vector(u).transpose()
    }

    /// Fused R⁽⁺⁾ on `[4,6]`.
    pub fn r_plus(&self, u: C64) -> LabeledOperator {
        op(build(24, &tables::R_PLUS, &self.w.fused(u)), &[4, 6])
    }

    /// Fused R⁽⁻⁾ on `[4,6]`.
    pub fn r_minus(&self, u: C64) -> LabeledOperator {
        op(build(24, &tables::R_MINUS, &self.w.fused(u)), &[4, 6])
    }

    /// R⁽±⁾ by sign.
    pub fn r_fused(&self, s: Sign, u: C64) -> LabeledOperator {
        match s {
            Sign::Plus => self.r_plus(u),
            Sign::Minus => self.r_minus(u),
        }
    }

    /// Mixed R⁽⁺⁻⁾ on `[4,4]`.
    pub fn r_pm(&self, u: C64) -> LabeledOperator {
        op(build(16, &tables::R_PM, &self.w.mixed(u)), &[4, 4])
    }

    /// R⁽⁻⁺⁾ with reversed legs, defined as the full transpose of R⁽⁺⁻⁾.
    pub fn r_mp(&self, u: C64) -> LabeledOperator {
        self.r_pm(u).transpose()
    }

    /// Spinorial R̃ on `[4,4]`.
    pub fn r_spinorial(&self, u: C64) -> LabeledOperator {
        op(build(16, &tables::R_SPIN, &self.w.spinorial(u)), &[4, 4])
    }

    /// Reflection matrix K(u) for boundary functions `h`.
    pub fn k_matrix(h: &BoundaryWeights, u: C64) -> LabeledOperator {
        let eta = h.eta;
        let mut k = CMat::zeros(6, 6);
        let h0 = h.h0(u);
        k[(0, 0)] = h.h1(u - 2.0 * eta);
        k[(1, 1)] = h.h3(u - 2.0 * eta);
        k[(2, 2)] = k[(1, 1)];
        k[(3, 3)] = -h.h4(u + 2.0 * eta);
        k[(4, 4)] = k[(3, 3)];
        k[(5, 5)] = -h.h2(u + 2.0 * eta);
        k[(1, 3)] = -h.bp.c1 * h0;
        k[(3, 1)] = -h.bp.c3 * h0;
        k[(2, 4)] = h.bp.c1 * h0;
        k[(4, 2)] = h.bp.c3 * h0;
        op(k, &[6])
    }

    /// Reflection matrix K⁻(u) = K(u) with the unprimed boundary.
    pub fn k_minus(&self, u: C64) -> LabeledOperator {
        Self::k_matrix(&self.left, u)
    }

    /// Dual reflection matrix K̄(u) = M·K(−u + 8η) with the primed boundary.
    pub fn k_bar(&self, u: C64) -> LabeledOperator {
        let k = Self::k_matrix(&self.right, -u + 8.0 * self.eta());
        op(&self.m_twist().matrix * &k.matrix, &[6])
    }

    /// Fused reflection matrix K⁽⁺⁾ on `[4]` for boundary functions `h`.
    pub fn k_plus_with(h: &BoundaryWeights, u: C64) -> LabeledOperator {
        let BoundaryParams { c1, c2, c3, .. } = h.bp;
        let mut k = CMat::zeros(4, 4);
        k[(0, 0)] = (-u / 2.0).exp() * (c2 - u / 2.0).sinh();
        k[(0, 1)] = c1 * u.sinh();
        k[(1, 0)] = c3 * u.sinh();
        k[(1, 1)] = (u / 2.0).exp() * (c2 + u / 2.0).sinh();
        k[(2, 2)] = h.h2(u);
        k[(3, 3)] = h.h2(u);
        op(k, &[4])
    }

    /// Fused reflection matrix K⁽⁻⁾ on `[4]` for boundary functions `h`.
    pub fn k_minus_with(h: &BoundaryWeights, u: C64) -> LabeledOperator {
        let BoundaryParams { c1, c3, .. } = h.bp;
        let x = -(-4.0 * h.eta).exp() * h.h1(u - 4.0 * h.eta);
        let mut k = CMat::zeros(4, 4);
        k[(0, 0)] = x;
        k[(1, 1)] = x;
        k[(2, 2)] = h.k1(u);
        k[(2, 3)] = c1 * u.sinh();
        k[(3, 2)] = c3 * u.sinh();
        k[(3, 3)] = h.k2(u);
        op(k, &[4])
    }

    /// Fused K⁽⁺⁾(u) with the unprimed boundary.
    pub fn k_plus_fused(&self, u: C64) -> LabeledOperator {
        Self::k_plus_with(&self.left, u)
    }

    /// Fused K⁽⁻⁾(u) with the unprimed boundary.
    pub fn k_minus_fused(&self, u: C64) -> LabeledOperator {
        Self::k_minus_with(&self.left, u)
    }

    /// Fused K⁽±⁾(u) by sign.
    pub fn k_fused(&self, s: Sign, u: C64) -> LabeledOperator {
        match s {
            Sign::Plus => self.k_plus_fused(u),
            Sign::Minus => self.k_minus_fused(u),
        }
    }

    /// Fused dual K̄⁽±⁾(u) = M̄·K⁽±⁾(−u + 8η) with the primed boundary.
    pub fn k_bar_fused(&self, s: Sign, u: C64) -> LabeledOperator {
        let v = -u + 8.0 * self.eta();
        let k = match s {
            Sign::Plus => Self::k_plus_with(&self.right, v),
            Sign::Minus => Self::k_minus_with(&self.right, v),
        };
        op(&self.m_bar().matrix * &k.matrix, &[4])
    }

    fn e(&self, k: f64) -> C64 {
        (k * self.eta()).exp()
    }

    /// M = diag(e^{8η}, e^{4η}, 1, 1, e^{−4η}, e^{−8η}).
    pub fn m_twist(&self) -> LabeledOperator {
        let d = [self.e(8.0), self.e(4.0), ONE, ONE, self.e(-4.0), self.e(-8.0)];
        op(la::diag(&d), &[6])
    }

    /// Antidiagonal V with V² = I and VᵗV = M.
    pub fn v_twist(&self) -> LabeledOperator {
        let a = [self.e(-4.0), self.e(-2.0), ONE, ONE, self.e(2.0), self.e(4.0)];
        let m = CMat::from_fn(6, 6, |i, j| if i + j == 5 { a[i] } else { ZERO });
        op(m, &[6])
    }

    /// M̄ = diag(e^{6η}, e^{2η}, e^{−2η}, e^{−6η}).
    pub fn m_bar(&self) -> LabeledOperator {
        op(la::diag(&[self.e(6.0), self.e(2.0), self.e(-2.0), self.e(-6.0)]), &[4])
    }

    /// Antidiagonal V̄ with V̄² = −I and V̄ᵗV̄ = M̄.
    pub fn v_bar(&self) -> LabeledOperator {
        let a = [-self.e(-3.0), self.e(-1.0), -self.e(1.0), self.e(3.0)];
        let m = CMat::from_fn(4, 4, |i, j| if i + j == 3 { a[i] } else { ZERO });
        op(m, &[4])
    }

    /// W = diag(1, −1, 1, −1, 1, −1).
    pub fn w_sign() -> LabeledOperator {
        op(la::diag(&[ONE, -ONE, ONE, -ONE, ONE, -ONE]), &[6])
    }

    /// S̃ = diag(1, −1, 1, −1).
    pub fn s_tilde() -> LabeledOperator {
        op(la::diag(&[ONE, -ONE, ONE, -ONE]), &[4])
    }

    /// The 16×16 similarity transform S on `[4,4]`.
    pub fn s_transform(&self) -> LabeledOperator {
        op(build(16, &tables::S_TRANSFORM, &self.w.s_constants()), &[4, 4])
    }

    /// S̄ = −(1/sinh 4η)·S·R⁽⁻⁺⁾(0).
    pub fn s_bar_transform(&self) -> Result<LabeledOperator> {
        let s4 = (4.0 * self.eta()).sinh();
        if s4.norm() == 0.0 {
            return Err(Error::ZeroDivisor("sinh 4η = 0 in S̄".into()));
        }
        let m = &self.s_transform().matrix * &self.r_mp(ZERO).matrix;
        let sb = op(la::scale(&m, -1.0 / s4), &[4, 4]);
        let cond = la::condition_number(&sb.matrix)?;
        if !(cond < 1e12) {
            return Err(Error::Singular(format!("S̄ condition number {cond:.3e}")));
        }
        Ok(sb)
    }

    /// Fusion projector built from its closed-form basis.
    pub fn projector(&self, name: ProjectorName, side: Side) -> Result<Projector> {
        let eta = self.eta();
        let vecs = match (name, side) {
            (ProjectorName::P1, _) => vec![psi0(eta)?],
            (ProjectorName::P16, _) => phi16(eta)?,
            (ProjectorName::Pplus, Side::S12) => phi_pm(Sign::Plus, eta)?,
            (ProjectorName::Pplus, Side::S21) => phi_pm(Sign::Plus, -eta)?,
            (ProjectorName::Pminus, Side::S12) => phi_pm(Sign::Minus, eta)?,
            (ProjectorName::Pminus, Side::S21) => phi_pm(Sign::Minus, -eta)?,
            (ProjectorName::P6, _) => chi6(eta)?,
        };
        let vecs = match (name, side) {
            (ProjectorName::P1 | ProjectorName::P16, Side::S21) => vecs.iter().map(|v| swap_ket(v, 6, 6)).collect(),
            (ProjectorName::P6, Side::S21) => vecs.iter().map(|v| swap_ket(v, 4, 4)).collect(),
            _ => vecs,
        };
        for v in &vecs {
            check_branch(la::bilinear(v, v), "bilinear norm of a basis vector")?;
        }
        Projector::from_basis(vecs)
    }

    /// Isometry (basis columns) of a projector.
    pub fn isometry(&self, name: ProjectorName, side: Side) -> Result<CMat> {
        Ok(self.projector(name, side)?.isometry())
    }
}

/// Dumps a matrix as a JSON array of rows of `[re, im]` pairs.
pub fn matrix_to_json(m: &CMat) -> serde_json::Value {
    let rows: Vec<serde_json::Value> = (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| serde_json::json!([m[(i, j)].re, m[(i, j)].im])).collect())
        .collect();
    serde_json::Value::Array(rows)
}

fn check_branch(z: C64, what: &str) -> Result<C64> {
    if z.re < 0.0 && z.im.abs() <= 1e-14 * z.re.abs() {
        return Err(Error::BranchCut(format!("{what} is negative real ({})", z.re)));
    }
    Ok(z)
}

fn sqrt_checked(z: C64, what: &str) -> Result<C64> {
    Ok(check_branch(z, what)?.sqrt())
}

/// Vector on d1⊗d2 from (coefficient, k, l) terms with 1-based k, l.
fn ket(d1: usize, d2: usize, terms: &[(C64, usize, usize)]) -> Vec<C64> {
    let mut v = vec![ZERO; d1 * d2];
    for &(c, k, l) in terms {
        debug_assert!(k >= 1 && k <= d1 && l >= 1 && l <= d2);
        v[(k - 1) * d2 + (l - 1)] += c;
    }
    v
}

fn swap_ket(v: &[C64], d1: usize, d2: usize) -> Vec<C64> {
    let mut w = vec![ZERO; v.len()];
    for k in 0..d1 {
        for l in 0..d2 {
            w[l * d1 + k] = v[k * d2 + l];
        }
    }
    w
}

fn scaled(c: C64, v: Vec<C64>) -> Vec<C64> {
    v.into_iter().map(|z| c * z).collect()
}

fn add(a: Vec<C64>, b: Vec<C64>) -> Vec<C64> {
    a.into_iter().zip(b).map(|(x, y)| x + y).collect()
}

fn psi0(eta: C64) -> Result<Vec<C64>> {
    let e = |k: f64| (k * eta).exp();
    let n = sqrt_checked((2.0 * eta).sinh() / (2.0 * (4.0 * eta).cosh() * (6.0 * eta).sinh()), "ψ₀ normalization")?;
    Ok(scaled(
        n,
        ket(6, 6, &[(e(-4.0), 1, 6), (e(-2.0), 2, 5), (ONE, 3, 4), (ONE, 4, 3), (e(2.0), 5, 2), (e(4.0), 6, 1)]),
    ))
}

fn phi16(eta: C64) -> Result<Vec<Vec<C64>>> {
    let e = |k: f64| (k * eta).exp();
    let ph = 1.0 / sqrt_checked(2.0 * (2.0 * eta).cosh(), "φ normalization")?;
    let pair = |k: usize, l: usize, p: f64| scaled(ph, ket(6, 6, &[(e(-p), k, l), (-e(p), l, k)]));
    let pb =
        sqrt_checked((2.0 * eta).sinh() / (2.0 * (6.0 * eta).cosh() * (8.0 * eta).sinh()), "φ₈/φ₁₀ normalization")?;
    let pt = sqrt_checked((6.0 * eta).sinh() / (2.0 * (4.0 * eta).cosh() * (2.0 * eta).sinh()), "φ₁₃ normalization")?;
    let quad = |a: f64, b: f64, c: f64, d: f64| ket(6, 6, &[(e(a), 2, 5), (e(b), 5, 2), (e(c), 1, 6), (e(d), 6, 1)]);
    let v8 = scaled(
        2.0 * pb,
        add(
            scaled((4.0 * eta).cosh(), ket(6, 6, &[(e(-2.0), 2, 5), (-e(2.0), 5, 2)])),
            scaled(-(2.0 * eta).sinh(), ket(6, 6, &[(e(2.0), 1, 6), (e(-2.0), 6, 1)])),
        ),
    );
    let v10 = scaled(pb, add(quad(4.0, -4.0, 2.0, -2.0), ket(6, 6, &[(2.0 * (6.0 * eta).cosh(), 3, 4)])));
    let v13 = scaled(
        pt,
        add(
            scaled((2.0 * eta).sinh() / (8.0 * eta).sinh(), quad(4.0, -4.0, 2.0, -2.0)),
            ket(6, 6, &[(-1.0 / (2.0 * (4.0 * eta).cosh()), 3, 4), (ONE, 4, 3)]),
        ),
    );
    Ok(vec![
        pair(1, 2, 1.0),
        pair(1, 3, 1.0),
        pair(1, 4, 1.0),
        pair(1, 5, 1.0),
        pair(1, 6, 2.0),
        pair(2, 3, 1.0),
        pair(2, 4, 1.0),
        v8,
        pair(2, 6, 1.0),
        v10,
        pair(3, 5, 1.0),
        pair(3, 6, 1.0),
        v13,
        pair(4, 5, 1.0),
        pair(4, 6, 1.0),
        pair(5, 6, 1.0),
    ])
}

fn phi_pm(s: Sign, eta: C64) -> Result<Vec<Vec<C64>>> {
    let e = |k: f64| (k * eta).exp();
    let p0 = sqrt_checked((2.0 * eta).sinh() / (6.0 * eta).sinh(), "φ₀ normalization")?;
    let m = -ONE;
    let terms: [[(C64, usize, usize); 3]; 4] = match s {
        Sign::Plus => [
            [(e(-2.0), 1, 4), (m, 2, 2), (e(2.0), 3, 1)],
            [(e(-2.0), 1, 5), (ONE, 2, 3), (-e(2.0), 4, 1)],
            [(e(-2.0), 1, 6), (m, 3, 3), (e(2.0), 4, 2)],
            [(e(-2.0), 2, 6), (ONE, 3, 5), (e(2.0), 4, 4)],
        ],
        Sign::Minus => [
            [(e(-2.0), 1, 3), (ONE, 2, 2), (e(2.0), 3, 1)],
            [(e(-2.0), 1, 5), (m, 2, 4), (-e(2.0), 4, 1)],
            [(e(-2.0), 1, 6), (m, 3, 4), (e(2.0), 4, 2)],
            [(e(-2.0), 2, 6), (m, 3, 5), (-e(2.0), 4, 3)],
        ],
    };
    Ok(terms.iter().map(|t| scaled(p0, ket(4, 6, t))).collect())
}

fn chi6(eta: C64) -> Result<Vec<Vec<C64>>> {
    let e = |k: f64| (k * eta).exp();
    let p0 = sqrt_checked((2.0 * eta).sinh() / (6.0 * eta).sinh(), "χ normalization")?;
    let pr = |k: usize, l: usize, s: f64| scaled(p0 * s, ket(4, 4, &[(e(-1.0), k, l), (-e(1.0), l, k)]));
    Ok(vec![pr(1, 2, 1.0), pr(1, 3, 1.0), pr(1, 4, 1.0), pr(2, 3, 1.0), pr(2, 4, -1.0), pr(3, 4, 1.0)])
}

#[cfg(test)]
mod tests;
