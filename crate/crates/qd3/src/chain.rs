//! Monodromy matrices, transfer matrices t(u), fused transfer matrices
//! t±(u) and the Hamiltonian of the open chain.
//!
//! The auxiliary-extended product K̄·T·K·T̂ is accumulated by applying each
//! local factor to a dense matrix on the layout [d_aux, 6, …, 6] without ever
//! forming an embedded operator, then the auxiliary leg is traced out.

use crate::la::{self, CMat, LabeledOperator, SpaceLayout};
use crate::local_ops::{LocalOps, Sign};
use crate::params::ValidatedParams;
use crate::{Error, Result, C64};

/// Physical dimension of one site.
pub const SITE_DIM: usize = 6;
/// Largest supported chain length.
pub const MAX_SITES: usize = 4;
/// Default finite-difference step for the Hamiltonian.
pub const FD_STEP: f64 = 1e-4;
/// Largest condition number of t(0) accepted when forming t′(0)t(0)⁻¹.
pub const MAX_T0_CONDITION: f64 = 1e10;

/// R-matrix family running along the auxiliary leg.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    /// Vector representation, 6-dimensional auxiliary space.
    Vector,
    /// Fused (+) representation, 4-dimensional auxiliary space.
    Plus,
    /// Fused (−) representation, 4-dimensional auxiliary space.
    Minus,
}

impl Family {
    /// Auxiliary-space dimension.
    pub fn aux_dim(self) -> usize {
        match self {
            Family::Vector => 6,
            Family::Plus | Family::Minus => 4,
        }
    }
}

/// Ordering of the monodromy product.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    /// T₀(u) = R₀₁(u − θ₁)⋯R₀N(u − θ_N).
    Forward,
    /// T̂₀(u) = R_N0(u + θ_N)⋯R₁₀(u + θ₁).
    Hat,
}

/// What a [`ChainOperator`] represents.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ChainKind {
    /// t(u).
    Transfer,
    /// t₊(u).
    TransferPlus,
    /// t₋(u).
    TransferMinus,
    /// H.
    Hamiltonian,
}

/// A dense operator on the 6^N-dimensional physical space.
#[derive(Clone, Debug)]
pub struct ChainOperator {
    /// 6^N × 6^N matrix.
    pub matrix: CMat,
    /// Parameters it was built from.
    pub params: ValidatedParams,
    /// Which object it is.
    pub kind: ChainKind,
}

/// Hamiltonian with its finite-difference diagnostics.
#[derive(Clone, Debug)]
pub struct Hamiltonian {
    /// H = ½ t′(0) t(0)⁻¹ at the homogeneous point.
    pub op: ChainOperator,
    /// ‖H_R(h) − H_R(h/2)‖/‖H_R(h/2)‖ between two Richardson estimates.
    pub extrapolation_error: f64,
    /// Observed convergence order of the plain central difference.
    pub observed_order: f64,
    /// Condition number of t(0).
    pub t0_condition: f64,
}

/// Builder for every chain-level object of one model instance.
#[derive(Clone, Debug)]
pub struct Chain {
    params: ValidatedParams,
    ops: LocalOps,
}

impl Chain {
    /// Chain for validated parameters (N ≤ [`MAX_SITES`]).
    pub fn new(params: &ValidatedParams) -> Result<Self> {
        if params.n_sites == 0 || params.n_sites > MAX_SITES {
            return Err(Error::Config(format!("chain length {} outside 1..={MAX_SITES}", params.n_sites)));
        }
        Ok(Self { params: params.clone(), ops: LocalOps::from_params(params) })
    }

    /// Parameters of the chain.
    pub fn params(&self) -> &ValidatedParams {
        &self.params
    }

    /// Local-object constructor of the chain.
    pub fn ops(&self) -> &LocalOps {
        &self.ops
    }

    /// Number of sites.
    pub fn n_sites(&self) -> usize {
        self.params.n_sites
    }

    /// Physical dimension 6^N.
    pub fn phys_dim(&self) -> usize {
        SITE_DIM.pow(self.n_sites() as u32)
    }

    fn layout(&self, family: Family) -> SpaceLayout {
        let mut dims = vec![family.aux_dim()];
        dims.extend(std::iter::repeat_n(SITE_DIM, self.n_sites()));
        SpaceLayout::new(&dims)
    }

    fn local_r(&self, family: Family, u: C64) -> LabeledOperator {
        match family {
            Family::Vector => self.ops.r_vector(u),
            Family::Plus => self.ops.r_plus(u),
            Family::Minus => self.ops.r_minus(u),
        }
    }

    /// Monodromy on [d_aux, 6, …, 6].
    ///
    /// The hat direction uses R_{j0}(u + θ_j), the leg-reversed operator,
    /// which equals the full transpose of R_{0j}(u + θ_j).
    pub fn monodromy(&self, u: C64, family: Family, direction: Direction) -> Result<LabeledOperator> {
        let layout = self.layout(family);
        let mut m = la::identity(layout.total());
        match direction {
            Direction::Forward => {
                for j in (0..self.n_sites()).rev() {
                    let r = self.local_r(family, u - self.params.theta[j]);
                    m = la::apply_left(&r, &[0, j + 1], &layout, &m)?;
                }
            }
            Direction::Hat => {
                for j in 0..self.n_sites() {
                    let r = self.local_r(family, u + self.params.theta[j]).transpose();
                    m = la::apply_left(&r, &[0, j + 1], &layout, &m)?;
                }
            }
        }
        LabeledOperator::new(m, layout.dims())
    }

    /// tr₀{K̄₀ T₀ K₀ T̂₀} for an arbitrary family and boundary pair.
    fn transfer_generic(&self, u: C64, family: Family, k: &LabeledOperator, kbar: &LabeledOperator) -> Result<CMat> {
        let layout = self.layout(family);
        let n = self.n_sites();
        // Y = T̂ = R_N0 ⋯ R_10, built right to left.
        let mut y = la::identity(layout.total());
        for j in 0..n {
            let r = self.local_r(family, u + self.params.theta[j]).transpose();
            y = la::apply_left(&r, &[0, j + 1], &layout, &y)?;
        }
        y = la::apply_left(k, &[0], &layout, &y)?;
        for j in (0..n).rev() {
            let r = self.local_r(family, u - self.params.theta[j]);
            y = la::apply_left(&r, &[0, j + 1], &layout, &y)?;
        }
        y = la::apply_left(kbar, &[0], &layout, &y)?;
        Ok(la::trace_first_leg(&y, family.aux_dim()))
    }

    /// Transfer matrix t(u).
    pub fn transfer(&self, u: C64) -> Result<ChainOperator> {
        let m = self.transfer_generic(u, Family::Vector, &self.ops.k_minus(u), &self.ops.k_bar(u))?;
        Ok(ChainOperator { matrix: m, params: self.params.clone(), kind: ChainKind::Transfer })
    }

    /// Fused transfer matrix t±(u).
    pub fn transfer_fused(&self, u: C64, s: Sign) -> Result<ChainOperator> {
        let (family, kind) = match s {
            Sign::Plus => (Family::Plus, ChainKind::TransferPlus),
            Sign::Minus => (Family::Minus, ChainKind::TransferMinus),
        };
        let m = self.transfer_generic(u, family, &self.ops.k_fused(s, u), &self.ops.k_bar_fused(s, u))?;
        Ok(ChainOperator { matrix: m, params: self.params.clone(), kind })
    }

    /// 𝒲 = W ⊗ ⋯ ⊗ W on the physical space (a diagonal sign matrix).
    pub fn w_chain(&self) -> CMat {
        let w = LocalOps::w_sign().matrix;
        (1..self.n_sites()).fold(w.clone(), |acc, _| la::kron_mat(&acc, &w))
    }

    /// Hamiltonian H = ½ t′(0) t(0)⁻¹ at the homogeneous point (all θ_j = 0).
    ///
    /// The derivative is a central difference refined by one Richardson step
    /// (steps h and h/2); the Richardson estimate at h/2 provides the error
    /// estimate and three plain differences give the observed order.
    pub fn hamiltonian(&self, h: f64) -> Result<Hamiltonian> {
        let hom = Chain::new(&self.params.homogeneous()?)?;
        let t = |u: f64| -> Result<CMat> { Ok(hom.transfer(C64::new(u, 0.0))?.matrix) };
        let t0 = t(0.0)?;
        let cond = la::condition_number(&t0)?;
        if !(cond <= MAX_T0_CONDITION) {
            return Err(Error::SingularT0(cond));
        }
        let central = |s: f64| -> Result<CMat> { Ok(la::scale(&(t(s)? - t(-s)?), C64::new(0.5 / s, 0.0))) };
        let d = [central(h)?, central(h / 2.0)?, central(h / 4.0)?];
        let richardson =
            |a: &CMat, b: &CMat| la::scale(&(la::scale(b, C64::new(4.0, 0.0)) - a), C64::new(1.0 / 3.0, 0.0));
        let r1 = richardson(&d[0], &d[1]);
        let r2 = richardson(&d[1], &d[2]);
        let order = (la::frob(&(&d[0] - &d[1])) / la::frob(&(&d[1] - &d[2])).max(la::RESIDUAL_FLOOR)).log2();
        let t0_inv = la::inverse(&t0)?;
        let hm = la::scale(&(&r2 * &t0_inv), C64::new(0.5, 0.0));
        Ok(Hamiltonian {
            op: ChainOperator { matrix: hm, params: hom.params.clone(), kind: ChainKind::Hamiltonian },
            extrapolation_error: la::rel_distance(&r1, &r2),
            observed_order: order,
            t0_condition: cond,
        })
    }
}
