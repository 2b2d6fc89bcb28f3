//! Dense complex linear algebra and tensor-leg bookkeeping.
//!
//! Matrices are `faer::Mat<C64>`. Tensor layouts follow the row-major
//! convention: for factor dimensions `[d₀, d₁, …]` the basis vector
//! |i₀ i₁ …⟩ has index `i₀·(d₁d₂…) + i₁·(d₂…) + …`, so slot 0 is the slowest
//! leg. Local operators are applied to multi-leg matrices without forming the
//! embedded matrix explicitly, using only the nonzero entries of the local
//! operator.

use crate::params::{rng_from_seed, WorkbenchRng};
use crate::{Error, Result, C64};
use faer::linalg::solvers::{DenseSolveCore, Solve};
use faer::Mat;
use rand::Rng;

/// Dense complex matrix.
pub type CMat = Mat<C64>;

/// Default relative tolerance for numerical rank.
pub const RANK_TOL: f64 = 1e-8;
/// Floor of the residual denominator.
pub const RESIDUAL_FLOOR: f64 = 1e-300;
/// Largest condition number accepted for a common eigenbasis.
pub const MAX_BASIS_CONDITION: f64 = 1e8;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Ordered list of tensor-factor dimensions (slot 0 is leftmost and slowest).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpaceLayout {
    dims: Vec<usize>,
}

impl SpaceLayout {
    /// Layout with the given factor dimensions.
    pub fn new(dims: &[usize]) -> Self {
        Self { dims: dims.to_vec() }
    }

    /// Factor dimensions.
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Number of tensor legs.
    pub fn legs(&self) -> usize {
        self.dims.len()
    }

    /// Product of all factor dimensions.
    pub fn total(&self) -> usize {
        self.dims.iter().product()
    }

    /// Index stride of every slot.
    pub fn strides(&self) -> Vec<usize> {
        let mut s = vec![1; self.dims.len()];
        for k in (0..self.dims.len().saturating_sub(1)).rev() {
            s[k] = s[k + 1] * self.dims[k + 1];
        }
        s
    }

    fn check_slot(&self, slot: usize) -> Result<()> {
        if slot >= self.dims.len() {
            Err(Error::BadSlot { slot, legs: self.dims.len() })
        } else {
            Ok(())
        }
    }

    fn concat(&self, other: &SpaceLayout) -> SpaceLayout {
        SpaceLayout { dims: [self.dims.as_slice(), other.dims.as_slice()].concat() }
    }

    fn without(&self, slot: usize) -> SpaceLayout {
        let dims = self.dims.iter().enumerate().filter(|&(k, _)| k != slot).map(|(_, &d)| d).collect();
        SpaceLayout { dims }
    }
}

/// A dense matrix together with the tensor layout it acts on.
#[derive(Clone, Debug)]
pub struct LabeledOperator {
    /// Square matrix of size `layout.total()`.
    pub matrix: CMat,
    /// Tensor structure of rows and columns.
    pub layout: SpaceLayout,
}

impl LabeledOperator {
    /// Pairs a matrix with a layout, checking the dimension.
    pub fn new(matrix: CMat, dims: &[usize]) -> Result<Self> {
        let layout = SpaceLayout::new(dims);
        if matrix.nrows() != layout.total() || matrix.ncols() != layout.total() {
            return Err(Error::DimensionMismatch(format!(
                "matrix {}x{} vs layout total {}",
                matrix.nrows(),
                matrix.ncols(),
                layout.total()
            )));
        }
        Ok(Self { matrix, layout })
    }

    /// Identity on a layout.
    pub fn identity(dims: &[usize]) -> Self {
        let layout = SpaceLayout::new(dims);
        Self { matrix: identity(layout.total()), layout }
    }

    /// Factor dimensions.
    pub fn dims(&self) -> &[usize] {
        self.layout.dims()
    }

    /// Full transpose (all legs), same layout.
    pub fn transpose(&self) -> Self {
        Self { matrix: transpose(&self.matrix), layout: self.layout.clone() }
    }

    /// Matrix product (layouts must agree).
    pub fn mul(&self, rhs: &LabeledOperator) -> Result<Self> {
        if self.layout != rhs.layout {
            return Err(Error::DimensionMismatch(format!(
                "layouts {:?} vs {:?}",
                self.layout.dims(),
                rhs.layout.dims()
            )));
        }
        Ok(Self { matrix: &self.matrix * &rhs.matrix, layout: self.layout.clone() })
    }

    /// Scalar multiple.
    pub fn scale(&self, c: C64) -> Self {
        Self { matrix: scale(&self.matrix, c), layout: self.layout.clone() }
    }
}

/// n×n identity.
pub fn identity(n: usize) -> CMat {
    CMat::from_fn(n, n, |i, j| if i == j { ONE } else { ZERO })
}

/// Square matrix from a diagonal.
pub fn diag(d: &[C64]) -> CMat {
    CMat::from_fn(d.len(), d.len(), |i, j| if i == j { d[i] } else { ZERO })
}

/// Plain transpose (no conjugation).
pub fn transpose(m: &CMat) -> CMat {
    m.transpose().to_owned()
}

/// Scalar multiple.
pub fn scale(m: &CMat, c: C64) -> CMat {
    CMat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] * c)
}

/// Frobenius norm.
pub fn frob(m: &CMat) -> f64 {
    let mut s = 0.0;
    for j in 0..m.ncols() {
        for z in m.col_as_slice(j) {
            s += z.norm_sqr();
        }
    }
    s.sqrt()
}

/// Relative residual ‖lhs − rhs‖_F / max(‖lhs‖_F, 1e−300).
pub fn rel_residual(lhs: &CMat, rhs: &CMat) -> f64 {
    frob(&(lhs - rhs)) / frob(lhs).max(RESIDUAL_FLOOR)
}

/// Symmetric relative distance ‖a − b‖_F / max(‖a‖_F, ‖b‖_F, 1e−300).
pub fn rel_distance(a: &CMat, b: &CMat) -> f64 {
    frob(&(a - b)) / frob(a).max(frob(b)).max(RESIDUAL_FLOOR)
}

/// Matrix inverse via partial-pivot LU; fails if the condition number exceeds 1e14.
pub fn inverse(m: &CMat) -> Result<CMat> {
    let c = condition_number(m)?;
    if !(c < 1e14) {
        return Err(Error::Singular(format!("condition number {c:.3e}")));
    }
    Ok(m.partial_piv_lu().inverse())
}

/// Solves m·x = b.
pub fn solve(m: &CMat, b: &CMat) -> CMat {
    m.partial_piv_lu().solve(b)
}

/// Singular values in nonincreasing order.
pub fn singular_values(m: &CMat) -> Result<Vec<f64>> {
    m.singular_values().map_err(|e| Error::Decomposition(format!("svd: {e:?}")))
}

/// 2-norm condition number σ_max/σ_min.
pub fn condition_number(m: &CMat) -> Result<f64> {
    let s = singular_values(m)?;
    let (mx, mn) = (s.first().copied().unwrap_or(0.0), s.last().copied().unwrap_or(0.0));
    Ok(if mn == 0.0 { f64::INFINITY } else { mx / mn })
}

/// Number of singular values above `tol · σ_max`.
pub fn numerical_rank(m: &CMat, tol: f64) -> Result<usize> {
    let s = singular_values(m)?;
    let mx = s.first().copied().unwrap_or(0.0);
    Ok(s.iter().filter(|&&x| x > tol * mx).count())
}

/// Orthonormal (unitary sense) basis of the column space of `m`, rank by `tol`.
pub fn column_space(m: &CMat, tol: f64) -> Result<CMat> {
    let svd = m.thin_svd().map_err(|e| Error::Decomposition(format!("svd: {e:?}")))?;
    let s = svd.S().column_vector();
    let mx = if s.nrows() > 0 { s[0].re } else { 0.0 };
    let r = (0..s.nrows()).filter(|&k| s[k].re > tol * mx).count();
    Ok(svd.U().subcols(0, r).to_owned())
}

/// Largest principal angle between the column spaces of `a` and `b`.
///
/// Computed as arcsin of the largest singular value of (I − QₐQₐᴴ)Q_b, which
/// stays accurate for tiny angles. Returns `None` when the subspace
/// dimensions differ.
pub fn max_principal_angle(a: &CMat, b: &CMat, tol: f64) -> Result<Option<f64>> {
    let qa = column_space(a, tol)?;
    let qb = column_space(b, tol)?;
    if qa.ncols() != qb.ncols() {
        return Ok(None);
    }
    let proj = &qa * (qa.adjoint() * &qb);
    let resid = &qb - &proj;
    let s = singular_values(&resid)?;
    Ok(Some(s.first().copied().unwrap_or(0.0).min(1.0).asin()))
}

/// Kronecker product of plain matrices (left factor slowest).
pub fn kron_mat(a: &CMat, b: &CMat) -> CMat {
    let (ra, ca, rb, cb) = (a.nrows(), a.ncols(), b.nrows(), b.ncols());
    CMat::from_fn(ra * rb, ca * cb, |i, j| a[(i / rb, j / cb)] * b[(i % rb, j % cb)])
}

/// Kronecker product; the layout is the concatenation of both layouts.
pub fn kron(a: &LabeledOperator, b: &LabeledOperator) -> LabeledOperator {
    LabeledOperator { matrix: kron_mat(&a.matrix, &b.matrix), layout: a.layout.concat(&b.layout) }
}

/// Precomputed index maps for applying a local operator inside a larger layout.
struct LocalAction {
    /// For each global index: (global index with the named slots zeroed, local index).
    split: Vec<(usize, usize)>,
    /// Global offset of each local index.
    offset: Vec<usize>,
}

impl LocalAction {
    fn new(op_dims: &[usize], slots: &[usize], target: &SpaceLayout) -> Result<Self> {
        if op_dims.len() != slots.len() {
            return Err(Error::DimensionMismatch(format!(
                "operator has {} legs but {} slots were named",
                op_dims.len(),
                slots.len()
            )));
        }
        for (k, &s) in slots.iter().enumerate() {
            target.check_slot(s)?;
            if slots[..k].contains(&s) {
                return Err(Error::DuplicateSlot(s));
            }
            if target.dims[s] != op_dims[k] {
                return Err(Error::DimensionMismatch(format!(
                    "slot {s} has dimension {} but the operator leg has {}",
                    target.dims[s], op_dims[k]
                )));
            }
        }
        let strides = target.strides();
        let op_layout = SpaceLayout::new(op_dims);
        let op_strides = op_layout.strides();
        let dloc = op_layout.total();
        let offset: Vec<usize> = (0..dloc)
            .map(|l| slots.iter().enumerate().map(|(k, &s)| (l / op_strides[k]) % op_dims[k] * strides[s]).sum())
            .collect();
        let split = (0..target.total())
            .map(|g| {
                let mut base = g;
                let mut loc = 0;
                for (k, &s) in slots.iter().enumerate() {
                    let digit = (g / strides[s]) % target.dims[s];
                    base -= digit * strides[s];
                    loc += digit * op_strides[k];
                }
                (base, loc)
            })
            .collect();
        Ok(Self { split, offset })
    }
}

fn sparse_rows(op: &CMat) -> Vec<Vec<(usize, C64)>> {
    (0..op.nrows())
        .map(|i| (0..op.ncols()).filter(|&j| op[(i, j)] != ZERO).map(|j| (j, op[(i, j)])).collect())
        .collect()
}

/// embed(op, slots)·m without forming the embedded matrix.
pub fn apply_left(op: &LabeledOperator, slots: &[usize], target: &SpaceLayout, m: &CMat) -> Result<CMat> {
    let act = LocalAction::new(op.dims(), slots, target)?;
    if m.nrows() != target.total() {
        return Err(Error::DimensionMismatch("apply_left: row count".into()));
    }
    let rows = sparse_rows(&op.matrix);
    let mut out = CMat::zeros(m.nrows(), m.ncols());
    for c in 0..m.ncols() {
        let src = m.col_as_slice(c);
        let dst = out.col_as_slice_mut(c);
        for (g, &(base, loc)) in act.split.iter().enumerate() {
            let mut acc = ZERO;
            for &(j, v) in &rows[loc] {
                acc += v * src[base + act.offset[j]];
            }
            dst[g] = acc;
        }
    }
    Ok(out)
}

/// m·embed(op, slots) without forming the embedded matrix.
pub fn apply_right(op: &LabeledOperator, slots: &[usize], target: &SpaceLayout, m: &CMat) -> Result<CMat> {
    let opt = op.transpose();
    Ok(transpose(&apply_left(&opt, slots, target, &transpose(m))?))
}

/// The operator acting as `op` on the named slots and as identity elsewhere.
///
/// Slots may be non-adjacent and in any order; slot k of `slots` receives
/// leg k of `op`.
pub fn embed(op: &LabeledOperator, slots: &[usize], target: &SpaceLayout) -> Result<LabeledOperator> {
    let matrix = apply_left(op, slots, target, &identity(target.total()))?;
    Ok(LabeledOperator { matrix, layout: target.clone() })
}

/// Transposes the indices of one leg only.
pub fn partial_transpose(m: &LabeledOperator, slot: usize) -> Result<LabeledOperator> {
    m.layout.check_slot(slot)?;
    let st = m.layout.strides()[slot];
    let d = m.layout.dims[slot];
    let n = m.layout.total();
    let src = &m.matrix;
    let out = CMat::from_fn(n, n, |i, j| {
        let (di, dj) = ((i / st) % d, (j / st) % d);
        let i2 = i - di * st + dj * st;
        let j2 = j - dj * st + di * st;
        src[(i2, j2)]
    });
    Ok(LabeledOperator { matrix: out, layout: m.layout.clone() })
}

/// Contracts one leg.
pub fn partial_trace(m: &LabeledOperator, slot: usize) -> Result<LabeledOperator> {
    m.layout.check_slot(slot)?;
    let layout = m.layout.without(slot);
    let st = m.layout.strides()[slot];
    let d = m.layout.dims[slot];
    let n = layout.total();
    let lift = |r: usize| (r / st) * st * d + r % st;
    let out = CMat::from_fn(n, n, |i, j| {
        let (bi, bj) = (lift(i), lift(j));
        (0..d).map(|k| m.matrix[(bi + k * st, bj + k * st)]).sum()
    });
    Ok(LabeledOperator { matrix: out, layout })
}

/// Partial trace over slot 0 of a plain matrix whose slot 0 has dimension `d0`.
pub fn trace_first_leg(m: &CMat, d0: usize) -> CMat {
    let n = m.nrows() / d0;
    CMat::from_fn(n, n, |i, j| (0..d0).map(|k| m[(k * n + i, k * n + j)]).sum())
}

/// Operator exchanging legs i and j (of equal dimension).
pub fn permutation_op(layout: &SpaceLayout, i: usize, j: usize) -> Result<LabeledOperator> {
    layout.check_slot(i)?;
    layout.check_slot(j)?;
    if i == j {
        return Err(Error::DimensionMismatch("permutation of a leg with itself".into()));
    }
    if layout.dims[i] != layout.dims[j] {
        return Err(Error::DimensionMismatch(format!(
            "legs {i} and {j} have dimensions {} and {}",
            layout.dims[i], layout.dims[j]
        )));
    }
    let st = layout.strides();
    let d = layout.dims[i];
    let n = layout.total();
    let mut m = CMat::zeros(n, n);
    for g in 0..n {
        let (a, b) = ((g / st[i]) % d, (g / st[j]) % d);
        let h = g - a * st[i] - b * st[j] + b * st[i] + a * st[j];
        m[(h, g)] = ONE;
    }
    Ok(LabeledOperator { matrix: m, layout: layout.clone() })
}

/// Swap 𝒫 : V_a ⊗ V_b → V_b ⊗ V_a, mapping |i j⟩ to |j i⟩.
pub fn swap(da: usize, db: usize) -> CMat {
    let mut m = CMat::zeros(da * db, da * db);
    for i in 0..da {
        for j in 0..db {
            m[(j * da + i, i * db + j)] = ONE;
        }
    }
    m
}

/// Bilinear pairing vᵀw (no conjugation).
pub fn bilinear(v: &[C64], w: &[C64]) -> C64 {
    v.iter().zip(w).map(|(a, b)| a * b).sum()
}

/// Rank-r projector built from a basis with the bilinear pairing.
#[derive(Clone, Debug)]
pub struct Projector {
    /// Basis vectors, each normalized so that vᵀv = 1.
    pub basis: Vec<Vec<C64>>,
    /// Σᵢ vᵢvᵢᵀ.
    pub matrix: CMat,
    /// Declared rank (number of basis vectors).
    pub rank: usize,
}

impl Projector {
    /// Normalizes each vector by its bilinear norm (principal square root) and
    /// assembles the projector.
    pub fn from_basis(vectors: Vec<Vec<C64>>) -> Result<Self> {
        let basis: Vec<Vec<C64>> = vectors
            .into_iter()
            .map(|v| {
                let n2 = bilinear(&v, &v);
                if n2.norm() == 0.0 {
                    return Err(Error::ZeroDivisor("basis vector with zero bilinear norm".into()));
                }
                let n = n2.sqrt();
                Ok(v.iter().map(|z| z / n).collect())
            })
            .collect::<Result<_>>()?;
        let rank = basis.len();
        let dim = basis.first().map_or(0, |v| v.len());
        let iso = CMat::from_fn(dim, rank, |i, k| basis[k][i]);
        let matrix = &iso * transpose(&iso);
        Ok(Self { basis, matrix, rank })
    }

    /// Isometry whose columns are the basis vectors (Uᵀ U = I).
    pub fn isometry(&self) -> CMat {
        let dim = self.basis.first().map_or(0, |v| v.len());
        CMat::from_fn(dim, self.rank, |i, k| self.basis[k][i])
    }

    /// ‖P² − P‖ / ‖P‖.
    pub fn idempotency_residual(&self) -> f64 {
        rel_residual(&(&self.matrix * &self.matrix), &self.matrix)
    }
}

/// Common eigenbasis of a commuting family.
#[derive(Clone, Debug)]
pub struct CommonEigenbasis {
    /// Columns are the common eigenvectors.
    pub basis: CMat,
    /// Inverse of `basis`.
    pub inverse: CMat,
    /// `eigenvalues[m][i]`: eigenvalue of family member m on column i.
    pub eigenvalues: Vec<Vec<C64>>,
    /// Condition number of `basis`.
    pub condition: f64,
    /// Largest reconstruction residual over the family.
    pub reconstruction: f64,
}

/// Largest relative commutator ‖\[A,B\]‖/(‖A‖‖B‖) over all pairs.
pub fn max_commutator(family: &[&CMat]) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, a) in family.iter().enumerate() {
        for b in &family[i + 1..] {
            let c = frob(&(&(*a * *b) - &(*b * *a)));
            worst = worst.max(c / (frob(a) * frob(b)).max(RESIDUAL_FLOOR));
        }
    }
    worst
}

/// Diagonalizes a commuting family simultaneously.
///
/// A random complex combination of all members is diagonalized first, which
/// resolves degeneracies of individual members; up to five combinations are
/// tried. Eigenvalues are read off as diagonals of B⁻¹MB.
pub fn simultaneous_eigenbasis(family: &[&CMat], tol: f64, seed: u64) -> Result<CommonEigenbasis> {
    let comm = max_commutator(family);
    if comm > tol {
        return Err(Error::NotCommuting(comm));
    }
    let n = family.first().map_or(0, |m| m.nrows());
    let mut rng: WorkbenchRng = rng_from_seed(seed);
    let mut last_err = Error::IllConditionedBasis(f64::INFINITY);
    for _attempt in 0..5 {
        let mut combo = CMat::zeros(n, n);
        for m in family {
            let w = C64::new(rng.random_range(0.5..1.5), rng.random_range(-1.0..1.0));
            let s = frob(m).max(RESIDUAL_FLOOR);
            combo = &combo + &scale(m, w / s);
        }
        let evd = match combo.eigen() {
            Ok(e) => e,
            Err(e) => {
                last_err = Error::Decomposition(format!("eigen: {e:?}"));
                continue;
            }
        };
        let basis = evd.U().to_owned();
        let condition = condition_number(&basis)?;
        if !(condition <= MAX_BASIS_CONDITION) {
            last_err = Error::IllConditionedBasis(condition);
            continue;
        }
        let inv = basis.partial_piv_lu().inverse();
        let mut eigenvalues = Vec::with_capacity(family.len());
        let mut reconstruction: f64 = 0.0;
        for m in family {
            let d = &inv * (*m * &basis);
            let ev: Vec<C64> = (0..n).map(|i| d[(i, i)]).collect();
            let rec = &basis * (diag(&ev) * &inv);
            reconstruction = reconstruction.max(rel_distance(m, &rec));
            eigenvalues.push(ev);
        }
        if reconstruction <= 100.0 * tol {
            return Ok(CommonEigenbasis { basis, inverse: inv, eigenvalues, condition, reconstruction });
        }
        last_err = Error::IllConditionedBasis(condition);
    }
    Err(last_err)
}
