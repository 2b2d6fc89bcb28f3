//! Inhomogeneous T-Q relations, Bethe equations and their multi-start solver.
//!
//! Q-functions depend on a root μ only through cosh μ:
//! sinh½(u−μ−s)·sinh½(u+μ−s) = ½(cosh(u−s) − cosh μ). The solver therefore
//! works in the variables y = cosh μ, which removes the μ → −μ and
//! μ → μ + 2πi redundancy from the search space.

use crate::la::{self, CMat};
use crate::local_ops::{BoundaryWeights, ScalarWeights};
use crate::params::{self, ModelParams, ValidatedParams, WorkbenchRng};
use crate::{Error, Result, C64};
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Smallest admissible modulus of a denominator in the T-Q relations.
pub const POLE_DISTANCE: f64 = 1e-8;
/// Smallest admissible distance between two roots of one level (up to μ → −μ).
pub const COINCIDENCE_DISTANCE: f64 = 1e-6;
/// Acceptance threshold on the polynomial-cleared Bethe residuals.
pub const BAE_TOLERANCE: f64 = 1e-9;
/// Iteration cap of the damped Newton solver.
pub const MAX_NEWTON_ITERATIONS: usize = 200;
/// Distance (in y = cosh μ) below which two solutions are the same state.
pub const DEDUP_DISTANCE: f64 = 1e-6;

const DEFLATED_ACCEPT: f64 = 1e-6;
const POLISH_ITERATIONS: usize = 20;
const FD_STEP: f64 = 1e-7;
/// Spread of the random starting points in y = cosh μ.
const START_SCALE: f64 = 2.5;
const START_IMAG_SCALE: f64 = 0.1;
/// Initial guesses drawn by one start until a physical solution is reached.
pub const ATTEMPTS_PER_START: usize = 4;
/// Scale of the |y| growth penalty in the deflation factor.
const GROWTH_SCALE: f64 = 30.0;
/// Distances below which a converged root configuration is treated as spurious.
const SPURIOUS_SHIFT: f64 = 1e-3;
const SPURIOUS_PAIR: f64 = 1e-4;

/// One Bethe root configuration with its quantum numbers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetheState {
    /// First-level roots μ⁽¹⁾ (L₁ of them).
    #[serde(with = "params::complex_pair::vec")]
    pub mu1: Vec<C64>,
    /// Second-level roots μ⁽²⁾ (L₂ = m₁).
    #[serde(with = "params::complex_pair::vec")]
    pub mu2: Vec<C64>,
    /// Third-level roots μ⁽³⁾ (L₃ = m₂).
    #[serde(with = "params::complex_pair::vec")]
    pub mu3: Vec<C64>,
    /// Inhomogeneous coefficient x, fixed by L₁ and the boundary parameters.
    #[serde(with = "params::complex_pair")]
    pub x: C64,
    /// Quantum number m₁ = L₂.
    pub m1: usize,
    /// Quantum number m₂ = L₃.
    pub m2: usize,
}

impl BetheState {
    /// State from root lists; checks the counting rule and computes x.
    pub fn new(mu1: Vec<C64>, mu2: Vec<C64>, mu3: Vec<C64>, params: &ModelParams) -> Result<Self> {
        check_counting(mu1.len(), mu2.len(), mu3.len(), params.n_sites)?;
        let x = TqModel::new(params).x(mu1.len());
        let (m1, m2) = (mu2.len(), mu3.len());
        Ok(Self { mu1, mu2, mu3, x, m1, m2 })
    }

    /// Root counts (L₁, L₂, L₃).
    pub fn counts(&self) -> [usize; 3] {
        [self.mu1.len(), self.mu2.len(), self.mu3.len()]
    }
}

/// Checks L₁ = L₂ + L₃ + N, L₁ ≤ 2N and m₁ + m₂ ≤ N.
pub fn check_counting(l1: usize, l2: usize, l3: usize, n: usize) -> Result<()> {
    if l1 != l2 + l3 + n {
        return Err(Error::CountingRule(format!("L1 = {l1} but L2 + L3 + N = {}", l2 + l3 + n)));
    }
    if l1 > 2 * n || l2 + l3 > n {
        return Err(Error::CountingRule(format!(
            "(L1, L2, L3) = ({l1}, {l2}, {l3}) outside the admissible range for N = {n}"
        )));
    }
    Ok(())
}

fn sh(z: C64) -> C64 {
    z.sinh()
}

fn ex(z: C64) -> C64 {
    z.exp()
}

fn guard(what: &str, z: C64) -> Result<C64> {
    if z.norm() < POLE_DISTANCE {
        return Err(Error::NearPole(format!("{what} = {:.3e}", z.norm())));
    }
    Ok(z)
}

/// Scalar ingredients of the T-Q relations for one parameter set.
pub(crate) struct TqModel {
    eta: C64,
    theta: Vec<C64>,
    w: ScalarWeights,
    left: BoundaryWeights,
    right: BoundaryWeights,
}

impl TqModel {
    pub(crate) fn new(p: &ModelParams) -> Self {
        Self {
            eta: p.eta,
            theta: p.theta.clone(),
            w: ScalarWeights::new(p.eta),
            left: BoundaryWeights::new(p.eta, p.left),
            right: BoundaryWeights::new(p.eta, p.right),
        }
    }

    fn e(&self, k: f64) -> C64 {
        self.eta * k
    }

    /// x(L₁) for the current boundary pair; tilde parameters are the primed (right) ones.
    pub(crate) fn x(&self, l1: usize) -> C64 {
        let l = self.left.bp;
        let r = self.right.bp;
        let eta = self.eta;
        let s = 2.0 * (l1 as f64 + 1.0) * eta;
        -ex(4.0 * eta) * (l.c1 * r.c3 * ex(-2.0 * eta) + r.c1 * l.c3 * ex(2.0 * eta))
            + l.c * (r.c + ex(-r.c2)) * ex(4.0 * eta + s)
            + r.c * (l.c + ex(-l.c2)) * ex(4.0 * eta - s)
    }

    fn h1(&self, u: C64) -> C64 {
        self.left.h1(u)
    }

    fn h2(&self, u: C64) -> C64 {
        self.left.h2(u)
    }

    fn th1(&self, u: C64) -> C64 {
        self.right.h1_tilde(u)
    }

    fn th2(&self, u: C64) -> C64 {
        self.right.h2_tilde(u)
    }

    /// Π_k ½(cosh(u − shift) − y_k): the Q-function with roots y = cosh μ.
    fn q(&self, shift: f64, ys: &[C64], u: C64) -> C64 {
        let c = (u - self.e(shift)).cosh();
        ys.iter().map(|&y| 0.5 * (c - y)).product()
    }

    fn q1(&self, ys: &[C64], u: C64) -> C64 {
        self.q(2.0, ys, u)
    }

    fn qn(&self, ys: &[C64], u: C64) -> C64 {
        self.q(4.0, ys, u)
    }

    fn site_product(&self, f: impl Fn(C64) -> C64, u: C64) -> C64 {
        self.theta.iter().map(|&t| f(u - t) * f(u + t)).product()
    }

    /// Eigenvalue of t(u) from the inhomogeneous T-Q relation.
    pub(crate) fn lambda(&self, u: C64, s: &RootsY) -> Result<C64> {
        let e = |k: f64| self.e(k);
        let (y1, y2, y3) = (&s.y1, &s.y2, &s.y3);
        let x = self.x(y1.len());
        let s2 = guard("sinh(u−2η)", sh(u - e(2.0)))?;
        let s4 = guard("sinh(u−4η)", sh(u - e(4.0)))?;
        let s6 = guard("sinh(u−6η)", sh(u - e(6.0)))?;
        let q1u = guard("Q1(u)", self.q1(y1, u))?;
        let q1m4 = guard("Q1(u−4η)", self.q1(y1, u - e(4.0)))?;
        let q2u = guard("Q2(u)", self.qn(y2, u))?;
        let q3u = guard("Q3(u)", self.qn(y3, u))?;
        let (s0, s8) = (sh(u), sh(u - e(8.0)));
        let a = self.site_product(|v| self.w.a(v), u);
        let c = self.site_product(|v| self.w.e(v), u);
        let b = s0 * s8 / (s4 * s4) * self.site_product(|v| self.w.b(v), u);
        let f = s0 * s8 / s4 * self.site_product(|v| self.w.a(v) * sh(v / 2.0), u);
        let q1 = |v: C64| self.q1(y1, v);
        let q2 = |v: C64| self.qn(y2, v);
        let q3 = |v: C64| self.qn(y3, v);
        let (p4, m4) = (u + e(4.0), u - e(4.0));
        let z1 = s6 * s8 / (s2 * s4) * a * self.h2(u + e(2.0)) * self.th1(u - e(2.0)) * q1(p4) / q1u;
        let z2 =
            s6 / s2 * b * self.h1(u - e(6.0)) * self.th2(u - e(2.0)) * q1(m4) * q2(p4) * q3(p4) / (q1u * q2u * q3u);
        let z3 = b * self.h2(u - e(2.0)) * self.th1(u - e(6.0)) * q2(p4) * q3(m4) / (q2u * q3u);
        let z4 = b * self.h1(u - e(6.0)) * self.th2(u - e(2.0)) * q2(m4) * q3(p4) / (q2u * q3u);
        let z5 = s2 / s6 * b * self.h2(u - e(2.0)) * self.th1(u - e(6.0)) * q1u * q2(m4) * q3(m4) / (q1m4 * q2u * q3u);
        let z6 = s0 * s2 / (s4 * s6) * c * self.h1(u - e(10.0)) * self.th2(u - e(6.0)) * q1(u - e(8.0)) / q1m4;
        let f1 = x * s6 * q2(p4) * q3(p4) / q1u * f;
        let f2 = x * s2 * q2(m4) * q3(m4) / q1m4 * f;
        Ok(z1 + z2 + z3 + z4 + z5 + z6 + f1 + f2)
    }

    /// Eigenvalue of t₊(u) from the inhomogeneous T-Q relation.
    pub(crate) fn lambda_plus(&self, u: C64, s: &RootsY) -> Result<C64> {
        let e = |k: f64| self.e(k);
        let (y1, y2, y3) = (&s.y1, &s.y2, &s.y3);
        let x = self.x(y1.len());
        let s2 = guard("sinh(u−2η)", sh(u - e(2.0)))?;
        let s4 = guard("sinh(u−4η)", sh(u - e(4.0)))?;
        let s6 = guard("sinh(u−6η)", sh(u - e(6.0)))?;
        let q2p2 = guard("Q2(u+2η)", self.qn(y2, u + e(2.0)))?;
        let q1m2 = guard("Q1(u−2η)", self.q1(y1, u - e(2.0)))?;
        let q3m2 = guard("Q3(u−2η)", self.qn(y3, u - e(2.0)))?;
        let (s0, s8) = (sh(u), sh(u - e(8.0)));
        let a1 = self.site_product(|v| self.w.a1(v), u);
        let b1 = self.site_product(|v| sh((v - e(2.0)) / 2.0), u);
        let q1 = |v: C64| self.q1(y1, v);
        let q2 = |v: C64| self.qn(y2, v);
        let q3 = |v: C64| self.qn(y3, v);
        let first = a1 * self.h2(u) * self.th1(u - e(4.0)) * s8 / s2
            * (q2(u + e(6.0)) / q2p2 + s0 / s4 * q1(u + e(2.0)) * q2(u - e(2.0)) / (q1m2 * q2p2));
        let second = b1 * s0 / s6
            * (self.h2(u - e(4.0)) * self.th1(u - e(8.0)) * q3(u - e(6.0)) / q3m2
                + s8 / s4 * self.h1(u - e(8.0)) * self.th2(u - e(4.0)) * q1(u - e(6.0)) * q3(u + e(2.0))
                    / (q1m2 * q3m2));
        let third = x * s0 * s8 * a1 * b1 * q2(u - e(2.0)) * q3(u + e(2.0)) / q1m2;
        Ok(first + second + third)
    }

    /// Polynomial-cleared Bethe residuals, one per root (levels in order).
    pub(crate) fn cleared(&self, mu: &Roots, ys: &RootsY) -> Vec<C64> {
        let e = |k: f64| self.e(k);
        let (y1, y2, y3) = (&ys.y1, &ys.y2, &ys.y3);
        let x = self.x(y1.len());
        let q1 = |v: C64| self.q1(y1, v);
        let q2 = |v: C64| self.qn(y2, v);
        let q3 = |v: C64| self.qn(y3, v);
        let half = |v: C64| self.theta.iter().map(|&t| sh((v - t) / 2.0) * sh((v + t) / 2.0)).product::<C64>();
        let mut out = Vec::with_capacity(y1.len() + y2.len() + y3.len());
        for &m in &mu.mu1 {
            let t1 = sh(m - e(2.0)) * self.h2(m + e(4.0)) * self.th1(m) / half(m + e(2.0)) * q1(m + e(6.0))
                / (q2(m + e(6.0)) * q3(m + e(6.0)));
            let t2 = sh(m + e(2.0)) * self.h1(m - e(4.0)) * self.th2(m) / half(m - e(2.0)) * q1(m - e(2.0))
                / (q2(m + e(2.0)) * q3(m + e(2.0)));
            out.push(t1 + t2 + x * sh(m) * sh(m + e(2.0)) * sh(m - e(2.0)));
        }
        for &m in &mu.mu2 {
            out.push(q1(m) * q2(m + e(8.0)) * sh(m - e(2.0)) + sh(m + e(2.0)) * q1(m + e(4.0)) * q2(m));
        }
        for &m in &mu.mu3 {
            out.push(
                q1(m) * q3(m + e(8.0)) * sh(m - e(2.0)) * self.h1(m - e(2.0)) * self.th2(m + e(2.0))
                    + sh(m + e(2.0)) * self.h2(m + e(2.0)) * self.th1(m - e(2.0)) * q1(m + e(4.0)) * q3(m),
            );
        }
        out
    }

    /// Bethe residuals divided by the right-hand side of each equation (ratio form).
    fn ratio(&self, mu: &Roots, ys: &RootsY) -> Vec<C64> {
        let e = |k: f64| self.e(k);
        let mut r = self.cleared(mu, ys);
        let mut k = 0;
        for &m in &mu.mu1 {
            r[k] /= sh(m) * sh(m + e(2.0)) * sh(m - e(2.0));
            k += 1;
        }
        for &m in &mu.mu2 {
            r[k] /= sh(m + e(2.0)) * self.q1(&ys.y1, m + e(4.0)) * self.qn(&ys.y2, m);
            k += 1;
        }
        for &m in &mu.mu3 {
            r[k] /= sh(m + e(2.0))
                * self.h2(m + e(2.0))
                * self.th1(m - e(2.0))
                * self.q1(&ys.y1, m + e(4.0))
                * self.qn(&ys.y3, m);
            k += 1;
        }
        r
    }

    /// Whether a configuration sits on a known spurious solution: a root at a
    /// zero of sinh(μ − s) for s ∈ {0, ±2η, ±4η}, or two roots of a group
    /// coinciding up to μ → −μ.
    fn spurious(&self, roots: &[C64]) -> bool {
        let shifts = [0.0, 2.0, -2.0, 4.0, -4.0];
        roots.iter().enumerate().any(|(i, &z)| {
            shifts.iter().any(|&s| sh(z - self.e(s)).norm() < SPURIOUS_SHIFT)
                || roots[i + 1..]
                    .iter()
                    .any(|&w| sh((z - w) / 2.0).norm() < SPURIOUS_PAIR || sh((z + w) / 2.0).norm() < SPURIOUS_PAIR)
        })
    }
}

/// Roots as μ values, split by level.
pub(crate) struct Roots {
    mu1: Vec<C64>,
    mu2: Vec<C64>,
    mu3: Vec<C64>,
}

/// Roots as y = cosh μ values, split by level.
pub(crate) struct RootsY {
    y1: Vec<C64>,
    y2: Vec<C64>,
    y3: Vec<C64>,
}

impl RootsY {
    pub(crate) fn of(s: &BetheState) -> Self {
        let c = |v: &[C64]| v.iter().map(|m| m.cosh()).collect();
        Self { y1: c(&s.mu1), y2: c(&s.mu2), y3: c(&s.mu3) }
    }
}

fn split(y: &[C64], l: [usize; 3]) -> (Roots, RootsY) {
    let (a, b) = (l[0], l[0] + l[1]);
    let mu = |v: &[C64]| v.iter().map(|z| z.acosh()).collect::<Vec<_>>();
    (
        Roots { mu1: mu(&y[..a]), mu2: mu(&y[a..b]), mu3: mu(&y[b..]) },
        RootsY { y1: y[..a].to_vec(), y2: y[a..b].to_vec(), y3: y[b..].to_vec() },
    )
}

fn check_distinct(level: &str, roots: &[C64]) -> Result<()> {
    for (i, &a) in roots.iter().enumerate() {
        for &b in &roots[i + 1..] {
            let d = (a - b).norm().min((a + b).norm());
            if d < COINCIDENCE_DISTANCE {
                return Err(Error::CoincidentRoots(format!("{level}: {a} and {b} (distance {d:.3e})")));
            }
        }
    }
    Ok(())
}

/// Eigenvalue Λ(u) of t(u) given by the inhomogeneous T-Q relation.
pub fn tq_lambda(u: C64, state: &BetheState, params: &ModelParams) -> Result<C64> {
    TqModel::new(params).lambda(u, &RootsY::of(state))
}

/// Eigenvalue Λ₊(u) of t₊(u) given by the inhomogeneous T-Q relation.
pub fn tq_lambda_plus(u: C64, state: &BetheState, params: &ModelParams) -> Result<C64> {
    TqModel::new(params).lambda_plus(u, &RootsY::of(state))
}

/// Polynomial-cleared Bethe residuals (μ⁽¹⁾ equations, then μ⁽²⁾, then μ⁽³⁾).
pub fn bae_residuals(state: &BetheState, params: &ModelParams) -> Result<Vec<C64>> {
    check_distinct("mu1", &state.mu1)?;
    check_distinct("mu2", &state.mu2)?;
    check_distinct("mu3", &state.mu3)?;
    let roots = Roots { mu1: state.mu1.clone(), mu2: state.mu2.clone(), mu3: state.mu3.clone() };
    Ok(TqModel::new(params).cleared(&roots, &RootsY::of(state)))
}

/// Largest modulus of the cleared Bethe residuals.
pub fn max_bae_residual(state: &BetheState, params: &ModelParams) -> Result<f64> {
    Ok(bae_residuals(state, params)?.iter().map(|z| z.norm()).fold(0.0, f64::max))
}

/// Outcome of a multi-start solve in one (L₁, L₂, L₃) sector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BaeSolveReport {
    /// Root counts (L₁, L₂, L₃).
    pub sector: [usize; 3],
    /// Number of random starts.
    pub n_starts: usize,
    /// Newton runs (over all attempts) that met the cleared-residual threshold.
    pub converged: usize,
    /// Converged runs discarded as spurious (roots on singular points or coincident).
    pub spurious: usize,
    /// Distinct physical states, in canonical order.
    pub states: Vec<BetheState>,
    /// Notes (e.g. why nothing converged).
    pub diagnostics: Vec<String>,
}

/// Damped Newton iteration on `f` with a finite-difference Jacobian.
///
/// Steps are shortened by backtracking until the residual norm decreases
/// (Armijo condition on the squared norm). Returns the final point and its
/// residual norm (infinite when the evaluation failed).
fn newton(f: &dyn Fn(&[C64]) -> Option<Vec<C64>>, mut y: Vec<C64>, max_iter: usize, tol: f64) -> (Vec<C64>, f64) {
    let norm = |v: &[C64]| v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let eval = |y: &[C64]| f(y).map(|v| (norm(&v), v)).filter(|(n, _)| n.is_finite());
    let n = y.len();
    for _ in 0..max_iter {
        let Some((nf, fy)) = eval(&y) else { return (y, f64::INFINITY) };
        if nf < tol {
            return (y, nf);
        }
        let mut jac = CMat::zeros(n, n);
        for k in 0..n {
            let h = FD_STEP * y[k].norm().max(1.0);
            let (mut yp, mut ym) = (y.clone(), y.clone());
            yp[k] += h;
            ym[k] -= h;
            let (Some(fp), Some(fm)) = (f(&yp), f(&ym)) else { return (y, f64::INFINITY) };
            for i in 0..n {
                jac[(i, k)] = (fp[i] - fm[i]) / (2.0 * h);
            }
        }
        let rhs = CMat::from_fn(n, 1, |i, _| -fy[i]);
        let dy = la::solve(&jac, &rhs);
        if (0..n).any(|i| !dy[(i, 0)].is_finite()) {
            return (y, f64::INFINITY);
        }
        let mut t = 1.0;
        let mut next = y.clone();
        while t > 1e-4 {
            next = (0..n).map(|i| y[i] + dy[(i, 0)] * t).collect();
            if matches!(eval(&next), Some((nn, _)) if nn < (1.0 - 1e-4 * t) * nf) {
                break;
            }
            t /= 2.0;
        }
        y = next;
    }
    let r = eval(&y).map_or(f64::INFINITY, |(n, _)| n);
    (y, r)
}

/// Deflation factor pushing Newton away from coincident roots, from y = ±1
/// and (mildly) from |y| → ∞, where the ratio residuals flatten out.
fn deflation(y: &[C64], l: [usize; 3]) -> f64 {
    let mut d = 1.0;
    let mut start = 0;
    for len in l {
        for i in start..start + len {
            for j in i + 1..start + len {
                d *= 1.0 + 1.0 / (y[i] - y[j]).norm_sqr();
            }
        }
        start += len;
    }
    for &z in y {
        d *= (1.0 + 1.0 / (z - 1.0).norm_sqr()) * (1.0 + 1.0 / (z + 1.0).norm_sqr());
        d *= 1.0 + z.norm_sqr() / (GROWTH_SCALE * GROWTH_SCALE);
    }
    d
}

fn start_rng(seed: u64, l: [usize; 3], k: usize) -> WorkbenchRng {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(b"bae");
    for c in l {
        h.update((c as u64).to_le_bytes());
    }
    h.update((k as u64).to_le_bytes());
    let d = h.finalize();
    let mut b = [0u8; 8];
    b.copy_from_slice(&d[..8]);
    params::rng_from_seed(u64::from_le_bytes(b))
}

fn sort_key(v: &[C64]) -> Vec<(f64, f64)> {
    v.iter().map(|z| (z.re, z.im)).collect()
}

fn cmp_keys(a: &[(f64, f64)], b: &[(f64, f64)]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        let o = x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1));
        if o.is_ne() {
            return o;
        }
    }
    a.len().cmp(&b.len())
}

/// Canonical y-vector: each level sorted by (Re, Im).
fn canonical(y: &[C64], l: [usize; 3]) -> Vec<C64> {
    let mut out = Vec::with_capacity(y.len());
    let mut start = 0;
    for len in l {
        let mut level = y[start..start + len].to_vec();
        level.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        out.extend(level);
        start += len;
    }
    out
}

/// Solves the Bethe equations of one sector from `n_starts` random starts.
///
/// Each start draws up to [`ATTEMPTS_PER_START`] initial guesses from its own
/// random stream and stops at the first physical solution. Each guess runs damped Newton on the ratio form of the equations in the
/// variables y = cosh μ, deflated against coincident roots and y = ±1, then
/// polishes on the undeflated ratio form. A run is accepted when the cleared
/// residuals are below [`BAE_TOLERANCE`] and the roots avoid the spurious
/// configurations. Accepted runs are deduplicated (root sets equal up to
/// permutation and μ → −μ) and returned in canonical order. Starts are
/// seeded independently from the model seed, so the result does not depend
/// on execution order.
pub fn solve_bae(l1: usize, l2: usize, l3: usize, params: &ValidatedParams, n_starts: usize) -> Result<BaeSolveReport> {
    check_counting(l1, l2, l3, params.n_sites)?;
    let l = [l1, l2, l3];
    let model = TqModel::new(params);
    let n = l1 + l2 + l3;
    let ratio = |y: &[C64]| -> Option<Vec<C64>> {
        let (mu, ys) = split(y, l);
        let r = model.ratio(&mu, &ys);
        r.iter().all(|z| z.is_finite()).then_some(r)
    };
    let deflated = |y: &[C64]| -> Option<Vec<C64>> {
        let d = deflation(y, l);
        ratio(y).map(|r| r.into_iter().map(|z| z * d).collect())
    };
    let mut found: Vec<Vec<C64>> = Vec::new();
    let (mut converged, mut spurious) = (0, 0);
    for k in 0..n_starts {
        let mut rng = start_rng(params.rng_seed, l, k);
        for _ in 0..ATTEMPTS_PER_START {
            let y0: Vec<C64> = (0..n)
                .map(|_| {
                    let re: f64 = StandardNormal.sample(&mut rng);
                    let im: f64 = StandardNormal.sample(&mut rng);
                    C64::new(START_SCALE * re, START_IMAG_SCALE * im)
                })
                .collect();
            let (y, r) = newton(&deflated, y0, MAX_NEWTON_ITERATIONS, 1e-13);
            if !(r < DEFLATED_ACCEPT) {
                continue;
            }
            let (y, _) = newton(&ratio, y, POLISH_ITERATIONS, 1e-15);
            let (mu, ys) = split(&y, l);
            let cleared = model.cleared(&mu, &ys).iter().map(|z| z.norm()).fold(0.0, f64::max);
            if !(cleared < BAE_TOLERANCE) {
                continue;
            }
            converged += 1;
            let upper: Vec<C64> = mu.mu2.iter().chain(&mu.mu3).copied().collect();
            if model.spurious(&mu.mu1) || model.spurious(&upper) {
                spurious += 1;
                continue;
            }
            let y = canonical(&y, l);
            if !found.iter().any(|f| f.iter().zip(&y).all(|(a, b)| (a - b).norm() < DEDUP_DISTANCE)) {
                found.push(y);
            }
            break;
        }
    }
    found.sort_by(|a, b| cmp_keys(&sort_key(a), &sort_key(b)));
    let mut diagnostics = Vec::new();
    if found.is_empty() {
        diagnostics
            .push(format!("no physical solution from {n_starts} starts ({converged} converged, {spurious} spurious)"));
    }
    let states = found
        .iter()
        .map(|y| {
            let (mu, _) = split(y, l);
            BetheState::new(mu.mu1, mu.mu2, mu.mu3, params)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BaeSolveReport { sector: l, n_starts, converged, spurious, states, diagnostics })
}

/// Follows a solved state along a straight path of inhomogeneities to `target`.
///
/// Every other parameter is taken from `target`. At each step the roots are
/// re-converged with undeflated Newton on the ratio form; the step is halved
/// (down to 1/1024 of the path) whenever Newton fails. The final state must
/// have distinct roots and satisfy the cleared equations to
/// [`BAE_TOLERANCE`]. A state whose roots run into a singular configuration
/// on the way (e.g. two roots coalescing) has no regular counterpart at
/// `target` and is reported as an error.
pub fn continue_state(state: &BetheState, from: &ModelParams, target: &ModelParams) -> Result<BetheState> {
    if from.theta.len() != target.theta.len() {
        return Err(Error::Config("continuation needs chains of equal length".into()));
    }
    let l = state.counts();
    let mut y: Vec<C64> = state.mu1.iter().chain(&state.mu2).chain(&state.mu3).map(|m| m.cosh()).collect();
    let at = |s: f64| -> ModelParams {
        let theta = from.theta.iter().zip(&target.theta).map(|(a, b)| a + (b - a) * s).collect();
        ModelParams { theta, ..target.clone() }
    };
    let solve_at = |p: &ModelParams, y0: Vec<C64>| -> Option<Vec<C64>> {
        let model = TqModel::new(p);
        let ratio = |y: &[C64]| -> Option<Vec<C64>> {
            let (mu, ys) = split(y, l);
            let r = model.ratio(&mu, &ys);
            r.iter().all(|z| z.is_finite()).then_some(r)
        };
        let (y, r) = newton(&ratio, y0, 50, 1e-14);
        (r < 1e-10).then_some(y)
    };
    let (mut s, mut ds) = (0.0_f64, 0.1_f64);
    while s < 1.0 {
        let next = (s + ds).min(1.0);
        match solve_at(&at(next), y.clone()) {
            Some(z) => {
                y = z;
                s = next;
                ds = (ds * 1.5).min(0.1);
            }
            None if ds > 1.0 / 1024.0 => ds /= 2.0,
            None => return Err(Error::Decomposition(format!("root continuation stalled at s = {s:.4}"))),
        }
    }
    let (mu, _) = split(&canonical(&y, l), l);
    let out = BetheState::new(mu.mu1, mu.mu2, mu.mu3, target)?;
    let r = max_bae_residual(&out, target)?;
    if !(r < BAE_TOLERANCE) {
        return Err(Error::Decomposition(format!("continued state has Bethe residual {r:.3e}")));
    }
    Ok(out)
}

/// Largest relative residue of Λ and Λ₊ at the zeros of their Q-denominators.
///
/// For each denominator zero u₀ the residue is estimated by the trapezoid rule
/// on a circle of radius `radius` (64 nodes) and divided by radius·max|Λ| on
/// the circle; a genuine simple pole gives a value of order one.
pub fn residue_check(state: &BetheState, params: &ModelParams, radius: f64) -> Result<f64> {
    let model = TqModel::new(params);
    let ys = RootsY::of(state);
    let eta = params.eta;
    let mut centers: Vec<(C64, bool)> = Vec::new();
    for &m in &state.mu1 {
        for s in [1.0, -1.0] {
            centers.push((2.0 * eta + m * s, false));
            centers.push((6.0 * eta + m * s, false));
            centers.push((4.0 * eta + m * s, true));
        }
    }
    for &m in &state.mu2 {
        for s in [1.0, -1.0] {
            centers.push((4.0 * eta + m * s, false));
            centers.push((2.0 * eta + m * s, true));
        }
    }
    for &m in &state.mu3 {
        for s in [1.0, -1.0] {
            centers.push((4.0 * eta + m * s, false));
            centers.push((6.0 * eta + m * s, true));
        }
    }
    const NODES: usize = 64;
    let mut worst: f64 = 0.0;
    for (u0, plus) in centers {
        let mut sum = C64::new(0.0, 0.0);
        let mut peak: f64 = 0.0;
        for k in 0..NODES {
            let w = C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / NODES as f64);
            let u = u0 + w * radius;
            let v = if plus { model.lambda_plus(u, &ys)? } else { model.lambda(u, &ys)? };
            sum += v * w;
            peak = peak.max(v.norm());
        }
        let residue = sum * radius / NODES as f64;
        worst = worst.max(residue.norm() / (radius * peak).max(f64::MIN_POSITIVE));
    }
    Ok(worst)
}
