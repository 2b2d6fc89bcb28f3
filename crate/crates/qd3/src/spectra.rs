//! Spectral layer.
//!
//! The transfer matrices t(u) and t₊(u) commute for all u, so one eigenbasis
//! (built from a few anchor points) diagonalizes the whole family; eigenvalue
//! curves Λᵢ(u), Λ₊ᵢ(u) are read off by projecting t(u), t₊(u) onto it, and
//! state i always refers to the same common eigenvector. Λ₋ is never
//! diagonalized on its own: it is the projection of
//! t₋(u) = e^{−8η} 𝒲 t₊(−u+8η) 𝒲.
//!
//! On top of the family this module checks the eigenvalue functional
//! relations (crossing, quantum determinant, fusion relations, special-point
//! values, asymptotics), evaluates the inhomogeneous T-Q relations, solves
//! their Bethe equations ([`bethe`]) and extracts energies.

pub mod bethe;

pub use bethe::{
    bae_residuals, check_counting, continue_state, max_bae_residual, residue_check, solve_bae, tq_lambda,
    tq_lambda_plus, BaeSolveReport, BetheState,
};

use crate::chain::Chain;
use crate::la::{self, CMat, CommonEigenbasis, RESIDUAL_FLOOR};
use crate::local_ops::{LocalOps, Sign};
use crate::params::{self, ModelParams, ValidatedParams};
use crate::verify::{self, ResidualRecord};
use crate::{Error, Result, C64};
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

/// Largest chain handled by the spectral layer.
pub const MAX_SPECTRAL_SITES: usize = 3;
/// Default number of generic grid points (on a rectangle in the u-plane).
pub const DEFAULT_GRID_POINTS: usize = 24;
/// Default real part used for the asymptotic checks.
pub const DEFAULT_UMAX: f64 = 40.0;
/// Threshold on the relative error of an asymptotic growth exponent.
pub const EXPONENT_THRESHOLD: f64 = 1e-2;
/// Threshold on the relative error of an asymptotic leading constant.
pub const CONSTANT_THRESHOLD: f64 = 1e-4;
/// Base step of the energy finite differences.
pub const ENERGY_STEP: f64 = 0.02;

/// Anchor points at which t and t₊ seed the common eigenbasis.
const T_ANCHORS: [C64; 2] = [C64::new(0.31, 0.2), C64::new(-0.52, 0.13)];
const TPLUS_ANCHORS: [C64; 2] = [C64::new(-0.45, 0.1), C64::new(0.67, -0.21)];
/// Corners of the rectangle carrying the generic grid points.
const RECT_RE: (f64, f64) = (-0.77, 1.53);
const RECT_IM: (f64, f64) = (-0.37, 0.41);
/// Step used to measure the asymptotic growth exponent.
const SLOPE_STEP: f64 = 0.5;

/// Sample points of a spectral family.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralGrid {
    /// All points; the first `n_generic` are generic, the rest are special points.
    pub points: Vec<C64>,
    /// Number of leading generic points (used for crossing checks and matching).
    pub n_generic: usize,
    /// Real part of the asymptotic evaluation points ±u_max.
    pub u_max: f64,
}

impl SpectralGrid {
    /// `n_generic` points on a rectangle in the u-plane, followed by the
    /// special points θⱼ, −θⱼ, ±θⱼ+2η, ±θⱼ+4η, ±θⱼ+6η, 0, 2η, 4η, 8η and ±u_max.
    ///
    /// Rectangle points closer than 10⁻³ to an integer multiple of η or to
    /// ±θⱼ + kη are nudged along the imaginary axis.
    pub fn standard(params: &ModelParams, n_generic: usize, u_max: f64) -> Self {
        let eta = params.eta;
        let mut avoid: Vec<C64> = (-20..=20).map(|k| eta * k as f64).collect();
        for &t in &params.theta {
            for k in -20..=20 {
                avoid.push(t + eta * k as f64);
                avoid.push(-t + eta * k as f64);
            }
        }
        let (w, h) = (RECT_RE.1 - RECT_RE.0, RECT_IM.1 - RECT_IM.0);
        let perimeter = 2.0 * (w + h);
        let mut points: Vec<C64> = (0..n_generic)
            .map(|k| {
                let s = perimeter * (k as f64 + 0.5) / n_generic as f64;
                let mut z = if s < w {
                    C64::new(RECT_RE.0 + s, RECT_IM.0)
                } else if s < w + h {
                    C64::new(RECT_RE.1, RECT_IM.0 + (s - w))
                } else if s < 2.0 * w + h {
                    C64::new(RECT_RE.1 - (s - w - h), RECT_IM.1)
                } else {
                    C64::new(RECT_RE.0, RECT_IM.1 - (s - 2.0 * w - h))
                };
                while avoid.iter().any(|&a| params::dist_mod_2pi_i(z, a) < params::EXCLUSION_DISTANCE) {
                    z += C64::new(0.0, 0.01);
                }
                z
            })
            .collect();
        for &t in &params.theta {
            for s in [t, -t] {
                for k in [0.0, 2.0, 4.0, 6.0] {
                    points.push(s + eta * k);
                }
            }
        }
        for k in [0.0, 2.0, 4.0, 8.0] {
            points.push(eta * k);
        }
        points.push(C64::new(u_max, 0.0));
        points.push(C64::new(-u_max, 0.0));
        Self { points, n_generic, u_max }
    }

    /// Generic points only.
    pub fn generic(&self) -> &[C64] {
        &self.points[..self.n_generic]
    }
}

/// Eigenvalue curves of the commuting family on a grid.
#[derive(Clone, Debug)]
pub struct SpectralFamily {
    /// Sample points.
    pub u_grid: SpectralGrid,
    /// `lambda[i][k]` = Λᵢ(u_k).
    pub lambda: Vec<Vec<C64>>,
    /// `lambda_plus[i][k]` = Λ₊ᵢ(u_k).
    pub lambda_plus: Vec<Vec<C64>>,
    /// Condition number of the common eigenbasis.
    pub basis_condition: f64,
    /// Largest relative off-diagonal part of V⁻¹XV over the grid (X = t, t₊).
    pub eigen_residual: f64,
    /// Parameters of the chain.
    pub params: ValidatedParams,
    chain: Chain,
    basis: CommonEigenbasis,
}

/// Diagonalizes {t(u), t₊(u)} and tabulates the eigenvalue curves on `grid`.
///
/// The common eigenbasis comes from t(u₀), t₊(u₀) at fixed anchor points;
/// every grid value is the diagonal of V⁻¹ t(u) V, and the off-diagonal part
/// must stay below 100·tol_spectral.
pub fn diagonalize_family(params: &ValidatedParams, grid: &SpectralGrid) -> Result<SpectralFamily> {
    if params.n_sites > MAX_SPECTRAL_SITES {
        return Err(Error::Config(format!(
            "spectral layer supports N ≤ {MAX_SPECTRAL_SITES} (got N = {})",
            params.n_sites
        )));
    }
    let chain = Chain::new(params)?;
    let mut anchors = Vec::new();
    for u in T_ANCHORS {
        anchors.push(chain.transfer(u)?.matrix);
    }
    for u in TPLUS_ANCHORS {
        anchors.push(chain.transfer_fused(u, Sign::Plus)?.matrix);
    }
    let refs: Vec<&CMat> = anchors.iter().collect();
    let basis = la::simultaneous_eigenbasis(&refs, params.tol_spectral, params.rng_seed)?;
    let n = chain.phys_dim();
    let mut family = SpectralFamily {
        u_grid: grid.clone(),
        lambda: vec![Vec::with_capacity(grid.points.len()); n],
        lambda_plus: vec![Vec::with_capacity(grid.points.len()); n],
        basis_condition: basis.condition,
        eigen_residual: basis.reconstruction,
        params: params.clone(),
        chain,
        basis,
    };
    for &u in &grid.points {
        let (l, r1) = family.project(&family.chain.transfer(u)?.matrix);
        let (lp, r2) = family.project(&family.chain.transfer_fused(u, Sign::Plus)?.matrix);
        family.eigen_residual = family.eigen_residual.max(r1).max(r2);
        for i in 0..n {
            family.lambda[i].push(l[i]);
            family.lambda_plus[i].push(lp[i]);
        }
    }
    let limit = 100.0 * params.tol_spectral;
    if !(family.eigen_residual <= limit) {
        return Err(Error::NotCommuting(family.eigen_residual));
    }
    Ok(family)
}

impl SpectralFamily {
    /// Number of eigenstates (6^N).
    pub fn n_states(&self) -> usize {
        self.lambda.len()
    }

    /// The common eigenbasis.
    pub fn basis(&self) -> &CommonEigenbasis {
        &self.basis
    }

    /// The chain the family was built from.
    pub fn chain(&self) -> &Chain {
        &self.chain
    }

    /// Diagonal of V⁻¹ m V and the relative size of its off-diagonal part.
    pub fn project(&self, m: &CMat) -> (Vec<C64>, f64) {
        let d = &self.basis.inverse * (m * &self.basis.basis);
        let n = d.nrows();
        let diag: Vec<C64> = (0..n).map(|i| d[(i, i)]).collect();
        let off = CMat::from_fn(n, n, |i, j| if i == j { C64::new(0.0, 0.0) } else { d[(i, j)] });
        (diag, la::frob(&off) / la::frob(&d).max(RESIDUAL_FLOOR))
    }

    /// Λᵢ(u) for every state.
    pub fn lambda_at(&self, u: C64) -> Result<Vec<C64>> {
        Ok(self.project(&self.chain.transfer(u)?.matrix).0)
    }

    /// Λ₊ᵢ(u) for every state.
    pub fn lambda_plus_at(&self, u: C64) -> Result<Vec<C64>> {
        Ok(self.project(&self.chain.transfer_fused(u, Sign::Plus)?.matrix).0)
    }

    /// Λ₋ᵢ(u) from t₋(u) = e^{−8η} 𝒲 t₊(−u+8η) 𝒲.
    pub fn lambda_minus_at(&self, u: C64) -> Result<Vec<C64>> {
        let eta = self.params.eta;
        let w = self.chain.w_chain();
        let tp = self.chain.transfer_fused(-u + 8.0 * eta, Sign::Plus)?.matrix;
        let tm = la::scale(&(&w * (&tp * &w)), (-8.0 * eta).exp());
        Ok(self.project(&tm).0)
    }

    /// Eigenvalue curves as CSV: `curve,state,u_re,u_im,re,im`, one row per
    /// (curve, state, grid point).
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Config(format!("csv: {e}"));
        w.write_record(["curve", "state", "u_re", "u_im", "re", "im"]).map_err(io)?;
        for (name, table) in [("lambda", &self.lambda), ("lambda_plus", &self.lambda_plus)] {
            for (i, row) in table.iter().enumerate() {
                for (u, v) in self.u_grid.points.iter().zip(row) {
                    w.serialize((name, i, u.re, u.im, v.re, v.im)).map_err(io)?;
                }
            }
        }
        let bytes = w.into_inner().map_err(|e| Error::Config(format!("csv: {e}")))?;
        String::from_utf8(bytes).map_err(|e| Error::Config(format!("csv: {e}")))
    }

    /// Realized Laurent support of each Λᵢ in powers of e^{u/2}.
    ///
    /// Λᵢ is sampled at u = iφ on a full period of e^{u/2} and transformed by
    /// FFT; the result is the (lowest, highest) power whose coefficient exceeds
    /// 10⁻¹⁰ of the largest one.
    pub fn laurent_support(&self) -> Result<Vec<(i64, i64)>> {
        let m = 16 * (4 * self.params.n_sites + 4);
        let mut samples = vec![Vec::with_capacity(m); self.n_states()];
        for k in 0..m {
            let u = C64::new(0.0, 4.0 * std::f64::consts::PI * k as f64 / m as f64);
            for (i, v) in self.lambda_at(u)?.into_iter().enumerate() {
                samples[i].push(v);
            }
        }
        let fft = FftPlanner::<f64>::new().plan_fft_forward(m);
        Ok(samples
            .into_iter()
            .map(|mut s| {
                fft.process(&mut s);
                let peak = s.iter().map(|c| c.norm()).fold(0.0, f64::max);
                let powers: Vec<i64> = (0..m)
                    .filter(|&j| s[j].norm() > 1e-10 * peak)
                    .map(|j| if j <= m / 2 { j as i64 } else { j as i64 - m as i64 })
                    .collect();
                (*powers.iter().min().unwrap_or(&0), *powers.iter().max().unwrap_or(&0))
            })
            .collect())
    }
}

fn sh(z: C64) -> C64 {
    z.sinh()
}

fn ex(z: C64) -> C64 {
    z.exp()
}

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(RESIDUAL_FLOOR)
}

/// Builder of per-state records for one relation.
struct Relation {
    id: &'static str,
    threshold: f64,
    points: Vec<Vec<[f64; 2]>>,
    residual: Vec<f64>,
    notes: Vec<Vec<String>>,
    error: Option<String>,
}

impl Relation {
    fn new(id: &'static str, threshold: f64, n: usize) -> Self {
        debug_assert!(verify::catalog_entry(id).is_some(), "{id} missing from catalog");
        Self { id, threshold, points: Vec::new(), residual: vec![0.0; n], notes: vec![Vec::new(); n], error: None }
    }

    fn at(&mut self, pts: &[C64]) {
        self.points.push(pts.iter().map(|z| [z.re, z.im]).collect());
    }

    fn push(&mut self, i: usize, r: f64) {
        self.residual[i] = if r.is_finite() { self.residual[i].max(r) } else { f64::MAX };
    }

    /// Evaluates `body`, turning an error into failed records.
    fn run(mut self, digest: &str, body: impl FnOnce(&mut Self) -> Result<()>) -> Vec<ResidualRecord> {
        if let Err(e) = body(&mut self) {
            self.error = Some(format!("error: {e}"));
        }
        (0..self.residual.len())
            .map(|i| {
                let mut diagnostics = self.notes[i].clone();
                let residual = match &self.error {
                    Some(e) => {
                        diagnostics.push(e.clone());
                        f64::MAX
                    }
                    None => self.residual[i],
                };
                ResidualRecord {
                    check_id: self.id.to_string(),
                    params_digest: digest.to_string(),
                    sample_points: self.points.clone(),
                    residual,
                    threshold: self.threshold,
                    passed: residual <= self.threshold,
                    diagnostics,
                    state: Some(i),
                }
            })
            .collect()
    }
}

/// Boundary brace of the Λ asymptotics at u → +∞ (swap m₁, m₂ for −∞).
fn brace(o: &LocalOps, n: usize, m1: f64, m2: f64) -> C64 {
    let (l, r, eta) = (o.left.bp, o.right.bp, o.eta());
    let k = m1 + m2 - n as f64 - 1.0;
    l.c * (r.c + ex(-r.c2)) * ex(4.0 * (m1 - m2) * eta)
        + r.c * (l.c + ex(-l.c2)) * ex(4.0 * (m2 - m1) * eta)
        + (ex(2.0 * k * eta) + ex(-2.0 * k * eta)) * boundary_mix(o)
}

/// Boundary brace of the Λ₊ asymptotics; `plus` selects u → +∞.
fn brace_plus(o: &LocalOps, n: usize, m1: f64, m2: f64, plus: bool) -> C64 {
    let (l, r, eta) = (o.left.bp, o.right.bp, o.eta());
    let n1 = n as f64 + 1.0;
    if plus {
        l.c * (r.c + ex(-r.c2)) * (ex(2.0 * (2.0 * m1 - n1) * eta) + ex(2.0 * (n1 - 2.0 * m2) * eta))
            + ex(2.0 * (m2 - m1) * eta) * boundary_mix(o)
    } else {
        r.c * (l.c + ex(-l.c2)) * (ex(2.0 * (2.0 * m2 - n1) * eta) + ex(2.0 * (n1 - 2.0 * m1) * eta))
            + ex(2.0 * (m1 - m2) * eta) * boundary_mix(o)
    }
}

/// c₁c̃₃e^{−2η} + c̃₁c₃e^{2η}.
fn boundary_mix(o: &LocalOps) -> C64 {
    let (l, r, eta) = (o.left.bp, o.right.bp, o.eta());
    l.c1 * r.c3 * ex(-2.0 * eta) + r.c1 * l.c3 * ex(2.0 * eta)
}

/// Admissible quantum numbers (m₁, m₂): m₁, m₂ ≥ 0, m₁ + m₂ ≤ N.
fn quantum_numbers(n: usize) -> Vec<(usize, usize)> {
    (0..=n).flat_map(|m1| (0..=n - m1).map(move |m2| (m1, m2))).collect()
}

/// Checks every eigenvalue functional relation state by state.
///
/// Produces, in catalog order, one record per state for: crossing of Λ on
/// the generic grid, the Λ₊/Λ₋ link, the quantum-determinant product, both
/// branches of the 16-dimensional fusion relation, the P⁺ fusion relation,
/// the four special-point values, and the growth exponents and leading
/// constants of Λ and Λ₊ at u = ±u_max. Asymptotic constants are matched
/// against the boundary braces for every admissible (m₁, m₂); the best pair
/// is recorded in the diagnostics.
pub fn check_eigen_relations(family: &SpectralFamily) -> Vec<ResidualRecord> {
    let p = &family.params;
    let digest = verify::params_digest(p);
    let n = family.n_states();
    let ns = p.n_sites;
    let o = family.chain.ops();
    let eta = p.eta;
    let e = |k: f64| eta * k;
    let tol = p.tol_spectral;
    let w = &o.w;
    let (h1, h2) = (|u| o.left.h1(u), |u| o.left.h2(u));
    let (th1, th2) = (|u| o.right.h1_tilde(u), |u| o.right.h2_tilde(u));
    let rho0 = |x: C64| p.theta.iter().map(|&t| w.rho0_tilde(x - t) * w.rho0_tilde(x + t)).product::<C64>();
    let prod_theta = |f: &dyn Fn(C64) -> C64| p.theta.iter().map(|&t| f(t)).product::<C64>();
    let four_n = C64::new(4f64.powi(ns as i32), 0.0);
    let mut out = Vec::new();

    out.extend(Relation::new("EIG.crossing", tol, n).run(&digest, |r| {
        for (k, &u) in family.u_grid.generic().iter().enumerate() {
            r.at(&[u]);
            let mirrored = family.lambda_at(-u + e(8.0))?;
            for (i, &m) in mirrored.iter().enumerate() {
                r.push(i, rel(m, family.lambda[i][k]));
            }
        }
        Ok(())
    }));

    out.extend(Relation::new("EIG.fused_link", tol, n).run(&digest, |r| {
        for &u in family.u_grid.generic().iter().take(6) {
            r.at(&[u]);
            let lp = family.lambda_plus_at(-u + e(8.0))?;
            let lm = family.lambda_minus_at(u)?;
            let direct = family.project(&family.chain.transfer_fused(u, Sign::Minus)?.matrix).0;
            for i in 0..n {
                r.push(i, rel(lp[i], ex(e(8.0)) * lm[i]));
                r.push(i, rel(lm[i], direct[i]));
            }
        }
        Ok(())
    }));

    out.extend(Relation::new("EIG.qdet", tol, n).run(&digest, |r| {
        for &x in &p.theta {
            r.at(&[x, -x]);
            let (a, b) = (family.lambda_at(x)?, family.lambda_at(-x)?);
            let s = sh(x - e(6.0)) * sh(x - e(8.0)) * sh(x + e(6.0)) * sh(x + e(8.0))
                / (sh(x - e(2.0)) * sh(x - e(4.0)) * sh(x + e(2.0)) * sh(x + e(4.0)));
            let rhs = s
                * h1(x - e(2.0))
                * h2(x + e(2.0))
                * th1(x - e(2.0))
                * th2(x + e(2.0))
                * p.theta.iter().map(|&t| w.f(x - t) * w.f(x + t)).product::<C64>();
            for i in 0..n {
                r.push(i, rel(a[i] * b[i], rhs));
            }
        }
        Ok(())
    }));

    for (id, sign) in [("EIG.fusion16.plus", 1.0), ("EIG.fusion16.minus", -1.0)] {
        out.extend(Relation::new(id, tol, n).run(&digest, |r| {
            for &t in &p.theta {
                let y = t * sign;
                r.at(&[y]);
                let lhs_a = family.lambda_at(y)?;
                let lhs_b = family.lambda_at(-y + e(4.0))?;
                let pa = family.lambda_plus_at(y + e(2.0))?;
                let pb = family.lambda_plus_at(-y + e(6.0))?;
                let c = sh(y + e(4.0)) * sh(y - e(8.0)) / (sh(y + e(2.0)) * sh(y - e(6.0))) * rho0(y) * four_n * four_n;
                for i in 0..n {
                    r.push(i, rel(lhs_a[i] * lhs_b[i], c * pa[i] * pb[i]));
                }
            }
            Ok(())
        }));
    }

    out.extend(Relation::new("EIG.fusion_plus", tol, n).run(&digest, |r| {
        for &x in &p.theta {
            r.at(&[x]);
            let l = family.lambda_at(x)?;
            let lp = family.lambda_plus_at(x + e(6.0))?;
            let rp = family.lambda_plus_at(-x + e(6.0))?;
            let c = sh(x + e(6.0)) * sh(x - e(8.0)) / (sh(x + e(2.0)) * sh(x - e(4.0)))
                * rho0(x)
                * h2(x + e(2.0))
                * th1(x - e(2.0))
                * four_n;
            for i in 0..n {
                r.push(i, rel(l[i] * lp[i], c * rp[i]));
            }
        }
        Ok(())
    }));

    let rho1 = prod_theta(&|t| w.rho1(t));
    let rhos = prod_theta(&|t| w.rho_s(t));
    out.extend(Relation::new("EIG.value.0", tol, n).run(&digest, |r| {
        r.at(&[e(0.0)]);
        let l = family.lambda_at(e(0.0))?;
        let v = -sh(e(6.0)) * sh(e(8.0)) / (sh(e(2.0)) * sh(e(4.0))) * h2(e(2.0)) * th2(e(2.0)) * rho1;
        for (i, &x) in l.iter().enumerate() {
            r.push(i, rel(x, v));
        }
        Ok(())
    }));
    out.extend(Relation::new("EIG.value.2eta", tol, n).run(&digest, |r| {
        r.at(&[e(2.0)]);
        let l = family.lambda_at(e(2.0))?;
        let lp = family.lambda_plus_at(e(4.0))?;
        let c = four_n * sh(e(6.0)) / sh(e(4.0)) * rhos;
        for (i, (&x, &y)) in l.iter().zip(&lp).enumerate() {
            r.push(i, rel(x, c * y));
        }
        Ok(())
    }));
    out.extend(Relation::new("EIG.value_plus.0", tol, n).run(&digest, |r| {
        r.at(&[e(0.0)]);
        let lp = family.lambda_plus_at(e(0.0))?;
        let v = -sh(e(8.0)) / sh(e(2.0)) * h2(e(0.0)) * th2(e(4.0)) * rhos;
        for (i, &x) in lp.iter().enumerate() {
            r.push(i, rel(x, v));
        }
        Ok(())
    }));
    out.extend(Relation::new("EIG.value_plus.8eta", tol, n).run(&digest, |r| {
        r.at(&[e(8.0)]);
        let lp = family.lambda_plus_at(e(8.0))?;
        let v = sh(e(8.0)) / sh(e(2.0)) * h2(e(4.0)) * th1(e(0.0)) * rhos;
        for (i, &x) in lp.iter().enumerate() {
            r.push(i, rel(x, v));
        }
        Ok(())
    }));

    // Asymptotics. ln of the prefactor −4^{−(N+1)} e^{κu + β} is kept in log
    // form so that only the ratio Λ/prefactor is ever exponentiated.
    let u_max = family.u_grid.u_max;
    let nf = ns as f64;
    let ln_pref = |kappa: f64, beta: C64, u: f64| -> C64 {
        C64::new(-(nf + 1.0) * 4f64.ln(), std::f64::consts::PI) + kappa * u + beta
    };
    let qn = quantum_numbers(ns);
    type Curve<'a> = Box<dyn Fn(C64) -> Result<Vec<C64>> + 'a>;
    let curves: [(&str, f64, Curve); 2] = [
        ("EIG.asymptotic", 2.0 * (nf + 1.0), Box::new(|u| family.lambda_at(u))),
        ("EIG.asymptotic_plus", nf + 2.0, Box::new(|u| family.lambda_plus_at(u))),
    ];
    for (prefix, kappa, curve) in &curves {
        let fused = prefix.ends_with("plus");
        for (dir, s) in [("plus", 1.0), ("minus", -1.0)] {
            let u0 = C64::new(s * u_max, 0.0);
            let u1 = C64::new(s * (u_max + SLOPE_STEP), 0.0);
            let values = curve(u0).and_then(|a| Ok((a, curve(u1)?)));
            let exp_id: &'static str = verify::catalog_entry(&format!("{prefix}.exponent.{dir}")).map_or("", |c| c.id);
            let const_id: &'static str =
                verify::catalog_entry(&format!("{prefix}.constant.{dir}")).map_or("", |c| c.id);
            out.extend(Relation::new(exp_id, EXPONENT_THRESHOLD, n).run(&digest, |r| {
                let (a, b) = values.as_ref().map_err(|e| Error::Config(e.to_string()))?;
                r.at(&[u0, u1]);
                for i in 0..n {
                    let slope = (b[i] / a[i]).norm().ln() / SLOPE_STEP;
                    r.push(i, (slope - kappa).abs() / kappa);
                    r.notes[i].push(format!("measured exponent {slope:.6}, expected {kappa}"));
                }
                Ok(())
            }));
            out.extend(Relation::new(const_id, CONSTANT_THRESHOLD, n).run(&digest, |r| {
                let (a, _) = values.as_ref().map_err(|e| Error::Config(e.to_string()))?;
                r.at(&[u0]);
                let beta = match (fused, s > 0.0) {
                    (false, true) => -(8.0 * nf + 4.0) * eta,
                    (false, false) => (8.0 * nf + 12.0) * eta,
                    (true, true) => -4.0 * (nf + 1.0) * eta,
                    (true, false) => 4.0 * (nf + 3.0) * eta,
                };
                let lp = ln_pref(*kappa * s, beta, u_max * s);
                for (i, &ai) in a.iter().enumerate() {
                    let ratio = (ai.ln() - lp).exp();
                    let (best, err) = qn
                        .iter()
                        .map(|&(m1, m2)| {
                            let (f1, f2) = (m1 as f64, m2 as f64);
                            let b = match (fused, s > 0.0) {
                                (false, true) => brace(o, ns, f1, f2),
                                (false, false) => brace(o, ns, f2, f1),
                                (true, plus) => brace_plus(o, ns, f1, f2, plus),
                            };
                            ((m1, m2), rel(ratio, b))
                        })
                        .min_by(|x, y| x.1.total_cmp(&y.1))
                        .expect("at least one quantum-number pair");
                    r.push(i, err);
                    r.notes[i].push(format!("(m1, m2) = ({}, {})", best.0, best.1));
                    r.notes[i].push("boundary braces use the primed (right) parameters for tilde symbols".into());
                }
                Ok(())
            }));
        }
    }
    out
}

/// One state-to-row assignment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TqMatch {
    /// Index into the list of Bethe states.
    pub state: usize,
    /// Closest family row, if any grid point could be evaluated.
    pub row: Option<usize>,
    /// sup |Λ_TQ − Λ_row| / sup |Λ_row| over the generic grid.
    pub deviation: f64,
    /// Whether another state was matched to the same row first.
    pub conflict: bool,
}

/// Result of matching T-Q curves to diagonalized curves.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchingReport {
    /// One entry per state, in input order.
    pub matches: Vec<TqMatch>,
    /// Rows no state was matched to.
    pub unmatched_rows: Vec<usize>,
}

/// Greedily matches each state's Λ-curve to the closest family row.
///
/// Distances are sup-norms over the generic grid points at which the T-Q
/// relation can be evaluated; a row already taken is still reported but
/// flagged as a conflict.
pub fn match_tq_to_spectrum(family: &SpectralFamily, states: &[BetheState]) -> MatchingReport {
    let grid = family.u_grid.generic();
    let mut taken = vec![false; family.n_states()];
    let matches = states
        .iter()
        .enumerate()
        .map(|(si, s)| {
            let curve: Vec<(usize, C64)> = grid
                .iter()
                .enumerate()
                .filter_map(|(k, &u)| tq_lambda(u, s, &family.params).ok().map(|v| (k, v)))
                .collect();
            let best = (!curve.is_empty())
                .then(|| {
                    family
                        .lambda
                        .iter()
                        .enumerate()
                        .map(|(i, row)| {
                            let scale = curve.iter().map(|&(k, _)| row[k].norm()).fold(0.0, f64::max);
                            let dev = curve.iter().map(|&(k, v)| (v - row[k]).norm()).fold(0.0, f64::max);
                            (i, dev / scale.max(RESIDUAL_FLOOR))
                        })
                        .filter(|(_, d)| d.is_finite())
                        .min_by(|a, b| a.1.total_cmp(&b.1))
                })
                .flatten();
            match best {
                Some((row, deviation)) => {
                    let conflict = taken[row];
                    taken[row] = true;
                    TqMatch { state: si, row: Some(row), deviation, conflict }
                }
                None => TqMatch { state: si, row: None, deviation: f64::INFINITY, conflict: false },
            }
        })
        .collect();
    let unmatched_rows = taken.iter().enumerate().filter(|(_, t)| !**t).map(|(i, _)| i).collect();
    MatchingReport { matches, unmatched_rows }
}

/// Log-derivative estimate at u = 0.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyEstimate {
    /// Richardson-extrapolated d ln Λ/du at 0.
    #[serde(with = "params::complex_pair")]
    pub value: C64,
    /// |R(h) − R(h/2)| between two Richardson estimates.
    pub extrapolation_error: f64,
    /// Observed order of the plain central difference under step halving.
    pub observed_order: f64,
}

/// d ln f/du at 0 by central differences (steps h, h/2, h/4) with Richardson.
fn log_derivative(f: impl Fn(C64) -> Result<C64>, h: f64) -> Result<EnergyEstimate> {
    let d = |s: f64| -> Result<C64> { Ok((f(C64::new(s, 0.0))? / f(C64::new(-s, 0.0))?).ln() / (2.0 * s)) };
    let ds = [d(h)?, d(h / 2.0)?, d(h / 4.0)?];
    let r1 = (4.0 * ds[1] - ds[0]) / 3.0;
    let r2 = (4.0 * ds[2] - ds[1]) / 3.0;
    let order = ((ds[0] - ds[1]).norm() / (ds[1] - ds[2]).norm().max(RESIDUAL_FLOOR)).log2();
    Ok(EnergyEstimate { value: r2, extrapolation_error: (r1 - r2).norm(), observed_order: order })
}

fn require_homogeneous(p: &ModelParams) -> Result<()> {
    if p.theta.iter().any(|t| t.norm() != 0.0) {
        return Err(Error::Config("energies are defined at the homogeneous point (all θj = 0)".into()));
    }
    Ok(())
}

/// d ln Λ/du at u = 0 from the T-Q relation of `state`, on any chain.
pub fn log_derivative_tq(state: &BetheState, params: &ModelParams) -> Result<EnergyEstimate> {
    log_derivative(|u| tq_lambda(u, state, params), ENERGY_STEP)
}

/// d ln Λᵢ/du at u = 0 from the diagonalized curve of state `row`, on any chain.
pub fn log_derivative_spectral(family: &SpectralFamily, row: usize) -> Result<EnergyEstimate> {
    if row >= family.n_states() {
        return Err(Error::Config(format!("state {row} out of range")));
    }
    log_derivative(|u| Ok(family.lambda_at(u)?[row]), ENERGY_STEP)
}

/// Energy E = d ln Λ/du at u = 0 from the T-Q relation of `state`
/// (homogeneous chains only).
pub fn energy_tq(state: &BetheState, params: &ModelParams) -> Result<EnergyEstimate> {
    require_homogeneous(params)?;
    log_derivative_tq(state, params)
}

/// Energy E = d ln Λᵢ/du at u = 0 from the diagonalized curve of state `row`
/// (homogeneous chains only).
pub fn energy_spectral(family: &SpectralFamily, row: usize) -> Result<EnergyEstimate> {
    require_homogeneous(&family.params)?;
    log_derivative_spectral(family, row)
}

/// Eigenvalues of H = ½ t′(0) t(0)⁻¹ on the family's common eigenbasis.
///
/// Returns the diagonal of V⁻¹HV and the relative size of its off-diagonal
/// part. Each eigenvalue equals half the energy of the same row.
pub fn hamiltonian_eigenvalues(family: &SpectralFamily) -> Result<(Vec<C64>, f64)> {
    require_homogeneous(&family.params)?;
    let h = family.chain.hamiltonian(crate::chain::FD_STEP)?;
    Ok(family.project(&h.op.matrix))
}

#[cfg(test)]
mod tests;
