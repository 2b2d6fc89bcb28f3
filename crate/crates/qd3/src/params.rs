//! Model parameters, numerical tolerances and the JSON configuration schema.
//!
//! Every scalar that defines a model instance lives here: the crossing
//! parameter η, the inhomogeneities θⱼ, and the two boundary quadruples
//! (unprimed for K, primed for K̄). The fourth boundary parameter c₃ is always
//! derived from the constraint c₁c₃ = c(c + e^{−c₂}) and is never a free input.

use crate::{Error, Result, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Minimal distance (modulo 2πi) kept from every degeneration point.
pub const EXCLUSION_DISTANCE: f64 = 1e-3;
/// Relative tolerance of the boundary constraint.
pub const BOUNDARY_CONSTRAINT_TOL: f64 = 1e-12;
/// Number of draws attempted by [`sample_generic_point`].
pub const SAMPLE_RETRIES: usize = 1000;

/// Deterministic random generator used throughout the crate.
pub type WorkbenchRng = ChaCha8Rng;

/// Seeded generator; identical seeds give identical streams on every platform.
pub fn rng_from_seed(seed: u64) -> WorkbenchRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Serde adapter writing a complex number as `[re, im]`.
pub mod complex_pair {
    use crate::C64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    /// Serialize as a two-element array.
    pub fn serialize<S: Serializer>(z: &C64, s: S) -> Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(s)
    }

    /// Deserialize from a two-element array.
    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<C64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(C64::new(re, im))
    }

    /// Same adapter for vectors of complex numbers.
    pub mod vec {
        use crate::C64;
        use serde::{Deserialize, Deserializer, Serialize, Serializer};

        /// Serialize as an array of `[re, im]` pairs.
        pub fn serialize<S: Serializer>(v: &[C64], s: S) -> Result<S::Ok, S::Error> {
            v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>().serialize(s)
        }

        /// Deserialize from an array of `[re, im]` pairs.
        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<C64>, D::Error> {
            let v = Vec::<[f64; 2]>::deserialize(d)?;
            Ok(v.into_iter().map(|[re, im]| C64::new(re, im)).collect())
        }
    }

    /// Same adapter for an optional complex number (`null` when absent).
    pub mod option {
        use crate::C64;
        use serde::{Deserialize, Deserializer, Serialize, Serializer};

        /// Serialize as `[re, im]` or `null`.
        pub fn serialize<S: Serializer>(z: &Option<C64>, s: S) -> Result<S::Ok, S::Error> {
            z.map(|z| [z.re, z.im]).serialize(s)
        }

        /// Deserialize from `[re, im]` or `null`.
        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<C64>, D::Error> {
            Ok(Option::<[f64; 2]>::deserialize(d)?.map(|[re, im]| C64::new(re, im)))
        }
    }
}

/// Boundary quadruple (c, c₁, c₂, c₃) with c₁c₃ = c(c + e^{−c₂}).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundaryParams {
    /// Free parameter c.
    #[serde(with = "complex_pair")]
    pub c: C64,
    /// Free parameter c₁ (must be nonzero).
    #[serde(with = "complex_pair")]
    pub c1: C64,
    /// Free parameter c₂.
    #[serde(with = "complex_pair")]
    pub c2: C64,
    /// Derived parameter c₃.
    #[serde(with = "complex_pair")]
    pub c3: C64,
}

/// c₃ = c(c + e^{−c₂}) / c₁.
pub fn derive_c3(c: C64, c1: C64, c2: C64) -> Result<C64> {
    if c1.norm() == 0.0 {
        return Err(Error::ZeroDivisor("c1 = 0 in the boundary constraint".into()));
    }
    Ok(c * (c + (-c2).exp()) / c1)
}

impl BoundaryParams {
    /// Builds the quadruple, deriving c₃ from the constraint.
    pub fn new(c: C64, c1: C64, c2: C64) -> Result<Self> {
        Ok(Self { c, c1, c2, c3: derive_c3(c, c1, c2)? })
    }

    /// Real-valued convenience constructor.
    pub fn real(c: f64, c1: f64, c2: f64) -> Result<Self> {
        Self::new(C64::new(c, 0.0), C64::new(c1, 0.0), C64::new(c2, 0.0))
    }

    /// Relative violation of c₁c₃ = c(c + e^{−c₂}).
    pub fn constraint_residual(&self) -> f64 {
        let lhs = self.c1 * self.c3;
        let rhs = self.c * (self.c + (-self.c2).exp());
        (lhs - rhs).norm() / lhs.norm().max(rhs.norm()).max(f64::MIN_POSITIVE)
    }
}

/// All scalars defining one model instance plus numerical tolerances.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams {
    /// Crossing parameter η (q = e^η).
    pub eta: C64,
    /// Number of sites N.
    pub n_sites: usize,
    /// Inhomogeneities θ₁..θ_N.
    pub theta: Vec<C64>,
    /// Boundary parameters entering K (unprimed).
    pub left: BoundaryParams,
    /// Boundary parameters entering K̄ (primed).
    pub right: BoundaryParams,
    /// Threshold for local and transfer identities.
    pub tol_identity: f64,
    /// Threshold for spectral relations.
    pub tol_spectral: f64,
    /// Seed for every random draw.
    pub rng_seed: u64,
}

/// Default inhomogeneities of the test profile (first N are used).
pub const DEFAULT_THETA: [f64; 4] = [0.93, 1.07, 0.98, 1.12];

impl ModelParams {
    /// The default test profile: η = 0.1, generic real boundaries, θⱼ near 1.
    pub fn default_profile(n_sites: usize) -> Self {
        Self {
            eta: C64::new(0.1, 0.0),
            n_sites,
            theta: DEFAULT_THETA.iter().cycle().take(n_sites).map(|&t| C64::new(t, 0.0)).collect(),
            left: BoundaryParams::real(0.3, 0.7, 0.2).expect("c1 != 0"),
            right: BoundaryParams::real(-0.4, 0.5, -0.35).expect("c1 != 0"),
            tol_identity: 1e-9,
            tol_spectral: 1e-6,
            rng_seed: 20240917,
        }
    }

    /// Same parameters with every θⱼ set to zero (homogeneous chain).
    pub fn homogeneous(&self) -> Self {
        Self { theta: vec![C64::new(0.0, 0.0); self.n_sites], ..self.clone() }
    }

    /// Same parameters on a chain of a different length, reusing the default θ pattern.
    pub fn with_sites(&self, n_sites: usize) -> Self {
        let theta =
            (0..n_sites).map(|j| self.theta.get(j).copied().unwrap_or(C64::new(DEFAULT_THETA[j % 4], 0.0))).collect();
        Self { n_sites, theta, ..self.clone() }
    }
}

/// One violated parameter condition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    /// Stable machine-readable code.
    pub code: String,
    /// Human-readable description.
    pub message: String,
}

impl Violation {
    fn new(code: &str, message: String) -> Self {
        Self { code: code.into(), message }
    }
}

/// Parameters that passed [`validate`]; the only form accepted by builders.
#[derive(Clone, Debug, PartialEq)]
pub struct ValidatedParams(ModelParams);

impl std::ops::Deref for ValidatedParams {
    type Target = ModelParams;
    fn deref(&self) -> &ModelParams {
        &self.0
    }
}

impl ValidatedParams {
    /// Unwraps the underlying parameters.
    pub fn into_inner(self) -> ModelParams {
        self.0
    }

    /// Validated copy on the homogeneous chain (all θⱼ = 0).
    pub fn homogeneous(&self) -> Result<ValidatedParams> {
        // θ = 0 is the regular point: the inhomogeneity exclusions do not
        // apply, only the η and boundary conditions must still hold.
        let p = self.0.homogeneous();
        let v: Vec<Violation> = violations(&p).into_iter().filter(|v| !v.code.starts_with("theta")).collect();
        if v.is_empty() {
            Ok(ValidatedParams(p))
        } else {
            Err(Error::InvalidParams(v))
        }
    }
}

/// Distance between two complex numbers modulo 2πi.
pub fn dist_mod_2pi_i(a: C64, b: C64) -> f64 {
    let d = a - b;
    let im = (d.im + PI).rem_euclid(2.0 * PI) - PI;
    C64::new(d.re, im).norm()
}

fn violations(p: &ModelParams) -> Vec<Violation> {
    let mut out = Vec::new();
    let eta = p.eta;
    if !(eta.re.is_finite() && eta.im.is_finite()) {
        out.push(Violation::new("eta_nonfinite", "eta is not finite".into()));
    } else {
        if eta.norm() < EXCLUSION_DISTANCE {
            out.push(Violation::new("eta_zero", "eta vanishes (undeformed point)".into()));
        }
        let q4 = (eta * 4.0).exp();
        if (q4 - 1.0).norm() < EXCLUSION_DISTANCE {
            out.push(Violation::new("eta_root_of_unity", "e^{2eta} = ±1 (degenerate deformation)".into()));
        }
    }
    if p.n_sites == 0 {
        out.push(Violation::new("n_sites", "n_sites must be positive".into()));
    }
    if p.theta.len() != p.n_sites {
        out.push(Violation::new(
            "theta_count",
            format!("theta has {} entries but n_sites = {}", p.theta.len(), p.n_sites),
        ));
    }
    let shifts: Vec<C64> = [2.0, 4.0, 6.0, 8.0].iter().flat_map(|&k| [eta * k, -eta * k]).collect();
    for (j, &tj) in p.theta.iter().enumerate() {
        if !(tj.re.is_finite() && tj.im.is_finite()) {
            out.push(Violation::new("theta_nonfinite", format!("theta[{j}] is not finite")));
            continue;
        }
        if shifts.iter().any(|&s| dist_mod_2pi_i(tj, s) < EXCLUSION_DISTANCE) {
            out.push(Violation::new(
                "theta_degenerate",
                format!("theta hits degeneration point: theta[{j}] lies on a multiple ±2η, ±4η, ±6η or ±8η"),
            ));
        }
        for (k, &tk) in p.theta.iter().enumerate().skip(j + 1) {
            let pair_bad = [tj - tk, tj + tk].iter().any(|&d| {
                dist_mod_2pi_i(d, C64::new(0.0, 0.0)) < EXCLUSION_DISTANCE
                    || shifts.iter().any(|&s| dist_mod_2pi_i(d, s) < EXCLUSION_DISTANCE)
            });
            if pair_bad {
                out.push(Violation::new(
                    "theta_pair_degenerate",
                    format!("theta[{j}] ± theta[{k}] hits a degeneration point"),
                ));
            }
        }
    }
    for (name, b) in [("left", &p.left), ("right", &p.right)] {
        if b.c1.norm() == 0.0 {
            out.push(Violation::new("boundary_c1_zero", format!("{name} boundary has c1 = 0")));
        } else if !(b.constraint_residual() <= BOUNDARY_CONSTRAINT_TOL) {
            out.push(Violation::new(
                "boundary_constraint",
                format!("{name} boundary constraint c1*c3 = c*(c+e^-c2) violated"),
            ));
        }
    }
    if !(p.tol_identity > 0.0) || !(p.tol_spectral > 0.0) {
        out.push(Violation::new("tolerance", "tolerances must be positive".into()));
    }
    out
}

/// Checks every invariant; returns all violations, never only the first.
pub fn validate(params: &ModelParams) -> std::result::Result<ValidatedParams, Vec<Violation>> {
    let v = violations(params);
    if v.is_empty() {
        Ok(ValidatedParams(params.clone()))
    } else {
        Err(v)
    }
}

/// Draws a spectral parameter at distance ≥ 1e−3 (mod 2πi) from every exclusion.
///
/// Samples Re u ∈ [−1, 1], Im u ∈ [−0.3, 0.3]; fails after
/// [`SAMPLE_RETRIES`] draws.
pub fn sample_generic_point(rng: &mut WorkbenchRng, exclusions: &[C64]) -> Result<C64> {
    sample_generic_point_in(rng, exclusions, (-1.0, 1.0), (-0.3, 0.3))
}

/// [`sample_generic_point`] on an explicit rectangle `re_range × im_range`.
pub fn sample_generic_point_in(
    rng: &mut WorkbenchRng,
    exclusions: &[C64],
    re_range: (f64, f64),
    im_range: (f64, f64),
) -> Result<C64> {
    for _ in 0..SAMPLE_RETRIES {
        let u = C64::new(rng.random_range(re_range.0..re_range.1), rng.random_range(im_range.0..im_range.1));
        if exclusions.iter().all(|&e| dist_mod_2pi_i(u, e) >= EXCLUSION_DISTANCE) {
            return Ok(u);
        }
    }
    Err(Error::ExhaustedRetries(SAMPLE_RETRIES))
}

/// JSON form of a boundary triple (c₃ is absent by design).
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct BoundaryConfig {
    /// c as `[re, im]`.
    #[serde(with = "complex_pair")]
    pub c: C64,
    /// c₁ as `[re, im]`.
    #[serde(with = "complex_pair")]
    pub c1: C64,
    /// c₂ as `[re, im]`.
    #[serde(with = "complex_pair")]
    pub c2: C64,
}

/// JSON configuration schema.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Config {
    /// η as `[re, im]`.
    #[serde(with = "complex_pair")]
    pub eta: C64,
    /// Number of sites.
    pub n_sites: usize,
    /// θⱼ as `[[re, im], ...]`.
    #[serde(with = "complex_pair::vec")]
    pub theta: Vec<C64>,
    /// Boundary entering K.
    pub left: BoundaryConfig,
    /// Boundary entering K̄.
    pub right: BoundaryConfig,
    /// Identity threshold.
    #[serde(default = "default_tol_identity")]
    pub tol_identity: f64,
    /// Spectral threshold.
    #[serde(default = "default_tol_spectral")]
    pub tol_spectral: f64,
    /// Random seed.
    #[serde(default)]
    pub seed: u64,
}

fn default_tol_identity() -> f64 {
    1e-9
}

fn default_tol_spectral() -> f64 {
    1e-6
}

impl Config {
    /// Converts to model parameters, deriving c₃ for both boundaries.
    pub fn to_params(&self) -> Result<ModelParams> {
        let b = |x: &BoundaryConfig| BoundaryParams::new(x.c, x.c1, x.c2);
        Ok(ModelParams {
            eta: self.eta,
            n_sites: self.n_sites,
            theta: self.theta.clone(),
            left: b(&self.left)?,
            right: b(&self.right)?,
            tol_identity: self.tol_identity,
            tol_spectral: self.tol_spectral,
            rng_seed: self.seed,
        })
    }

    /// Inverse of [`Config::to_params`].
    pub fn from_params(p: &ModelParams) -> Self {
        let b = |x: &BoundaryParams| BoundaryConfig { c: x.c, c1: x.c1, c2: x.c2 };
        Self {
            eta: p.eta,
            n_sites: p.n_sites,
            theta: p.theta.clone(),
            left: b(&p.left),
            right: b(&p.right),
            tol_identity: p.tol_identity,
            tol_spectral: p.tol_spectral,
            seed: p.rng_seed,
        }
    }

    /// Parses a JSON document.
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("malformed config: {e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn derive_c3_examples() {
        assert_eq!(derive_c3(c(0.0), c(1.0), c(0.5)).unwrap(), c(0.0));
        assert!((derive_c3(c(1.0), c(1.0), c(0.0)).unwrap() - c(2.0)).norm() < 1e-15);
        let c3 = derive_c3(c(0.3), c(0.7), c(0.2)).unwrap();
        let oracle = 0.3 * (0.3 + (-0.2f64).exp()) / 0.7;
        assert!((c3.re - oracle).abs() < 1e-15);
        assert!((c3.re - 0.479456).abs() < 1e-6);
        assert!(matches!(derive_c3(c(1.0), c(0.0), c(0.0)), Err(Error::ZeroDivisor(_))));
    }

    #[test]
    fn default_profile_validates_and_is_idempotent() {
        for n in 1..=3 {
            let p = ModelParams::default_profile(n);
            let v = validate(&p).expect("default profile is generic");
            let v2 = validate(&v).expect("idempotent");
            assert_eq!(v, v2);
        }
    }

    #[test]
    fn theta_on_degeneration_point_is_reported() {
        let mut p = ModelParams::default_profile(2);
        p.theta[0] = p.eta * 2.0;
        let v = validate(&p).unwrap_err();
        assert!(v.iter().any(|x| x.code == "theta_degenerate"), "{v:?}");
        assert!(v.iter().any(|x| x.message.contains("theta hits degeneration point")));
    }

    #[test]
    fn all_violations_are_collected() {
        let mut p = ModelParams::default_profile(2);
        p.theta[0] = p.eta * 4.0;
        p.left.c3 += 0.1;
        p.tol_identity = -1.0;
        let v = validate(&p).unwrap_err();
        let codes: Vec<_> = v.iter().map(|x| x.code.as_str()).collect();
        assert!(codes.contains(&"theta_degenerate"));
        assert!(codes.contains(&"boundary_constraint"));
        assert!(codes.contains(&"tolerance"));
    }

    #[test]
    fn degenerate_eta_rejected() {
        let mut p = ModelParams::default_profile(1);
        p.eta = C64::new(0.0, PI / 2.0);
        let v = validate(&p).unwrap_err();
        assert!(v.iter().any(|x| x.code == "eta_root_of_unity"));
        p.eta = c(0.0);
        assert!(validate(&p).unwrap_err().iter().any(|x| x.code == "eta_zero"));
    }

    #[test]
    fn pair_degeneration_modulo_2pi_i() {
        let mut p = ModelParams::default_profile(2);
        p.theta[1] = p.theta[0] + C64::new(0.0, 2.0 * PI);
        let v = validate(&p).unwrap_err();
        assert!(v.iter().any(|x| x.code == "theta_pair_degenerate"));
    }

    #[test]
    fn sampling_respects_exclusions_and_seed() {
        let eta = 0.1;
        let ex: Vec<C64> = [2.0, 4.0, 6.0, 8.0].iter().flat_map(|k| [c(k * eta), c(-k * eta)]).collect();
        let mut r1 = rng_from_seed(7);
        let mut r2 = rng_from_seed(7);
        for _ in 0..50 {
            let a = sample_generic_point(&mut r1, &ex).unwrap();
            let b = sample_generic_point(&mut r2, &ex).unwrap();
            assert_eq!(a, b);
            assert!(ex.iter().all(|&e| dist_mod_2pi_i(a, e) >= EXCLUSION_DISTANCE));
        }
        let mut r = rng_from_seed(1);
        assert!(sample_generic_point(&mut r, &[c(0.0)]).unwrap().norm() >= 1e-3);
    }

    #[test]
    fn sampling_exhausts_on_dense_exclusions() {
        // Grid spacing 1e-3 < √2·1e-3 covers the whole sampling box.
        let mut ex = Vec::new();
        for i in -12..=12 {
            for j in -12..=12 {
                ex.push(C64::new(i as f64 * 1e-3, j as f64 * 1e-3));
            }
        }
        let mut r = rng_from_seed(3);
        let res = sample_generic_point_in(&mut r, &ex, (-0.01, 0.01), (-0.01, 0.01));
        assert!(matches!(res, Err(Error::ExhaustedRetries(_))));
    }

    #[test]
    fn config_round_trip_preserves_constraint() {
        let p = ModelParams::default_profile(2);
        let text = serde_json::to_string(&Config::from_params(&p)).unwrap();
        let back = Config::from_json(&text).unwrap().to_params().unwrap();
        assert!(back.left.constraint_residual() <= 1e-12);
        assert!(back.right.constraint_residual() <= 1e-12);
        assert_eq!(back, p);
    }

    #[test]
    fn config_rejects_c3_field() {
        let text = r#"{"eta":[0.1,0],"n_sites":1,"theta":[[0.9,0]],
            "left":{"c":[0.3,0],"c1":[0.7,0],"c2":[0.2,0],"c3":[1,0]},
            "right":{"c":[0.3,0],"c1":[0.7,0],"c2":[0.2,0]}}"#;
        assert!(Config::from_json(text).is_err());
    }
}
