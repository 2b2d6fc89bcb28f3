//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.
//!
//! 1. local identities at 10 sample points, residual < 1e−10, < 10 s;
//! 2. degeneration ranks and projector images, angle < 1e−8, < 5 s;
//! 3. R- and K-fusion identities at 10 sample points, residual < 1e−9, < 30 s;
//! 4. transfer-matrix identities on two sites with random inhomogeneities, < 2 min;
//! 5. eigenvalue relations of the one-site spectrum, < 1 min;
//! 6. Bethe states in three sectors matched to the spectrum with agreeing energies, < 5 min;
//! 7. Hamiltonian commutes with t(u) and its eigenvalues are half the energies;
//! 8. identical configuration and seed give byte-identical reports.

use qd3::chain::Chain;
use qd3::la::{self, CMat, RANK_TOL};
use qd3::local_ops::{LocalOps, Sign};
use qd3::params::{rng_from_seed, validate, ModelParams, ValidatedParams};
use qd3::spectra::{self, SpectralGrid};
use qd3::verify::{self, ResidualRecord};
use qd3::C64;
use rand::Rng;
use std::process::Command;
use std::time::{Duration, Instant};

const SAMPLES: usize = 10;

/// A named criterion, its check and its runtime budget.
type Criterion = (&'static str, fn() -> Outcome, Option<Duration>);

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok, detail: detail.into() }
}

fn default(n: usize) -> ValidatedParams {
    validate(&ModelParams::default_profile(n)).expect("default profile validates")
}

/// All `records` passed and their residuals stay below `bound`.
fn records_below(records: &[ResidualRecord], bound: f64) -> Outcome {
    if records.is_empty() {
        return outcome(false, "no records");
    }
    let bad: Vec<_> = records
        .iter()
        .filter(|r| !r.passed || r.residual >= bound)
        .map(|r| format!("{} ({:.2e})", r.check_id, r.residual))
        .collect();
    let worst = records.iter().map(|r| r.residual).fold(0.0, f64::max);
    if bad.is_empty() {
        outcome(true, format!("{} records, worst residual {worst:.2e} < {bound:.0e}", records.len()))
    } else {
        outcome(false, format!("failing: {}", bad.join(", ")))
    }
}

fn with_prefix(records: &[ResidualRecord], prefixes: &[&str]) -> Vec<ResidualRecord> {
    records.iter().filter(|r| prefixes.iter().any(|p| r.check_id.starts_with(p))).cloned().collect()
}

fn local_identities() -> Outcome {
    records_below(&verify::check_local(&default(2), SAMPLES), 1e-10)
}

fn degeneration_ranks() -> Outcome {
    let p = default(2);
    let mut o = records_below(&verify::check_degenerations(&p), 1e-8);
    let ops = LocalOps::new(p.eta, p.left, p.right);
    let eta = p.eta;
    let cases: [(&str, CMat, usize); 7] = [
        ("R(8η)", ops.r_vector(eta * 8.0).matrix, 1),
        ("R(4η)", ops.r_vector(eta * 4.0).matrix, 16),
        ("R(−4η)", ops.r_vector(eta * -4.0).matrix, 20),
        ("R(−8η)", ops.r_vector(eta * -8.0).matrix, 35),
        ("R⁺(6η)", ops.r_fused(Sign::Plus, eta * 6.0).matrix, 4),
        ("R⁻(6η)", ops.r_fused(Sign::Minus, eta * 6.0).matrix, 4),
        ("R̃(4η)", ops.r_spinorial(eta * 4.0).matrix, 6),
    ];
    let mut ranks = Vec::new();
    for (name, m, expected) in cases {
        match la::numerical_rank(&m, RANK_TOL) {
            Ok(r) => {
                ranks.push(format!("{name}:{r}"));
                if r != expected {
                    o.ok = false;
                    o.detail.push_str(&format!("; rank {name} = {r}, expected {expected}"));
                }
            }
            Err(e) => {
                o.ok = false;
                o.detail.push_str(&format!("; rank {name} failed: {e}"));
            }
        }
    }
    o.detail.push_str(&format!("; ranks {}", ranks.join(" ")));
    o
}

fn fusion_identities() -> Outcome {
    let p = default(2);
    let mut records = verify::check_fusion_r(&p, SAMPLES);
    records.extend(verify::check_fusion_k(&p, SAMPLES));
    records_below(&with_prefix(&records, &["FUSE."]), 1e-9)
}

/// Two-site parameters with inhomogeneities drawn from the seeded generator.
fn random_two_site() -> ValidatedParams {
    let base = ModelParams::default_profile(2);
    let mut rng = rng_from_seed(base.rng_seed);
    loop {
        let mut p = base.clone();
        for t in p.theta.iter_mut() {
            *t = C64::new(rng.random_range(-0.6..0.6), rng.random_range(-0.2..0.2));
        }
        if let Ok(v) = validate(&p) {
            return v;
        }
    }
}

fn transfer_identities() -> Outcome {
    let records = verify::check_transfer(&random_two_site());
    let strict = with_prefix(&records, &["COMM.", "CROSS.t", "CROSS.fused_link"]);
    let loose = with_prefix(&records, &["QDET", "FUSE.T."]);
    let a = records_below(&strict, 1e-9);
    let b = records_below(&loose, 1e-8);
    outcome(a.ok && b.ok, format!("commutativity/crossing: {}; determinant/fusion: {}", a.detail, b.detail))
}

fn spectral_relations() -> Outcome {
    let p = default(1);
    let grid = SpectralGrid::standard(&p, spectra::DEFAULT_GRID_POINTS, spectra::DEFAULT_UMAX);
    let family = match spectra::diagonalize_family(&p, &grid) {
        Ok(f) => f,
        Err(e) => return outcome(false, format!("diagonalization failed: {e}")),
    };
    if family.n_states() != 6 {
        return outcome(false, format!("{} states, expected 6", family.n_states()));
    }
    let records = spectra::check_eigen_relations(&family);
    let failed: Vec<_> =
        records.iter().filter(|r| !r.passed).map(|r| format!("{}[{:?}]", r.check_id, r.state)).collect();
    if failed.is_empty() {
        outcome(true, format!("6 states, {} per-state records passed", records.len()))
    } else {
        outcome(false, format!("failing: {}", failed.join(", ")))
    }
}

fn bethe_cross_validation() -> Outcome {
    let p = default(1);
    let hom = match p.homogeneous() {
        Ok(h) => h,
        Err(e) => return outcome(false, e.to_string()),
    };
    let grid = |q: &ValidatedParams| SpectralGrid::standard(q, spectra::DEFAULT_GRID_POINTS, spectra::DEFAULT_UMAX);
    let (family, hom_family) =
        match (spectra::diagonalize_family(&p, &grid(&p)), spectra::diagonalize_family(&hom, &grid(&hom))) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(e), _) | (_, Err(e)) => return outcome(false, format!("diagonalization failed: {e}")),
        };
    let mut ok = true;
    let mut notes = Vec::new();
    for sector in [[1, 0, 0], [2, 1, 0], [2, 0, 1]] {
        let rep = match spectra::solve_bae(sector[0], sector[1], sector[2], &p, 64) {
            Ok(r) => r,
            Err(e) => {
                ok = false;
                notes.push(format!("{sector:?}: {e}"));
                continue;
            }
        };
        let matching = spectra::match_tq_to_spectrum(&family, &rep.states);
        let mut verified = 0;
        let mut homogeneous = 0;
        for (s, m) in rep.states.iter().zip(&matching.matches) {
            let Some(row) = m.row else { continue };
            let bae = spectra::max_bae_residual(s, &p).is_ok_and(|r| r < 1e-9);
            let two_route = match (spectra::log_derivative_tq(s, &p), spectra::log_derivative_spectral(&family, row)) {
                (Ok(a), Ok(b)) => (a.value - b.value).norm() < 1e-5,
                _ => false,
            };
            if m.deviation < 1e-6 && bae && two_route {
                verified += 1;
            }
            // Energies proper live on the homogeneous chain; states whose roots
            // degenerate on the way there are counted but not required.
            let hom_energy = (|| -> qd3::Result<bool> {
                let h = spectra::continue_state(s, &p, &hom)?;
                let hm = spectra::match_tq_to_spectrum(&hom_family, std::slice::from_ref(&h));
                let Some(row) = hm.matches[0].row else { return Ok(false) };
                let a = spectra::energy_tq(&h, &hom)?;
                let b = spectra::energy_spectral(&hom_family, row)?;
                Ok(hm.matches[0].deviation < 1e-6 && (a.value - b.value).norm() < 1e-5)
            })();
            if hom_energy.unwrap_or(false) {
                homogeneous += 1;
            }
        }
        notes.push(format!(
            "{sector:?}: {verified}/{} states verified, {homogeneous} with agreeing homogeneous energy",
            rep.states.len()
        ));
        ok &= verified >= 1;
    }
    ok &= notes.iter().any(|n| !n.contains(" 0 with agreeing"));
    outcome(ok, notes.join("; "))
}

fn hamiltonian_consistency() -> Outcome {
    let p = match default(2).homogeneous() {
        Ok(h) => h,
        Err(e) => return outcome(false, e.to_string()),
    };
    let chain = match Chain::new(&p) {
        Ok(c) => c,
        Err(e) => return outcome(false, e.to_string()),
    };
    let h = match chain.hamiltonian(qd3::chain::FD_STEP) {
        Ok(h) => h.op.matrix,
        Err(e) => return outcome(false, e.to_string()),
    };
    let mut rng = rng_from_seed(p.rng_seed ^ 0x7);
    let mut comm: f64 = 0.0;
    for _ in 0..3 {
        let u = C64::new(rng.random_range(-0.8..0.8), rng.random_range(-0.4..0.4));
        match chain.transfer(u) {
            Ok(t) => comm = comm.max(la::max_commutator(&[&h, &t.matrix])),
            Err(e) => return outcome(false, e.to_string()),
        }
    }
    let grid = SpectralGrid::standard(&p, spectra::DEFAULT_GRID_POINTS, spectra::DEFAULT_UMAX);
    let family = match spectra::diagonalize_family(&p, &grid) {
        Ok(f) => f,
        Err(e) => return outcome(false, format!("diagonalization failed: {e}")),
    };
    let (vals, off) = match spectra::hamiltonian_eigenvalues(&family) {
        Ok(v) => v,
        Err(e) => return outcome(false, e.to_string()),
    };
    let mut dev: f64 = 0.0;
    for (row, v) in vals.iter().enumerate() {
        match spectra::energy_spectral(&family, row) {
            Ok(e) => dev = dev.max((v - 0.5 * e.value).norm()),
            Err(e) => return outcome(false, format!("row {row}: {e}")),
        }
    }
    outcome(
        comm < 1e-7 && dev < 1e-5 && off < 1e-6,
        format!(
            "[H,t] {comm:.2e} < 1e-7; |h − ½E| {dev:.2e} < 1e-5 over {} states; off-diagonal {off:.2e}",
            vals.len()
        ),
    )
}

fn determinism() -> Outcome {
    let dir = std::env::temp_dir().join(format!("qd3-acceptance-{}", std::process::id()));
    if let Err(e) = std::fs::create_dir_all(&dir) {
        return outcome(false, e.to_string());
    }
    let runs: [&[&str]; 3] = [
        &["verify", "--sites", "2"],
        &["spectrum", "--sites", "1"],
        &["bae", "--sites", "1", "--l1", "2", "--l2", "1", "--l3", "0"],
    ];
    let mut ok = true;
    let mut notes = Vec::new();
    for args in runs {
        let mut bytes = Vec::new();
        for k in 0..2 {
            let out = dir.join(format!("{}-{k}.json", args[0]));
            let status = Command::new(env!("CARGO_BIN_EXE_qd3"))
                .args(args)
                .args(["--seed", "20240917", "--out", out.to_str().unwrap()])
                .env_remove("QD3_SEED")
                .status();
            match (status, std::fs::read(&out)) {
                (Ok(s), Ok(b)) if s.success() => bytes.push(b),
                (s, b) => {
                    ok = false;
                    notes.push(format!("{}: run failed ({:?}, {:?})", args[0], s.map(|s| s.code()), b.err()));
                }
            }
        }
        if bytes.len() == 2 {
            let same = bytes[0] == bytes[1];
            ok &= same;
            notes.push(format!("{}: {} bytes {}", args[0], bytes[0].len(), if same { "identical" } else { "DIFFER" }));
        }
    }
    let _ = std::fs::remove_dir_all(&dir);
    outcome(ok, notes.join("; "))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("1 local identity suite", local_identities, Some(Duration::from_secs(10))),
        ("2 degeneration ranks", degeneration_ranks, Some(Duration::from_secs(5))),
        ("3 fusion suite", fusion_identities, Some(Duration::from_secs(30))),
        ("4 transfer suite (N=2, random θ)", transfer_identities, Some(Duration::from_secs(120))),
        ("5 spectral suite (N=1)", spectral_relations, Some(Duration::from_secs(60))),
        ("6 T-Q cross-validation (N=1)", bethe_cross_validation, Some(Duration::from_secs(300))),
        ("7 Hamiltonian consistency (N=2 homogeneous)", hamiltonian_consistency, None),
        ("8 determinism", determinism, None),
    ];
    let mut failures = 0;
    for (name, run, budget) in criteria {
        let start = Instant::now();
        let mut o = run();
        let elapsed = start.elapsed();
        if let Some(b) = budget {
            if elapsed > b {
                o.ok = false;
                o.detail.push_str(&format!("; over the {:.0} s budget", b.as_secs_f64()));
            }
        }
        if !o.ok {
            failures += 1;
        }
        println!(
            "{} criterion {name} [{:.2} s]: {}",
            if o.ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            o.detail
        );
    }
    println!("acceptance: {} of 8 criteria passed", 8 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
