//! Command-line front end.
//!
//! Three subcommands share one JSON-in/JSON-out shape:
//!
//! - `verify` runs the identity catalog for a scope;
//! - `spectrum` diagonalizes the commuting transfer family and checks the
//!   eigenvalue relations;
//! - `bae` solves one sector of Bethe equations, matches the solutions to the
//!   diagonalized spectrum and reports energies.
//!
//! Every run writes a [`RunReport`] (schema [`SCHEMA`]) to `--out` or stdout.
//! Reports contain no wall-clock data unless `--timings` is given, so two
//! runs with the same configuration and seed produce identical bytes.
//!
//! Exit status: [`EXIT_PASS`] when every record passed, [`EXIT_FAIL`] on a
//! check failure, [`EXIT_USAGE`] on a usage or configuration error.

use crate::params::{self, validate, Config, ModelParams, ValidatedParams};
use crate::spectra::{
    self, check_counting, check_eigen_relations, continue_state, diagonalize_family, energy_spectral, energy_tq,
    hamiltonian_eigenvalues, log_derivative_spectral, log_derivative_tq, match_tq_to_spectrum, solve_bae,
    BaeSolveReport, BetheState, EnergyEstimate, MatchingReport, SpectralFamily, SpectralGrid,
};
use crate::verify::{all_passed, ResidualRecord, Scope};
use crate::{Error, Result, C64};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

/// Report schema identifier.
pub const SCHEMA: &str = "qd3/1";
/// Every record passed.
pub const EXIT_PASS: i32 = 0;
/// At least one check failed.
pub const EXIT_FAIL: i32 = 1;
/// Usage or configuration error.
pub const EXIT_USAGE: i32 = 2;
/// Environment variable overriding the configuration seed.
pub const SEED_ENV: &str = "QD3_SEED";
/// Below this many starts an empty Bethe solve is not a failure.
pub const MIN_STARTS_FOR_FAILURE: usize = 32;

#[derive(Parser, Debug)]
#[command(name = "qd3", version, about = "Numerical workbench for the q-deformed D3(1) open vertex model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the identity catalog.
    Verify {
        #[command(flatten)]
        common: CommonArgs,
        /// Catalog scope: local, fusion, transfer or all.
        #[arg(long, default_value = "all")]
        scope: String,
        /// Random sample points per sampled identity.
        #[arg(long, default_value_t = 10)]
        samples: usize,
    },
    /// Diagonalize the transfer family and check the eigenvalue relations.
    Spectrum {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        grid: GridArgs,
        /// Also write the eigenvalue curves as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Solve one sector of Bethe equations and match it to the spectrum.
    Bae {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        grid: GridArgs,
        /// Number of first-level roots L₁.
        #[arg(long)]
        l1: usize,
        /// Number of second-level roots L₂.
        #[arg(long)]
        l2: usize,
        /// Number of third-level roots L₃.
        #[arg(long)]
        l3: usize,
        /// Random Newton starts.
        #[arg(long, default_value_t = 64)]
        starts: usize,
    },
}

#[derive(Args, Debug)]
struct CommonArgs {
    /// JSON configuration; the default profile is used when absent.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Number of sites for the default profile (ignored with --config).
    #[arg(long, default_value_t = 1)]
    sites: usize,
    /// Report destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed overriding both the configuration and the environment.
    #[arg(long)]
    seed: Option<u64>,
    /// Record wall-clock time per phase (makes reports non-reproducible).
    #[arg(long)]
    timings: bool,
}

#[derive(Args, Debug)]
struct GridArgs {
    /// Generic sample points on the u-plane rectangle.
    #[arg(long, default_value_t = spectra::DEFAULT_GRID_POINTS)]
    grid_points: usize,
    /// Largest |u| on the real axis for asymptotic checks.
    #[arg(long, default_value_t = spectra::DEFAULT_UMAX)]
    umax: f64,
}

/// Wall-clock time of one phase.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseTiming {
    /// Phase name.
    pub phase: String,
    /// Elapsed seconds.
    pub seconds: f64,
}

/// Summary of a diagonalized family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSummary {
    /// Number of eigenstates.
    pub n_states: usize,
    /// Number of generic grid points (they come first in `u_grid`).
    pub n_generic: usize,
    /// Sample points as `[re, im]`.
    pub u_grid: Vec<[f64; 2]>,
    /// Condition number of the common eigenbasis.
    pub basis_condition: f64,
    /// Largest relative off-diagonal remainder over the grid.
    pub eigen_residual: f64,
    /// `lambda[i][k]` = Λᵢ(u_k) as `[re, im]`.
    pub lambda: Vec<Vec<[f64; 2]>>,
    /// `lambda_plus[i][k]` = Λ₊ᵢ(u_k) as `[re, im]`.
    pub lambda_plus: Vec<Vec<[f64; 2]>>,
    /// Realized (lowest, highest) power of e^{u/2} per state, if measured.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub laurent_support: Option<Vec<(i64, i64)>>,
}

/// Energy of a Bethe state continued to the homogeneous chain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HomogeneousEnergy {
    /// E = d ln Λ/du at 0 from the T-Q relation.
    pub tq: EnergyEstimate,
    /// Matched row of the homogeneous family.
    pub row: Option<usize>,
    /// Same derivative from the diagonalized curve of that row.
    pub spectral: Option<EnergyEstimate>,
    /// Eigenvalue of H = ½ t′(0) t(0)⁻¹ for that row (equals half the energy).
    #[serde(with = "params::complex_pair::option")]
    pub hamiltonian: Option<C64>,
}

/// Log-derivatives at u = 0 of one Bethe state by every available route.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateEnergy {
    /// Index into the report's Bethe states.
    pub state: usize,
    /// d ln Λ/du at 0 from the T-Q relation on the configured chain.
    pub log_derivative_tq: Option<EnergyEstimate>,
    /// Same derivative from the matched diagonalized curve on the configured chain.
    pub log_derivative_spectral: Option<EnergyEstimate>,
    /// Energies after continuing the state to θ = 0; absent when the roots
    /// have no regular counterpart there.
    pub homogeneous: Option<HomogeneousEnergy>,
}

/// Bethe-solver section of a report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetheSection {
    /// Solver outcome, including the states.
    pub solve: BaeSolveReport,
    /// State-to-row matching on the configured chain.
    pub matching: Option<MatchingReport>,
    /// Log-derivatives at u = 0 and homogeneous energies, one entry per state.
    pub energies: Vec<StateEnergy>,
}

/// Machine-readable outcome of one command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    /// Always [`SCHEMA`].
    pub schema: String,
    /// Crate version that produced the report.
    pub version: String,
    /// Subcommand name.
    pub command: String,
    /// Effective seed.
    pub seed: u64,
    /// Effective configuration (seed included).
    pub config: Config,
    /// Identity-check records, in catalog order.
    pub records: Vec<ResidualRecord>,
    /// Whether every record passed (and, for `bae`, whether states were found).
    pub passed: bool,
    /// Spectral summary (`spectrum`, `bae`).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<SpectrumSummary>,
    /// Bethe-solver section (`bae`).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bethe: Option<BetheSection>,
    /// Non-fatal notes.
    pub diagnostics: Vec<String>,
    /// Wall-clock time per phase (only with `--timings`).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<Vec<PhaseTiming>>,
}

impl RunReport {
    fn new(command: &str, params: &ModelParams) -> Self {
        Self {
            schema: SCHEMA.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            seed: params.rng_seed,
            config: Config::from_params(params),
            records: Vec::new(),
            passed: true,
            spectrum: None,
            bethe: None,
            diagnostics: Vec::new(),
            timings: None,
        }
    }

    /// Serializes to pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report is always serializable");
        s.push('\n');
        s
    }

    /// Exit status implied by the report.
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            EXIT_PASS
        } else {
            EXIT_FAIL
        }
    }
}

/// Collects phase timings when enabled.
struct Clock {
    enabled: bool,
    phases: Vec<PhaseTiming>,
}

impl Clock {
    fn time<T>(&mut self, phase: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        if self.enabled {
            self.phases.push(PhaseTiming { phase: phase.into(), seconds: start.elapsed().as_secs_f64() });
        }
        out
    }

    fn finish(self) -> Option<Vec<PhaseTiming>> {
        self.enabled.then_some(self.phases)
    }
}

/// Loads parameters from a config file (or the default profile) and applies
/// the seed precedence: `--seed`, then `QD3_SEED`, then the file.
pub fn load_params(config: Option<&Path>, sites: usize, seed: Option<u64>) -> Result<ValidatedParams> {
    let mut p = match config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
            Config::from_json(&text)?.to_params()?
        }
        None => ModelParams::default_profile(sites),
    };
    if let Ok(v) = std::env::var(SEED_ENV) {
        p.rng_seed =
            v.trim().parse().map_err(|_| Error::Config(format!("{SEED_ENV}={v:?} is not an unsigned integer")))?;
    }
    if let Some(s) = seed {
        p.rng_seed = s;
    }
    validate(&p).map_err(Error::InvalidParams)
}

/// Runs the identity catalog for `scope`.
pub fn cmd_verify(params: &ValidatedParams, scope: Scope, n_samples: usize) -> RunReport {
    let mut report = RunReport::new("verify", params);
    report.records = crate::verify::run_suite(params, scope, n_samples);
    report.passed = all_passed(&report.records);
    report
}

fn summarize(family: &SpectralFamily, laurent: bool, diagnostics: &mut Vec<String>) -> SpectrumSummary {
    let pairs = |rows: &[Vec<C64>]| rows.iter().map(|r| r.iter().map(|z| [z.re, z.im]).collect()).collect();
    let laurent_support = if laurent {
        match family.laurent_support() {
            Ok(s) => Some(s),
            Err(e) => {
                diagnostics.push(format!("Laurent support not measured: {e}"));
                None
            }
        }
    } else {
        None
    };
    SpectrumSummary {
        n_states: family.n_states(),
        n_generic: family.u_grid.n_generic,
        u_grid: family.u_grid.points.iter().map(|z| [z.re, z.im]).collect(),
        basis_condition: family.basis_condition,
        eigen_residual: family.eigen_residual,
        lambda: pairs(&family.lambda),
        lambda_plus: pairs(&family.lambda_plus),
        laurent_support,
    }
}

/// Diagonalizes the family on the standard grid and checks every eigenvalue
/// relation. Returns the family too, e.g. for CSV export.
pub fn cmd_spectrum(params: &ValidatedParams, grid_points: usize, u_max: f64) -> Result<(RunReport, SpectralFamily)> {
    cmd_spectrum_timed(params, grid_points, u_max, &mut Clock { enabled: false, phases: Vec::new() })
}

fn cmd_spectrum_timed(
    params: &ValidatedParams,
    grid_points: usize,
    u_max: f64,
    clock: &mut Clock,
) -> Result<(RunReport, SpectralFamily)> {
    let mut report = RunReport::new("spectrum", params);
    let grid = SpectralGrid::standard(params, grid_points, u_max);
    let family = clock.time("diagonalize", || diagonalize_family(params, &grid))?;
    report.records = clock.time("relations", || check_eigen_relations(&family));
    report.spectrum = Some(clock.time("summary", || summarize(&family, true, &mut report.diagnostics)));
    report.passed = all_passed(&report.records);
    Ok((report, family))
}

/// Log-derivatives at u = 0 of `states` (solved on `params`) on the
/// configured chain, and energies after continuation to the homogeneous chain.
fn energies(
    states: &[BetheState],
    params: &ValidatedParams,
    family: Option<(&SpectralFamily, &MatchingReport)>,
    grid: &SpectralGrid,
    diagnostics: &mut Vec<String>,
) -> Result<Vec<StateEnergy>> {
    let mut note = |i: usize, what: &str, e: Error| diagnostics.push(format!("state {i}: {what}: {e}"));
    let hom = params.homogeneous()?;
    let hom_family = if hom.n_sites <= spectra::MAX_SPECTRAL_SITES && !states.is_empty() {
        Some(diagonalize_family(&hom, &SpectralGrid::standard(&hom, grid.n_generic, grid.u_max))?)
    } else {
        None
    };
    let h = hom_family.as_ref().map(hamiltonian_eigenvalues).transpose()?;
    let mut out = Vec::new();
    for (i, s) in states.iter().enumerate() {
        let log_derivative_tq =
            log_derivative_tq(s, params).map_err(|e| note(i, "T-Q log-derivative unavailable", e)).ok();
        let log_derivative_spectral = family.and_then(|(f, m)| m.matches[i].row.map(|r| (f, r))).and_then(|(f, r)| {
            log_derivative_spectral(f, r).map_err(|e| note(i, "spectral log-derivative unavailable", e)).ok()
        });
        let homogeneous = match continue_state(s, params, &hom) {
            Err(e) => {
                note(i, "no regular counterpart on the homogeneous chain", e);
                None
            }
            Ok(hs) => match energy_tq(&hs, &hom) {
                Err(e) => {
                    note(i, "homogeneous T-Q energy unavailable", e);
                    None
                }
                Ok(tq) => {
                    let row = hom_family
                        .as_ref()
                        .and_then(|f| match_tq_to_spectrum(f, std::slice::from_ref(&hs)).matches[0].row);
                    let spectral = match (&hom_family, row) {
                        (Some(f), Some(r)) => Some(energy_spectral(f, r)?),
                        _ => None,
                    };
                    let hamiltonian = match (&h, row) {
                        (Some((vals, _)), Some(r)) => Some(vals[r]),
                        _ => None,
                    };
                    Some(HomogeneousEnergy { tq, row, spectral, hamiltonian })
                }
            },
        };
        out.push(StateEnergy { state: i, log_derivative_tq, log_derivative_spectral, homogeneous });
    }
    Ok(out)
}

/// Solves one sector, matches the states to the spectrum and reports energies.
pub fn cmd_bae(
    params: &ValidatedParams,
    sector: [usize; 3],
    n_starts: usize,
    grid_points: usize,
    u_max: f64,
) -> Result<RunReport> {
    cmd_bae_timed(params, sector, n_starts, grid_points, u_max, &mut Clock { enabled: false, phases: Vec::new() })
}

fn cmd_bae_timed(
    params: &ValidatedParams,
    [l1, l2, l3]: [usize; 3],
    n_starts: usize,
    grid_points: usize,
    u_max: f64,
    clock: &mut Clock,
) -> Result<RunReport> {
    check_counting(l1, l2, l3, params.n_sites)?;
    let mut report = RunReport::new("bae", params);
    let solve = clock.time("solve", || solve_bae(l1, l2, l3, params, n_starts))?;
    let grid = SpectralGrid::standard(params, grid_points, u_max);
    let mut matching = None;
    let mut family = None;
    if params.n_sites <= spectra::MAX_SPECTRAL_SITES {
        let f = clock.time("diagonalize", || diagonalize_family(params, &grid))?;
        matching = Some(match_tq_to_spectrum(&f, &solve.states));
        report.spectrum = Some(summarize(&f, false, &mut report.diagnostics));
        family = Some(f);
    } else {
        report.diagnostics.push(format!(
            "chain longer than {} sites: states are not matched to a diagonalized spectrum",
            spectra::MAX_SPECTRAL_SITES
        ));
    }
    let fm = family.as_ref().zip(matching.as_ref());
    let energies = clock.time("energies", || energies(&solve.states, params, fm, &grid, &mut report.diagnostics))?;
    report.passed = !(solve.states.is_empty() && n_starts >= MIN_STARTS_FOR_FAILURE);
    if solve.states.is_empty() && n_starts < MIN_STARTS_FOR_FAILURE {
        report
            .diagnostics
            .push(format!("no states found with {n_starts} starts (below {MIN_STARTS_FOR_FAILURE}: not a failure)"));
    }
    report.bethe = Some(BetheSection { solve, matching, energies });
    Ok(report)
}

fn write_report(report: &RunReport, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, report.to_json())?,
        None => print!("{}", report.to_json()),
    }
    Ok(())
}

fn execute(command: Command) -> Result<i32> {
    let (common, report) = match command {
        Command::Verify { common, scope, samples } => {
            let scope: Scope = scope.parse()?;
            let params = load_params(common.config.as_deref(), common.sites, common.seed)?;
            let mut clock = Clock { enabled: common.timings, phases: Vec::new() };
            let mut report = clock.time("verify", || cmd_verify(&params, scope, samples));
            report.timings = clock.finish();
            (common, report)
        }
        Command::Spectrum { common, grid, csv } => {
            let params = load_params(common.config.as_deref(), common.sites, common.seed)?;
            let mut clock = Clock { enabled: common.timings, phases: Vec::new() };
            let (mut report, family) = cmd_spectrum_timed(&params, grid.grid_points, grid.umax, &mut clock)?;
            if let Some(path) = csv {
                std::fs::write(path, family.to_csv()?)?;
            }
            report.timings = clock.finish();
            (common, report)
        }
        Command::Bae { common, grid, l1, l2, l3, starts } => {
            let params = load_params(common.config.as_deref(), common.sites, common.seed)?;
            let mut clock = Clock { enabled: common.timings, phases: Vec::new() };
            let mut report = cmd_bae_timed(&params, [l1, l2, l3], starts, grid.grid_points, grid.umax, &mut clock)?;
            report.timings = clock.finish();
            (common, report)
        }
    };
    write_report(&report, common.out.as_deref())?;
    if !report.passed {
        eprintln!(
            "qd3: {} failed ({} of {} records failed)",
            report.command,
            report.records.iter().filter(|r| !r.passed).count(),
            report.records.len()
        );
    }
    Ok(report.exit_code())
}

/// Parses `args` (program name first) and runs the command.
///
/// Errors are printed to stderr and mapped to [`EXIT_USAGE`]; `--help` and
/// `--version` return [`EXIT_PASS`].
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("qd3: {e}");
            EXIT_USAGE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn default(n: usize) -> ValidatedParams {
        validate(&ModelParams::default_profile(n)).unwrap()
    }

    #[test]
    fn verify_report_has_schema_and_catalog_ids() {
        let r = cmd_verify(&default(1), Scope::Local, 2);
        assert_eq!(r.schema, SCHEMA);
        assert!(!r.records.is_empty());
        assert!(r.records.iter().all(|x| crate::verify::catalog_entry(&x.check_id).is_some()));
        assert_eq!(r.exit_code(), if r.passed { EXIT_PASS } else { EXIT_FAIL });
        let back: RunReport = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn long_chain_spectrum_is_refused() {
        assert!(matches!(cmd_spectrum(&default(4), 4, 40.0), Err(Error::Config(_))));
    }

    #[test]
    fn counting_violation_is_an_error() {
        assert!(matches!(cmd_bae(&default(1), [2, 0, 0], 4, 8, 40.0), Err(Error::CountingRule(_))));
    }

    #[test]
    fn few_starts_without_states_still_pass() {
        let r = cmd_bae(&default(1), [1, 0, 0], 0, 8, 40.0).unwrap();
        assert!(r.passed);
        assert!(r.bethe.unwrap().solve.states.is_empty());
    }

    #[test]
    fn unknown_subcommand_is_a_usage_error() {
        assert_eq!(run(["qd3", "frobnicate"]), EXIT_USAGE);
        assert_eq!(run(["qd3", "verify", "--scope", "everything"]), EXIT_USAGE);
        assert_eq!(run(["qd3", "--help"]), EXIT_PASS);
    }

    #[test]
    fn missing_config_file_is_a_usage_error() {
        assert_eq!(run(["qd3", "verify", "--config", "/nonexistent/qd3.json"]), EXIT_USAGE);
    }
}
