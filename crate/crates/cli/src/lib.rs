//! Configuration-driven experiment harness.
//!
//! Scenarios run against both generators (Redfield and weak-coupling) and
//! write CSV files, a run manifest (key = value lines) and a matplotlib
//! script next to them. Outputs are byte-deterministic for a fixed config
//! and seed: floats are printed with 17 significant digits, sampling is
//! seeded, and parallel sweep results are merged in grid order.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Deserialize;
use thiserror::Error;

use oqs_core::bath::bath_correlation;
use oqs_core::dynamics::trajectory;
use oqs_core::generators::{build_redfield, build_weak_coupling, stationary_bloch, BlochGenerator};
use oqs_core::thermo::{entropy_production_bloch, gibbs_state, heat_flux, parameter_sweep};
use oqs_core::{BlochVector, FrequencyConvention, ModelParams, SpectralModel, UnitMode};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Exit statuses of the binary.
pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    /// Invalid configuration: maps to exit status 2.
    #[error("config error: {0}")]
    Config(String),
    /// Numerical failure inside the core: maps to exit status 3.
    #[error("numerical error: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Numerical(_) => EXIT_NUMERICAL,
            CliError::Io(_) => EXIT_NUMERICAL,
        }
    }
}

fn numerical<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Numerical(e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    Fig1Scan,
    Timeseries,
    Sweep,
    TabulateBath,
    SnapshotGenerators,
}

impl Scenario {
    pub fn parse(name: &str) -> Result<Scenario, CliError> {
        match name {
            "fig1_scan" => Ok(Scenario::Fig1Scan),
            "timeseries" => Ok(Scenario::Timeseries),
            "sweep" => Ok(Scenario::Sweep),
            "tabulate_bath" => Ok(Scenario::TabulateBath),
            "snapshot_generators" => Ok(Scenario::SnapshotGenerators),
            other => Err(CliError::Config(format!(
                "unknown scenario `{other}` (expected fig1_scan | timeseries | sweep | tabulate_bath | snapshot_generators)"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Scenario::Fig1Scan => "fig1_scan",
            Scenario::Timeseries => "timeseries",
            Scenario::Sweep => "sweep",
            Scenario::TabulateBath => "tabulate_bath",
            Scenario::SnapshotGenerators => "snapshot_generators",
        }
    }
}

// --------------------------------------------------------------------------
// Config file schema (TOML subset)
// --------------------------------------------------------------------------

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub scenario: Option<String>,
    pub seed: Option<u64>,
    pub output_dir: Option<String>,
    #[serde(default)]
    pub params: ConfigParams,
    #[serde(default)]
    pub grid: ConfigGrid,
    #[serde(default)]
    pub timeseries: ConfigTimeseries,
    #[serde(default)]
    pub sweep: ConfigSweep,
    #[serde(default)]
    pub bath: ConfigBath,
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ConfigParams {
    pub delta: Option<f64>,
    pub omega_drive: Option<f64>,
    pub lambda: Option<f64>,
    pub temperature: Option<f64>,
    pub omega_cutoff: Option<f64>,
    pub unit_mode: Option<String>,
    pub frequency_convention: Option<String>,
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ConfigGrid {
    pub n_points: Option<usize>,
    pub t_max: Option<f64>,
    pub dt: Option<f64>,
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ConfigTimeseries {
    pub initial_state: Option<[f64; 4]>,
    /// Reference for σ: "stationary" (default) or "gibbs".
    pub reference: Option<String>,
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ConfigSweep {
    pub temperatures: Option<Vec<f64>>,
    pub ratios: Option<Vec<f64>>,
    pub n_states: Option<usize>,
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ConfigBath {
    pub u_max: Option<f64>,
    pub n_samples: Option<usize>,
}

/// Flag-style overrides; mirror the config keys.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub scenario: Option<String>,
    pub seed: Option<u64>,
    pub output_dir: Option<String>,
    pub t_max: Option<f64>,
    pub dt: Option<f64>,
    pub n_points: Option<usize>,
    pub n_states: Option<usize>,
}

/// Which reference state the σ columns use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SigmaReference {
    Stationary,
    Gibbs,
}

/// Fully resolved experiment description.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub params: ModelParams,
    pub initial_state: Option<BlochVector>,
    pub n_points: usize,
    pub t_max: Option<f64>,
    pub dt: Option<f64>,
    pub sweep_temperatures: Vec<f64>,
    pub sweep_ratios: Vec<f64>,
    pub sweep_states: usize,
    pub bath_u_max: f64,
    pub bath_samples: usize,
    pub reference: SigmaReference,
    pub seed: u64,
    pub output_dir: PathBuf,
}

/// The reference parameter set: λ = 0.005, T = 0.006 K, Δ = 8 GHz
/// (angular), ω_c/Δ = 10³, Ω/Δ = 2.
pub fn default_config() -> ExperimentConfig {
    ExperimentConfig {
        scenario: Scenario::Timeseries,
        params: ModelParams {
            delta: 8.0,
            omega_drive: 16.0,
            lambda_coupling: 0.005,
            temperature: 0.006,
            omega_cutoff: 8000.0,
            unit_mode: UnitMode::Physical,
            frequency_convention: FrequencyConvention::Angular,
        },
        initial_state: Some(BlochVector::new(0.0, -0.894, -0.447)),
        n_points: 101,
        t_max: None,
        dt: None,
        sweep_temperatures: vec![0.0006, 0.006, 0.06],
        sweep_ratios: vec![0.1, 1.0, 2.0, 10.0],
        sweep_states: 2000,
        bath_u_max: 2.0,
        bath_samples: 400,
        reference: SigmaReference::Stationary,
        seed: 42,
        output_dir: PathBuf::from("oqs-out"),
    }
}

/// Default config serialized as a config file (TOML subset).
pub fn default_config_text() -> String {
    let c = default_config();
    let mut s = String::new();
    let _ = writeln!(s, "scenario = \"{}\"", c.scenario.name());
    let _ = writeln!(s, "seed = {}", c.seed);
    let _ = writeln!(s, "output_dir = \"{}\"", c.output_dir.display());
    let _ = writeln!(s);
    let _ = writeln!(s, "[params]");
    let _ = writeln!(s, "delta = {}            # GHz (physical mode)", c.params.delta);
    let _ = writeln!(s, "omega_drive = {}     # GHz; Ω/Δ = 2", c.params.omega_drive);
    let _ = writeln!(s, "lambda = {}", c.params.lambda_coupling);
    let _ = writeln!(s, "temperature = {}  # kelvin", c.params.temperature);
    let _ = writeln!(s, "omega_cutoff = {} # GHz; ω_c/Δ = 1000", c.params.omega_cutoff);
    let _ = writeln!(s, "unit_mode = \"physical\"");
    let _ = writeln!(s, "frequency_convention = \"angular\"");
    let _ = writeln!(s);
    let _ = writeln!(s, "[grid]");
    let _ = writeln!(s, "n_points = {}   # fig1_scan grid side", c.n_points);
    let _ = writeln!(s, "# t_max / dt default to 20 effective periods at 64 samples per period");
    let _ = writeln!(s);
    let _ = writeln!(s, "[timeseries]");
    let _ = writeln!(s, "initial_state = [1.0, 0.0, -0.894, -0.447]");
    let _ = writeln!(s, "reference = \"stationary\"  # or \"gibbs\"");
    let _ = writeln!(s);
    let _ = writeln!(s, "[sweep]");
    let _ = writeln!(s, "temperatures = [0.0006, 0.006, 0.06]");
    let _ = writeln!(s, "ratios = [0.1, 1.0, 2.0, 10.0]");
    let _ = writeln!(s, "n_states = {}", c.sweep_states);
    let _ = writeln!(s);
    let _ = writeln!(s, "[bath]");
    let _ = writeln!(s, "u_max = {}", c.bath_u_max);
    let _ = writeln!(s, "n_samples = {}", c.bath_samples);
    s
}

/// Parse a config file body and apply flag overrides on top of defaults.
pub fn resolve_config(file_body: Option<&str>, overrides: &Overrides) -> Result<ExperimentConfig, CliError> {
    let file: ConfigFile = match file_body {
        Some(body) => toml::from_str(body).map_err(|e| CliError::Config(e.to_string()))?,
        None => ConfigFile::default(),
    };
    let mut cfg = default_config();

    if let Some(p) = &file.params.delta {
        cfg.params.delta = *p;
    }
    if let Some(p) = &file.params.omega_drive {
        cfg.params.omega_drive = *p;
    }
    if let Some(p) = &file.params.lambda {
        cfg.params.lambda_coupling = *p;
    }
    if let Some(p) = &file.params.temperature {
        cfg.params.temperature = *p;
    }
    if let Some(p) = &file.params.omega_cutoff {
        cfg.params.omega_cutoff = *p;
    }
    if let Some(m) = &file.params.unit_mode {
        cfg.params.unit_mode = match m.as_str() {
            "physical" => UnitMode::Physical,
            "dimensionless" | "dimensionless-in-delta" => UnitMode::DimensionlessInDelta,
            other => {
                return Err(CliError::Config(format!(
                    "params.unit_mode: unknown value `{other}` (expected \"physical\" or \"dimensionless\")"
                )))
            }
        };
    }
    if let Some(m) = &file.params.frequency_convention {
        cfg.params.frequency_convention = match m.as_str() {
            "angular" => FrequencyConvention::Angular,
            "ordinary" => FrequencyConvention::Ordinary,
            other => {
                return Err(CliError::Config(format!(
                    "params.frequency_convention: unknown value `{other}` (expected \"angular\" or \"ordinary\")"
                )))
            }
        };
    }
    if let Some(s) = &file.scenario {
        cfg.scenario = Scenario::parse(s)?;
    }
    if let Some(seed) = file.seed {
        cfg.seed = seed;
    }
    if let Some(dir) = &file.output_dir {
        cfg.output_dir = PathBuf::from(dir);
    }
    if let Some(n) = file.grid.n_points {
        cfg.n_points = n;
    }
    cfg.t_max = file.grid.t_max.or(cfg.t_max);
    cfg.dt = file.grid.dt.or(cfg.dt);
    if let Some(state) = file.timeseries.initial_state {
        cfg.initial_state = Some(BlochVector::from_array(state));
    }
    if let Some(r) = &file.timeseries.reference {
        cfg.reference = match r.as_str() {
            "stationary" => SigmaReference::Stationary,
            "gibbs" => SigmaReference::Gibbs,
            other => {
                return Err(CliError::Config(format!(
                    "timeseries.reference: unknown value `{other}` (expected \"stationary\" or \"gibbs\")"
                )))
            }
        };
    }
    if let Some(t) = &file.sweep.temperatures {
        cfg.sweep_temperatures = t.clone();
    }
    if let Some(r) = &file.sweep.ratios {
        cfg.sweep_ratios = r.clone();
    }
    if let Some(n) = file.sweep.n_states {
        cfg.sweep_states = n;
    }
    if let Some(u) = file.bath.u_max {
        cfg.bath_u_max = u;
    }
    if let Some(n) = file.bath.n_samples {
        cfg.bath_samples = n;
    }

    // flag overrides win over file values
    if let Some(s) = &overrides.scenario {
        cfg.scenario = Scenario::parse(s)?;
    }
    if let Some(seed) = overrides.seed {
        cfg.seed = seed;
    }
    if let Some(dir) = &overrides.output_dir {
        cfg.output_dir = PathBuf::from(dir);
    }
    if let Some(t) = overrides.t_max {
        cfg.t_max = Some(t);
    }
    if let Some(dt) = overrides.dt {
        cfg.dt = Some(dt);
    }
    if let Some(n) = overrides.n_points {
        cfg.n_points = n;
    }
    if let Some(n) = overrides.n_states {
        cfg.sweep_states = n;
    }

    validate(&cfg)?;
    Ok(cfg)
}

fn validate(cfg: &ExperimentConfig) -> Result<(), CliError> {
    cfg.params
        .validate()
        .map_err(|e| CliError::Config(format!("params: {e}")))?;
    if cfg.scenario == Scenario::Timeseries {
        let state = cfg
            .initial_state
            .as_ref()
            .ok_or_else(|| CliError::Config("timeseries.initial_state is required".into()))?;
        state
            .check_physical()
            .map_err(|e| CliError::Config(format!("timeseries.initial_state: {e}")))?;
    }
    if cfg.scenario == Scenario::Sweep {
        if cfg.sweep_temperatures.is_empty() || cfg.sweep_ratios.is_empty() {
            return Err(CliError::Config("sweep requires non-empty temperature and ratio lists".into()));
        }
        if cfg.sweep_states == 0 {
            return Err(CliError::Config("sweep.n_states must be >= 1".into()));
        }
    }
    if cfg.scenario == Scenario::Fig1Scan && cfg.n_points < 2 {
        return Err(CliError::Config("grid.n_points must be >= 2".into()));
    }
    if let Some(dt) = cfg.dt {
        if dt.is_nan() || dt <= 0.0 {
            return Err(CliError::Config(format!("grid.dt must be > 0, got {dt}")));
        }
    }
    if let Some(t) = cfg.t_max {
        if t.is_nan() || t <= 0.0 {
            return Err(CliError::Config(format!("grid.t_max must be > 0, got {t}")));
        }
    }
    Ok(())
}

// --------------------------------------------------------------------------
// Output helpers
// --------------------------------------------------------------------------

/// 17-significant-digit float: lossless f64 round trips for regression diffs.
fn fmt(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{x:.16e}")
    }
}

struct Csv {
    body: String,
}

impl Csv {
    fn new(header: &str) -> Csv {
        Csv { body: format!("{header}\n") }
    }
    fn row(&mut self, fields: &[String]) {
        self.body.push_str(&fields.join(","));
        self.body.push('\n');
    }
    fn write_to(&self, dir: &Path, name: &str) -> Result<(), CliError> {
        fs::write(dir.join(name), self.body.as_bytes())?;
        Ok(())
    }
}

/// Outcome of a run: file names written, for the manifest.
pub struct RunSummary {
    pub files: Vec<String>,
    pub wall_time_s: f64,
}

fn sigma_reference_state(
    g: &BlochGenerator,
    reference: SigmaReference,
) -> Result<BlochVector, CliError> {
    match reference {
        SigmaReference::Stationary => stationary_bloch(g).map_err(numerical),
        SigmaReference::Gibbs => gibbs_state(&g.params).map_err(numerical),
    }
}

fn run_fig1(cfg: &ExperimentConfig, dir: &Path) -> Result<Vec<String>, CliError> {
    let model = SpectralModel::from_params(&cfg.params).map_err(numerical)?;
    let red = build_redfield(&cfg.params, &model).map_err(numerical)?;
    let cp = build_weak_coupling(&cfg.params, &model).map_err(numerical)?;
    let ref_red = sigma_reference_state(&red, cfg.reference)?;
    let ref_cp = sigma_reference_state(&cp, cfg.reference)?;

    let n = cfg.n_points;
    let mut csv = Csv::new("r1,r2,sigma_redfield,sigma_cp");
    for i in 0..n {
        for j in 0..n {
            let r1 = -1.0 + 2.0 * i as f64 / (n - 1) as f64;
            let r2 = -1.0 + 2.0 * j as f64 / (n - 1) as f64;
            let (s_red, s_cp) = if r1 * r1 + r2 * r2 <= 1.0 {
                let state = BlochVector::new(r1, r2, 0.0);
                (
                    entropy_production_bloch(&red, &state, &ref_red).map_err(numerical)?,
                    entropy_production_bloch(&cp, &state, &ref_cp).map_err(numerical)?,
                )
            } else {
                (f64::NAN, f64::NAN)
            };
            csv.row(&[fmt(r1), fmt(r2), fmt(s_red), fmt(s_cp)]);
        }
    }
    csv.write_to(dir, "sigma_scan.csv")?;
    Ok(vec!["sigma_scan.csv".into()])
}

fn run_timeseries(cfg: &ExperimentConfig, dir: &Path) -> Result<Vec<String>, CliError> {
    let model = SpectralModel::from_params(&cfg.params).map_err(numerical)?;
    let red = build_redfield(&cfg.params, &model).map_err(numerical)?;
    let cp = build_weak_coupling(&cfg.params, &model).map_err(numerical)?;
    let ref_red = sigma_reference_state(&red, cfg.reference)?;
    let ref_cp = sigma_reference_state(&cp, cfg.reference)?;
    let r0 = cfg.initial_state.expect("validated");

    let period = red.effective_period();
    let t_max = cfg.t_max.unwrap_or(20.0 * period);
    let dt = cfg.dt.unwrap_or(period / 64.0);
    let rec_red = trajectory(&red, &r0, t_max, dt).map_err(numerical)?;
    let rec_cp = trajectory(&cp, &r0, t_max, dt).map_err(numerical)?;

    let mut sigma_csv = Csv::new("t,sigma_redfield,sigma_cp,heat_flux_redfield,heat_flux_cp");
    for (k, &t) in rec_red.times.iter().enumerate() {
        let s_red = entropy_production_bloch(&red, &rec_red.states[k], &ref_red).map_err(numerical)?;
        let s_cp = entropy_production_bloch(&cp, &rec_cp.states[k], &ref_cp).map_err(numerical)?;
        let q_red = heat_flux(&red, &rec_red.states[k]).map_err(numerical)?;
        let q_cp = heat_flux(&cp, &rec_cp.states[k]).map_err(numerical)?;
        sigma_csv.row(&[fmt(t), fmt(s_red), fmt(s_cp), fmt(q_red), fmt(q_cp)]);
    }
    sigma_csv.write_to(dir, "sigma_timeseries.csv")?;

    let mut files = vec!["sigma_timeseries.csv".into()];
    for (rec, name) in [(&rec_red, "trajectory_redfield.csv"), (&rec_cp, "trajectory_cp.csv")] {
        let mut csv = Csv::new("t,r1,r2,r3,norm");
        for (k, &t) in rec.times.iter().enumerate() {
            let s = &rec.states[k];
            csv.row(&[fmt(t), fmt(s.0[1]), fmt(s.0[2]), fmt(s.0[3]), fmt(s.polarization_norm())]);
        }
        csv.write_to(dir, name)?;
        files.push(name.into());
    }
    Ok(files)
}

fn run_sweep(cfg: &ExperimentConfig, dir: &Path) -> Result<Vec<String>, CliError> {
    let cells = parameter_sweep(
        &cfg.sweep_temperatures,
        &cfg.sweep_ratios,
        &cfg.params,
        cfg.sweep_states,
        cfg.seed,
    );
    let mut csv = Csv::new("T_kelvin,ratio,frac_t0_redfield,frac_t0_cp,has_time_violation,min_sigma");
    for cell in &cells {
        if let Some(err) = &cell.error {
            eprintln!("warning: cell (T={}, ratio={}) failed: {err}", cell.temperature, cell.ratio);
        }
        let frac_red = cell.redfield.as_ref().map_or(f64::NAN, |r| r.t0_fraction_negative);
        let frac_cp = cell.weak_coupling.as_ref().map_or(f64::NAN, |r| r.t0_fraction_negative);
        let min_sigma = cell
            .time_violation
            .as_ref()
            .map(|e| e.min_sigma)
            .or_else(|| cell.redfield.as_ref().map(|r| r.min_sigma))
            .unwrap_or(f64::NAN);
        csv.row(&[
            fmt(cell.temperature),
            fmt(cell.ratio),
            fmt(frac_red),
            fmt(frac_cp),
            (cell.time_violation.is_some() as u8).to_string(),
            fmt(min_sigma),
        ]);
    }
    csv.write_to(dir, "sweep.csv")?;
    Ok(vec!["sweep.csv".into()])
}

fn run_tabulate_bath(cfg: &ExperimentConfig, dir: &Path) -> Result<Vec<String>, CliError> {
    let model = SpectralModel::from_params(&cfg.params).map_err(numerical)?;
    let mut csv = Csv::new("u,re_G,im_G");
    let n = cfg.bath_samples.max(2);
    for k in 0..n {
        let u = cfg.bath_u_max * k as f64 / (n - 1) as f64;
        let g = bath_correlation(u, &model).map_err(numerical)?;
        csv.row(&[fmt(u), fmt(g.re), fmt(g.im)]);
    }
    csv.write_to(dir, "bath_correlation.csv")?;
    Ok(vec!["bath_correlation.csv".into()])
}

fn run_snapshot(cfg: &ExperimentConfig, dir: &Path) -> Result<Vec<String>, CliError> {
    let model = SpectralModel::from_params(&cfg.params).map_err(numerical)?;
    let red = build_redfield(&cfg.params, &model).map_err(numerical)?;
    let cp = build_weak_coupling(&cfg.params, &model).map_err(numerical)?;
    let mut header = String::from("kind,part");
    for i in 0..4 {
        for j in 0..4 {
            let _ = write!(header, ",m{i}{j}");
        }
    }
    let mut csv = Csv::new(&header);
    for g in [&red, &cp] {
        let kind = match g.kind {
            oqs_core::GeneratorKind::Redfield => "redfield",
            oqs_core::GeneratorKind::WeakCoupling => "weak_coupling",
        };
        for (part, m) in [
            ("matrix", &g.matrix),
            ("hamiltonian", &g.parts.hamiltonian),
            ("lamb_shift", &g.parts.lamb_shift),
            ("dissipative", &g.parts.dissipative),
        ] {
            let mut row = vec![kind.to_string(), part.to_string()];
            for i in 0..4 {
                for j in 0..4 {
                    row.push(fmt(m[(i, j)]));
                }
            }
            csv.row(&row);
        }
    }
    csv.write_to(dir, "generators.csv")?;
    Ok(vec!["generators.csv".into()])
}

fn plot_script(scenario: Scenario) -> &'static str {
    match scenario {
        Scenario::Fig1Scan => r#"#!/usr/bin/env python3
"""Surface plot of the t = 0 entropy-production field on the r3 = 0 disk."""
import csv, math
import numpy as np
import matplotlib.pyplot as plt

rows = list(csv.DictReader(open("sigma_scan.csv")))
n = int(math.isqrt(len(rows)))
r1 = np.array([float(r["r1"]) for r in rows]).reshape(n, n)
r2 = np.array([float(r["r2"]) for r in rows]).reshape(n, n)
fig, axes = plt.subplots(1, 2, figsize=(11, 4.5), subplot_kw={"projection": "3d"})
for ax, col in zip(axes, ["sigma_redfield", "sigma_cp"]):
    z = np.array([float(r[col]) for r in rows]).reshape(n, n)
    ax.plot_surface(r1, r2, z, cmap="coolwarm", linewidth=0)
    ax.set_xlabel("r1"); ax.set_ylabel("r2"); ax.set_title(col)
plt.tight_layout(); plt.savefig("sigma_scan.png", dpi=160)
print("wrote sigma_scan.png")
"#,
        Scenario::Timeseries => r#"#!/usr/bin/env python3
"""Entropy production along the trajectory, both generators."""
import csv
import numpy as np
import matplotlib.pyplot as plt

rows = list(csv.DictReader(open("sigma_timeseries.csv")))
t = np.array([float(r["t"]) for r in rows])
fig, ax = plt.subplots(figsize=(8, 4))
ax.plot(t, [float(r["sigma_redfield"]) for r in rows], label="Redfield", lw=0.9)
ax.plot(t, [float(r["sigma_cp"]) for r in rows], color="black", label="completely positive", lw=1.2)
ax.axhline(0.0, color="gray", lw=0.5)
ax.set_xlabel("t [1/Δ]"); ax.set_ylabel("σ"); ax.legend()
plt.tight_layout(); plt.savefig("sigma_timeseries.png", dpi=160)
print("wrote sigma_timeseries.png")
"#,
        Scenario::Sweep => r#"#!/usr/bin/env python3
"""Violation fractions over the (T, Ω/Δ) grid."""
import csv
import matplotlib.pyplot as plt

rows = list(csv.DictReader(open("sweep.csv")))
ratios = sorted({float(r["ratio"]) for r in rows})
fig, ax = plt.subplots(figsize=(7, 4))
for ratio in ratios:
    pts = [(float(r["T_kelvin"]), float(r["frac_t0_redfield"])) for r in rows if float(r["ratio"]) == ratio]
    pts.sort()
    ax.semilogx([p[0] for p in pts], [p[1] for p in pts], "o-", label=f"Ω/Δ = {ratio}")
ax.set_xlabel("T [K]"); ax.set_ylabel("t = 0 violation fraction"); ax.legend()
plt.tight_layout(); plt.savefig("sweep.png", dpi=160)
print("wrote sweep.png")
"#,
        Scenario::TabulateBath => r#"#!/usr/bin/env python3
"""Bath correlation function G(u)."""
import csv
import matplotlib.pyplot as plt

rows = list(csv.DictReader(open("bath_correlation.csv")))
u = [float(r["u"]) for r in rows]
fig, ax = plt.subplots(figsize=(7, 4))
ax.plot(u, [float(r["re_G"]) for r in rows], label="Re G")
ax.plot(u, [float(r["im_G"]) for r in rows], label="Im G")
ax.set_xlabel("u [1/Δ]"); ax.set_ylabel("G(u)"); ax.legend()
plt.tight_layout(); plt.savefig("bath_correlation.png", dpi=160)
print("wrote bath_correlation.png")
"#,
        Scenario::SnapshotGenerators => r#"#!/usr/bin/env python3
"""Heatmaps of the generator matrices."""
import csv
import numpy as np
import matplotlib.pyplot as plt

rows = list(csv.DictReader(open("generators.csv")))
mats = [(r["kind"], r["part"], np.array([float(r[f"m{i}{j}"]) for i in range(4) for j in range(4)]).reshape(4, 4))
        for r in rows if r["part"] == "matrix"]
fig, axes = plt.subplots(1, len(mats), figsize=(5 * len(mats), 4))
for ax, (kind, part, m) in zip(np.atleast_1d(axes), mats):
    im = ax.imshow(m, cmap="RdBu"); ax.set_title(f"{kind} {part}"); fig.colorbar(im, ax=ax)
plt.tight_layout(); plt.savefig("generators.png", dpi=160)
print("wrote generators.png")
"#,
    }
}

fn write_manifest(
    cfg: &ExperimentConfig,
    summary: &RunSummary,
    dir: &Path,
) -> Result<(), CliError> {
    let reduced = cfg.params.reduced().map_err(numerical)?;
    let mut m = String::new();
    let mut kv = |k: &str, v: String| {
        let _ = writeln!(m, "{k} = {v}");
    };
    kv("tool_version", TOOL_VERSION.into());
    kv("scenario", cfg.scenario.name().into());
    kv("seed", cfg.seed.to_string());
    kv("output_dir", cfg.output_dir.display().to_string());
    kv("delta", fmt(cfg.params.delta));
    kv("omega_drive", fmt(cfg.params.omega_drive));
    kv("lambda", fmt(cfg.params.lambda_coupling));
    kv("temperature", fmt(cfg.params.temperature));
    kv("omega_cutoff", fmt(cfg.params.omega_cutoff));
    kv(
        "unit_mode",
        match cfg.params.unit_mode {
            UnitMode::Physical => "physical".into(),
            UnitMode::DimensionlessInDelta => "dimensionless".into(),
        },
    );
    kv(
        "frequency_convention",
        match cfg.params.frequency_convention {
            FrequencyConvention::Angular => "angular".into(),
            FrequencyConvention::Ordinary => "ordinary".into(),
        },
    );
    kv("omega_ratio", fmt(reduced.omega));
    kv("cutoff_ratio", fmt(reduced.omega_c));
    kv("beta_h_delta", fmt(reduced.beta));
    kv("omega_eff_ratio", fmt(reduced.omega_eff()));
    kv(
        "sigma_reference",
        match cfg.reference {
            SigmaReference::Stationary => "stationary".into(),
            SigmaReference::Gibbs => "gibbs".into(),
        },
    );
    match cfg.scenario {
        Scenario::Fig1Scan => kv("n_points", cfg.n_points.to_string()),
        Scenario::Timeseries => {
            if let Some(state) = &cfg.initial_state {
                kv(
                    "initial_state",
                    format!("[{}, {}, {}, {}]", state.0[0], state.0[1], state.0[2], state.0[3]),
                );
            }
            if let Some(t) = cfg.t_max {
                kv("t_max", fmt(t));
            }
            if let Some(dt) = cfg.dt {
                kv("dt", fmt(dt));
            }
        }
        Scenario::Sweep => {
            kv("temperatures", format!("{:?}", cfg.sweep_temperatures));
            kv("ratios", format!("{:?}", cfg.sweep_ratios));
            kv("n_states", cfg.sweep_states.to_string());
        }
        Scenario::TabulateBath => {
            kv("u_max", fmt(cfg.bath_u_max));
            kv("n_samples", cfg.bath_samples.to_string());
        }
        Scenario::SnapshotGenerators => {}
    }
    kv("files", summary.files.join(", "));
    kv("wall_time_s", format!("{:.3}", summary.wall_time_s));
    let timestamp = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    kv("timestamp_unix", timestamp.to_string());
    fs::write(dir.join("run_manifest.txt"), m.as_bytes())?;
    Ok(())
}

/// Execute a resolved configuration: writes CSVs, plot script and manifest
/// into `output_dir`.
pub fn run(cfg: &ExperimentConfig) -> Result<RunSummary, CliError> {
    let start = Instant::now();
    fs::create_dir_all(&cfg.output_dir)?;
    let dir = cfg.output_dir.clone();
    let mut files = match cfg.scenario {
        Scenario::Fig1Scan => run_fig1(cfg, &dir)?,
        Scenario::Timeseries => run_timeseries(cfg, &dir)?,
        Scenario::Sweep => run_sweep(cfg, &dir)?,
        Scenario::TabulateBath => run_tabulate_bath(cfg, &dir)?,
        Scenario::SnapshotGenerators => run_snapshot(cfg, &dir)?,
    };
    fs::write(dir.join("plot.py"), plot_script(cfg.scenario))?;
    files.push("plot.py".into());
    let summary = RunSummary { files, wall_time_s: start.elapsed().as_secs_f64() };
    write_manifest(cfg, &summary, &dir)?;
    Ok(summary)
}

/// Build the global rayon pool honoring OQS_NUM_WORKERS. Call once at
/// startup; later calls are ignored.
pub fn init_workers() {
    if let Ok(v) = std::env::var("OQS_NUM_WORKERS") {
        if let Ok(n) = v.parse::<usize>() {
            if n >= 1 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}
