//! Internal entropy production, heat and entropy fluxes, and second-law
//! violation detection.
//!
//! The central quantity is σ(ϱ) = −Tr(𝓛[ϱ](log ϱ − log ϱ_ref)) with the
//! generator's own stationary state as the default reference. Two
//! independent evaluation routes are kept: the trace formula through 2×2
//! spectral decompositions, and the closed Bloch-vector form; they must
//! agree to 1e−10 and the test suite enforces it.

use nalgebra::{Matrix2, Vector4};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::bloch::{density_from_bloch, log_ratio_over_r, pauli_basis, BlochError, BlochVector};
use crate::dynamics::{propagate, DynamicsError};
use crate::generators::{
    build_redfield, build_weak_coupling, stationary_bloch, BlochGenerator, GeneratorError,
    GeneratorKind,
};
use crate::params::{ModelParams, UnitMode};
use crate::SpectralModel;

type C = Complex64;

/// Radius at which states are capped before logarithms are taken: keeps σ
/// finite on (almost) pure states without masking positivity violations,
/// which are monitored separately.
pub const PURE_STATE_CAP: f64 = 1.0 - 1e-9;

/// Floor for reference states. References enter σ only through
/// log((1+s)/(1−s)); at the coldest parameter cells the stationary
/// polarization is pure beyond f64 resolution and rounds to exactly 1, so
/// the exact log-ratio is unrecoverable. Evaluating at the representability
/// floor makes σ a lower bound on its exact value for every state polarized
/// below the reference, which keeps positivity assertions conservative.
pub const REFERENCE_CAP: f64 = 1.0 - 1e-15;

#[derive(Debug, Error)]
pub enum ThermoError {
    #[error(transparent)]
    Bloch(#[from] BlochError),
    #[error(transparent)]
    Generator(#[from] GeneratorError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

/// One sample of the thermodynamic fluxes along a trajectory.
#[derive(Debug, Clone, Copy)]
pub struct SigmaSample {
    pub time: f64,
    pub sigma: f64,
    pub entropy_rate: f64,
    pub heat_flux: f64,
}

/// Outcome of a violation scan or interval search.
#[derive(Debug, Clone)]
pub struct ViolationReport {
    pub params: ModelParams,
    pub generator_kind: GeneratorKind,
    /// Fraction of t = 0 samples with σ < −tolerance.
    pub t0_fraction_negative: f64,
    /// Maximal disjoint intervals with σ < −tolerance, ordered in time.
    pub negative_intervals: Vec<(f64, f64)>,
    pub min_sigma: f64,
    pub min_sigma_time: f64,
    pub sample_count: usize,
    pub rng_seed: u64,
}

/// How initial states are drawn in a t = 0 scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sampling {
    /// n×n grid on the r₃ = 0 section of the Bloch ball.
    EquatorialGrid,
    /// Uniform over the ball volume (radius ∝ u^{1/3}), seeded.
    RandomBall,
    /// Uniform over the sphere surface, for sensitivity checks.
    RandomSphere,
}

/// σ < −tolerance counts as a violation; scaled to the natural magnitude
/// λ²Δ of the entropy production so roundoff is never flagged.
pub fn violation_tolerance(g: &BlochGenerator) -> f64 {
    let l = g.reduced().lambda;
    1e-9 * l * l
}

/// Full generator action as Bloch coordinates of dϱ/dt: k = −2·𝓛·r.
fn generator_velocity(g: &BlochGenerator, r: &BlochVector) -> [f64; 4] {
    let v = -2.0 * (g.matrix * Vector4::new(r.0[0], r.0[1], r.0[2], r.0[3]));
    [v[0], v[1], v[2], v[3]]
}

/// Non-Hamiltonian (λ²-scaled Lamb shift + dissipator) part of the action.
fn bath_velocity(g: &BlochGenerator, r: &BlochVector) -> [f64; 4] {
    let red = g.reduced();
    let l2 = red.lambda * red.lambda;
    let b = g.parts.lamb_shift + g.parts.dissipative;
    let v = -2.0 * l2 * (b * Vector4::new(r.0[0], r.0[1], r.0[2], r.0[3]));
    [v[0], v[1], v[2], v[3]]
}

/// log ρ of a 2×2 density matrix through its spectral decomposition.
fn matrix_log_density(rho: &Matrix2<C>) -> Matrix2<C> {
    // Hermitian 2×2 eigensystem in closed form.
    let a = rho[(0, 0)].re;
    let d = rho[(1, 1)].re;
    let b = rho[(0, 1)];
    let mean = 0.5 * (a + d);
    let radius = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
    let (l1, l2) = (mean + radius, mean - radius);
    if radius < 1e-300 {
        return Matrix2::identity() * C::new(l1.max(1e-300).ln(), 0.0);
    }
    // eigenvector for l1: (b, l1 − a)ᵀ, unless b ≈ 0
    let v1 = if b.norm() > 1e-300 {
        let v = nalgebra::Vector2::new(b, C::new(l1 - a, 0.0));
        v / C::new(v.norm(), 0.0)
    } else if a >= d {
        nalgebra::Vector2::new(C::new(1.0, 0.0), C::new(0.0, 0.0))
    } else {
        nalgebra::Vector2::new(C::new(0.0, 0.0), C::new(1.0, 0.0))
    };
    let p1 = v1 * v1.adjoint();
    let p2 = Matrix2::identity() - p1;
    p1 * C::new(l1.max(1e-300).ln(), 0.0) + p2 * C::new(l2.max(1e-300).ln(), 0.0)
}

fn capped(r: &BlochVector) -> BlochVector {
    r.clamped(PURE_STATE_CAP)
}

/// The reference enters only through its logarithm; it is used exactly
/// when strictly mixed and at `REFERENCE_CAP` when numerically pure.
fn checked_reference(r_ref: &BlochVector) -> Result<BlochVector, ThermoError> {
    r_ref.check_physical()?;
    Ok(r_ref.clamped(REFERENCE_CAP))
}

/// σ(ϱ) = −Tr(𝓛[ϱ](log ϱ − log ϱ_ref)) through 2×2 spectral decompositions,
/// with the full generator action mapped back to operator form. States at
/// or beyond the pure-state cap are evaluated at radius `PURE_STATE_CAP`.
pub fn entropy_production_trace(
    g: &BlochGenerator,
    r: &BlochVector,
    r_ref: &BlochVector,
) -> Result<f64, ThermoError> {
    r.check_physical()?;
    let rc = capped(r);
    let sc = checked_reference(r_ref)?;
    let k = generator_velocity(g, &rc);
    let basis = pauli_basis(&g.params).map_err(BlochError::from)?;
    let mut x = Matrix2::<C>::zeros();
    for i in 1..4 {
        x += basis[i] * C::new(0.5 * k[i], 0.0);
    }
    let rho = density_from_bloch(&rc, &g.params)?.0;
    let rho_ref = density_from_bloch(&sc, &g.params)?.0;
    let diff = matrix_log_density(&rho) - matrix_log_density(&rho_ref);
    Ok(-(x * diff).trace().re)
}

/// σ(ϱ) in the closed Bloch form
///   σ = Σ_{i,μ} 𝓛_{iμ} r_μ [ (r_i/r)·log((1+r)/(1−r)) − (s_i/s)·log((1+s)/(1−s)) ],
/// the r → 0 and s → 0 ends continued with (r_i/r)·log(…) → 2 r_i.
pub fn entropy_production_bloch(
    g: &BlochGenerator,
    r: &BlochVector,
    r_ref: &BlochVector,
) -> Result<f64, ThermoError> {
    r.check_physical()?;
    let rc = capped(r);
    let sc = checked_reference(r_ref)?;
    let rn = rc.polarization_norm();
    let sn = sc.polarization_norm();
    let ar_over_r = log_ratio_over_r(rn);
    let as_over_s = log_ratio_over_r(sn);
    let mut sigma = 0.0;
    for i in 1..4 {
        let mut flow = 0.0;
        for mu in 0..4 {
            flow += g.matrix[(i, mu)] * rc.0[mu];
        }
        sigma += flow * (rc.0[i] * ar_over_r - sc.0[i] * as_over_s);
    }
    Ok(sigma)
}

/// Heat flux dQ/dt = Tr(H_eff·𝕂[ϱ]) with H_eff = (ħω_eff/2)σ̂₃ and 𝕂 the
/// non-Hamiltonian part of the generator. Units of ħΔ² (ħ = 1).
pub fn heat_flux(g: &BlochGenerator, r: &BlochVector) -> Result<f64, ThermoError> {
    r.check_physical()?;
    let k = bath_velocity(g, r);
    Ok(0.5 * g.omega_eff() * k[3])
}

/// dS/dt = −Tr(𝓛[ϱ] log ϱ).
pub fn entropy_rate(g: &BlochGenerator, r: &BlochVector) -> Result<f64, ThermoError> {
    r.check_physical()?;
    let rc = capped(r);
    let rn = rc.polarization_norm();
    let k = generator_velocity(g, &rc);
    let dot = k[1] * rc.0[1] + k[2] * rc.0[2] + k[3] * rc.0[3];
    Ok(-0.5 * log_ratio_over_r(rn) * dot)
}

/// Gibbs state of H_eff = (ħω_eff/2)σ̂₃ at the model temperature:
/// (1, 0, 0, −tanh(βħω_eff/2)).
pub fn gibbs_state(params: &ModelParams) -> Result<BlochVector, ThermoError> {
    let red = params.reduced().map_err(BlochError::from)?;
    Ok(BlochVector::new(0.0, 0.0, -(0.5 * red.beta * red.omega_eff()).tanh()))
}

/// σ, dS/dt and dQ/dt at one state, bundled.
pub fn sigma_sample(
    g: &BlochGenerator,
    r: &BlochVector,
    r_ref: &BlochVector,
    time: f64,
) -> Result<SigmaSample, ThermoError> {
    Ok(SigmaSample {
        time,
        sigma: entropy_production_bloch(g, r, r_ref)?,
        entropy_rate: entropy_rate(g, r)?,
        heat_flux: heat_flux(g, r)?,
    })
}

/// Uniformly random point of the unit ball (or sphere) in Bloch space.
fn random_state(rng: &mut ChaCha12Rng, surface: bool) -> BlochVector {
    let z: f64 = rng.gen_range(-1.0..=1.0);
    let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let radius = if surface { 1.0 } else { rng.gen_range(0.0..=1.0f64).cbrt() };
    let s = (1.0 - z * z).max(0.0).sqrt();
    BlochVector::new(radius * s * phi.cos(), radius * s * phi.sin(), radius * z)
}

/// Entropy production at t = 0 over a family of initial states, with the
/// generator's stationary state as reference. Returns the fraction of
/// samples below −tolerance.
pub fn violation_scan_t0(
    g: &BlochGenerator,
    sampling: Sampling,
    n: usize,
    seed: u64,
) -> Result<ViolationReport, ThermoError> {
    let reference = stationary_bloch(g)?;
    let tol = violation_tolerance(g);
    let mut states: Vec<BlochVector> = Vec::new();
    match sampling {
        Sampling::EquatorialGrid => {
            let side = (n.max(2) as f64).sqrt().round() as usize;
            let side = side.max(2);
            for i in 0..side {
                for j in 0..side {
                    let r1 = -1.0 + 2.0 * i as f64 / (side - 1) as f64;
                    let r2 = -1.0 + 2.0 * j as f64 / (side - 1) as f64;
                    if r1 * r1 + r2 * r2 <= 1.0 {
                        states.push(BlochVector::new(r1, r2, 0.0));
                    }
                }
            }
        }
        Sampling::RandomBall | Sampling::RandomSphere => {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let surface = sampling == Sampling::RandomSphere;
            states.extend((0..n).map(|_| random_state(&mut rng, surface)));
        }
    }
    let mut negative = 0usize;
    let mut min_sigma = f64::INFINITY;
    for s in &states {
        let sigma = entropy_production_bloch(g, s, &reference)?;
        if sigma < -tol {
            negative += 1;
        }
        if sigma < min_sigma {
            min_sigma = sigma;
        }
    }
    Ok(ViolationReport {
        params: g.params,
        generator_kind: g.kind,
        t0_fraction_negative: negative as f64 / states.len() as f64,
        negative_intervals: vec![],
        min_sigma,
        min_sigma_time: 0.0,
        sample_count: states.len(),
        rng_seed: seed,
    })
}

/// σ(t) along the trajectory from r0, with maximal intervals of
/// σ < −tolerance; interval endpoints are refined by bisection to 1e−3·dt.
pub fn violation_intervals(
    g: &BlochGenerator,
    r0: &BlochVector,
    t_max: f64,
    dt: f64,
) -> Result<ViolationReport, ThermoError> {
    let reference = stationary_bloch(g)?;
    let tol = violation_tolerance(g);
    let sigma_at = |t: f64| -> Result<f64, ThermoError> {
        let state = propagate(g, r0, t)?;
        entropy_production_bloch(g, &state, &reference)
    };
    let rec = crate::dynamics::trajectory(g, r0, t_max, dt)?;
    let sigmas: Vec<f64> = rec
        .states
        .iter()
        .map(|s| entropy_production_bloch(g, s, &reference))
        .collect::<Result<_, _>>()?;

    let mut min_sigma = f64::INFINITY;
    let mut min_sigma_time = 0.0;
    for (&t, &s) in rec.times.iter().zip(sigmas.iter()) {
        if s < min_sigma {
            min_sigma = s;
            min_sigma_time = t;
        }
    }

    // refine a sign change of (σ + tol) between a and b to 1e-3·dt
    let refine = |mut a: f64, mut b: f64| -> Result<f64, ThermoError> {
        let fa = sigma_at(a)? < -tol;
        for _ in 0..12 {
            if b - a <= 1e-3 * dt {
                break;
            }
            let m = 0.5 * (a + b);
            if (sigma_at(m)? < -tol) == fa {
                a = m;
            } else {
                b = m;
            }
        }
        Ok(0.5 * (a + b))
    };

    let mut intervals: Vec<(f64, f64)> = Vec::new();
    let mut open: Option<f64> = None;
    for (k, &sigma_k) in sigmas.iter().enumerate() {
        let below = sigma_k < -tol;
        match (below, open) {
            (true, None) => {
                let start = if k == 0 {
                    0.0
                } else {
                    refine(rec.times[k - 1], rec.times[k])?
                };
                open = Some(start);
            }
            (false, Some(start)) => {
                let end = refine(rec.times[k - 1], rec.times[k])?;
                intervals.push((start, end));
                open = None;
            }
            _ => {}
        }
    }
    if let Some(start) = open {
        intervals.push((start, *rec.times.last().unwrap()));
    }

    Ok(ViolationReport {
        params: g.params,
        generator_kind: g.kind,
        t0_fraction_negative: if sigmas[0] < -tol { 1.0 } else { 0.0 },
        negative_intervals: intervals,
        min_sigma,
        min_sigma_time,
        sample_count: sigmas.len(),
        rng_seed: 0,
    })
}

/// Evidence that some initial state shows repeated-in-time violations.
#[derive(Debug, Clone)]
pub struct TimeViolationEvidence {
    pub initial_state: BlochVector,
    pub intervals: Vec<(f64, f64)>,
    pub min_sigma: f64,
}

/// One (temperature, Ω/Δ) cell of a parameter sweep.
#[derive(Debug, Clone)]
pub struct SweepCell {
    /// Temperature in the base parameter units (kelvin in physical mode).
    pub temperature: f64,
    /// Ω/Δ.
    pub ratio: f64,
    pub redfield: Option<ViolationReport>,
    pub weak_coupling: Option<ViolationReport>,
    pub time_violation: Option<TimeViolationEvidence>,
    /// Minimum σ seen along a weak-coupling check trajectory.
    pub cp_min_sigma: f64,
    pub error: Option<String>,
}

fn cell_seed(seed: u64, index: usize) -> u64 {
    seed ^ (index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn run_cell(
    base: &ModelParams,
    temperature: f64,
    ratio: f64,
    n_states: usize,
    seed: u64,
) -> Result<SweepCell, ThermoError> {
    let mut params = *base;
    params.temperature = temperature;
    params.omega_drive = ratio * params.delta;
    if params.unit_mode == UnitMode::DimensionlessInDelta {
        params.omega_drive = ratio;
    }
    let model = SpectralModel::from_params(&params).map_err(GeneratorError::from)?;
    let red = build_redfield(&params, &model)?;
    let cp = build_weak_coupling(&params, &model)?;

    let scan_red = violation_scan_t0(&red, Sampling::RandomBall, n_states, seed)?;
    let scan_cp = violation_scan_t0(&cp, Sampling::RandomBall, n_states, seed)?;

    // Search for an initial state with repeated-in-time violations: the two
    // reference figure states first, then seeded ball samples.
    let period = red.effective_period();
    let dt = period / 64.0;
    let horizon = 12.0 * period;
    let mut rng = ChaCha12Rng::seed_from_u64(cell_seed(seed, 1));
    let mut candidates = vec![
        BlochVector::new(0.0, -0.894, -0.447),
        BlochVector::new(0.0, 0.5, -0.4),
    ];
    candidates.extend((0..40).map(|_| random_state(&mut rng, false)));
    let mut evidence: Option<TimeViolationEvidence> = None;
    for cand in &candidates {
        let rep = violation_intervals(&red, cand, horizon, dt)?;
        if rep.negative_intervals.len() >= 2 {
            evidence = Some(TimeViolationEvidence {
                initial_state: *cand,
                intervals: rep.negative_intervals,
                min_sigma: rep.min_sigma,
            });
            break;
        }
    }

    // CP dynamics along the first candidate must stay non-negative.
    let cp_rep = violation_intervals(&cp, &candidates[0], horizon, dt)?;

    Ok(SweepCell {
        temperature,
        ratio,
        redfield: Some(scan_red),
        weak_coupling: Some(scan_cp),
        time_violation: evidence,
        cp_min_sigma: cp_rep.min_sigma,
        error: None,
    })
}

/// Sweep the (temperature, Ω/Δ) grid; cells run in parallel, failures are
/// isolated per cell, and the output order is row-major over the input
/// grids regardless of worker count.
pub fn parameter_sweep(
    t_values: &[f64],
    ratio_values: &[f64],
    base: &ModelParams,
    n_states: usize,
    seed: u64,
) -> Vec<SweepCell> {
    let cells: Vec<(usize, f64, f64)> = t_values
        .iter()
        .enumerate()
        .flat_map(|(i, &t)| {
            ratio_values
                .iter()
                .enumerate()
                .map(move |(j, &r)| (i * ratio_values.len() + j, t, r))
        })
        .collect();
    cells
        .into_par_iter()
        .map(|(idx, t, r)| {
            run_cell(base, t, r, n_states, cell_seed(seed, idx)).unwrap_or_else(|e| SweepCell {
                temperature: t,
                ratio: r,
                redfield: None,
                weak_coupling: None,
                time_violation: None,
                cp_min_sigma: f64::NAN,
                error: Some(e.to_string()),
            })
        })
        .collect()
}
