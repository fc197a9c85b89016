//! Time evolution of Bloch vectors under a fixed generator.
//!
//! The generator is constant in the rotating frame, so propagation is the
//! dense matrix exponential exp(−2t𝓛) (scaling-and-squaring, Padé); a
//! step-wise ODE integrator exists only as a test oracle.

use nalgebra::{Matrix4, Vector4};
use thiserror::Error;

use crate::bloch::{BlochError, BlochVector, NORM_SLACK};
use crate::generators::{BlochGenerator, GeneratorKind};
use crate::linalg::expm;
use crate::params::ModelParams;

#[derive(Debug, Error)]
pub enum DynamicsError {
    #[error("propagation time must be >= 0, got {0}")]
    NegativeTime(f64),
    #[error("invalid sampling: dt = {dt}, t_max = {t_max}")]
    BadSampling { dt: f64, t_max: f64 },
    #[error(transparent)]
    Bloch(#[from] BlochError),
}

/// Sampled trajectory; `states[k]` belongs to `times[k]` and every state
/// keeps r₀ = 1 exactly.
#[derive(Debug, Clone)]
pub struct TrajectoryRecord {
    pub times: Vec<f64>,
    pub states: Vec<BlochVector>,
    pub generator_kind: GeneratorKind,
    pub params: ModelParams,
}

/// exp(−2t𝓛) with the exact trace-preservation row restored.
pub(crate) fn propagator(g: &BlochGenerator, t: f64) -> Matrix4<f64> {
    let mut m = expm(&(-2.0 * t * g.matrix));
    m[(0, 0)] = 1.0;
    m[(0, 1)] = 0.0;
    m[(0, 2)] = 0.0;
    m[(0, 3)] = 0.0;
    m
}

/// Evolve r0 for time t: exp(−2t𝓛)·r0.
pub fn propagate(g: &BlochGenerator, r0: &BlochVector, t: f64) -> Result<BlochVector, DynamicsError> {
    if t.is_nan() || t < 0.0 {
        return Err(DynamicsError::NegativeTime(t));
    }
    r0.check_physical()?;
    let m = propagator(g, t);
    let v = m * Vector4::new(r0.0[0], r0.0[1], r0.0[2], r0.0[3]);
    Ok(BlochVector([v[0], v[1], v[2], v[3]]))
}

/// Sample the evolution on the grid k·dt, k = 0, 1, …, ⌊t_max/dt⌋, by
/// repeated application of the one-step propagator (precomputed once; the
/// semigroup property keeps this consistent with direct propagation).
pub fn trajectory(
    g: &BlochGenerator,
    r0: &BlochVector,
    t_max: f64,
    dt: f64,
) -> Result<TrajectoryRecord, DynamicsError> {
    if dt.is_nan() || dt <= 0.0 || t_max.is_nan() || t_max < dt {
        return Err(DynamicsError::BadSampling { dt, t_max });
    }
    r0.check_physical()?;
    let steps = (t_max / dt + 1e-9).floor() as usize;
    let one_step = propagator(g, dt);
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    let mut v = Vector4::new(r0.0[0], r0.0[1], r0.0[2], r0.0[3]);
    times.push(0.0);
    states.push(*r0);
    for k in 1..=steps {
        v = one_step * v;
        times.push(k as f64 * dt);
        states.push(BlochVector([v[0], v[1], v[2], v[3]]));
    }
    Ok(TrajectoryRecord { times, states, generator_kind: g.kind, params: g.params })
}

/// All samples whose polarization norm exceeds 1 + 1e−9: positivity-loss
/// events. Empty for completely positive dynamics; never clamped silently.
pub fn purity_monitor(rec: &TrajectoryRecord) -> Vec<(f64, f64)> {
    rec.times
        .iter()
        .zip(rec.states.iter())
        .filter_map(|(&t, s)| {
            let n = s.polarization_norm();
            (n > 1.0 + NORM_SLACK).then_some((t, n))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bath::SpectralModel;
    use crate::generators::{build_redfield, build_weak_coupling, stationary_bloch};
    use approx::assert_relative_eq;

    fn setup() -> (ModelParams, SpectralModel) {
        (
            ModelParams::dimensionless(2.0, 1000.0, 10.184, 0.005),
            SpectralModel::new(1000.0, 10.184),
        )
    }

    #[test]
    fn zero_time_is_identity() {
        let (p, m) = setup();
        let g = build_weak_coupling(&p, &m).unwrap();
        let r = BlochVector::new(0.2, -0.4, 0.6);
        let out = propagate(&g, &r, 0.0).unwrap();
        for k in 0..4 {
            assert_relative_eq!(out.0[k], r.0[k], epsilon = 1e-15);
        }
        assert!(propagate(&g, &r, -1.0).is_err());
    }

    #[test]
    fn pure_rotation_closes_after_a_period() {
        let (mut p, m) = setup();
        p.lambda_coupling = 0.0;
        let g = build_redfield(&p, &m).unwrap();
        let r = BlochVector::new(0.7, 0.1, -0.3);
        let period = g.effective_period();
        let out = propagate(&g, &r, period).unwrap();
        for k in 0..4 {
            assert_relative_eq!(out.0[k], r.0[k], epsilon = 1e-12);
        }
        // norm conserved over many periods
        let far = propagate(&g, &r, 1000.0 * period).unwrap();
        assert_relative_eq!(
            far.polarization_norm(),
            r.polarization_norm(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn long_time_limit_is_the_stationary_state() {
        let (p, m) = setup();
        let g = build_weak_coupling(&p, &m).unwrap();
        let st = stationary_bloch(&g).unwrap();
        let out = propagate(&g, &BlochVector::new(0.3, 0.3, -0.8), 2e6).unwrap();
        for k in 0..4 {
            assert_relative_eq!(out.0[k], st.0[k], epsilon = 1e-8);
        }
    }

    #[test]
    fn semigroup_property_of_the_step_matrix() {
        let (p, m) = setup();
        let g = build_weak_coupling(&p, &m).unwrap();
        let r = BlochVector::new(-0.5, 0.2, 0.4);
        let dt = 0.173;
        let two_half = propagate(&g, &propagate(&g, &r, dt / 2.0).unwrap(), dt / 2.0).unwrap();
        let one_full = propagate(&g, &r, dt).unwrap();
        for k in 0..4 {
            assert_relative_eq!(two_half.0[k], one_full.0[k], epsilon = 1e-12);
        }
    }

    #[test]
    fn trajectory_is_consistent_with_direct_propagation() {
        let (p, m) = setup();
        let g = build_redfield(&p, &m).unwrap();
        let r = BlochVector::new(0.0, -0.894, -0.447);
        let dt = g.effective_period() / 64.0;
        let rec = trajectory(&g, &r, 20.0 * g.effective_period(), dt).unwrap();
        assert_eq!(rec.times.len(), rec.states.len());
        for s in &rec.states {
            assert_eq!(s.0[0], 1.0);
        }
        let last = *rec.states.last().unwrap();
        let direct = propagate(&g, &r, *rec.times.last().unwrap()).unwrap();
        for k in 0..4 {
            assert_relative_eq!(last.0[k], direct.0[k], epsilon = 1e-10);
        }
        assert!(trajectory(&g, &r, 1.0, 0.0).is_err());
        assert!(trajectory(&g, &r, 0.5, 1.0).is_err());
    }

    #[test]
    fn purity_monitor_is_quiet_for_cp_dynamics() {
        use rand::{Rng, SeedableRng};
        let (p, m) = setup();
        let g = build_weak_coupling(&p, &m).unwrap();
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(11);
        for _ in 0..100 {
            let dir = loop {
                let v = [
                    rng.gen_range(-1.0..1.0f64),
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                ];
                let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                if n > 1e-6 && n <= 1.0 {
                    break v;
                }
            };
            let r = BlochVector::new(dir[0], dir[1], dir[2]);
            let rec = trajectory(&g, &r, 10.0 * g.effective_period(), g.effective_period() / 16.0)
                .unwrap();
            assert!(purity_monitor(&rec).is_empty());
        }
        // maximally mixed state stays put
        let rec = trajectory(&g, &BlochVector::new(0.0, 0.0, 0.0), 5.0, 0.5).unwrap();
        assert!(purity_monitor(&rec).is_empty());
    }
}
