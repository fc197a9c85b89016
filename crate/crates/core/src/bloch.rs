//! Qubit states in the rotated Pauli basis and their entropic functionals.
//!
//! The rotated basis is
//!   σ̂₁ = σ₁,  σ̂₂ = (Δσ₂ + Ωσ₃)/ω_eff,  σ̂₃ = (Δσ₃ − Ωσ₂)/ω_eff,
//! an orthogonal rotation of the ordinary Pauli triple about axis 1, so the
//! familiar Bloch-ball geometry (norms, entropies, trace distance) carries
//! over unchanged. States are 4-vectors (r₀, r₁, r₂, r₃) with r₀ = 1.

use nalgebra::Matrix2;
use num_complex::Complex64;
use thiserror::Error;

use crate::params::{ModelParams, ParamsError};

/// Accepted overshoot of the polarization norm before a state is rejected.
pub const NORM_SLACK: f64 = 1e-9;

type C = Complex64;
type M2 = Matrix2<Complex64>;

/// Bloch 4-vector (r₀, r₁, r₂, r₃) in the rotated basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector(pub [f64; 4]);

/// 2×2 density matrix (plain complex matrix; invariants are checked where
/// they matter, not on construction).
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(pub M2);

#[derive(Debug, Error)]
pub enum BlochError {
    #[error("non-finite component in Bloch vector")]
    NonFinite,
    #[error("r0 must be 1 for a state, got {0}")]
    BadTraceComponent(f64),
    #[error("polarization norm {0} exceeds 1 + {NORM_SLACK:e}")]
    NormExceeded(f64),
    #[error("matrix is not Hermitian within {tol:e}: deviation {dev:e}")]
    NotHermitian { dev: f64, tol: f64 },
    #[error("matrix trace {0} is not 1 within tolerance")]
    BadTrace(f64),
    #[error("reference state is singular and supports do not align")]
    SingularReference,
    #[error(transparent)]
    Params(#[from] ParamsError),
}

impl BlochVector {
    /// State with unit trace component.
    pub fn new(r1: f64, r2: f64, r3: f64) -> Self {
        BlochVector([1.0, r1, r2, r3])
    }

    pub fn from_array(r: [f64; 4]) -> Self {
        BlochVector(r)
    }

    pub fn r0(&self) -> f64 {
        self.0[0]
    }

    /// Polarization part (r₁, r₂, r₃).
    pub fn polarization(&self) -> [f64; 3] {
        [self.0[1], self.0[2], self.0[3]]
    }

    /// |r⃗| = √(r₁² + r₂² + r₃²).
    pub fn polarization_norm(&self) -> f64 {
        let [x, y, z] = self.polarization();
        (x * x + y * y + z * z).sqrt()
    }

    /// Check finiteness, r₀ = 1 and |r⃗| ≤ 1 + slack.
    pub fn check_physical(&self) -> Result<(), BlochError> {
        if self.0.iter().any(|v| !v.is_finite()) {
            return Err(BlochError::NonFinite);
        }
        if (self.r0() - 1.0).abs() > 1e-12 {
            return Err(BlochError::BadTraceComponent(self.r0()));
        }
        let n = self.polarization_norm();
        if n > 1.0 + NORM_SLACK {
            return Err(BlochError::NormExceeded(n));
        }
        Ok(())
    }

    /// Rescale the polarization to norm ≤ `max_norm`, leaving r₀ alone.
    pub fn clamped(&self, max_norm: f64) -> BlochVector {
        let n = self.polarization_norm();
        if n <= max_norm || n == 0.0 {
            return *self;
        }
        let s = max_norm / n;
        BlochVector([self.0[0], self.0[1] * s, self.0[2] * s, self.0[3] * s])
    }
}

/// Rotated Pauli basis (σ̂₀, σ̂₁, σ̂₂, σ̂₃) for the given parameters.
pub fn pauli_basis(params: &ModelParams) -> Result<[M2; 4], ParamsError> {
    let r = params.reduced()?;
    let w = r.omega_eff();
    let (c, s) = (1.0 / w, r.omega / w); // Δ/ω_eff, Ω/ω_eff

    let zero = C::new(0.0, 0.0);
    let one = C::new(1.0, 0.0);
    let i = C::new(0.0, 1.0);

    let s0 = M2::new(one, zero, zero, one);
    let s1 = M2::new(zero, one, one, zero);
    let sigma2 = M2::new(zero, -i, i, zero);
    let sigma3 = M2::new(one, zero, zero, -one);

    let s2 = sigma2 * C::new(c, 0.0) + sigma3 * C::new(s, 0.0);
    let s3 = sigma3 * C::new(c, 0.0) - sigma2 * C::new(s, 0.0);
    Ok([s0, s1, s2, s3])
}

/// ρ = ½ Σ_μ r_μ σ̂_μ.
pub fn density_from_bloch(
    r: &BlochVector,
    params: &ModelParams,
) -> Result<DensityMatrix, BlochError> {
    if r.0.iter().any(|v| !v.is_finite()) {
        return Err(BlochError::NonFinite);
    }
    if (r.r0() - 1.0).abs() > 1e-12 {
        return Err(BlochError::BadTraceComponent(r.r0()));
    }
    let basis = pauli_basis(params)?;
    let mut m = M2::zeros();
    for (coeff, sigma) in r.0.iter().zip(basis.iter()) {
        m += sigma * C::new(0.5 * coeff, 0.0);
    }
    Ok(DensityMatrix(m))
}

/// r_μ = Tr(ρ σ̂_μ); inverse of [`density_from_bloch`].
pub fn bloch_from_density(
    rho: &DensityMatrix,
    params: &ModelParams,
) -> Result<BlochVector, BlochError> {
    let m = &rho.0;
    let dev = (m[(0, 1)] - m[(1, 0)].conj()).norm()
        .max((m[(0, 0)].im).abs())
        .max((m[(1, 1)].im).abs());
    let tol = 1e-9;
    if dev > tol {
        return Err(BlochError::NotHermitian { dev, tol });
    }
    let trace = (m[(0, 0)] + m[(1, 1)]).re;
    if (trace - 1.0).abs() > 1e-9 {
        return Err(BlochError::BadTrace(trace));
    }
    let basis = pauli_basis(params)?;
    let mut r = [0.0; 4];
    for (slot, sigma) in r.iter_mut().zip(basis.iter()) {
        *slot = (sigma * m).trace().re;
    }
    Ok(BlochVector(r))
}

/// Binary entropy of the eigenvalue pair ((1±r)/2) in nats.
fn entropy_of_norm(r: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&r));
    let mut s = 0.0;
    for p in [(1.0 + r) / 2.0, (1.0 - r) / 2.0] {
        if p > 0.0 {
            s -= p * p.ln();
        }
    }
    s
}

/// Von Neumann entropy S(ρ) = −Tr ρ log ρ (natural log, k_B = 1).
pub fn von_neumann_entropy(r: &BlochVector) -> Result<f64, BlochError> {
    r.check_physical()?;
    Ok(entropy_of_norm(r.polarization_norm().min(1.0)))
}

/// log((1+r)/(1−r)) / r, extended continuously through r = 0.
pub(crate) fn log_ratio_over_r(r: f64) -> f64 {
    if r < 1e-4 {
        // 2·(1 + r²/3 + r⁴/5); relative error < 1e-17 for r < 1e-4.
        2.0 * (1.0 + r * r / 3.0 + r * r * r * r / 5.0)
    } else {
        (((1.0 + r) / (1.0 - r)).ln()) / r
    }
}

/// Relative entropy S(ρ‖σ) = Tr ρ(log ρ − log σ).
///
/// Returns `+∞` when the reference is pure and the supports do not align;
/// 0 when both arguments are the same pure state.
pub fn relative_entropy(r: &BlochVector, s: &BlochVector) -> Result<f64, BlochError> {
    r.check_physical()?;
    s.check_physical()?;
    let rn = r.polarization_norm().min(1.0);
    let sn = s.polarization_norm().min(1.0);
    let rp = r.polarization();
    let sp = s.polarization();
    let dot: f64 = rp.iter().zip(sp.iter()).map(|(a, b)| a * b).sum();

    if sn >= 1.0 {
        // Pure reference: finite only if ρ is the same pure state.
        let aligned = rn >= 1.0 && (dot - 1.0).abs() < 1e-12;
        return Ok(if aligned { 0.0 } else { f64::INFINITY });
    }

    // Tr ρ log σ = ½ log((1−s²)/4) + (r⃗·ŝ)·(a_s/2) with a_s = log((1+s)/(1−s)).
    let a_s = log_ratio_over_r(sn) * sn;
    let cross = 0.5 * ((1.0 - sn * sn) / 4.0).ln()
        + 0.5 * a_s * if sn > 0.0 { dot / sn } else { 0.0 };
    Ok(-entropy_of_norm(rn) - cross)
}

/// Trace distance ½‖ρ − σ‖₁ = ½|r⃗ − s⃗|.
pub fn trace_distance(r: &BlochVector, s: &BlochVector) -> Result<f64, BlochError> {
    r.check_physical()?;
    s.check_physical()?;
    let rp = r.polarization();
    let sp = s.polarization();
    let d2: f64 = rp.iter().zip(sp.iter()).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok(0.5 * d2.sqrt())
}

/// Which way the frame change runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameDirection {
    /// ϱ̃ = R_t† ϱ R_t (lab state into the rotating frame).
    LabToRotating,
    /// ϱ = R_t ϱ̃ R_t† (rotating-frame state back to the lab).
    RotatingToLab,
}

/// Conjugation by R_t = exp(−iΩtσ₂/2), expressed on rotated-basis Bloch
/// coordinates. A rotation about the lab-frame axis 2, which in the rotated
/// basis is the unit vector (0, Δ/ω_eff, −Ω/ω_eff).
pub fn rotate_frame(
    r: &BlochVector,
    t: f64,
    params: &ModelParams,
    direction: FrameDirection,
) -> Result<BlochVector, BlochError> {
    r.check_physical()?;
    let red = params.reduced()?;
    let w = red.omega_eff();
    let axis = [0.0, 1.0 / w, -red.omega / w];
    // ϱ̃ = R†ϱR = e^{+iθσ₂/2} ϱ e^{−iθσ₂/2} rotates the Bloch vector by −θ
    // about the axis above (θ = Ωt); the inverse direction rotates by +θ.
    let theta = match direction {
        FrameDirection::LabToRotating => -red.omega * t,
        FrameDirection::RotatingToLab => red.omega * t,
    };
    let v = r.polarization();
    let (sin_t, cos_t) = theta.sin_cos();
    let dot: f64 = axis.iter().zip(v.iter()).map(|(a, b)| a * b).sum();
    let cross = [
        axis[1] * v[2] - axis[2] * v[1],
        axis[2] * v[0] - axis[0] * v[2],
        axis[0] * v[1] - axis[1] * v[0],
    ];
    let mut out = [0.0; 3];
    for k in 0..3 {
        out[k] = v[k] * cos_t + cross[k] * sin_t + axis[k] * dot * (1.0 - cos_t);
    }
    Ok(BlochVector([r.0[0], out[0], out[1], out[2]]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{FrequencyConvention, UnitMode};
    use approx::assert_relative_eq;

    fn params_ratio2() -> ModelParams {
        ModelParams::dimensionless(2.0, 1000.0, 10.184, 0.005)
    }

    fn params_static() -> ModelParams {
        ModelParams::dimensionless(0.0, 1000.0, 10.184, 0.005)
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn pauli_algebra_of_rotated_basis() {
        // σ̂_i σ̂_j = δ_ij I + i ε_ijk σ̂_k for all index pairs.
        let basis = pauli_basis(&params_ratio2()).unwrap();
        let eps = |i: usize, j: usize, k: usize| -> f64 {
            match (i, j, k) {
                (1, 2, 3) | (2, 3, 1) | (3, 1, 2) => 1.0,
                (3, 2, 1) | (2, 1, 3) | (1, 3, 2) => -1.0,
                _ => 0.0,
            }
        };
        for i in 1..4 {
            for j in 1..4 {
                let product = basis[i] * basis[j];
                let mut expected = if i == j { basis[0] } else { M2::zeros() };
                for k in 1..4 {
                    expected += basis[k] * C::new(0.0, eps(i, j, k));
                }
                let dev = (product - expected).norm();
                assert!(dev < 1e-14, "pair ({i},{j}): deviation {dev}");
            }
        }
    }

    #[test]
    fn maximally_mixed_is_half_identity() {
        let rho = density_from_bloch(&BlochVector::new(0.0, 0.0, 0.0), &params_ratio2()).unwrap();
        let expected = M2::identity() * C::new(0.5, 0.0);
        assert!((rho.0 - expected).norm() < 1e-15);
    }

    #[test]
    fn north_pole_with_static_hamiltonian() {
        // Ω = 0 makes σ̂₃ = σ₃, so (1,0,0,1) is diag(1,0).
        let rho = density_from_bloch(&BlochVector::new(0.0, 0.0, 1.0), &params_static()).unwrap();
        assert!((rho.0[(0, 0)].re - 1.0).abs() < 1e-15);
        assert!(rho.0[(1, 1)].norm() < 1e-15);
        let r = bloch_from_density(&rho, &params_static()).unwrap();
        assert_relative_eq!(r.0[3], 1.0, epsilon = 1e-12);
        assert!(r.0[1].abs() < 1e-12 && r.0[2].abs() < 1e-12);
    }

    #[test]
    fn figure_state_has_expected_purity() {
        // Tr ρ² = (1 + |r⃗|²)/2 checked against direct 2×2 arithmetic.
        let r = BlochVector::new(0.0, -0.894, -0.447);
        let rho = density_from_bloch(&r, &params_ratio2()).unwrap();
        let purity = (rho.0 * rho.0).trace().re;
        let expected = (1.0 + 0.894f64.powi(2) + 0.447f64.powi(2)) / 2.0;
        assert_relative_eq!(purity, expected, epsilon = 1e-14);
        assert_relative_eq!(purity, 0.9995, epsilon = 1e-4);
        assert_relative_eq!((rho.0).trace().re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn density_rejects_nonfinite_and_bad_trace_component() {
        assert!(density_from_bloch(
            &BlochVector::from_array([1.0, f64::NAN, 0.0, 0.0]),
            &params_ratio2()
        )
        .is_err());
        assert!(density_from_bloch(
            &BlochVector::from_array([0.9, 0.0, 0.0, 0.0]),
            &params_ratio2()
        )
        .is_err());
    }

    #[test]
    fn bloch_from_density_rejects_non_hermitian() {
        let mut m = M2::identity() * C::new(0.5, 0.0);
        m[(0, 1)] = C::new(0.3, 0.0);
        m[(1, 0)] = C::new(-0.3, 0.0);
        assert!(matches!(
            bloch_from_density(&DensityMatrix(m), &params_ratio2()),
            Err(BlochError::NotHermitian { .. })
        ));
    }

    #[test]
    fn entropy_limits() {
        assert_relative_eq!(
            von_neumann_entropy(&BlochVector::new(0.0, 0.0, 0.0)).unwrap(),
            std::f64::consts::LN_2,
            epsilon = 1e-15
        );
        assert_eq!(von_neumann_entropy(&BlochVector::new(0.0, 0.0, 1.0)).unwrap(), 0.0);
        assert!(von_neumann_entropy(&BlochVector::new(0.0, 0.0, 1.0 + 1e-6)).is_err());
        // Tiny overshoot is clamped, not rejected.
        let s = von_neumann_entropy(&BlochVector::new(0.0, 0.0, 1.0 + 5e-10)).unwrap();
        assert_eq!(s, 0.0);
    }

    #[test]
    fn relative_entropy_special_values() {
        let r = BlochVector::new(0.3, -0.2, 0.1);
        assert_relative_eq!(relative_entropy(&r, &r).unwrap(), 0.0, epsilon = 1e-12);
        // Pure vs maximally mixed: log 2.
        let pure = BlochVector::new(0.0, 0.0, 1.0);
        let mixed = BlochVector::new(0.0, 0.0, 0.0);
        assert_relative_eq!(
            relative_entropy(&pure, &mixed).unwrap(),
            std::f64::consts::LN_2,
            epsilon = 1e-12
        );
        // Singular reference with misaligned support diverges.
        assert!(relative_entropy(&mixed, &pure).unwrap().is_infinite());
        assert_eq!(relative_entropy(&pure, &pure).unwrap(), 0.0);
    }

    #[test]
    fn trace_distance_poles() {
        let n = BlochVector::new(0.0, 0.0, 1.0);
        let s = BlochVector::new(0.0, 0.0, -1.0);
        assert_relative_eq!(trace_distance(&n, &s).unwrap(), 1.0, epsilon = 1e-15);
        assert_eq!(trace_distance(&n, &n).unwrap(), 0.0);
    }

    #[test]
    fn rotate_frame_identity_and_full_period() {
        let p = params_ratio2();
        let r = BlochVector::new(0.3, -0.5, 0.2);
        let id = rotate_frame(&r, 0.0, &p, FrameDirection::LabToRotating).unwrap();
        assert_relative_eq!(id.0[1], r.0[1], epsilon = 1e-15);
        let period = std::f64::consts::TAU / 2.0; // Ω = 2
        let full = rotate_frame(&r, period, &p, FrameDirection::LabToRotating).unwrap();
        for k in 0..4 {
            assert_relative_eq!(full.0[k], r.0[k], epsilon = 1e-12);
        }
    }

    #[test]
    fn rotate_frame_round_trip_and_invariants() {
        let p = params_ratio2();
        let r = BlochVector::new(-0.1, 0.6, 0.4);
        let t = 0.7312;
        let fwd = rotate_frame(&r, t, &p, FrameDirection::LabToRotating).unwrap();
        let back = rotate_frame(&fwd, t, &p, FrameDirection::RotatingToLab).unwrap();
        for k in 0..4 {
            assert_relative_eq!(back.0[k], r.0[k], epsilon = 1e-13);
        }
        assert_relative_eq!(
            fwd.polarization_norm(),
            r.polarization_norm(),
            epsilon = 1e-13
        );
        assert_relative_eq!(
            von_neumann_entropy(&fwd).unwrap(),
            von_neumann_entropy(&r).unwrap(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn physical_and_dimensionless_bases_agree() {
        let phys = ModelParams {
            delta: 8.0,
            omega_drive: 16.0,
            lambda_coupling: 0.005,
            temperature: 0.006,
            omega_cutoff: 8000.0,
            unit_mode: UnitMode::Physical,
            frequency_convention: FrequencyConvention::Angular,
        };
        let ba = pauli_basis(&phys).unwrap();
        let bb = pauli_basis(&params_ratio2()).unwrap();
        for (a, b) in ba.iter().zip(bb.iter()) {
            assert!((a - b).norm() < 1e-14);
        }
    }
}
