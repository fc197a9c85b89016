//! Assembly of the 4×4 Bloch-space generators and their complete-positivity
//! diagnostics.
//!
//! Both generators act in the vector master equation d|ϱ̃⟩/dt = −2𝓛|ϱ̃⟩ on
//! coordinates (r₀, r₁, r₂, r₃) of the rotated Pauli basis, and decompose as
//! 𝓛 = ℋ_eff + λ²ℋ_LS + λ²𝒟 with ℋ_eff the bare rotation of Bloch
//! components 1–2 at ω_eff.
//!
//! The Redfield dissipator is assembled from the one-sided bath transforms
//! through the trigonometric expansion of the doubly rotated coupling
//! operators: every coefficient is a linear combination of the four
//! transform kinds at the three frequencies {ω_eff − Ω, Ω, ω_eff + Ω}. The
//! u-kernel enters the coefficient integrals conjugated (C_{−u} in place of
//! C_u); this ordering reproduces the closed-form stationary polarization
//! r₃^eq = [(ω−Ω)²J₊ + (ω+Ω)²J₋] / [(ω−Ω)²c₊J₊ + (ω+Ω)²c₋J₋] and the
//! published coefficient integrals of this model family, and is validated
//! against them in the acceptance suite.

use nalgebra::{Matrix3, Matrix4, Vector3};
use num_complex::Complex64;
use thiserror::Error;

use crate::bath::{
    one_sided_transform, BathError, CorrelationPart, SpectralModel, TimeKernel, TransformRequest,
};
use crate::bloch::BlochVector;
use crate::linalg::{expm, hermitian_eigenvalues};
use crate::params::{ModelParams, ParamsError, ReducedParams};

type C = Complex64;

/// Which master-equation construction produced a generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorKind {
    Redfield,
    WeakCoupling,
}

/// Additive parts of the generator; `matrix = hamiltonian + λ²(lamb_shift +
/// dissipative)`. The parts themselves are λ-free and in units of Δ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorParts {
    pub hamiltonian: Matrix4<f64>,
    pub lamb_shift: Matrix4<f64>,
    pub dissipative: Matrix4<f64>,
}

/// Real 4×4 generator in the −2𝓛 convention, with its decomposition.
#[derive(Debug, Clone)]
pub struct BlochGenerator {
    pub matrix: Matrix4<f64>,
    pub parts: GeneratorParts,
    pub kind: GeneratorKind,
    pub params: ModelParams,
}

/// Kossakowski matrix of the dissipative part in the rotated Pauli basis,
/// its eigenvalues (ascending), and the coherent (commutator) remainder.
#[derive(Debug, Clone)]
pub struct KossakowskiData {
    pub matrix: Matrix3<C>,
    pub eigenvalues: [f64; 3],
    pub lamb_shift_vector: [f64; 3],
}

#[derive(Debug, Error)]
pub enum GeneratorError {
    #[error(transparent)]
    Params(#[from] ParamsError),
    #[error(transparent)]
    Bath(#[from] BathError),
    #[error("stationary state is degenerate: 3x3 relaxation block is singular (condition {0:e})")]
    DegenerateStationaryState(f64),
    #[error("generator is malformed: first-row residual {0:e} exceeds 1e-10")]
    MalformedGenerator(f64),
}

impl BlochGenerator {
    pub fn reduced(&self) -> ReducedParams {
        self.params.reduced().expect("params were validated at construction")
    }

    pub fn omega_eff(&self) -> f64 {
        self.reduced().omega_eff()
    }

    /// Period 2π/ω_eff of the coherent rotation, in units of 1/Δ.
    pub fn effective_period(&self) -> f64 {
        std::f64::consts::TAU / self.omega_eff()
    }
}

/// ℋ_eff of the vector master equation: rotation of components 1–2.
fn hamiltonian_part(omega_eff: f64) -> Matrix4<f64> {
    let mut h = Matrix4::zeros();
    h[(1, 2)] = 0.5 * omega_eff;
    h[(2, 1)] = -0.5 * omega_eff;
    h
}

/// The four one-sided transforms at frequency ν, packed as the complex pair
/// (∫G*·cos, ∫G*·sin): the conjugated kernel flips the sign of the
/// imaginary-part transforms.
fn complex_transforms(nu: f64, model: &SpectralModel) -> Result<(C, C), BathError> {
    let get = |kernel, part| {
        one_sided_transform(&TransformRequest { nu, time_kernel: kernel, correlation_part: part }, model)
    };
    let tc = C::new(
        get(TimeKernel::Cos, CorrelationPart::Real)?,
        -get(TimeKernel::Cos, CorrelationPart::Imag)?,
    );
    let ts = C::new(
        get(TimeKernel::Sin, CorrelationPart::Real)?,
        -get(TimeKernel::Sin, CorrelationPart::Imag)?,
    );
    Ok((tc, ts))
}

/// Coupling-operator correlation matrix W_{jk} = Σ_ξ b_{ξj} ∫₀^∞du G(u) a_{ξk}(u).
///
/// a_{ξk}(u) are the coefficients of e^{uℍ_eff}[σ̃_ξ(−u)] over σ̂_k, reduced
/// by hand to trigonometric lines at ν∓ = ω_eff ∓ Ω and Ω:
///   a₁₁ = ½(1+Ω/ω)cos(ν₋u) + ½(1−Ω/ω)cos(ν₊u)
///   a₁₂ = ½(1−Ω/ω)sin(ν₊u) + ½(1+Ω/ω)sin(ν₋u)
///   a₁₃ = −(Δ/ω)sin(Ωu)
///   a₃₁ = ½(1−Ω/ω)sin(ν₊u) − ½(1+Ω/ω)sin(ν₋u)
///   a₃₂ = ½(1+Ω/ω)cos(ν₋u) − ½(1−Ω/ω)cos(ν₊u)
///   a₃₃ = (Δ/ω)cos(Ωu)
/// and b₁ = (1, 0, 0), b₃ = (0, Ω/ω, Δ/ω).
fn coupling_matrix(red: &ReducedParams, model: &SpectralModel) -> Result<Matrix3<C>, BathError> {
    let w_eff = red.omega_eff();
    let omega = red.omega;
    let nu_minus = w_eff - omega;
    let nu_plus = w_eff + omega;
    let cm = 0.5 * (1.0 + omega / w_eff);
    let cp = 0.5 * (1.0 - omega / w_eff);
    let delta_ratio = 1.0 / w_eff; // Δ/ω_eff with Δ = 1

    let (tc_m, ts_m) = complex_transforms(nu_minus, model)?;
    let (tc_p, ts_p) = complex_transforms(nu_plus, model)?;
    let (tc_o, ts_o) = complex_transforms(omega, model)?;

    let i11 = tc_m * cm + tc_p * cp;
    let i12 = ts_p * cp + ts_m * cm;
    let i13 = -ts_o * delta_ratio;
    let i31 = ts_p * cp - ts_m * cm;
    let i32 = tc_m * cm - tc_p * cp;
    let i33 = tc_o * delta_ratio;

    let row1 = [i11, i12, i13];
    let row3 = [i31, i32, i33];
    let mut w = Matrix3::zeros();
    for k in 0..3 {
        w[(0, k)] = row1[k];
        w[(1, k)] = row3[k] * C::new(omega / w_eff, 0.0);
        w[(2, k)] = row3[k] * C::new(delta_ratio, 0.0);
    }
    Ok(w)
}

/// Split W into the Bloch-space Lamb-shift (antisymmetric) and dissipative
/// (symmetric block + inhomogeneous column) parts.
///
/// With K = W + W† the GKSL coefficient matrix, the dissipative Bloch block
/// is tr(ReK)·I − ReK, the inhomogeneous column comes from the antisymmetric
/// Im K, and the Lamb-shift Hamiltonian h⃗·σ̂ has h_l = Σ_{jk} ε_{jkl} Re W_{jk}.
fn split_parts(w: &Matrix3<C>) -> (Matrix4<f64>, Matrix4<f64>) {
    let mut re_k = Matrix3::<f64>::zeros();
    let mut im_k = Matrix3::<f64>::zeros();
    for j in 0..3 {
        for k in 0..3 {
            let kjk = w[(j, k)] + w[(k, j)].conj();
            re_k[(j, k)] = kjk.re;
            im_k[(j, k)] = kjk.im;
        }
    }
    let trace = re_k.trace();

    let mut dissipative = Matrix4::zeros();
    for j in 0..3 {
        for k in 0..3 {
            dissipative[(j + 1, k + 1)] = if j == k { trace - re_k[(j, k)] } else { -re_k[(j, k)] };
        }
    }
    // Inhomogeneous column: D_{l0} = −2 Im K on the cyclic pair of l.
    dissipative[(1, 0)] = -2.0 * im_k[(1, 2)];
    dissipative[(2, 0)] = -2.0 * im_k[(2, 0)];
    dissipative[(3, 0)] = -2.0 * im_k[(0, 1)];

    // Lamb shift: h_l = ε_{jkl} Re W_{jk} (antisymmetrized).
    let h1 = (w[(1, 2)] - w[(2, 1)]).re;
    let h2 = (w[(2, 0)] - w[(0, 2)]).re;
    let h3 = (w[(0, 1)] - w[(1, 0)]).re;
    let mut lamb = Matrix4::zeros();
    lamb[(1, 2)] = h3;
    lamb[(2, 1)] = -h3;
    lamb[(1, 3)] = -h2;
    lamb[(3, 1)] = h2;
    lamb[(2, 3)] = h1;
    lamb[(3, 2)] = -h1;
    (lamb, dissipative)
}

fn assemble(
    params: &ModelParams,
    kind: GeneratorKind,
    hamiltonian: Matrix4<f64>,
    lamb_shift: Matrix4<f64>,
    dissipative: Matrix4<f64>,
) -> BlochGenerator {
    let lambda2 = params
        .reduced()
        .map(|r| r.lambda * r.lambda)
        .expect("params validated by the caller");
    BlochGenerator {
        matrix: hamiltonian + (lamb_shift + dissipative) * lambda2,
        parts: GeneratorParts { hamiltonian, lamb_shift, dissipative },
        kind,
        params: *params,
    }
}

/// Redfield generator 𝓛 = ℋ_eff + λ²(ℋ_LS + 𝒟) from the one-sided bath
/// transforms.
pub fn build_redfield(
    params: &ModelParams,
    model: &SpectralModel,
) -> Result<BlochGenerator, GeneratorError> {
    let red = params.reduced()?;
    let w = coupling_matrix(&red, model)?;
    let (lamb, diss) = split_parts(&w);
    Ok(assemble(params, GeneratorKind::Redfield, hamiltonian_part(red.omega_eff()), lamb, diss))
}

/// Completely positive weak-coupling generator: the sparse ergodic-average
/// form, built directly from the transforms at ν∓ and Ω.
pub fn build_weak_coupling(
    params: &ModelParams,
    model: &SpectralModel,
) -> Result<BlochGenerator, GeneratorError> {
    let red = params.reduced()?;
    let w_eff = red.omega_eff();
    let omega = red.omega;
    let nu_minus = w_eff - omega;
    let nu_plus = w_eff + omega;
    let weight_m = (1.0 + omega / w_eff).powi(2); // (ω+Ω)²/ω², pairs with ν₋
    let weight_p = (1.0 - omega / w_eff).powi(2); // (ω−Ω)²/ω², pairs with ν₊

    let t = |nu: f64, kernel, part| {
        one_sided_transform(&TransformRequest { nu, time_kernel: kernel, correlation_part: part }, model)
    };
    let trc_m = t(nu_minus, TimeKernel::Cos, CorrelationPart::Real)?;
    let trc_p = t(nu_plus, TimeKernel::Cos, CorrelationPart::Real)?;
    let trc_o = t(omega, TimeKernel::Cos, CorrelationPart::Real)?;
    let tis_m = t(nu_minus, TimeKernel::Sin, CorrelationPart::Imag)?;
    let tis_p = t(nu_plus, TimeKernel::Sin, CorrelationPart::Imag)?;
    let trs_m = t(nu_minus, TimeKernel::Sin, CorrelationPart::Real)?;
    let trs_p = t(nu_plus, TimeKernel::Sin, CorrelationPart::Real)?;

    let k33 = weight_m * trc_m + weight_p * trc_p;
    // conjugated kernel: the inhomogeneous drive keeps the raw sin/imag sign
    let k30 = weight_m * tis_m + weight_p * tis_p;
    let transverse = 2.0 * trc_o / (w_eff * w_eff) + 0.5 * k33;
    let h12 = 0.5 * (weight_p * trs_p + weight_m * trs_m);

    let mut diss = Matrix4::zeros();
    diss[(1, 1)] = transverse;
    diss[(2, 2)] = transverse;
    diss[(3, 3)] = k33;
    diss[(3, 0)] = k30;

    let mut lamb = Matrix4::zeros();
    lamb[(1, 2)] = h12;
    lamb[(2, 1)] = -h12;

    Ok(assemble(params, GeneratorKind::WeakCoupling, hamiltonian_part(w_eff), lamb, diss))
}

/// Time average of e^{−2tℋ_eff}·B·e^{2tℋ_eff} over one period 2π/ω_eff,
/// evaluated in closed form: only the rotation-invariant components of B
/// survive (equal 1–2 diagonal, antisymmetric 1–2 pair, the 3–3 entry and
/// the inhomogeneous 3-component).
fn rotation_average(b: &Matrix4<f64>) -> Matrix4<f64> {
    let mut out = Matrix4::zeros();
    let diag = 0.5 * (b[(1, 1)] + b[(2, 2)]);
    let skew = 0.5 * (b[(1, 2)] - b[(2, 1)]);
    out[(1, 1)] = diag;
    out[(2, 2)] = diag;
    out[(1, 2)] = skew;
    out[(2, 1)] = -skew;
    out[(3, 3)] = b[(3, 3)];
    out[(3, 0)] = b[(3, 0)];
    out
}

/// Ergodic (secular) average of a generator: the dissipative and Lamb-shift
/// parts are averaged over one coherent rotation period and added back to
/// ℋ_eff. Idempotent; maps the Redfield generator onto the weak-coupling
/// sparsity pattern.
pub fn secular_average(g: &BlochGenerator) -> Result<BlochGenerator, GeneratorError> {
    let lamb = rotation_average(&g.parts.lamb_shift);
    let diss = rotation_average(&g.parts.dissipative);
    Ok(assemble(&g.params, GeneratorKind::WeakCoupling, g.parts.hamiltonian, lamb, diss))
}

/// Unique stationary Bloch vector with r₀ = 1, from the inhomogeneous 3×3
/// solve on the lower-right block.
pub fn stationary_bloch(g: &BlochGenerator) -> Result<BlochVector, GeneratorError> {
    let m = &g.matrix;
    let block = Matrix3::new(
        m[(1, 1)], m[(1, 2)], m[(1, 3)],
        m[(2, 1)], m[(2, 2)], m[(2, 3)],
        m[(3, 1)], m[(3, 2)], m[(3, 3)],
    );
    let rhs = -Vector3::new(m[(1, 0)], m[(2, 0)], m[(3, 0)]);
    let inv = block
        .try_inverse()
        .ok_or(GeneratorError::DegenerateStationaryState(f64::INFINITY))?;
    let cond = block.norm() * inv.norm();
    if !cond.is_finite() || cond > 1e12 {
        return Err(GeneratorError::DegenerateStationaryState(cond));
    }
    let x = inv * rhs;
    Ok(BlochVector([1.0, x[0], x[1], x[2]]))
}

/// Closed-form stationary polarization of the weak-coupling generator,
///   r₃^eq = [(ω−Ω)²J₊ + (ω+Ω)²J₋] / [(ω−Ω)²c₊J₊ + (ω+Ω)²c₋J₋],
/// with J± = J(ω_eff ± Ω) and c± = coth(βħ(ω_eff ± Ω)/2); the ν₋ → 0 end is
/// continued through the finite limit of J·coth.
pub fn r3_equilibrium(params: &ModelParams, model: &SpectralModel) -> Result<f64, GeneratorError> {
    let red = params.reduced()?;
    let w_eff = red.omega_eff();
    let nu_m = w_eff - red.omega;
    let nu_p = w_eff + red.omega;
    let j_p = crate::bath::spectral_density(nu_p, model)?;
    let j_m = crate::bath::spectral_density(nu_m, model)?;
    let jc_p = crate::bath::j_coth(nu_p, model);
    let jc_m = crate::bath::j_coth(nu_m, model);
    let numerator = nu_m * nu_m * j_p + nu_p * nu_p * j_m;
    let denominator = nu_m * nu_m * jc_p + nu_p * nu_p * jc_m;
    Ok(numerator / denominator)
}

/// Kossakowski matrix of the bath-induced block, in the σ̂ Pauli basis.
///
/// The input is the λ-free non-Hamiltonian part (Lamb shift + dissipator).
/// Its symmetric 3×3 block and inhomogeneous column define the Hermitian
/// coefficient matrix K of Σ_{jk} K_{jk}(σ̂_k ρ σ̂_j − ½{σ̂_j σ̂_k, ρ});
/// the antisymmetric remainder is returned as the commutator vector h⃗,
/// i.e. the Bloch matrix of −(i/ħ)[h⃗·σ̂, ρ]. The generator is a GKSL (CP
/// semigroup) generator iff all eigenvalues of K are ≥ 0.
pub fn kossakowski_spectrum(g: &BlochGenerator) -> Result<KossakowskiData, GeneratorError> {
    let b = g.parts.lamb_shift + g.parts.dissipative;
    let first_row = (0..4).map(|j| b[(0, j)].abs()).fold(0.0, f64::max);
    if first_row > 1e-10 {
        return Err(GeneratorError::MalformedGenerator(first_row));
    }
    let mut sym = Matrix3::<f64>::zeros();
    let mut asym = Matrix3::<f64>::zeros();
    for i in 0..3 {
        for j in 0..3 {
            sym[(i, j)] = 0.5 * (b[(i + 1, j + 1)] + b[(j + 1, i + 1)]);
            asym[(i, j)] = 0.5 * (b[(i + 1, j + 1)] - b[(j + 1, i + 1)]);
        }
    }
    let lamb_shift_vector = [asym[(1, 2)], -asym[(0, 2)], asym[(0, 1)]];

    let trace_k = 0.5 * sym.trace();
    let re_k = Matrix3::identity() * trace_k - sym;
    let m12 = -0.5 * b[(3, 0)];
    let m23 = -0.5 * b[(1, 0)];
    let m31 = -0.5 * b[(2, 0)];
    let mut k = Matrix3::<C>::zeros();
    for i in 0..3 {
        for j in 0..3 {
            k[(i, j)] = C::new(re_k[(i, j)], 0.0);
        }
    }
    k[(0, 1)] += C::new(0.0, m12);
    k[(1, 0)] -= C::new(0.0, m12);
    k[(1, 2)] += C::new(0.0, m23);
    k[(2, 1)] -= C::new(0.0, m23);
    k[(2, 0)] += C::new(0.0, m31);
    k[(0, 2)] -= C::new(0.0, m31);

    let rows: Vec<Vec<C>> = (0..3).map(|i| (0..3).map(|j| k[(i, j)]).collect()).collect();
    let eig = hermitian_eigenvalues(&rows);
    Ok(KossakowskiData {
        matrix: k,
        eigenvalues: [eig[0], eig[1], eig[2]],
        lamb_shift_vector,
    })
}

/// Minimum eigenvalue of (Λ_t ⊗ id) applied to the maximally entangled
/// two-qubit state, with Λ_t = exp(−2t𝓛) as a qubit channel. Negative
/// values certify that Λ_t is not completely positive.
pub fn choi_minimum_eigenvalue(g: &BlochGenerator, t: f64) -> Result<f64, GeneratorError> {
    let basis = crate::bloch::pauli_basis(&g.params)?;
    let mut map = expm(&(-2.0 * t * g.matrix));
    map[(0, 0)] = 1.0;
    map[(0, 1)] = 0.0;
    map[(0, 2)] = 0.0;
    map[(0, 3)] = 0.0;

    // Λ on an arbitrary 2×2 matrix through its complex Bloch coordinates.
    let apply = |x: &nalgebra::Matrix2<C>| -> nalgebra::Matrix2<C> {
        let coords: Vec<C> = basis.iter().map(|s| (s * x).trace()).collect();
        let mut out_coords = [C::new(0.0, 0.0); 4];
        for (i, out) in out_coords.iter_mut().enumerate() {
            for (mu, c) in coords.iter().enumerate() {
                *out += c * map[(i, mu)];
            }
        }
        let mut out = nalgebra::Matrix2::<C>::zeros();
        for (mu, s) in basis.iter().enumerate() {
            out += s * (out_coords[mu] * 0.5);
        }
        out
    };

    // Choi matrix C_{(a,b),(c,d)} = ½ Λ[E_{bd}]_{ac}.
    let mut choi = [[C::new(0.0, 0.0); 4]; 4];
    for b_idx in 0..2 {
        for d in 0..2 {
            let mut e = nalgebra::Matrix2::<C>::zeros();
            e[(b_idx, d)] = C::new(1.0, 0.0);
            let mapped = apply(&e);
            for a in 0..2 {
                for c in 0..2 {
                    choi[2 * a + b_idx][2 * c + d] = 0.5 * mapped[(a, c)];
                }
            }
        }
    }
    // Hermitize to shed roundoff before the eigensolve.
    let rows: Vec<Vec<C>> = (0..4)
        .map(|i| (0..4).map(|j| 0.5 * (choi[i][j] + choi[j][i].conj())).collect())
        .collect();
    let eig = hermitian_eigenvalues(&rows);
    Ok(eig[0])
}
