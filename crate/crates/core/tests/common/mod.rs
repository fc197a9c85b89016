//! Shared independent oracles for the integration tests. Everything here
//! deliberately avoids the library's own numerical paths: plain Simpson
//! sums for bath integrals, an embedded Runge–Kutta pair for propagation,
//! closed-form 2×2 eigensystems for entropies.

#![allow(dead_code)]

use nalgebra::{Matrix2, Matrix4, Vector4};
use num_complex::Complex64;
use oqs_core::BlochVector;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

pub type C = Complex64;
pub type M2 = Matrix2<Complex64>;

/// Uniform random point of the closed Bloch ball.
pub fn random_ball_state(rng: &mut ChaCha12Rng) -> BlochVector {
    let z: f64 = rng.gen_range(-1.0..=1.0);
    let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let r = rng.gen_range(0.0..=1.0f64).cbrt();
    let s = (1.0 - z * z).max(0.0).sqrt();
    BlochVector::new(r * s * phi.cos(), r * s * phi.sin(), r * z)
}

pub fn seeded(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

/// Eigenvalues of a Hermitian 2×2 matrix via trace/determinant.
pub fn eig2_hermitian(m: &M2) -> (f64, f64) {
    let a = m[(0, 0)].re;
    let d = m[(1, 1)].re;
    let mean = 0.5 * (a + d);
    let radius = (0.25 * (a - d) * (a - d) + m[(0, 1)].norm_sqr()).sqrt();
    (mean + radius, mean - radius)
}

/// −Σ λ log λ over the spectrum of a density matrix.
pub fn entropy_of_density(rho: &M2) -> f64 {
    let (l1, l2) = eig2_hermitian(rho);
    let mut s = 0.0;
    for l in [l1, l2] {
        if l > 0.0 {
            s -= l * l.ln();
        }
    }
    s
}

/// Tr ρ (log ρ − log σ) through both spectral decompositions.
pub fn relative_entropy_of_densities(rho: &M2, sigma: &M2) -> f64 {
    // log σ from projectors
    let (s1, s2) = eig2_hermitian(sigma);
    let b = sigma[(0, 1)];
    let (p1, p2) = if b.norm() > 1e-14 {
        let v = nalgebra::Vector2::new(b, C::new(s1 - sigma[(0, 0)].re, 0.0));
        let v = v / C::new(v.norm(), 0.0);
        let p1 = v * v.adjoint();
        (p1, M2::identity() - p1)
    } else if sigma[(0, 0)].re >= sigma[(1, 1)].re {
        let p1 = M2::new(C::new(1.0, 0.0), C::new(0.0, 0.0), C::new(0.0, 0.0), C::new(0.0, 0.0));
        (p1, M2::identity() - p1)
    } else {
        let p1 = M2::new(C::new(0.0, 0.0), C::new(0.0, 0.0), C::new(0.0, 0.0), C::new(1.0, 0.0));
        (p1, M2::identity() - p1)
    };
    let log_sigma = p1 * C::new(s1.ln(), 0.0) + p2 * C::new(s2.ln(), 0.0);
    -entropy_of_density(rho) - (rho * log_sigma).trace().re
}

/// Dormand–Prince 5(4) adaptive integrator for dr/dt = A·r.
pub fn dopri5(a: &Matrix4<f64>, r0: Vector4<f64>, t_end: f64, tol: f64) -> Vector4<f64> {
    if t_end == 0.0 {
        return r0;
    }
    const B: [[f64; 6]; 6] = [
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
        [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
        [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
    ];
    const C5: [f64; 7] =
        [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
    const C4: [f64; 7] = [
        5179.0 / 57600.0,
        0.0,
        7571.0 / 16695.0,
        393.0 / 640.0,
        -92097.0 / 339200.0,
        187.0 / 2100.0,
        1.0 / 40.0,
    ];
    let f = |r: &Vector4<f64>| a * r;
    let mut t = 0.0;
    let mut y = r0;
    let mut h = (t_end / 100.0).clamp(1e-8, 0.05);
    let mut k = [Vector4::zeros(); 7];
    k[0] = f(&y);
    while t < t_end {
        if t + h > t_end {
            h = t_end - t;
        }
        for stage in 1..7 {
            let mut arg = y;
            for j in 0..stage {
                arg += k[j] * (B[stage - 1][j] * h);
            }
            k[stage] = f(&arg);
        }
        let mut y5 = y;
        let mut y4 = y;
        for j in 0..7 {
            y5 += k[j] * (C5[j] * h);
            y4 += k[j] * (C4[j] * h);
        }
        let err = (y5 - y4).norm().max(1e-300);
        let scale = tol * (1.0 + y.norm());
        if err <= scale {
            t += h;
            y = y5;
            k[0] = k[6]; // FSAL
        }
        h *= (0.9 * (scale / err).powf(0.2)).clamp(0.2, 5.0);
        if h < 1e-14 {
            panic!("dopri5 step collapsed at t = {t}");
        }
    }
    y
}

/// Bath correlation G(u) by plain Simpson sums over the defining
/// ω-integral, J(ω)coth(βω/2)cos(ωu) − i J(ω)sin(ωu), with the ω → 0
/// limit substituted. Independent of the library's split/closed forms.
pub struct SimpsonBath {
    omega: Vec<f64>,
    weight: Vec<f64>,
    j_coth: Vec<f64>,
    j: Vec<f64>,
}

impl SimpsonBath {
    pub fn new(omega_c: f64, beta: f64, omega_hi: f64, n: usize) -> SimpsonBath {
        let n = if n.is_multiple_of(2) { n + 1 } else { n }; // Simpson needs odd count
        let h = omega_hi / (n - 1) as f64;
        let mut omega = Vec::with_capacity(n);
        let mut weight = Vec::with_capacity(n);
        let mut j_coth = Vec::with_capacity(n);
        let mut j = Vec::with_capacity(n);
        for i in 0..n {
            let w = i as f64 * h;
            let simpson = if i == 0 || i == n - 1 {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            } * h
                / 3.0;
            let jw = w * (-w / omega_c).exp();
            let jc = if beta.is_infinite() {
                jw
            } else if beta * w < 1e-8 {
                2.0 / beta
            } else {
                jw * (1.0 + 2.0 / (2.0f64 * 0.5 * beta * w).exp_m1())
            };
            omega.push(w);
            weight.push(simpson);
            j_coth.push(jc);
            j.push(jw);
        }
        SimpsonBath { omega, weight, j_coth, j }
    }

    pub fn correlation(&self, u: f64) -> C {
        let mut re = 0.0;
        let mut im = 0.0;
        for i in 0..self.omega.len() {
            let (s, c) = (self.omega[i] * u).sin_cos();
            re += self.weight[i] * self.j_coth[i] * c;
            im -= self.weight[i] * self.j[i] * s;
        }
        C::new(re, im)
    }
}
