//! Small dense linear-algebra helpers: the 4×4 real matrix exponential and
//! Hermitian eigenvalues through a real symmetric embedding.

use nalgebra::{DMatrix, Matrix4};
use num_complex::Complex64;

type C = Complex64;

/// Padé(13) coefficients (Higham 2005 scaling-and-squaring).
const PADE13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

/// Matrix 1-norm (maximum column sum).
fn one_norm(a: &Matrix4<f64>) -> f64 {
    (0..4)
        .map(|j| (0..4).map(|i| a[(i, j)].abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// exp(A) for a real 4×4 matrix by scaling-and-squaring with the Padé(13)
/// approximant.
pub fn expm(a: &Matrix4<f64>) -> Matrix4<f64> {
    let theta13 = 5.371_920_351_148_152;
    let norm = one_norm(a);
    let s = if norm > theta13 { (norm / theta13).log2().ceil() as u32 } else { 0 };
    let a_scaled = a / 2f64.powi(s as i32);

    let a2 = a_scaled * a_scaled;
    let a4 = a2 * a2;
    let a6 = a2 * a4;
    let eye = Matrix4::identity();

    let u_inner = a6 * (a6 * PADE13[13] + a4 * PADE13[11] + a2 * PADE13[9])
        + a6 * PADE13[7]
        + a4 * PADE13[5]
        + a2 * PADE13[3]
        + eye * PADE13[1];
    let u = a_scaled * u_inner;
    let v = a6 * (a6 * PADE13[12] + a4 * PADE13[10] + a2 * PADE13[8])
        + a6 * PADE13[6]
        + a4 * PADE13[4]
        + a2 * PADE13[2]
        + eye * PADE13[0];

    let denom = v - u;
    let numer = v + u;
    let mut x = denom
        .lu()
        .solve(&numer)
        .unwrap_or_else(|| panic!("singular Padé denominator in expm"));
    for _ in 0..s {
        x = x * x;
    }
    x
}

/// Eigenvalues of an n×n complex Hermitian matrix, ascending.
///
/// H = A + iB with A symmetric and B antisymmetric embeds into the real
/// symmetric 2n×2n matrix [[A, −B], [B, A]], whose spectrum is that of H
/// with every eigenvalue doubled.
pub fn hermitian_eigenvalues(h: &[Vec<C>]) -> Vec<f64> {
    let n = h.len();
    let mut m = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let a = 0.5 * (h[i][j].re + h[j][i].re);
            let b = 0.5 * (h[i][j].im - h[j][i].im);
            m[(i, j)] = a;
            m[(n + i, n + j)] = a;
            m[(i, n + j)] = -b;
            m[(n + i, j)] = b;
        }
    }
    let mut eig: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
    eig.sort_by(f64::total_cmp);
    (0..n).map(|k| 0.5 * (eig[2 * k] + eig[2 * k + 1])).collect()
}
