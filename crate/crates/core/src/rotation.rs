//! Rotation of scalar and vector spherical-harmonic expansions by Wigner
//! matrices (z-y-z Euler convention).
//!
//! For the no-Condon-Shortley harmonics used here, the active rotation
//! `g(x) = f(R^{-1} x)` with `R = Rz(alpha) Ry(beta) Rz(gamma)` acts on
//! coefficients as
//!
//! `g_{n,m'} = sum_m s(m) s(m') e^{-i m' alpha} d^n_{m'm}(beta) e^{-i m gamma} f_{n,m}`
//!
//! with `s(m) = (-1)^{max(m,0)}` and the standard-convention Wigner-d
//! `d^n_{m'm} = <n m'| e^{-i beta Jy} |n m>`, computed per (m', m) through
//! the Jacobi-polynomial three-term recurrence with log-Gamma normalized
//! seeds (stable and overflow-free through p = 256).
//!
//! The V/W/X vector harmonics are built from rotation-equivariant operations
//! (surface gradient, radial direction, cross product), so a vector
//! expansion rotates channel-by-channel with the same matrices.

use crate::coeffs::{coeff_index, ScalarCoeffs, VectorCoeffsVWX};
use crate::error::{Error, Result};
use crate::linalg::{normalize, Vec3};
use crate::Complex;

/// A proper rotation, stored as a matrix; z-y-z Euler angles are extracted
/// on demand for the Wigner path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation {
    pub mat: [[f64; 3]; 3],
}

impl Rotation {
    pub fn identity() -> Self {
        Self { mat: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]] }
    }

    pub fn from_euler_zyz(alpha: f64, beta: f64, gamma: f64) -> Self {
        let (sa, ca) = alpha.sin_cos();
        let (sb, cb) = beta.sin_cos();
        let (sg, cg) = gamma.sin_cos();
        // Rz(alpha) Ry(beta) Rz(gamma)
        let mat = [
            [ca * cb * cg - sa * sg, -ca * cb * sg - sa * cg, ca * sb],
            [sa * cb * cg + ca * sg, -sa * cb * sg + ca * cg, sa * sb],
            [-sb * cg, sb * sg, cb],
        ];
        Self { mat }
    }

    /// z-y-z Euler angles (alpha, beta, gamma) with beta in [0, pi].
    pub fn euler_zyz(&self) -> (f64, f64, f64) {
        let m = &self.mat;
        let cb = m[2][2].clamp(-1.0, 1.0);
        let beta = cb.acos();
        let sb = (1.0 - cb * cb).sqrt();
        if sb > 1e-12 {
            let alpha = m[1][2].atan2(m[0][2]);
            let gamma = m[2][1].atan2(-m[2][0]);
            (alpha, beta, gamma)
        } else if cb > 0.0 {
            // beta ~ 0: pure z-rotation by alpha+gamma
            (m[1][0].atan2(m[0][0]), 0.0, 0.0)
        } else {
            // beta ~ pi: alpha-gamma determined
            ((-m[0][0]).acos().copysign(m[0][1]).atan2(1.0) * 0.0 + m[0][1].atan2(-m[0][0]), std::f64::consts::PI, 0.0)
        }
    }

    pub fn compose(&self, other: &Rotation) -> Rotation {
        let mut m = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                for (k, row) in other.mat.iter().enumerate() {
                    m[i][j] += self.mat[i][k] * row[j];
                }
            }
        }
        Rotation { mat: m }
    }

    pub fn inverse(&self) -> Rotation {
        let m = &self.mat;
        Rotation {
            mat: [
                [m[0][0], m[1][0], m[2][0]],
                [m[0][1], m[1][1], m[2][1]],
                [m[0][2], m[1][2], m[2][2]],
            ],
        }
    }

    pub fn apply(&self, v: Vec3) -> Vec3 {
        let m = &self.mat;
        [
            m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
            m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
            m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
        ]
    }
}

/// Rotation mapping +z to `center/|center|`, with the third Euler angle
/// fixed to zero.
pub fn align_pole(center: Vec3) -> Result<Rotation> {
    let dir = normalize(center).map_err(|_| Error::InvalidArgument("align_pole: zero center".into()))?;
    let beta = dir[2].clamp(-1.0, 1.0).acos();
    let alpha = if dir[0].abs() + dir[1].abs() > 0.0 { dir[1].atan2(dir[0]) } else { 0.0 };
    Ok(Rotation::from_euler_zyz(alpha, beta, 0.0))
}

fn ln_factorial(n: usize) -> f64 {
    // exact for small n, Stirling-free ladder otherwise
    let mut acc = 0.0;
    for k in 2..=n {
        acc += (k as f64).ln();
    }
    acc
}

/// Standard-convention Wigner little-d value `d^n_{m'm}(beta)`, beta in [0, pi].
pub fn wigner_d(n: usize, mp: i64, m: i64, beta: f64) -> f64 {
    debug_assert!(mp.unsigned_abs() as usize <= n && m.unsigned_abs() as usize <= n);
    let k = n - mp.unsigned_abs().max(m.unsigned_abs()) as usize;
    let a = (mp - m).unsigned_abs() as usize;
    let b = (mp + m).unsigned_abs() as usize;
    let zeta = if m >= mp { 1.0 } else if (mp - m) % 2 == 0 { 1.0 } else { -1.0 };
    let lnc = 0.5
        * (ln_factorial(k) + ln_factorial(k + a + b) - ln_factorial(k + a) - ln_factorial(k + b));
    let (s, c) = ((beta / 2.0).sin(), (beta / 2.0).cos());
    // sin^a cos^b in log space to avoid premature underflow at high degree
    let angular = if s == 0.0 || c == 0.0 {
        // exact pole cases
        if (s == 0.0 && a > 0) || (c == 0.0 && b > 0) {
            0.0
        } else {
            lnc.exp()
        }
    } else {
        (lnc + a as f64 * s.ln() + b as f64 * c.ln()).exp()
    };
    if angular == 0.0 {
        return 0.0;
    }
    // Jacobi P_k^{(a,b)}(cos beta) by the three-term recurrence
    let x = beta.cos();
    let (af, bf) = (a as f64, b as f64);
    let mut p0 = 1.0;
    if k == 0 {
        return zeta * angular * p0;
    }
    let mut p1 = (af - bf) / 2.0 + (1.0 + (af + bf) / 2.0) * x;
    for kk in 2..=k {
        let kf = kk as f64;
        let c1 = 2.0 * kf * (kf + af + bf) * (2.0 * kf + af + bf - 2.0);
        let c2 = (2.0 * kf + af + bf - 1.0)
            * ((2.0 * kf + af + bf) * (2.0 * kf + af + bf - 2.0) * x + af * af - bf * bf);
        let c3 = 2.0 * (kf + af - 1.0) * (kf + bf - 1.0) * (2.0 * kf + af + bf);
        let p2 = (c2 * p1 - c3 * p0) / c1;
        p0 = p1;
        p1 = p2;
    }
    zeta * angular * p1
}

/// Dense per-degree Wigner-d blocks at a fixed angle beta, `d[n][m'][m]`.
pub struct WignerTable {
    p: usize,
    blocks: Vec<Vec<f64>>,
}

impl WignerTable {
    pub fn new(p: usize, beta: f64) -> Self {
        let blocks = (0..=p)
            .map(|n| {
                let w = 2 * n + 1;
                let mut b = vec![0.0; w * w];
                for (i, mp) in (-(n as i64)..=n as i64).enumerate() {
                    for (j, m) in (-(n as i64)..=n as i64).enumerate() {
                        b[i * w + j] = wigner_d(n, mp, m, beta);
                    }
                }
                b
            })
            .collect();
        Self { p, blocks }
    }

    #[inline]
    pub fn p(&self) -> usize {
        self.p
    }

    #[inline]
    pub fn get(&self, n: usize, mp: i64, m: i64) -> f64 {
        let w = 2 * n + 1;
        self.blocks[n][(mp + n as i64) as usize * w + (m + n as i64) as usize]
    }

    /// Max deviation of each per-degree block from orthogonality.
    pub fn orthogonality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for n in 0..=self.p {
            let w = 2 * n + 1;
            let b = &self.blocks[n];
            for i in 0..w {
                for j in 0..w {
                    let mut dot = 0.0;
                    for k in 0..w {
                        dot += b[i * w + k] * b[j * w + k];
                    }
                    let expect = if i == j { 1.0 } else { 0.0 };
                    worst = worst.max((dot - expect).abs());
                }
            }
        }
        worst
    }
}

#[inline]
fn fold_sign(m: i64) -> f64 {
    if m > 0 && m % 2 != 0 {
        -1.0
    } else {
        1.0
    }
}

fn rotate_block(
    input: &[Complex],
    output: &mut [Complex],
    n: usize,
    table: &WignerTable,
    alpha: f64,
    gamma: f64,
) {
    let base = n * n;
    for mp in -(n as i64)..=n as i64 {
        let mut acc = Complex::ZERO;
        for m in -(n as i64)..=n as i64 {
            let c = input[base + (n as i64 + m) as usize];
            if c == Complex::ZERO {
                continue;
            }
            let d = table.get(n, mp, m);
            let phase = Complex::from_polar(1.0, -(m as f64) * gamma);
            acc += fold_sign(m) * d * phase * c;
        }
        let phase = Complex::from_polar(1.0, -(mp as f64) * alpha);
        output[base + (n as i64 + mp) as usize] = fold_sign(mp) * phase * acc;
    }
}

/// Rotates a scalar expansion: the result represents `x -> f(R^{-1} x)`.
pub fn rotate_scalar(coeffs: &ScalarCoeffs, rot: &Rotation) -> ScalarCoeffs {
    let (alpha, beta, gamma) = rot.euler_zyz();
    let table = WignerTable::new(coeffs.p(), beta);
    rotate_scalar_with(coeffs, &table, alpha, gamma)
}

pub fn rotate_scalar_with(
    coeffs: &ScalarCoeffs,
    table: &WignerTable,
    alpha: f64,
    gamma: f64,
) -> ScalarCoeffs {
    let p = coeffs.p();
    debug_assert!(table.p() >= p);
    let mut out = ScalarCoeffs::zeros(p);
    for n in 0..=p {
        rotate_block(&coeffs.data, &mut out.data, n, table, alpha, gamma);
    }
    out
}

/// Rotates a vector expansion: the result represents `x -> R F(R^{-1} x)`.
/// Each of the V, W, X channels transforms like a scalar expansion.
pub fn rotate_vector(coeffs: &VectorCoeffsVWX, rot: &Rotation) -> VectorCoeffsVWX {
    let (alpha, beta, gamma) = rot.euler_zyz();
    let table = WignerTable::new(coeffs.p(), beta);
    rotate_vector_with(coeffs, &table, alpha, gamma)
}

pub fn rotate_vector_with(
    coeffs: &VectorCoeffsVWX,
    table: &WignerTable,
    alpha: f64,
    gamma: f64,
) -> VectorCoeffsVWX {
    let p = coeffs.p();
    let mut out = VectorCoeffsVWX::zeros(p);
    for n in 0..=p {
        rotate_block(&coeffs.v, &mut out.v, n, table, alpha, gamma);
        rotate_block(&coeffs.w, &mut out.w, n, table, alpha, gamma);
        rotate_block(&coeffs.x, &mut out.x, n, table, alpha, gamma);
    }
    out
}
