//! Free-space kernels of the Laplace and Stokes equations.

use crate::error::{Error, Result};
use crate::linalg::{dot, norm, sub, Vec3};

const FRAC_1_4PI: f64 = 1.0 / (4.0 * std::f64::consts::PI);
const FRAC_1_8PI: f64 = 1.0 / (8.0 * std::f64::consts::PI);
const FRAC_3_4PI: f64 = 3.0 / (4.0 * std::f64::consts::PI);

fn separation(x: Vec3, y: Vec3) -> Result<(Vec3, f64)> {
    let r = sub(x, y);
    let d = norm(r);
    if d == 0.0 {
        return Err(Error::CoincidentPoints);
    }
    Ok((r, d))
}

/// `G^L(x,y) = 1/(4 pi |x-y|)`.
pub fn kernel_laplace(x: Vec3, y: Vec3) -> Result<f64> {
    let (_, d) = separation(x, y)?;
    Ok(FRAC_1_4PI / d)
}

/// Double-layer kernel `d G^L / d n(y) = (x-y).n(y) / (4 pi |x-y|^3)`.
pub fn kernel_laplace_dn(x: Vec3, y: Vec3, n_y: Vec3) -> Result<f64> {
    let (r, d) = separation(x, y)?;
    Ok(FRAC_1_4PI * dot(r, n_y) / (d * d * d))
}

/// Flux kernel `d G^L / d n(x) = -(x-y).n(x) / (4 pi |x-y|^3)`.
pub fn kernel_laplace_flux(x: Vec3, y: Vec3, n_x: Vec3) -> Result<f64> {
    let (r, d) = separation(x, y)?;
    Ok(-FRAC_1_4PI * dot(r, n_x) / (d * d * d))
}

/// Stokeslet applied to a force vector: `u_i = G_ij f_j`.
pub fn stokeslet_apply(x: Vec3, y: Vec3, f: Vec3) -> Result<Vec3> {
    let (r, d) = separation(x, y)?;
    let rf = dot(r, f);
    let inv = 1.0 / d;
    let inv3 = inv * inv * inv;
    Ok([
        FRAC_1_8PI * (f[0] * inv + r[0] * rf * inv3),
        FRAC_1_8PI * (f[1] * inv + r[1] * rf * inv3),
        FRAC_1_8PI * (f[2] * inv + r[2] * rf * inv3),
    ])
}

/// Full 3x3 Stokeslet matrix.
pub fn kernel_stokeslet(x: Vec3, y: Vec3) -> Result<[[f64; 3]; 3]> {
    let (r, d) = separation(x, y)?;
    let inv = 1.0 / d;
    let inv3 = inv * inv * inv;
    let mut g = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let delta = if i == j { inv } else { 0.0 };
            g[i][j] = FRAC_1_8PI * (delta + r[i] * r[j] * inv3);
        }
    }
    Ok(g)
}

/// Stresslet contracted with a direction in the k slot and a vector in the
/// j slot: `u_i = T_ijk(x,y) n_k v_j = -(3/4pi) (r.v)(r.n) r_i / |r|^5`.
pub fn stresslet_apply(x: Vec3, y: Vec3, n: Vec3, v: Vec3) -> Result<Vec3> {
    let (r, d) = separation(x, y)?;
    let c = -FRAC_3_4PI * dot(r, v) * dot(r, n) / d.powi(5);
    Ok([c * r[0], c * r[1], c * r[2]])
}

/// Full stresslet tensor `T_ijk(x, y)`.
pub fn kernel_stresslet(x: Vec3, y: Vec3) -> Result<[[[f64; 3]; 3]; 3]> {
    let (r, d) = separation(x, y)?;
    let c = -FRAC_3_4PI / d.powi(5);
    let mut t = [[[0.0; 3]; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                t[i][j][k] = c * r[i] * r[j] * r[k];
            }
        }
    }
    Ok(t)
}

/// Pressure kernel of the Stokeslet: `p = (x-y).f / (4 pi |x-y|^3)`.
pub fn stokeslet_pressure(x: Vec3, y: Vec3, f: Vec3) -> Result<f64> {
    let (r, d) = separation(x, y)?;
    Ok(FRAC_1_4PI * dot(r, f) / (d * d * d))
}

/// Traction field of a Stokeslet of strength `f` at `y`, evaluated at `x`
/// with normal `n(x)`: `t_i = T_ijk(x,y) f_j n_k(x)`.
pub fn stokeslet_traction(x: Vec3, y: Vec3, n_x: Vec3, f: Vec3) -> Result<Vec3> {
    stresslet_apply(x, y, n_x, f)
}

/// Rotlet (point torque) flow: `u = t x (x-c) / (8 pi |x-c|^3)`.
pub fn rotlet_apply(x: Vec3, c: Vec3, t: Vec3) -> Result<Vec3> {
    let (r, d) = separation(x, c)?;
    let cr = crate::linalg::cross(t, r);
    let s = FRAC_1_8PI / (d * d * d);
    Ok([cr[0] * s, cr[1] * s, cr[2] * s])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laplace_point_values_and_symmetry() {
        let x = [1.0, 0.0, 0.0];
        let y = [0.0; 3];
        assert!((kernel_laplace(x, y).unwrap() - FRAC_1_4PI).abs() < 1e-16);
        let a = [0.3, -0.4, 1.1];
        let b = [-0.2, 0.9, 0.5];
        assert_eq!(kernel_laplace(a, b).unwrap(), kernel_laplace(b, a).unwrap());
        assert!(kernel_laplace(a, a).is_err());
    }

    #[test]
    fn stokeslet_value_and_symmetry() {
        let g = kernel_stokeslet([1.0, 0.0, 0.0], [0.0; 3]).unwrap();
        assert!((g[0][0] - 2.0 * FRAC_1_8PI).abs() < 1e-16);
        assert!((g[1][1] - FRAC_1_8PI).abs() < 1e-16);
        let g = kernel_stokeslet([0.3, 1.2, -0.8], [1.0, 0.2, 0.1]).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!((g[i][j] - g[j][i]).abs() < 1e-16);
            }
        }
    }

    #[test]
    fn stresslet_full_symmetry() {
        let t = kernel_stresslet([0.3, 1.2, -0.8], [1.0, 0.2, 0.1]).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    assert_eq!(t[i][j][k], t[j][i][k]);
                    assert_eq!(t[i][j][k], t[k][j][i]);
                }
            }
        }
    }

    #[test]
    fn gauss_law_for_flux() {
        // integral of dG/dn(y) over a sphere enclosing x equals -1
        let g = crate::grid::SphGrid::new(crate::grid::GridSpec::new(24).unwrap());
        let x = [0.2, -0.1, 0.3];
        let mut acc = 0.0;
        for j in 0..g.n_theta() {
            let w = g.row_weight(j);
            for k in 0..g.n_phi() {
                let d = g.node_dir(j, k);
                acc += w * kernel_laplace_dn(x, d, d).unwrap();
            }
        }
        assert!((acc + 1.0).abs() < 1e-10, "gauss law: {acc}");
    }
}
