//! Rigid-motion bookkeeping: force/torque densities, moment quadratures and
//! rigid-motion extraction.

use crate::coeffs::VectorCoeffsVWX;
use crate::error::Result;
use crate::evaluation::geometry::Sphere;
use crate::harmonics::{cart_to_sph, sph_to_cart, vsht_forward, vsht_inverse};
use crate::linalg::{cross, scale, sub, Vec3};
use crate::Complex;

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BodyForce {
    pub force: Vec3,
    pub torque: Vec3,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RigidMotion {
    pub velocity: Vec3,
    pub omega: Vec3,
}

impl RigidMotion {
    /// Rigid velocity field at a point.
    pub fn at(&self, x: Vec3, center: Vec3) -> Vec3 {
        let r = sub(x, center);
        let w = cross(self.omega, r);
        [self.velocity[0] + w[0], self.velocity[1] + w[1], self.velocity[2] + w[2]]
    }
}

/// Samples a Cartesian-valued field on the sphere grid and returns its VWX
/// coefficients.
pub fn coeffs_from_cartesian_field(
    sphere: &Sphere,
    field: impl Fn(Vec3) -> [Complex; 3],
) -> Result<VectorCoeffsVWX> {
    let g = &sphere.grid;
    let n_phi = g.n_phi();
    let mut fr = vec![Complex::ZERO; g.n_nodes()];
    let mut ft = vec![Complex::ZERO; g.n_nodes()];
    let mut fp = vec![Complex::ZERO; g.n_nodes()];
    for j in 0..g.n_theta() {
        for k in 0..n_phi {
            let i = j * n_phi + k;
            let v = field(sphere.node(j, k));
            let s = cart_to_sph(g.theta[j], g.phi[k], v);
            fr[i] = s[0];
            ft[i] = s[1];
            fp[i] = s[2];
        }
    }
    vsht_forward(g, &fr, &ft, &fp)
}

/// Cartesian grid values of a VWX expansion on a sphere.
pub fn cartesian_values(sphere: &Sphere, coeffs: &VectorCoeffsVWX) -> Vec<[Complex; 3]> {
    let g = &sphere.grid;
    let (fr, ft, fp) = vsht_inverse(g, coeffs);
    let mut out = Vec::with_capacity(g.n_nodes());
    for j in 0..g.n_theta() {
        for k in 0..g.n_phi() {
            let i = j * g.n_phi() + k;
            out.push(sph_to_cart(g.theta[j], g.phi[k], [fr[i], ft[i], fp[i]]));
        }
    }
    out
}

/// Quadrature moments of a Cartesian-valued surface field:
/// (integral of f, integral of (y - c) x f).
pub fn field_moments(sphere: &Sphere, values: &[[Complex; 3]]) -> ([Complex; 3], [Complex; 3]) {
    let g = &sphere.grid;
    let mut f = [Complex::ZERO; 3];
    let mut t = [Complex::ZERO; 3];
    for j in 0..g.n_theta() {
        let w = sphere.node_weight(j);
        for k in 0..g.n_phi() {
            let i = j * g.n_phi() + k;
            let y = sub(sphere.node(j, k), sphere.center);
            let v = values[i];
            for c in 0..3 {
                f[c] += w * v[c];
            }
            t[0] += w * (y[1] * v[2] - y[2] * v[1]);
            t[1] += w * (y[2] * v[0] - y[0] * v[2]);
            t[2] += w * (y[0] * v[1] - y[1] * v[0]);
        }
    }
    (f, t)
}

/// Net force and torque of a traction field sampled on the grid.
pub fn net_force_torque(sphere: &Sphere, traction: &[[Complex; 3]]) -> BodyForce {
    let (f, t) = field_moments(sphere, traction);
    BodyForce { force: [f[0].re, f[1].re, f[2].re], torque: [t[0].re, t[1].re, t[2].re] }
}

/// The single-layer density generating prescribed net force and torque:
/// `rho(y) = F/(4 pi a^2) + 3/(8 pi a^4) T x (y - c)`, pure degree-1
/// content in the {V, W, X} basis.
pub fn rho_from_forces(sphere: &Sphere, body_force: &BodyForce) -> Result<VectorCoeffsVWX> {
    let a = sphere.radius;
    let c0 = 1.0 / (4.0 * std::f64::consts::PI * a * a);
    let c1 = 3.0 / (8.0 * std::f64::consts::PI * a.powi(4));
    let f = body_force.force;
    let t = body_force.torque;
    let center = sphere.center;
    coeffs_from_cartesian_field(sphere, move |y| {
        let rel = sub(y, center);
        let tx = cross(t, rel);
        [
            Complex::from(c0 * f[0] + c1 * tx[0]),
            Complex::from(c0 * f[1] + c1 * tx[1]),
            Complex::from(c0 * f[2] + c1 * tx[2]),
        ]
    })
}

/// Rigid-motion projection of a surface velocity field:
/// `v = (1/|G|) int u`, `omega = 3/(8 pi a^4) int (y-c) x u`; also reports
/// the grid-norm residual of the rigid fit.
pub fn extract_rigid_motion(sphere: &Sphere, values: &[[Complex; 3]]) -> (RigidMotion, f64) {
    let a = sphere.radius;
    let area = 4.0 * std::f64::consts::PI * a * a;
    let (f, t) = field_moments(sphere, values);
    let v = [f[0].re / area, f[1].re / area, f[2].re / area];
    let w = scale([t[0].re, t[1].re, t[2].re], 3.0 / (8.0 * std::f64::consts::PI * a.powi(4)));
    let motion = RigidMotion { velocity: v, omega: w };
    let g = &sphere.grid;
    let mut resid: f64 = 0.0;
    let mut total: f64 = 0.0;
    for j in 0..g.n_theta() {
        let wq = sphere.node_weight(j);
        for k in 0..g.n_phi() {
            let i = j * g.n_phi() + k;
            let rigid = motion.at(sphere.node(j, k), sphere.center);
            for c in 0..3 {
                resid += wq * (values[i][c] - rigid[c]).norm_sqr();
                total += wq * values[i][c].norm_sqr();
            }
        }
    }
    (motion, (resid / total.max(1e-300)).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{GridSpec, SphGrid};
    use std::sync::Arc;

    fn sphere(p: usize, a: f64) -> Sphere {
        let g = Arc::new(SphGrid::new(GridSpec::new(p).unwrap()));
        Sphere::new(0, [0.3, -0.2, 0.5], a, g).unwrap()
    }

    #[test]
    fn rho_moment_integrals() {
        let s = sphere(8, 1.0);
        // F only: rho = F/(4 pi), moments reproduce (F, 0)
        let bf = BodyForce { force: [1.0, 0.0, 0.0], torque: [0.0; 3] };
        let rho = rho_from_forces(&s, &bf).unwrap();
        let vals = cartesian_values(&s, &rho);
        let (f, t) = field_moments(&s, &vals);
        assert!((f[0].re - 1.0).abs() < 1e-12 && f[1].norm() < 1e-12 && f[2].norm() < 1e-12);
        for c in 0..3 {
            assert!(t[c].norm() < 1e-12);
        }
        // T only: torque integral reproduces T
        let bf = BodyForce { force: [0.0; 3], torque: [0.0, 0.0, 1.0] };
        let rho = rho_from_forces(&s, &bf).unwrap();
        let vals = cartesian_values(&s, &rho);
        let (f, t) = field_moments(&s, &vals);
        for c in 0..3 {
            assert!(f[c].norm() < 1e-12);
        }
        assert!((t[2].re - 1.0).abs() < 1e-12 && t[0].norm() < 1e-12);
        // zero data
        let rho = rho_from_forces(&s, &BodyForce::default()).unwrap();
        assert!(rho.norm_sq() < 1e-28);
        // scaled radius
        let s2 = sphere(8, 2.5);
        let bf = BodyForce { force: [0.4, -1.0, 0.7], torque: [0.2, 0.1, -0.5] };
        let rho = rho_from_forces(&s2, &bf).unwrap();
        let vals = cartesian_values(&s2, &rho);
        let (f, t) = field_moments(&s2, &vals);
        for c in 0..3 {
            assert!((f[c].re - bf.force[c]).abs() < 1e-11);
            assert!((t[c].re - bf.torque[c]).abs() < 1e-11);
        }
    }

    #[test]
    fn extract_rigid_cases() {
        let s = sphere(6, 1.0);
        // pure translation
        let vals: Vec<[Complex; 3]> = (0..s.grid.n_nodes())
            .map(|_| [Complex::from(1.0), Complex::from(2.0), Complex::from(3.0)])
            .collect();
        let (m, r) = extract_rigid_motion(&s, &vals);
        assert!((m.velocity[0] - 1.0).abs() < 1e-13);
        assert!((m.velocity[1] - 2.0).abs() < 1e-13);
        assert!((m.velocity[2] - 3.0).abs() < 1e-13);
        assert!(crate::linalg::norm(m.omega) < 1e-13);
        assert!(r < 1e-13);
        // pure rotation omega = (0,0,2)
        let g = &s.grid;
        let mut vals = Vec::new();
        for j in 0..g.n_theta() {
            for k in 0..g.n_phi() {
                let y = sub(s.node(j, k), s.center);
                let u = cross([0.0, 0.0, 2.0], y);
                vals.push([Complex::from(u[0]), Complex::from(u[1]), Complex::from(u[2])]);
            }
        }
        let (m, r) = extract_rigid_motion(&s, &vals);
        assert!((m.omega[2] - 2.0).abs() < 1e-12);
        assert!(crate::linalg::norm(m.velocity) < 1e-13);
        assert!(r < 1e-12);
        // rigid + X_5^3 noise: motion recovered, residual reported
        let eps = 1e-3;
        let noise = VectorCoeffsVWX::unit(6, crate::harmonics::VectorChannel::X, 5, 3);
        let nvals = cartesian_values(&s, &noise);
        let mut vals2 = vals.clone();
        for (a, b) in vals2.iter_mut().zip(&nvals) {
            for c in 0..3 {
                a[c] += eps * b[c];
            }
        }
        let (m2, r2) = extract_rigid_motion(&s, &vals2);
        assert!((m2.omega[2] - 2.0).abs() < 1e-10);
        assert!(r2 > 1e-5 && r2 < 1e-2);
    }

    #[test]
    fn net_force_torque_closed_forms() {
        let s = sphere(5, 1.5);
        let a = s.radius;
        // constant traction c
        let c = [0.7, -0.2, 0.4];
        let vals: Vec<[Complex; 3]> = (0..s.grid.n_nodes())
            .map(|_| [Complex::from(c[0]), Complex::from(c[1]), Complex::from(c[2])])
            .collect();
        let bf = net_force_torque(&s, &vals);
        let area = 4.0 * std::f64::consts::PI * a * a;
        for i in 0..3 {
            assert!((bf.force[i] - area * c[i]).abs() < 1e-11);
            assert!(bf.torque[i].abs() < 1e-11);
        }
        // f = e_z x (y - c): torque (8 pi a^4 / 3) e_z
        let g = &s.grid;
        let mut vals = Vec::new();
        for j in 0..g.n_theta() {
            for k in 0..g.n_phi() {
                let y = sub(s.node(j, k), s.center);
                let u = cross([0.0, 0.0, 1.0], y);
                vals.push([Complex::from(u[0]), Complex::from(u[1]), Complex::from(u[2])]);
            }
        }
        let bf = net_force_torque(&s, &vals);
        let want = 8.0 * std::f64::consts::PI * a.powi(4) / 3.0;
        assert!((bf.torque[2] - want).abs() < 1e-10);
        assert!(crate::linalg::norm(bf.force) < 1e-11);
    }
}
