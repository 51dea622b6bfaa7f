//! Singular self-evaluation and direct near-singular evaluation by formula
//! summation in source-centered scaled coordinates.

use crate::coeffs::{coeff_index, ScalarCoeffs, VectorCoeffsVWX};
use crate::error::{Error, Result};
use crate::evaluation::geometry::{Sphere, TargetBatch};
use crate::harmonics::VectorChannel;
use crate::legendre::{dtheta_norm_plm_col, norm_plm_col};
use crate::linalg::Vec3;
use crate::spectra::{
    self, apply_diagonal_scalar, apply_diagonal_vector, side_of, OperatorKind, Side,
};
use crate::Complex;

/// Length-scale factor of an operator kind on a sphere of radius a: the
/// single-layer velocities and potentials gain a factor a, the double layers
/// and tractions are scale-free (fixed by kernel homogeneity and verified
/// against dense quadrature).
pub fn kind_scale(kind: OperatorKind, radius: f64) -> f64 {
    match kind {
        OperatorKind::LaplaceS | OperatorKind::StokesS => radius,
        _ => 1.0,
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct EvalOptions {
    /// Allow targets strictly inside the source sphere (interior branch).
    pub allow_interior: bool,
}

/// Source-frame spherical coordinates of a physical target.
fn local_coords(sphere: &Sphere, x: Vec3) -> (f64, f64, f64) {
    let dx = [
        (x[0] - sphere.center[0]) / sphere.radius,
        (x[1] - sphere.center[1]) / sphere.radius,
        (x[2] - sphere.center[2]) / sphere.radius,
    ];
    let r = (dx[0] * dx[0] + dx[1] * dx[1] + dx[2] * dx[2]).sqrt();
    let theta = (dx[2] / r).clamp(-1.0, 1.0).acos();
    let phi = dx[1].atan2(dx[0]);
    (r, theta, phi)
}

fn check_radius(kind: OperatorKind, r: f64, opts: EvalOptions) -> Result<Side> {
    if r == 0.0 {
        return Err(Error::CoincidentPoints);
    }
    let side = side_of(kind, r);
    if side == Side::Interior && r < 1.0 && !opts.allow_interior {
        return Err(Error::TargetInsideSource { r });
    }
    Ok(side)
}

/// Real 3-vector in source-frame spherical components at (theta, phi).
fn to_sph_components(theta: f64, phi: f64, v: Vec3) -> [f64; 3] {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    [
        v[0] * st * cp + v[1] * st * sp + v[2] * ct,
        v[0] * ct * cp + v[1] * ct * sp - v[2] * st,
        -v[0] * sp + v[1] * cp,
    ]
}

/// Self-interaction: diagonal apply of the kind's surface spectrum with the
/// kind's encoded side, scaled for the sphere radius.
pub fn self_eval_scalar(kind: OperatorKind, density: &ScalarCoeffs, radius: f64) -> Result<ScalarCoeffs> {
    let mut out = apply_diagonal_scalar(kind, density)?;
    let s = kind_scale(kind, radius);
    if s != 1.0 {
        for c in out.data.iter_mut() {
            *c *= s;
        }
    }
    Ok(out)
}

pub fn self_eval_vector(kind: OperatorKind, density: &VectorCoeffsVWX, radius: f64) -> Result<VectorCoeffsVWX> {
    let mut out = apply_diagonal_vector(kind, density)?;
    let s = kind_scale(kind, radius);
    if s != 1.0 {
        for buf in [&mut out.v, &mut out.w, &mut out.x] {
            for c in buf.iter_mut() {
                *c *= s;
            }
        }
    }
    Ok(out)
}

/// Direct evaluation of a Laplace layer potential (S, D) or the flux of the
/// single layer (K, which requires target normals) at arbitrary targets.
pub fn near_eval_direct_scalar(
    kind: OperatorKind,
    density: &ScalarCoeffs,
    sphere: &Sphere,
    targets: &TargetBatch,
    opts: EvalOptions,
) -> Result<Vec<Complex>> {
    if !kind.is_laplace() {
        return Err(Error::InvalidArgument("scalar evaluation requires a Laplace kind".into()));
    }
    let is_flux = matches!(kind, OperatorKind::LaplaceKplus | OperatorKind::LaplaceKminus);
    if is_flux && targets.normals.is_none() {
        return Err(Error::InvalidArgument("flux targets need normals".into()));
    }
    let p = density.p();
    let scale = kind_scale(kind, sphere.radius);
    let mut out = Vec::with_capacity(targets.points.len());
    let mut col = vec![0.0; p + 1];
    let mut dcol = vec![0.0; p + 1];
    for (t, &x) in targets.points.iter().enumerate() {
        let (r, theta, phi) = local_coords(sphere, x);
        let side = check_radius(kind, r, opts)?;
        let (xc, sc) = (theta.cos(), theta.sin());
        let nu = if is_flux {
            to_sph_components(theta, phi, targets.normals.as_ref().unwrap()[t])
        } else {
            [0.0; 3]
        };
        // radial factors
        let base = if is_flux { OperatorKind::LaplaceS } else { kind };
        let mut fr = vec![0.0; p + 1];
        let mut dfr = vec![0.0; p + 1];
        for (n, f) in fr.iter_mut().enumerate() {
            *f = spectra::laplace_radial_sided(base, side, n, r)?;
        }
        if is_flux {
            for (n, f) in dfr.iter_mut().enumerate() {
                *f = spectra::laplace_radial_deriv_sided(base, side, n, r)?;
            }
        }
        let mut acc = Complex::ZERO;
        for am in 0..=p {
            norm_plm_col(am, p, xc, sc, &mut col[..p + 1 - am]);
            if is_flux {
                dtheta_norm_plm_col(am, p, xc, sc, &col[..p + 1 - am], &mut dcol[..p + 1 - am]);
            }
            for (si, m) in [am as i64, -(am as i64)].into_iter().enumerate() {
                if si == 1 && am == 0 {
                    continue;
                }
                let e = Complex::from_polar(1.0, m as f64 * phi);
                let mut gm = Complex::ZERO;
                for n in am..=p {
                    let c = density.get(n, m);
                    if c == Complex::ZERO {
                        continue;
                    }
                    if is_flux {
                        let y = col[n - am];
                        let dy = dcol[n - am];
                        let dphi_s = Complex::i() * m as f64 / sc * y;
                        gm += c * (dfr[n] * nu[0] * y + fr[n] / r * (nu[1] * dy) )
                            + c * (fr[n] / r) * nu[2] * dphi_s;
                    } else {
                        gm += c * fr[n] * col[n - am];
                    }
                }
                acc += gm * e;
            }
        }
        out.push(acc * scale);
    }
    Ok(out)
}

/// Direct evaluation of a Stokes layer velocity (S, D) or the traction of
/// the single layer (K, which requires target normals) at arbitrary
/// targets; returns Cartesian component triples.
pub fn near_eval_direct_vector(
    kind: OperatorKind,
    density: &VectorCoeffsVWX,
    sphere: &Sphere,
    targets: &TargetBatch,
    opts: EvalOptions,
) -> Result<Vec<[Complex; 3]>> {
    if !kind.is_stokes() {
        return Err(Error::InvalidArgument("vector evaluation requires a Stokes kind".into()));
    }
    let is_traction = matches!(kind, OperatorKind::StokesKplus | OperatorKind::StokesKminus);
    if is_traction && targets.normals.is_none() {
        return Err(Error::InvalidArgument("traction targets need normals".into()));
    }
    let scale = kind_scale(kind, sphere.radius);
    let mut out = Vec::with_capacity(targets.points.len());
    for (t, &x) in targets.points.iter().enumerate() {
        let (r, theta, phi) = local_coords(sphere, x);
        // traction targets close to the source polar axis are handled in a
        // rotated frame (the tangential coupling divides by sin theta)
        if is_traction && theta.sin() < 1e-6 {
            let rot = crate::rotation::Rotation::from_euler_zyz(0.0, std::f64::consts::FRAC_PI_2, 0.0);
            let inv = rot.inverse();
            let dens_r = crate::rotation::rotate_vector(density, &inv);
            let rel = crate::linalg::sub(x, sphere.center);
            let xr = crate::linalg::add(sphere.center, inv.apply(rel));
            let nr = inv.apply(targets.normals.as_ref().unwrap()[t]);
            let sub_batch = TargetBatch::with_normals(vec![xr], vec![nr])?;
            let v = near_eval_direct_vector(kind, &dens_r, sphere, &sub_batch, opts)?[0];
            let mut back = [Complex::ZERO; 3];
            for a in 0..3 {
                for b in 0..3 {
                    back[a] += rot.mat[a][b] * v[b];
                }
            }
            out.push(back);
            continue;
        }
        let side = check_radius(kind, r, opts)?;
        let val = if is_traction {
            let nu = to_sph_components(theta, phi, targets.normals.as_ref().unwrap()[t]);
            let s = theta.sin();
            let kappa = traction_coeffs_for(density, &sphere.grid, side, r, [nu[0], nu[1] / s, nu[2] / s])?;
            eval_vwx_at(&kappa, theta, phi)
        } else {
            let kappa = velocity_coeffs(kind, density, side, r)?;
            eval_vwx_at(&kappa, theta, phi)
        };
        let cart = crate::harmonics::sph_to_cart(theta, phi, val);
        out.push([cart[0] * scale, cart[1] * scale, cart[2] * scale]);
    }
    Ok(out)
}

/// Per-mode velocity coefficients of a Stokes S or D field at radius r
/// (the kappa vector of the evaluation scheme).
pub(crate) fn velocity_coeffs(
    kind: OperatorKind,
    density: &VectorCoeffsVWX,
    side: Side,
    r: f64,
) -> Result<VectorCoeffsVWX> {
    let p = density.p();
    let mut out = VectorCoeffsVWX::zeros(p);
    for n in 0..=p {
        let c = spectra::stokes_radial_sided(kind, side, n, r)?;
        let base = n * n;
        for i in base..base + 2 * n + 1 {
            let (v, w, x) = (density.v[i], density.w[i], density.x[i]);
            match side {
                Side::Exterior => {
                    out.v[i] = c.g_v * v + c.g_cross * w;
                    out.w[i] = c.g_w * w;
                }
                Side::Interior => {
                    out.v[i] = c.g_v * v;
                    out.w[i] = c.g_w * w + c.g_cross * v;
                }
            }
            out.x[i] = c.g_x * x;
        }
    }
    out.clear_degenerate();
    Ok(out)
}

/// Banded traction coefficients (degree <= p+1) of the single-layer field at
/// radius r; `nu` holds the source-frame normal components pre-divided for
/// the tempered tables: `[nu_r, nu_theta/sin, nu_phi/sin]`.
pub(crate) fn traction_coeffs_for(
    density: &VectorCoeffsVWX,
    grid: &crate::grid::SphGrid,
    side: Side,
    r: f64,
    nu: [f64; 3],
) -> Result<VectorCoeffsVWX> {
    let p = density.p();
    let tables = grid.traction_tables();
    let mut kappa = VectorCoeffsVWX::zeros(p + 1);
    for n in 0..=p {
        let s = spectra::stokes_radial_sided(OperatorKind::StokesS, side, n, r)?;
        let ds = spectra::stokes_radial_deriv_sided(OperatorKind::StokesS, side, n, r)?;
        let base = n * n;
        for (k, i) in (base..base + 2 * n + 1).enumerate() {
            let m = k as i64 - n as i64;
            let (cv, cw, cx) = (density.v[i], density.w[i], density.x[i]);
            if cv != Complex::ZERO {
                tables.accumulate(&mut kappa, VectorChannel::V, n, m, cv, nu, ds.g_v, s.g_v / r, s.q_v / r);
                if side == Side::Interior {
                    tables.accumulate(&mut kappa, VectorChannel::W, n, m, cv, nu, ds.g_cross, s.g_cross / r, 0.0);
                }
            }
            if cw != Complex::ZERO {
                tables.accumulate(&mut kappa, VectorChannel::W, n, m, cw, nu, ds.g_w, s.g_w / r, s.q_w / r);
                if side == Side::Exterior {
                    tables.accumulate(&mut kappa, VectorChannel::V, n, m, cw, nu, ds.g_cross, s.g_cross / r, 0.0);
                }
            }
            if cx != Complex::ZERO {
                tables.accumulate(&mut kappa, VectorChannel::X, n, m, cx, nu, ds.g_x, s.g_x / r, 0.0);
            }
        }
    }
    Ok(kappa)
}

/// Evaluates a VWX coefficient set at one point (spherical components).
fn eval_vwx_at(coeffs: &VectorCoeffsVWX, theta: f64, phi: f64) -> [Complex; 3] {
    crate::harmonics::vsht_eval_points(coeffs, &[(theta, phi)])[0]
}

/// Pressure of a Stokes S or D field at a target (physical convention).
pub fn stokes_pressure_at(
    kind: OperatorKind,
    density: &VectorCoeffsVWX,
    sphere: &Sphere,
    x: Vec3,
    opts: EvalOptions,
) -> Result<Complex> {
    let p = density.p();
    let (r, theta, phi) = local_coords(sphere, x);
    let side = check_radius(kind, r, opts)?;
    let mut acc = Complex::ZERO;
    let mut col = vec![0.0; p + 1];
    let (xc, sc) = (theta.cos(), theta.sin());
    for am in 0..=p {
        norm_plm_col(am, p, xc, sc, &mut col[..p + 1 - am]);
        for (si, m) in [am as i64, -(am as i64)].into_iter().enumerate() {
            if si == 1 && am == 0 {
                continue;
            }
            let e = Complex::from_polar(1.0, m as f64 * phi);
            for n in am..=p {
                let c = spectra::stokes_radial_sided(kind, side, n, r)?;
                let i = coeff_index(n, m);
                let q = c.q_v * density.v[i] + c.q_w * density.w[i];
                acc += q / r * col[n - am] * e;
            }
        }
    }
    // pressure scales like velocity/length: S gains a, then 1/a from the
    // coordinate scaling of the gradient
    let _ = kind_scale(kind, sphere.radius);
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::coeff_len;
    use crate::evaluation::quadrature::{
        quadrature_pressure, smooth_quadrature_eval_scalar, smooth_quadrature_eval_vector,
    };
    use crate::grid::{GridSpec, SphGrid};
    use crate::harmonics::{sht_inverse, vsht_inverse, ynm_eval};
    use std::sync::Arc;

    fn unit_sphere(p: usize) -> Sphere {
        let g = Arc::new(SphGrid::new(GridSpec::new(p).unwrap()));
        Sphere::new(0, [0.0; 3], 1.0, g).unwrap()
    }

    fn vector_values(s: &Sphere, c: &VectorCoeffsVWX) -> Vec<[Complex; 3]> {
        let (fr, ft, fp) = vsht_inverse(&s.grid, c);
        let g = &s.grid;
        let mut out = Vec::with_capacity(g.n_nodes());
        for j in 0..g.n_theta() {
            for k in 0..g.n_phi() {
                let i = j * g.n_phi() + k;
                let sph = crate::harmonics::sph_to_cart(g.theta[j], g.phi[k], [fr[i], ft[i], fp[i]]);
                out.push(sph);
            }
        }
        out
    }

    #[test]
    fn laplace_s_matches_formula_and_quadrature() {
        // S^L[Y_0^0] at r=3 is Y_0^0/3 per the radial formula
        let p = 16;
        let s = unit_sphere(p);
        let c = ScalarCoeffs::unit(p, 0, 0);
        let x = [0.0, 0.0, 3.0];
        let direct = near_eval_direct_scalar(
            OperatorKind::LaplaceS,
            &c,
            &s,
            &TargetBatch::points(vec![x]),
            EvalOptions::default(),
        )
        .unwrap();
        let want = ynm_eval(0, 0, 0.0, 0.0).unwrap() / 3.0;
        assert!((direct[0] - want).norm() < 1e-14);
        // cross-check against dense quadrature
        let vals = sht_inverse(&s.grid, &c);
        let quad =
            smooth_quadrature_eval_scalar(OperatorKind::LaplaceS, &s, &vals, &TargetBatch::points(vec![x]))
                .unwrap();
        assert!((quad[0] - direct[0]).norm() < 1e-13);
    }

    #[test]
    fn stokes_s_quadrature_vs_formula() {
        // S[V_1^0] at r=4: (1/15) 4^{-3} V_1^0 componentwise at p=16
        let p = 16;
        let s = unit_sphere(p);
        let c = VectorCoeffsVWX::unit(p, VectorChannel::V, 1, 0);
        let x = [0.0, 1.5, 3.7]; // |x| = 3.9925...
        let direct = near_eval_direct_vector(
            OperatorKind::StokesS,
            &c,
            &s,
            &TargetBatch::points(vec![x]),
            EvalOptions::default(),
        )
        .unwrap();
        let vals = vector_values(&s, &c);
        let quad =
            smooth_quadrature_eval_vector(OperatorKind::StokesS, &s, &vals, &TargetBatch::points(vec![x]))
                .unwrap();
        for k in 0..3 {
            assert!(
                (direct[0][k] - quad[0][k]).norm() < 1e-12,
                "component {k}: {} vs {}",
                direct[0][k],
                quad[0][k]
            );
        }
    }

    #[test]
    fn interior_branch_sign_settled_by_quadrature() {
        // the corrected interior cross-term sign for S[V] and D[V]
        let p = 20;
        let s = unit_sphere(p);
        for (kind, n, m) in [
            (OperatorKind::StokesS, 1, 0),
            (OperatorKind::StokesS, 3, 2),
            (OperatorKind::StokesDplus, 2, -1),
        ] {
            let c = VectorCoeffsVWX::unit(p, VectorChannel::V, n, m);
            let x = [0.1, -0.15, 0.4]; // interior target, |x| ~ 0.45
            let direct = near_eval_direct_vector(
                kind,
                &c,
                &s,
                &TargetBatch::points(vec![x]),
                EvalOptions { allow_interior: true },
            )
            .unwrap();
            let vals = vector_values(&s, &c);
            let quad =
                smooth_quadrature_eval_vector(kind, &s, &vals, &TargetBatch::points(vec![x])).unwrap();
            for k in 0..3 {
                assert!(
                    (direct[0][k] - quad[0][k]).norm() < 1e-10,
                    "{kind:?} V_{n}^{m} component {k}: {} vs {}",
                    direct[0][k],
                    quad[0][k]
                );
            }
        }
    }

    #[test]
    fn self_eval_values() {
        let p = 8;
        let c = ScalarCoeffs::unit(p, 5, 3);
        let out = self_eval_scalar(OperatorKind::LaplaceS, &c, 1.0).unwrap();
        assert!((out.get(5, 3).re - 1.0 / 11.0).abs() < 1e-15);
        let w = VectorCoeffsVWX::unit(p, VectorChannel::W, 1, 0);
        let out = self_eval_vector(OperatorKind::StokesDplus, &w, 1.0).unwrap();
        assert!(out.norm_sq() < 1e-30);
    }

    #[test]
    fn self_eval_is_near_limit() {
        // matches near_eval_direct at r = 1 + 1e-12 (exterior)
        let p = 10;
        let s = unit_sphere(p);
        let c = crate::synthetic::random_vector_density(p, 2.0, 17);
        let selfc = self_eval_vector(OperatorKind::StokesDplus, &c, 1.0).unwrap();
        let r = 1.0 + 1e-12;
        let (th, ph): (f64, f64) = (1.234, 0.77);
        let x = [r * th.sin() * ph.cos(), r * th.sin() * ph.sin(), r * th.cos()];
        let direct = near_eval_direct_vector(
            OperatorKind::StokesDplus,
            &c,
            &s,
            &TargetBatch::points(vec![x]),
            EvalOptions::default(),
        )
        .unwrap();
        let on = crate::harmonics::sph_to_cart(
            th,
            ph,
            crate::harmonics::vsht_eval_points(&selfc, &[(th, ph)])[0],
        );
        for k in 0..3 {
            assert!((on[k] - direct[0][k]).norm() < 1e-9);
        }
    }

    #[test]
    fn flux_of_laplace_s_radial_target() {
        // flux of S^L[Y_1^0] with n = e_r: f' with f = r^{-2}/3
        let p = 8;
        let s = unit_sphere(p);
        let c = ScalarCoeffs::unit(p, 1, 0);
        let r = 2.5;
        let (th, ph): (f64, f64) = (0.9, 2.0);
        let dir = [th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()];
        let x = [r * dir[0], r * dir[1], r * dir[2]];
        let t = TargetBatch::with_normals(vec![x], vec![dir]).unwrap();
        let flux = near_eval_direct_scalar(OperatorKind::LaplaceKplus, &c, &s, &t, EvalOptions::default())
            .unwrap();
        let want = (-2.0 / 3.0) * r.powi(-3) * ynm_eval(1, 0, th, ph).unwrap();
        assert!((flux[0] - want).norm() < 1e-13);
        // general normal against finite differences of the potential
        let nu = crate::linalg::normalize([0.3, -0.8, 0.52]).unwrap();
        let t = TargetBatch::with_normals(vec![x], vec![nu]).unwrap();
        let c2 = crate::synthetic::random_scalar_density(p, 1.5, 5);
        let flux = near_eval_direct_scalar(OperatorKind::LaplaceKplus, &c2, &s, &t, EvalOptions::default())
            .unwrap();
        let h = 1e-5;
        let eval = |y: Vec3| -> Complex {
            near_eval_direct_scalar(
                OperatorKind::LaplaceS,
                &c2,
                &s,
                &TargetBatch::points(vec![y]),
                EvalOptions::default(),
            )
            .unwrap()[0]
        };
        let mut fd = Complex::ZERO;
        for k in 0..3 {
            let mut xp = x;
            let mut xm = x;
            xp[k] += h;
            xm[k] -= h;
            fd += nu[k] * (eval(xp) - eval(xm)) / (2.0 * h);
        }
        assert!((flux[0] - fd).norm() < 1e-8, "{} vs {}", flux[0], fd);
    }

    #[test]
    fn traction_general_normal_matches_fd_stress() {
        let p = 20;
        let s = unit_sphere(p);
        let c = crate::synthetic::random_vector_density(p, 2.0, 41);
        let x = [1.5, 1.0, 1.4]; // |x| ~ 2.28
        let nu = crate::linalg::normalize([0.0, 1.0, 0.3]).unwrap();
        let t = TargetBatch::with_normals(vec![x], vec![nu]).unwrap();
        let tr = near_eval_direct_vector(OperatorKind::StokesKplus, &c, &s, &t, EvalOptions::default())
            .unwrap();
        let tr_cart = tr[0];
        // finite-difference velocity gradient + quadrature pressure
        let h = 1e-4;
        let vel = |y: Vec3| -> [Complex; 3] {
            near_eval_direct_vector(
                OperatorKind::StokesS,
                &c,
                &s,
                &TargetBatch::points(vec![y]),
                EvalOptions::default(),
            )
            .unwrap()[0]
        };
        let mut grad = [[Complex::ZERO; 3]; 3]; // grad[i][j] = du_i/dx_j
        for j in 0..3 {
            let mut xp = x;
            let mut xm = x;
            xp[j] += h;
            xm[j] -= h;
            let up = vel(xp);
            let um = vel(xm);
            for i in 0..3 {
                grad[i][j] = (up[i] - um[i]) / (2.0 * h);
            }
        }
        let vals = vector_values(&s, &c);
        let pres = quadrature_pressure(&s, &vals, x).unwrap();
        let mut fd = [Complex::ZERO; 3];
        for i in 0..3 {
            for j in 0..3 {
                fd[i] += (grad[i][j] + grad[j][i]) * nu[j];
            }
            fd[i] -= pres * nu[i];
        }
        for k in 0..3 {
            assert!(
                (tr_cart[k] - fd[k]).norm() < 1e-6,
                "component {k}: {} vs {}",
                tr_cart[k],
                fd[k]
            );
        }
    }

    #[test]
    fn target_inside_without_flag_errors() {
        let s = unit_sphere(4);
        let c = ScalarCoeffs::unit(4, 0, 0);
        let r = near_eval_direct_scalar(
            OperatorKind::LaplaceS,
            &c,
            &s,
            &TargetBatch::points(vec![[0.1, 0.0, 0.0]]),
            EvalOptions::default(),
        );
        assert!(r.is_err());
    }

    #[test]
    fn scaling_laws_locked_by_quadrature() {
        // radius-a sphere, all lengths scaled: single layers gain a, double
        // layers and tractions are scale-free
        let p = 16;
        let g = Arc::new(SphGrid::new(GridSpec::new(p).unwrap()));
        let a = 2.7;
        let s1 = unit_sphere(p);
        let sa = Sphere::new(0, [0.0; 3], a, g).unwrap();
        let c = crate::synthetic::random_vector_density(p, 2.0, 10);
        let x_unit = [0.0, 3.0, 4.0];
        let x_scaled = [0.0, 3.0 * a, 4.0 * a];
        for kind in [OperatorKind::StokesS, OperatorKind::StokesDplus] {
            let vals_unit = vector_values(&s1, &c);
            let vals_scaled = vector_values(&sa, &c); // same parameter-domain density
            let qu = smooth_quadrature_eval_vector(kind, &s1, &vals_unit, &TargetBatch::points(vec![x_unit]))
                .unwrap();
            let qa =
                smooth_quadrature_eval_vector(kind, &sa, &vals_scaled, &TargetBatch::points(vec![x_scaled]))
                    .unwrap();
            let factor = kind_scale(kind, a);
            for k in 0..3 {
                assert!(
                    (qa[0][k] - factor * qu[0][k]).norm() < 1e-12,
                    "{kind:?}: {} vs {}",
                    qa[0][k],
                    factor * qu[0][k]
                );
            }
            // and the formula path reproduces the scaled quadrature
            let direct = near_eval_direct_vector(
                kind,
                &c,
                &sa,
                &TargetBatch::points(vec![x_scaled]),
                EvalOptions::default(),
            )
            .unwrap();
            for k in 0..3 {
                assert!((direct[0][k] - qa[0][k]).norm() < 1e-10);
            }
        }
        // Laplace: S gains a, D scale-free, flux scale-free
        let sc = crate::synthetic::random_scalar_density(p, 2.0, 3);
        let su = sht_inverse(&s1.grid, &sc);
        for kind in [OperatorKind::LaplaceS, OperatorKind::LaplaceDplus] {
            let qu =
                smooth_quadrature_eval_scalar(kind, &s1, &su, &TargetBatch::points(vec![x_unit])).unwrap();
            let qa =
                smooth_quadrature_eval_scalar(kind, &sa, &su, &TargetBatch::points(vec![x_scaled])).unwrap();
            let factor = kind_scale(kind, a);
            assert!((qa[0] - factor * qu[0]).norm() < 1e-12, "{kind:?}");
            let direct = near_eval_direct_scalar(
                kind,
                &sc,
                &sa,
                &TargetBatch::points(vec![x_scaled]),
                EvalOptions::default(),
            )
            .unwrap();
            assert!((direct[0] - qa[0]).norm() < 1e-12);
        }
    }

    #[test]
    fn divergence_free_off_surface() {
        let p = 12;
        let s = unit_sphere(p);
        let c = crate::synthetic::random_vector_density(p, 2.0, 77);
        let h = 1e-4;
        for kind in [OperatorKind::StokesS, OperatorKind::StokesDplus] {
            for x in [[1.5, 0.3, -0.2], [0.0, -2.0, 1.0]] {
                let vel = |y: Vec3| -> [Complex; 3] {
                    near_eval_direct_vector(
                        kind,
                        &c,
                        &s,
                        &TargetBatch::points(vec![y]),
                        EvalOptions::default(),
                    )
                    .unwrap()[0]
                };
                let mut div = Complex::ZERO;
                for k in 0..3 {
                    let mut xp = x;
                    let mut xm = x;
                    xp[k] += h;
                    xm[k] -= h;
                    div += (vel(xp)[k] - vel(xm)[k]) / (2.0 * h);
                }
                assert!(div.norm() < 1e-8, "{kind:?} at {x:?}: div {div}");
            }
        }
    }

    #[test]
    fn self_eval_shapes() {
        let p = 4;
        let c = VectorCoeffsVWX::zeros(p);
        let out = self_eval_vector(OperatorKind::StokesS, &c, 2.0).unwrap();
        assert_eq!(out.v.len(), coeff_len(p));
    }
}
