//! Scalar and vector spherical harmonic evaluation and transforms.
//!
//! Harmonic convention: `Y_n^m = sqrt((2n+1)/4pi (n-|m|)!/(n+|m|)!)
//! P_n^{|m|}(cos theta) e^{im phi}` with plain associated Legendre functions
//! (|m| inside, no Condon-Shortley sign), so `Y_n^{-m} = conj(Y_n^m)`.
//!
//! Transforms run FFTs in longitude and direct normalized-Legendre sums in
//! latitude: O(p^3) + O(p^2 log p) per transform. The vector transform works
//! through scalar transforms of the spherical components: the radial part
//! directly, the tangential parts through expansions of `f_theta/sin` and
//! `f_phi/sin` combined by the sparse degree-banded couplings between
//! {Y e_theta, Y e_phi} and {G, X}.

use crate::coeffs::{coeff_index, ScalarCoeffs, VectorCoeffsVWX};
use crate::error::{Error, Result};
use crate::grid::SphGrid;
use crate::legendre::{dtheta_norm_plm_col, norm_plm_col};
use crate::Complex;

pub use crate::coeffs::{vwx_to_ygx, ygx_to_vwx, VectorChannel};

/// Y_n^m at a single point.
pub fn ynm_eval(n: usize, m: i64, theta: f64, phi: f64) -> Result<Complex> {
    if m.unsigned_abs() as usize > n {
        return Err(Error::InvalidArgument(format!("|m|={} exceeds n={n}", m.abs())));
    }
    if !theta.is_finite() || !phi.is_finite() {
        return Err(Error::InvalidArgument("non-finite angles".into()));
    }
    let am = m.unsigned_abs() as usize;
    let mut col = vec![0.0; n + 1 - am];
    norm_plm_col(am, n, theta.cos(), theta.sin(), &mut col);
    Ok(col[n - am] * Complex::from_polar(1.0, m as f64 * phi))
}

/// Vector spherical harmonic value in (e_r, e_theta, e_phi) components.
pub fn eval_vector_harmonic(
    basis: VectorChannel,
    n: usize,
    m: i64,
    theta: f64,
    phi: f64,
) -> Result<[Complex; 3]> {
    if m.unsigned_abs() as usize > n {
        return Err(Error::InvalidArgument(format!("|m|={} exceeds n={n}", m.abs())));
    }
    let am = m.unsigned_abs() as usize;
    let (x, s) = (theta.cos(), theta.sin());
    let mut col = vec![0.0; n + 1 - am];
    let mut dcol = vec![0.0; n + 1 - am];
    norm_plm_col(am, n, x, s, &mut col);
    dtheta_norm_plm_col(am, n, x, s, &col, &mut dcol);
    let e = Complex::from_polar(1.0, m as f64 * phi);
    let y = col[n - am] * e;
    let dy_dtheta = dcol[n - am] * e;
    let dy_dphi_over_sin = Complex::i() * m as f64 / s * y;
    let nf = n as f64;
    // grad_gamma Y = dY/dtheta e_theta + (1/sin) dY/dphi e_phi
    Ok(match basis {
        VectorChannel::V => [-(nf + 1.0) * y, dy_dtheta, dy_dphi_over_sin],
        VectorChannel::W => [nf * y, dy_dtheta, dy_dphi_over_sin],
        VectorChannel::X => [Complex::ZERO, -dy_dphi_over_sin, dy_dtheta],
    })
}

fn check_len(grid: &SphGrid, len: usize) -> Result<()> {
    if len != grid.n_nodes() {
        return Err(Error::ShapeMismatch { expected: grid.n_nodes(), got: len });
    }
    Ok(())
}

/// Forward scalar transform up to degree `deg` (deg <= p+1; azimuthal orders
/// are limited to |m| <= min(n, p), which is all the internal pipelines need).
pub(crate) fn sht_forward_deg(grid: &SphGrid, samples: &[Complex], deg: usize) -> ScalarCoeffs {
    let p = grid.p();
    debug_assert!(deg <= p + 1);
    let n_phi = grid.n_phi();
    let mut buf = samples.to_vec();
    grid.fft_forward_rows(&mut buf);
    let mut out = ScalarCoeffs::zeros(deg);
    let scale = 2.0 * std::f64::consts::PI / n_phi as f64;
    for m in -(p.min(deg) as i64)..=p.min(deg) as i64 {
        let bin = if m >= 0 { m as usize } else { (n_phi as i64 + m) as usize };
        let am = m.unsigned_abs() as usize;
        for n in am..=deg {
            let plm = grid.plm(am, n);
            let mut acc = Complex::ZERO;
            for j in 0..grid.n_theta() {
                acc += grid.lambda[j] * plm[j] * buf[j * n_phi + bin];
            }
            out.set(n, m, acc * scale);
        }
    }
    out
}

/// Forward scalar spherical-harmonic transform on the standard grid.
///
/// Exact (to roundoff) for band-limited inputs of degree <= p.
pub fn sht_forward(grid: &SphGrid, samples: &[Complex]) -> Result<ScalarCoeffs> {
    check_len(grid, samples.len())?;
    Ok(sht_forward_deg(grid, samples, grid.p()))
}

/// Inverse scalar transform onto the standard grid (accepts coefficient sets
/// of degree up to p+1 as produced by the internal tangential pipeline).
pub fn sht_inverse(grid: &SphGrid, coeffs: &ScalarCoeffs) -> Vec<Complex> {
    let p = grid.p();
    let deg = coeffs.p();
    debug_assert!(deg <= p + 1);
    let n_phi = grid.n_phi();
    let mut buf = vec![Complex::ZERO; grid.n_nodes()];
    for m in -(p.min(deg) as i64)..=p.min(deg) as i64 {
        let bin = if m >= 0 { m as usize } else { (n_phi as i64 + m) as usize };
        let am = m.unsigned_abs() as usize;
        for n in am..=deg {
            let c = coeffs.get(n, m);
            if c == Complex::ZERO {
                continue;
            }
            let plm = grid.plm(am, n);
            for j in 0..grid.n_theta() {
                buf[j * n_phi + bin] += c * plm[j];
            }
        }
    }
    grid.fft_inverse_rows(&mut buf);
    buf
}

/// Direct evaluation of a scalar expansion at arbitrary points.
pub fn sht_eval_points(coeffs: &ScalarCoeffs, points: &[(f64, f64)]) -> Vec<Complex> {
    let p = coeffs.p();
    let mut out = Vec::with_capacity(points.len());
    let mut col = vec![0.0; p + 1];
    for &(theta, phi) in points {
        let (x, s) = (theta.cos(), theta.sin());
        let mut acc = Complex::ZERO;
        for m in -(p as i64)..=p as i64 {
            let am = m.unsigned_abs() as usize;
            norm_plm_col(am, p, x, s, &mut col[..p + 1 - am]);
            let e = Complex::from_polar(1.0, m as f64 * phi);
            let mut gm = Complex::ZERO;
            for n in am..=p {
                gm += coeffs.get(n, m) * col[n - am];
            }
            acc += gm * e;
        }
        out.push(acc);
    }
    out
}

/// `a_{n,m} = sqrt((n^2 - m^2)/(4n^2 - 1))`, the normalized-Legendre
/// three-term coupling coefficient.
fn a_nm(n: usize, m: i64) -> f64 {
    let nf = n as f64;
    let mf = m as f64;
    if (m.unsigned_abs() as usize) > n {
        return 0.0;
    }
    ((nf * nf - mf * mf) / (4.0 * nf * nf - 1.0)).sqrt()
}

fn alpha_nm(n: usize, m: i64) -> f64 {
    // (coefficient of ptilde_{n+1} in sin * d ptilde_n / d theta) = n a_{n+1}
    n as f64 * a_nm(n + 1, m)
}

fn beta_nm(n: usize, m: i64) -> f64 {
    (n as f64 + 1.0) * a_nm(n, m)
}

/// Sparse map (2.11): scalar coefficients of `f_theta/sin`, `f_phi/sin`
/// (degrees <= p+1) to tangential channels (G, X) of degrees <= p.
///
/// Built from `sin Y_n e_theta = -(a_{n+1}/(n+1)) G_{n+1} + (a_n/n) G_{n-1}
/// + (i m / (n(n+1))) X_n` and the e_phi analogue with G and X swapped and
/// the i m term negated.
pub(crate) fn t_fwd(
    phi_th: &ScalarCoeffs,
    phi_ph: &ScalarCoeffs,
    p: usize,
) -> (Vec<Complex>, Vec<Complex>) {
    let len = crate::coeffs::coeff_len(p);
    let mut g = vec![Complex::ZERO; len];
    let mut x = vec![Complex::ZERO; len];
    let deg = phi_th.p();
    for k in 1..=p {
        let kf = k as f64;
        let ntil = kf * (kf + 1.0);
        for m in -(k as i64)..=k as i64 {
            let am = m.unsigned_abs() as usize;
            let i = coeff_index(k, m);
            let im = Complex::new(0.0, m as f64);
            let mut gv = -im / ntil * phi_ph.get(k, m);
            let mut xv = im / ntil * phi_th.get(k, m);
            if k - 1 >= am {
                let a = a_nm(k, m) / kf;
                gv -= a * phi_th.get(k - 1, m);
                xv -= a * phi_ph.get(k - 1, m);
            }
            if k + 1 <= deg {
                let b = a_nm(k + 1, m) / (kf + 1.0);
                gv += b * phi_th.get(k + 1, m);
                xv += b * phi_ph.get(k + 1, m);
            }
            g[i] = gv;
            x[i] = xv;
        }
    }
    (g, x)
}

/// Sparse map (2.15) in the multiply-by-sin convention: tangential (G, X)
/// coefficients (degrees <= p) to scalar coefficients of `sin * f_theta`,
/// `sin * f_phi` (degrees <= p+1).
pub(crate) fn t_inv(g: &[Complex], x: &[Complex], p: usize) -> (ScalarCoeffs, ScalarCoeffs) {
    let mut s_th = ScalarCoeffs::zeros(p + 1);
    let mut s_ph = ScalarCoeffs::zeros(p + 1);
    for n in 0..=p + 1 {
        for m in -(n.min(p) as i64)..=n.min(p) as i64 {
            let im = Complex::new(0.0, m as f64);
            let mut th = Complex::ZERO;
            let mut ph = Complex::ZERO;
            if n >= 1 && n - 1 >= m.unsigned_abs() as usize && n - 1 <= p {
                let a = alpha_nm(n - 1, m);
                let i = coeff_index(n - 1, m);
                th += a * g[i];
                ph += a * x[i];
            }
            if n + 1 <= p {
                let b = beta_nm(n + 1, m);
                let i = coeff_index(n + 1, m);
                th -= b * g[i];
                ph -= b * x[i];
            }
            if n <= p && n >= m.unsigned_abs() as usize {
                let i = coeff_index(n, m);
                th -= im * x[i];
                ph += im * g[i];
            }
            s_th.set(n, m, th);
            s_ph.set(n, m, ph);
        }
    }
    (s_th, s_ph)
}

/// Forward vector spherical harmonic transform from spherical-component
/// samples (f_r, f_theta, f_phi) on the standard grid.
pub fn vsht_forward(
    grid: &SphGrid,
    f_r: &[Complex],
    f_theta: &[Complex],
    f_phi: &[Complex],
) -> Result<VectorCoeffsVWX> {
    check_len(grid, f_r.len())?;
    check_len(grid, f_theta.len())?;
    check_len(grid, f_phi.len())?;
    let p = grid.p();
    let n_phi = grid.n_phi();
    let phi_y = sht_forward_deg(grid, f_r, p);
    let mut t_th = f_theta.to_vec();
    let mut t_ph = f_phi.to_vec();
    for j in 0..grid.n_theta() {
        let inv_s = 1.0 / grid.sin_theta[j];
        for k in 0..n_phi {
            t_th[j * n_phi + k] *= inv_s;
            t_ph[j * n_phi + k] *= inv_s;
        }
    }
    let phi_th = sht_forward_deg(grid, &t_th, p + 1);
    let phi_ph = sht_forward_deg(grid, &t_ph, p + 1);
    let (g, x) = t_fwd(&phi_th, &phi_ph, p);
    let mut out = VectorCoeffsVWX::zeros(p);
    for n in 0..=p {
        let nf = n as f64;
        for m in -(n as i64)..=n as i64 {
            let i = coeff_index(n, m);
            if n == 0 {
                out.v[i] = -phi_y.get(0, 0);
            } else {
                out.v[i] = (nf * g[i] - phi_y.get(n, m)) / (2.0 * nf + 1.0);
                out.w[i] = ((nf + 1.0) * g[i] + phi_y.get(n, m)) / (2.0 * nf + 1.0);
                out.x[i] = x[i];
            }
        }
    }
    Ok(out)
}

/// Inverse vector transform onto the standard grid; returns
/// (f_r, f_theta, f_phi) samples.
pub fn vsht_inverse(grid: &SphGrid, coeffs: &VectorCoeffsVWX) -> (Vec<Complex>, Vec<Complex>, Vec<Complex>) {
    let p = coeffs.p();
    debug_assert_eq!(p, grid.p());
    let ygx = vwx_to_ygx(coeffs);
    let y = ScalarCoeffs::from_data(p, ygx.y.clone());
    let (s_th, s_ph) = t_inv(&ygx.g, &ygx.x, p);
    let f_r = sht_inverse(grid, &y);
    let mut f_th = sht_inverse(grid, &s_th);
    let mut f_ph = sht_inverse(grid, &s_ph);
    let n_phi = grid.n_phi();
    for j in 0..grid.n_theta() {
        let inv_s = 1.0 / grid.sin_theta[j];
        for k in 0..n_phi {
            f_th[j * n_phi + k] *= inv_s;
            f_ph[j * n_phi + k] *= inv_s;
        }
    }
    (f_r, f_th, f_ph)
}

/// Direct evaluation of a vector expansion at arbitrary points; returns
/// (e_r, e_theta, e_phi) component triples.
pub fn vsht_eval_points(coeffs: &VectorCoeffsVWX, points: &[(f64, f64)]) -> Vec<[Complex; 3]> {
    let p = coeffs.p();
    let mut out = Vec::with_capacity(points.len());
    let mut col = vec![0.0; p + 1];
    let mut dcol = vec![0.0; p + 1];
    for &(theta, phi) in points {
        let (x, s) = (theta.cos(), theta.sin());
        let mut val = [Complex::ZERO; 3];
        for m in -(p as i64)..=p as i64 {
            let am = m.unsigned_abs() as usize;
            norm_plm_col(am, p, x, s, &mut col[..p + 1 - am]);
            dtheta_norm_plm_col(am, p, x, s, &col[..p + 1 - am], &mut dcol[..p + 1 - am]);
            let e = Complex::from_polar(1.0, m as f64 * phi);
            let mut acc = [Complex::ZERO; 3];
            for n in am..=p {
                let i = coeff_index(n, m);
                let nf = n as f64;
                let y = Complex::from(col[n - am]);
                let dy = Complex::from(dcol[n - am]);
                let dphi = Complex::i() * m as f64 / s * y;
                let cv = coeffs.v[i];
                let cw = coeffs.w[i];
                let cx = coeffs.x[i];
                acc[0] += (-(nf + 1.0) * cv + nf * cw) * y;
                acc[1] += (cv + cw) * dy - cx * dphi;
                acc[2] += (cv + cw) * dphi + cx * dy;
            }
            val[0] += acc[0] * e;
            val[1] += acc[1] * e;
            val[2] += acc[2] * e;
        }
        out.push(val);
    }
    out
}

/// Spherical-to-Cartesian conversion of a component triple at (theta, phi).
pub fn sph_to_cart(theta: f64, phi: f64, v: [Complex; 3]) -> [Complex; 3] {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    let er = [st * cp, st * sp, ct];
    let et = [ct * cp, ct * sp, -st];
    let ep = [-sp, cp, 0.0];
    [
        v[0] * er[0] + v[1] * et[0] + v[2] * ep[0],
        v[0] * er[1] + v[1] * et[1] + v[2] * ep[1],
        v[0] * er[2] + v[1] * et[2] + v[2] * ep[2],
    ]
}

/// Cartesian-to-spherical conversion at (theta, phi).
pub fn cart_to_sph(theta: f64, phi: f64, v: [Complex; 3]) -> [Complex; 3] {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    [
        v[0] * (st * cp) + v[1] * (st * sp) + v[2] * ct,
        v[0] * (ct * cp) + v[1] * (ct * sp) - v[2] * st,
        -v[0] * sp + v[1] * cp,
    ]
}
