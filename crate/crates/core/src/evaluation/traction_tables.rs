//! Banded coupling tables for evaluating the traction of a Stokes field at
//! targets with arbitrary normals.
//!
//! For a field term `u = g(r) Z_n^m` with pressure `p = q(r)/r Y_n^m`, the
//! traction at a target with unit normal `nu = nu_r e_r + nu_t e_theta +
//! nu_p e_phi` (source-frame components) is
//!
//! `t = g'(r) [(e_r.nu) Z + (Z.nu) e_r] + (g(r)/r) (grad_g Z + grad_g^T Z) nu - (q(r)/r) Y nu`
//!
//! where the middle term is the tangential part of the rate-of-strain
//! (including the frame derivatives). For the radial normal component the
//! bracketed angular fields are degree-diagonal; for the tangential
//! components the *sin(theta)-tempered* fields `sin * A[Z, e_c]` expand
//! exactly in vector spherical harmonics of degrees {n-1, n, n+1} and the
//! same order m (the raw e_theta/e_phi contractions are not band-limited),
//! so the tables store the tempered expansions and the evaluation contracts
//! them with `nu_c / sin(theta)` -- a smooth quantity in the pole-aligned
//! geometry (`nu_theta/sin = C_z/r`). The expansions are precomputed by
//! quadrature projection on an auxiliary Gauss grid fine enough to make the
//! band-limited projections exact.

use crate::coeffs::{coeff_index, coeff_len, VectorCoeffsVWX};
use crate::harmonics::VectorChannel;
use crate::legendre::{dtheta_norm_plm_col, gauss_legendre, norm_plm_col};
use crate::Complex;

/// Normal-vector component index: 0 = e_r, 1 = e_theta, 2 = e_phi.
pub type NormalComp = usize;

/// `stencil[out_channel][offset]` with offsets {n-1, n, n+1}.
pub type Stencil = [[Complex; 3]; 3];

/// Precomputed traction couplings for all source modes of degree <= p.
pub struct TractionCouplingTables {
    p: usize,
    /// index: (z * 3 + c) * 2 + term, term 0 = g' (A1), term 1 = g/r (A2)
    strain: Vec<Vec<Stencil>>,
    /// index: c; the -q/r (A3) pressure coupling
    pressure: Vec<Vec<Stencil>>,
}

fn channel_id(z: VectorChannel) -> usize {
    match z {
        VectorChannel::V => 0,
        VectorChannel::W => 1,
        VectorChannel::X => 2,
    }
}

struct ProfileWorkspace {
    x: Vec<f64>,
    s: Vec<f64>,
    w: Vec<f64>,
}

impl TractionCouplingTables {
    pub fn build(p: usize) -> Self {
        // auxiliary quadrature: products of degree-(p+1) profiles need a few
        // extra nodes beyond the sampling grid for exactness
        let n_aux = p + 4;
        let (x, w) = gauss_legendre(n_aux);
        let s: Vec<f64> = x.iter().map(|v| (1.0 - v * v).sqrt()).collect();
        let ws = ProfileWorkspace { x, s, w };
        let len = coeff_len(p);
        let mut strain = vec![vec![[[Complex::ZERO; 3]; 3]; len]; 18];
        let mut pressure = vec![vec![[[Complex::ZERO; 3]; 3]; len]; 3];

        let n_max = p + 1;
        let mut plm = vec![vec![0.0; ws.x.len()]; n_max + 2];
        let mut dplm = vec![vec![0.0; ws.x.len()]; n_max + 2];
        let mut col = vec![0.0; n_max + 1];
        let mut dcol = vec![0.0; n_max + 1];
        for m in 0..=p as i64 {
            let am = m as usize;
            // profile columns for all degrees at this |m| (same for -m)
            for (q, (&xq, &sq)) in ws.x.iter().zip(&ws.s).enumerate() {
                norm_plm_col(am, n_max, xq, sq, &mut col[..n_max + 1 - am]);
                dtheta_norm_plm_col(am, n_max, xq, sq, &col[..n_max + 1 - am], &mut dcol[..n_max + 1 - am]);
                for n in am..=n_max {
                    plm[n][q] = col[n - am];
                    dplm[n][q] = dcol[n - am];
                }
            }
            for mm in [m, -m] {
                if mm == 0 && m != 0 {
                    continue;
                }
                for n in am..=p {
                    let i = coeff_index(n, mm);
                    for z in [VectorChannel::V, VectorChannel::W, VectorChannel::X] {
                        let (mut a1, mut a2) = strain_profiles(n, mm, z, &plm[n], &dplm[n], &ws);
                        temper_tangential(&mut a1, &ws);
                        temper_tangential(&mut a2, &ws);
                        for c in 0..3 {
                            let idx = (channel_id(z) * 3 + c) * 2;
                            strain[idx][i] = project_band(&a1[c], n, mm, p, &plm, &dplm, &ws);
                            strain[idx + 1][i] = project_band(&a2[c], n, mm, p, &plm, &dplm, &ws);
                        }
                    }
                    let mut a3 = pressure_profiles(&plm[n], &ws);
                    temper_tangential(&mut a3, &ws);
                    for c in 0..3 {
                        pressure[c][i] = project_band(&a3[c], n, mm, p, &plm, &dplm, &ws);
                    }
                }
            }
        }
        Self { p, strain, pressure }
    }

    #[inline]
    pub fn p(&self) -> usize {
        self.p
    }

    #[inline]
    pub fn strain_stencil(&self, z: VectorChannel, c: NormalComp, term: usize, n: usize, m: i64) -> &Stencil {
        &self.strain[(channel_id(z) * 3 + c) * 2 + term][coeff_index(n, m)]
    }

    #[inline]
    pub fn pressure_stencil(&self, c: NormalComp, n: usize, m: i64) -> &Stencil {
        &self.pressure[c][coeff_index(n, m)]
    }

    /// Accumulates the traction coefficient expansion (degree <= p+1) of one
    /// source mode: weight * [gp * A1 + gr * A2 - qr * A3] contracted with
    /// the normal components, which must be supplied pre-divided as
    /// `[nu_r, nu_theta/sin, nu_phi/sin]` to match the tempered tangential
    /// tables.
    #[allow(clippy::too_many_arguments)]
    pub fn accumulate(
        &self,
        out: &mut VectorCoeffsVWX,
        z: VectorChannel,
        n: usize,
        m: i64,
        weight: Complex,
        nu: [f64; 3],
        gp: f64,
        gr: f64,
        qr: f64,
    ) {
        if weight == Complex::ZERO {
            return;
        }
        let p_out = out.p();
        for c in 0..3 {
            if nu[c] == 0.0 {
                continue;
            }
            let s1 = self.strain_stencil(z, c, 0, n, m);
            let s2 = self.strain_stencil(z, c, 1, n, m);
            let s3 = self.pressure_stencil(c, n, m);
            for (off, dn) in [(0usize, -1i64), (1, 0), (2, 1)] {
                let n_out = n as i64 + dn;
                if n_out < 0 || n_out as usize > p_out || (m.unsigned_abs() as i64) > n_out {
                    continue;
                }
                let idx = coeff_index(n_out as usize, m);
                let f = weight * nu[c];
                for (ch, buf) in [(0, &mut out.v), (1, &mut out.w), (2, &mut out.x)] {
                    let add = gp * s1[ch][off] + gr * s2[ch][off] - qr * s3[ch][off];
                    if add != Complex::ZERO {
                        buf[idx] += f * add;
                    }
                }
            }
        }
    }
}

/// Spherical-component profiles (times e^{im phi}) of Z and its traction
/// fields A1 (the g' part) and A2 (the g/r part) for each normal component.
fn strain_profiles(
    n: usize,
    m: i64,
    z: VectorChannel,
    plm: &[f64],
    dplm: &[f64],
    ws: &ProfileWorkspace,
) -> ([Vec<[Complex; 3]>; 3], [Vec<[Complex; 3]>; 3]) {
    let nq = ws.x.len();
    let nf = n as f64;
    let mf = m as f64;
    let mut a1: [Vec<[Complex; 3]>; 3] = std::array::from_fn(|_| vec![[Complex::ZERO; 3]; nq]);
    let mut a2: [Vec<[Complex; 3]>; 3] = std::array::from_fn(|_| vec![[Complex::ZERO; 3]; nq]);
    for q in 0..nq {
        let (x, s) = (ws.x[q], ws.s[q]);
        let y = Complex::from(plm[q]);
        let dy = Complex::from(dplm[q]);
        let ys = Complex::i() * mf / s * y; // (1/s) dY/dphi
        let d2y = -(x / s) * dy - (nf * (nf + 1.0) - mf * mf / (s * s)) * y;
        let dys = Complex::i() * mf * (dy / s - x * y / (s * s)); // d/dth of (Y/s) * i m? careful: d/dth[(im/s)Y]
        let (zr, zt, zp, dzr, dzt, dzp) = match z {
            VectorChannel::V => (-(nf + 1.0) * y, dy, ys, -(nf + 1.0) * dy, d2y, dys),
            VectorChannel::W => (nf * y, dy, ys, nf * dy, d2y, dys),
            VectorChannel::X => (Complex::ZERO, -ys, dy, Complex::ZERO, -dys, d2y),
        };
        let cot = x / s;
        let im_s = Complex::i() * mf / s;
        // A1 columns: (e_r tensor Z + Z tensor e_r) . e_c
        a1[0][q] = [2.0 * zr, zt, zp];
        a1[1][q] = [zt, Complex::ZERO, Complex::ZERO];
        a1[2][q] = [zp, Complex::ZERO, Complex::ZERO];
        // A2 columns: tangential rate-of-strain part contracted with e_c
        let e_rt = dzr - zt;
        let e_rp = im_s * zr - zp;
        let e_tt = 2.0 * (dzt + zr);
        let e_tp = im_s * zt + dzp - cot * zp;
        let e_pp = 2.0 * (im_s * zp + zr + cot * zt);
        a2[0][q] = [Complex::ZERO, e_rt, e_rp];
        a2[1][q] = [e_rt, e_tt, e_tp];
        a2[2][q] = [e_rp, e_tp, e_pp];
    }
    (a1, a2)
}

/// Multiplies the tangential-normal (e_theta, e_phi) profile families by
/// sin(theta); the radial family stays untempered.
fn temper_tangential(a: &mut [Vec<[Complex; 3]>; 3], ws: &ProfileWorkspace) {
    for c in 1..3 {
        for (q, v) in a[c].iter_mut().enumerate() {
            for comp in v.iter_mut() {
                *comp *= ws.s[q];
            }
        }
    }
}

/// Profiles of `Y_n^m e_c` for the pressure coupling.
fn pressure_profiles(plm: &[f64], ws: &ProfileWorkspace) -> [Vec<[Complex; 3]>; 3] {
    let nq = ws.x.len();
    let mut a: [Vec<[Complex; 3]>; 3] = std::array::from_fn(|_| vec![[Complex::ZERO; 3]; nq]);
    for q in 0..nq {
        let y = Complex::from(plm[q]);
        a[0][q] = [y, Complex::ZERO, Complex::ZERO];
        a[1][q] = [Complex::ZERO, y, Complex::ZERO];
        a[2][q] = [Complex::ZERO, Complex::ZERO, y];
    }
    a
}

/// Projects a sampled angular field with e^{im phi} azimuthal dependence
/// onto the V/W/X modes of degrees {n-1, n, n+1}.
fn project_band(
    field: &[[Complex; 3]],
    n: usize,
    m: i64,
    p: usize,
    plm: &[Vec<f64>],
    dplm: &[Vec<f64>],
    ws: &ProfileWorkspace,
) -> Stencil {
    let am = m.unsigned_abs() as usize;
    let mut out = [[Complex::ZERO; 3]; 3];
    for (off, dn) in [(0usize, -1i64), (1, 0), (2, 1)] {
        let n_out = n as i64 + dn;
        if n_out < 0 || n_out as usize > p + 1 || (am as i64) > n_out {
            continue;
        }
        let n_out = n_out as usize;
        let nf = n_out as f64;
        let mf = m as f64;
        let mut iv = Complex::ZERO;
        let mut iw = Complex::ZERO;
        let mut ix = Complex::ZERO;
        for q in 0..ws.x.len() {
            let wq = 2.0 * std::f64::consts::PI * ws.w[q];
            let y = Complex::from(plm[n_out][q]);
            let dy = Complex::from(dplm[n_out][q]);
            let ys = Complex::i() * mf / ws.s[q] * y;
            let f = field[q];
            // conj of basis components
            iv += wq
                * (f[0] * (-(nf + 1.0) * y).conj() + f[1] * dy.conj() + f[2] * ys.conj());
            iw += wq * (f[0] * (nf * y).conj() + f[1] * dy.conj() + f[2] * ys.conj());
            ix += wq * (f[1] * (-ys).conj() + f[2] * dy.conj());
        }
        out[0][off] = if n_out == 0 { iv } else { iv / ((nf + 1.0) * (2.0 * nf + 1.0)) };
        out[1][off] = if n_out == 0 { Complex::ZERO } else { iw / (nf * (2.0 * nf + 1.0)) };
        out[2][off] = if n_out == 0 { Complex::ZERO } else { ix / (nf * (nf + 1.0)) };
    }
    out
}
