//! Composite operator application over a suspension: self-interactions by
//! diagonal spectra, non-well-separated pairs by the near-singular scheme,
//! well-separated pairs by smooth quadrature through the far-field backend.
//!
//! Near and self contributions accumulate as spherical-harmonic coefficients
//! per target sphere (one inverse transform each); far-field contributions
//! are point values added after the inverse. Accumulation runs in ascending
//! source id for bitwise reproducibility.

use std::time::{Duration, Instant};

use crate::coeffs::{ScalarCoeffs, VectorCoeffsVWX};
use crate::error::Result;
use crate::evaluation::fft_near::{near_eval_fft_scalar, near_eval_fft_vector};
use crate::evaluation::geometry::{well_separated, Suspension, TargetBatch};
use crate::evaluation::near::{
    near_eval_direct_scalar, near_eval_direct_vector, self_eval_scalar, self_eval_vector, EvalOptions,
};
use crate::evaluation::quadrature::{FarFieldBackend, PointSources};
use crate::harmonics::{sht_forward, sht_inverse, sph_to_cart, vsht_forward, vsht_inverse, cart_to_sph};
use crate::spectra::OperatorKind;
use crate::Complex;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NearScheme {
    #[default]
    Fft,
    Direct,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct CompositeOptions {
    pub near: NearScheme,
}

/// Wall-clock split between the near+self and far phases of one apply.
#[derive(Debug, Clone, Copy, Default)]
pub struct PhaseTimings {
    pub near_self: Duration,
    pub far: Duration,
}

fn vector_cart_values(susp: &Suspension, i: usize, coeffs: &VectorCoeffsVWX) -> Vec<[Complex; 3]> {
    let grid = &susp.grid;
    let (fr, ft, fp) = vsht_inverse(grid, coeffs);
    let mut out = Vec::with_capacity(grid.n_nodes());
    let _ = i;
    for j in 0..grid.n_theta() {
        for k in 0..grid.n_phi() {
            let idx = j * grid.n_phi() + k;
            out.push(sph_to_cart(grid.theta[j], grid.phi[k], [fr[idx], ft[idx], fp[idx]]));
        }
    }
    out
}

/// Composite apply for scalar (Laplace) kinds; returns point values at every
/// sphere's grid nodes, plus phase timings.
pub fn composite_apply_scalar(
    kind: OperatorKind,
    susp: &Suspension,
    densities: &[ScalarCoeffs],
    backend: &dyn FarFieldBackend,
    opts: CompositeOptions,
) -> Result<(Vec<Vec<Complex>>, PhaseTimings)> {
    let (coeffs, values, timings) = composite_scalar_parts(kind, susp, densities, backend, opts)?;
    let mut out = Vec::with_capacity(susp.n_bodies());
    for (i, c) in coeffs.iter().enumerate() {
        let mut vals = sht_inverse(&susp.grid, c);
        for (v, f) in vals.iter_mut().zip(&values[i]) {
            *v += f;
        }
        out.push(vals);
    }
    Ok((out, timings))
}

/// Coefficient-output composite apply for scalar kinds (far values are
/// forward-projected), used by the boundary integral solvers.
pub fn composite_apply_scalar_coeffs(
    kind: OperatorKind,
    susp: &Suspension,
    densities: &[ScalarCoeffs],
    backend: &dyn FarFieldBackend,
    opts: CompositeOptions,
) -> Result<Vec<ScalarCoeffs>> {
    let (mut coeffs, values, _) = composite_scalar_parts(kind, susp, densities, backend, opts)?;
    for (i, c) in coeffs.iter_mut().enumerate() {
        if values[i].iter().any(|v| *v != Complex::ZERO) {
            let far = sht_forward(&susp.grid, &values[i])?;
            for (a, b) in c.data.iter_mut().zip(&far.data) {
                *a += b;
            }
        }
    }
    Ok(coeffs)
}

#[allow(clippy::type_complexity)]
fn composite_scalar_parts(
    kind: OperatorKind,
    susp: &Suspension,
    densities: &[ScalarCoeffs],
    backend: &dyn FarFieldBackend,
    opts: CompositeOptions,
) -> Result<(Vec<ScalarCoeffs>, Vec<Vec<Complex>>, PhaseTimings)> {
    assert_eq!(densities.len(), susp.n_bodies());
    let p = susp.p();
    let nb = susp.n_bodies();
    let is_flux = matches!(kind, OperatorKind::LaplaceKplus | OperatorKind::LaplaceKminus);
    let mut timings = PhaseTimings::default();
    let mut values: Vec<Vec<Complex>> = (0..nb).map(|_| vec![Complex::ZERO; susp.grid.n_nodes()]).collect();

    let t0 = Instant::now();
    let mut coeffs: Vec<ScalarCoeffs> = Vec::with_capacity(nb);
    for t in 0..nb {
        let mut acc = self_eval_scalar(kind, &densities[t], susp.spheres[t].radius)?;
        for s in 0..nb {
            if s == t || well_separated(&susp.spheres[s], &susp.spheres[t], susp.eta) {
                continue;
            }
            match opts.near {
                NearScheme::Fft => {
                    let c = near_eval_fft_scalar(kind, &densities[s], &susp.spheres[s], &susp.spheres[t])?;
                    for (a, b) in acc.data.iter_mut().zip(&c.data) {
                        *a += b;
                    }
                }
                NearScheme::Direct => {
                    let trg = &susp.spheres[t];
                    let batch = if is_flux {
                        TargetBatch::with_normals(trg.nodes(), trg.normals())?
                    } else {
                        TargetBatch::points(trg.nodes())
                    };
                    let vals = near_eval_direct_scalar(
                        kind,
                        &densities[s],
                        &susp.spheres[s],
                        &batch,
                        EvalOptions::default(),
                    )?;
                    for (a, b) in values[t].iter_mut().zip(&vals) {
                        *a += b;
                    }
                }
            }
        }
        coeffs.push(acc);
    }
    timings.near_self = t0.elapsed();

    let t1 = Instant::now();
    let sources: Vec<PointSources> = (0..nb)
        .map(|s| {
            let vals = sht_inverse(&susp.grid, &densities[s]);
            PointSources::from_sphere_scalar(&susp.spheres[s], &vals)
        })
        .collect();
    for t in 0..nb {
        let trg = &susp.spheres[t];
        let pts = trg.nodes();
        let nrm = trg.normals();
        for s in 0..nb {
            if s == t || !well_separated(&susp.spheres[s], &susp.spheres[t], susp.eta) {
                continue;
            }
            let contrib = backend.eval_scalar(kind, &sources[s], &pts, if is_flux { Some(&nrm) } else { None })?;
            for (a, b) in values[t].iter_mut().zip(&contrib) {
                *a += b;
            }
        }
    }
    timings.far = t1.elapsed();
    let _ = p;
    Ok((coeffs, values, timings))
}

/// Composite apply for Stokes kinds; returns Cartesian vector values at
/// every sphere's grid nodes, plus phase timings.
#[allow(clippy::type_complexity)]
pub fn composite_apply_vector(
    kind: OperatorKind,
    susp: &Suspension,
    densities: &[VectorCoeffsVWX],
    backend: &dyn FarFieldBackend,
    opts: CompositeOptions,
) -> Result<(Vec<Vec<[Complex; 3]>>, PhaseTimings)> {
    let (coeffs, values, timings) = composite_vector_parts(kind, susp, densities, backend, opts)?;
    let mut out = Vec::with_capacity(susp.n_bodies());
    for (i, c) in coeffs.iter().enumerate() {
        let mut vals = vector_cart_values(susp, i, c);
        for (v, f) in vals.iter_mut().zip(&values[i]) {
            for k in 0..3 {
                v[k] += f[k];
            }
        }
        out.push(vals);
    }
    Ok((out, timings))
}

/// Coefficient-output composite apply for Stokes kinds.
pub fn composite_apply_vector_coeffs(
    kind: OperatorKind,
    susp: &Suspension,
    densities: &[VectorCoeffsVWX],
    backend: &dyn FarFieldBackend,
    opts: CompositeOptions,
) -> Result<Vec<VectorCoeffsVWX>> {
    let (mut coeffs, values, _) = composite_vector_parts(kind, susp, densities, backend, opts)?;
    let grid = &susp.grid;
    for (i, c) in coeffs.iter_mut().enumerate() {
        if values[i].iter().any(|v| v[0] != Complex::ZERO || v[1] != Complex::ZERO || v[2] != Complex::ZERO) {
            // far values arrive Cartesian; convert to spherical components
            let mut fr = vec![Complex::ZERO; grid.n_nodes()];
            let mut ft = vec![Complex::ZERO; grid.n_nodes()];
            let mut fp = vec![Complex::ZERO; grid.n_nodes()];
            for j in 0..grid.n_theta() {
                for k in 0..grid.n_phi() {
                    let idx = j * grid.n_phi() + k;
                    let sph = cart_to_sph(grid.theta[j], grid.phi[k], values[i][idx]);
                    fr[idx] = sph[0];
                    ft[idx] = sph[1];
                    fp[idx] = sph[2];
                }
            }
            let far = vsht_forward(grid, &fr, &ft, &fp)?;
            c.axpy(Complex::ONE, &far);
        }
    }
    Ok(coeffs)
}

#[allow(clippy::type_complexity)]
fn composite_vector_parts(
    kind: OperatorKind,
    susp: &Suspension,
    densities: &[VectorCoeffsVWX],
    backend: &dyn FarFieldBackend,
    opts: CompositeOptions,
) -> Result<(Vec<VectorCoeffsVWX>, Vec<Vec<[Complex; 3]>>, PhaseTimings)> {
    assert_eq!(densities.len(), susp.n_bodies());
    let nb = susp.n_bodies();
    let is_traction = matches!(kind, OperatorKind::StokesKplus | OperatorKind::StokesKminus);
    let mut timings = PhaseTimings::default();
    let mut values: Vec<Vec<[Complex; 3]>> =
        (0..nb).map(|_| vec![[Complex::ZERO; 3]; susp.grid.n_nodes()]).collect();

    let t0 = Instant::now();
    let mut coeffs: Vec<VectorCoeffsVWX> = Vec::with_capacity(nb);
    for t in 0..nb {
        let mut acc = self_eval_vector(kind, &densities[t], susp.spheres[t].radius)?;
        for s in 0..nb {
            if s == t || well_separated(&susp.spheres[s], &susp.spheres[t], susp.eta) {
                continue;
            }
            match opts.near {
                NearScheme::Fft => {
                    let c = near_eval_fft_vector(kind, &densities[s], &susp.spheres[s], &susp.spheres[t])?;
                    acc.axpy(Complex::ONE, &c);
                }
                NearScheme::Direct => {
                    let trg = &susp.spheres[t];
                    let batch = if is_traction {
                        TargetBatch::with_normals(trg.nodes(), trg.normals())?
                    } else {
                        TargetBatch::points(trg.nodes())
                    };
                    let vals = near_eval_direct_vector(
                        kind,
                        &densities[s],
                        &susp.spheres[s],
                        &batch,
                        EvalOptions::default(),
                    )?;
                    for (a, b) in values[t].iter_mut().zip(&vals) {
                        for c in 0..3 {
                            a[c] += b[c];
                        }
                    }
                }
            }
        }
        coeffs.push(acc);
    }
    timings.near_self = t0.elapsed();

    let t1 = Instant::now();
    let sources: Vec<PointSources> = (0..nb)
        .map(|s| {
            let vals = vector_cart_values(susp, s, &densities[s]);
            PointSources::from_sphere_vector(&susp.spheres[s], &vals)
        })
        .collect();
    for t in 0..nb {
        let trg = &susp.spheres[t];
        let pts = trg.nodes();
        let nrm = trg.normals();
        for s in 0..nb {
            if s == t || !well_separated(&susp.spheres[s], &susp.spheres[t], susp.eta) {
                continue;
            }
            let contrib =
                backend.eval_vector(kind, &sources[s], &pts, if is_traction { Some(&nrm) } else { None })?;
            for (a, b) in values[t].iter_mut().zip(&contrib) {
                for k in 0..3 {
                    a[k] += b[k];
                }
            }
        }
    }
    timings.far = t1.elapsed();
    Ok((coeffs, values, timings))
}
