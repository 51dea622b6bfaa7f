//! The boundary integral formulations: porous media flow, mobility,
//! resistance and squirmers.
//!
//! Surface limits are taken from the exterior (fluid) side, so the
//! identity-plus-compact structure is carried by the one-sided diagonal
//! spectra: e.g. the porous operator is `S + D_+ = (1/2) I + S + D_pv`.
//! Sign conventions of the completion operators are locked by the
//! single-sphere analytic oracles (Stokes drag `6 pi a |v|`, rotational
//! drag `8 pi a^3 |omega|`, mobility `v = F/(6 pi a)`).

use crate::coeffs::VectorCoeffsVWX;
use crate::error::{Error, Result};
use crate::evaluation::composite::{
    composite_apply_vector_coeffs, CompositeOptions, NearScheme,
};
use crate::evaluation::geometry::{Suspension, TargetBatch};
use crate::evaluation::near::{near_eval_direct_vector, EvalOptions};
use crate::evaluation::kernels::{rotlet_apply, stokeslet_apply};
use crate::evaluation::quadrature::FarFieldBackend;
use crate::linalg::{add, Vec3};
use crate::solver::density::VectorLayout;
use crate::solver::gmres::{gmres, GmresReport, LinearOperator};
use crate::solver::rigid::{
    cartesian_values, coeffs_from_cartesian_field, extract_rigid_motion, field_moments,
    rho_from_forces, BodyForce, RigidMotion,
};
use crate::spectra::OperatorKind;
use crate::Complex;

#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    pub tol: f64,
    pub restart: usize,
    pub max_iter: usize,
    pub near: NearScheme,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { tol: 1e-10, restart: 50, max_iter: 500, near: NearScheme::Fft }
    }
}

impl SolverOptions {
    fn composite(&self) -> CompositeOptions {
        CompositeOptions { near: self.near }
    }
}

fn check_convergence(report: &GmresReport) -> Result<()> {
    if !report.converged {
        return Err(Error::NonConvergence {
            residual: report.final_residual(),
            iterations: report.iterations,
        });
    }
    Ok(())
}

/// Porous-media operator: `(S + D_+)[mu]` restricted to every surface.
pub fn apply_porous(
    susp: &Suspension,
    backend: &dyn FarFieldBackend,
    opts: &SolverOptions,
    mu: &[VectorCoeffsVWX],
) -> Result<Vec<VectorCoeffsVWX>> {
    let mut out = composite_apply_vector_coeffs(OperatorKind::StokesS, susp, mu, backend, opts.composite())?;
    let d = composite_apply_vector_coeffs(OperatorKind::StokesDplus, susp, mu, backend, opts.composite())?;
    for (a, b) in out.iter_mut().zip(&d) {
        a.axpy(Complex::ONE, b);
    }
    Ok(out)
}

struct PorousOperator<'a> {
    susp: &'a Suspension,
    backend: &'a dyn FarFieldBackend,
    opts: SolverOptions,
    layout: VectorLayout,
}

impl LinearOperator for PorousOperator<'_> {
    fn dim(&self) -> usize {
        self.layout.dim()
    }
    fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        let (mu, _) = self.layout.unpack(x);
        let out = apply_porous(self.susp, self.backend, &self.opts, &mu)?;
        Ok(self.layout.pack(&out, &[]))
    }
}

#[derive(Debug)]
pub struct PorousSolution {
    pub mu: Vec<VectorCoeffsVWX>,
    pub report: GmresReport,
}

/// Solves the no-slip problem `(S + D_+)[mu] = -u_inf` on every surface.
pub fn solve_porous(
    susp: &Suspension,
    backend: &dyn FarFieldBackend,
    opts: &SolverOptions,
    u_inf: impl Fn(Vec3) -> Vec3,
) -> Result<PorousSolution> {
    let layout = VectorLayout::new(susp.p(), susp.n_bodies(), false);
    let mut rhs = Vec::with_capacity(susp.n_bodies());
    for s in &susp.spheres {
        rhs.push(coeffs_from_cartesian_field(s, |x| {
            let u = u_inf(x);
            [Complex::from(-u[0]), Complex::from(-u[1]), Complex::from(-u[2])]
        })?);
    }
    let op = PorousOperator { susp, backend, opts: *opts, layout };
    let b = layout.pack(&rhs, &[]);
    let (x, report) = gmres(&op, &b, opts.tol, opts.restart, opts.max_iter)?;
    check_convergence(&report)?;
    let (mu, _) = layout.unpack(&x);
    Ok(PorousSolution { mu, report })
}

/// Evaluates the porous solution flow (without the imposed background) at
/// exterior points: `sum_k (S_k + D_k)[mu_k](x)`.
pub fn porous_disturbance_at(
    susp: &Suspension,
    mu: &[VectorCoeffsVWX],
    points: &[Vec3],
) -> Result<Vec<[Complex; 3]>> {
    sum_layer_fields(susp, mu, points, &[OperatorKind::StokesS, OperatorKind::StokesDplus])
}

fn sum_layer_fields(
    susp: &Suspension,
    density: &[VectorCoeffsVWX],
    points: &[Vec3],
    kinds: &[OperatorKind],
) -> Result<Vec<[Complex; 3]>> {
    let mut out = vec![[Complex::ZERO; 3]; points.len()];
    let batch = TargetBatch::points(points.to_vec());
    for (k, s) in susp.spheres.iter().enumerate() {
        for &kind in kinds {
            let vals = near_eval_direct_vector(kind, &density[k], s, &batch, EvalOptions::default())?;
            for (i, v) in vals.iter().enumerate() {
                for d in 0..3 {
                    out[i][d] += v[d];
                }
            }
        }
    }
    Ok(out)
}

/// The rigid-motion completion term `L_k[mu](x)` on the body's own surface:
/// `int mu dG + (int (y-c) x mu dG) x (x-c)`, returned as coefficients.
fn completion_l(susp: &Suspension, k: usize, mu_vals: &[[Complex; 3]]) -> Result<VectorCoeffsVWX> {
    let s = &susp.spheres[k];
    let (f, t) = field_moments(s, mu_vals);
    let center = s.center;
    coeffs_from_cartesian_field(s, move |x| {
        let r = crate::linalg::sub(x, center);
        [
            f[0] + t[1] * r[2] - t[2] * r[1],
            f[1] + t[2] * r[0] - t[0] * r[2],
            f[2] + t[0] * r[1] - t[1] * r[0],
        ]
    })
}

/// Mobility operator: `(K_- + L)[mu]` blockwise, with exterior-evaluated
/// cross terms (equivalently `(1/2) I + K_pv + L`).
pub fn apply_mobility(
    susp: &Suspension,
    backend: &dyn FarFieldBackend,
    opts: &SolverOptions,
    mu: &[VectorCoeffsVWX],
) -> Result<Vec<VectorCoeffsVWX>> {
    let mut out =
        composite_apply_vector_coeffs(OperatorKind::StokesKminus, susp, mu, backend, opts.composite())?;
    for k in 0..susp.n_bodies() {
        let vals = cartesian_values(&susp.spheres[k], &mu[k]);
        let l = completion_l(susp, k, &vals)?;
        out[k].axpy(Complex::ONE, &l);
    }
    Ok(out)
}

/// Mobility right-hand side: `-((1/2) I + sum K)[rho]`.
pub fn rhs_mobility(
    susp: &Suspension,
    backend: &dyn FarFieldBackend,
    opts: &SolverOptions,
    rho: &[VectorCoeffsVWX],
) -> Result<Vec<VectorCoeffsVWX>> {
    let mut out =
        composite_apply_vector_coeffs(OperatorKind::StokesKminus, susp, rho, backend, opts.composite())?;
    for c in out.iter_mut() {
        for buf in [&mut c.v, &mut c.w, &mut c.x] {
            for z in buf.iter_mut() {
                *z = -*z;
            }
        }
    }
    Ok(out)
}

struct MobilityOperator<'a> {
    susp: &'a Suspension,
    backend: &'a dyn FarFieldBackend,
    opts: SolverOptions,
    layout: VectorLayout,
}

impl LinearOperator for MobilityOperator<'_> {
    fn dim(&self) -> usize {
        self.layout.dim()
    }
    fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        let (mu, _) = self.layout.unpack(x);
        let out = apply_mobility(self.susp, self.backend, &self.opts, &mu)?;
        Ok(self.layout.pack(&out, &[]))
    }
}

#[derive(Debug)]
pub struct MobilitySolution {
    pub mu: Vec<VectorCoeffsVWX>,
    pub rho: Vec<VectorCoeffsVWX>,
    pub motions: Vec<RigidMotion>,
    pub report: GmresReport,
}

/// Solves the mobility problem: given applied (F, T) per body, returns the
/// rigid motions (and the densities for field evaluation).
pub fn solve_mobility(
    susp: &Suspension,
    backend: &dyn FarFieldBackend,
    opts: &SolverOptions,
    forces: &[BodyForce],
) -> Result<MobilitySolution> {
    if forces.len() != susp.n_bodies() {
        return Err(Error::ShapeMismatch { expected: susp.n_bodies(), got: forces.len() });
    }
    let layout = VectorLayout::new(susp.p(), susp.n_bodies(), false);
    let rho: Vec<VectorCoeffsVWX> = susp
        .spheres
        .iter()
        .zip(forces)
        .map(|(s, f)| rho_from_forces(s, f))
        .collect::<Result<_>>()?;
    let rhs = rhs_mobility(susp, backend, opts, &rho)?;
    let op = MobilityOperator { susp, backend, opts: *opts, layout };
    let b = layout.pack(&rhs, &[]);
    let (x, report) = gmres(&op, &b, opts.tol, opts.restart, opts.max_iter)?;
    check_convergence(&report)?;
    let (mu, _) = layout.unpack(&x);
    // u = sum_k S_k[mu_k + rho_k]; extract rigid motions from the surface
    // velocity of each body
    let mut total: Vec<VectorCoeffsVWX> = mu.clone();
    for (t, r) in total.iter_mut().zip(&rho) {
        t.axpy(Complex::ONE, r);
    }
    let (surface, _) = crate::evaluation::composite::composite_apply_vector(
        OperatorKind::StokesS,
        susp,
        &total,
        backend,
        opts.composite(),
    )?;
    let motions = susp
        .spheres
        .iter()
        .zip(&surface)
        .map(|(s, vals)| extract_rigid_motion(s, vals).0)
        .collect();
    Ok(MobilitySolution { mu, rho, motions, report })
}

/// Velocity field of a mobility solution at exterior points.
pub fn mobility_velocity_at(
    susp: &Suspension,
    sol: &MobilitySolution,
    points: &[Vec3],
) -> Result<Vec<[Complex; 3]>> {
    let mut total = sol.mu.clone();
    for (t, r) in total.iter_mut().zip(&sol.rho) {
        t.axpy(Complex::ONE, r);
    }
    sum_layer_fields(susp, &total, points, &[OperatorKind::StokesS])
}

/// Stokeslet + rotlet completion flows evaluated at all surfaces, from the
/// per-body moment strengths of psi.
fn completion_n_values(
    susp: &Suspension,
    strengths: &[([Complex; 3], [Complex; 3])],
) -> Result<Vec<Vec<[Complex; 3]>>> {
    let nb = susp.n_bodies();
    let mut out: Vec<Vec<[Complex; 3]>> =
        (0..nb).map(|_| vec![[Complex::ZERO; 3]; susp.grid.n_nodes()]).collect();
    for t in 0..nb {
        let trg = &susp.spheres[t];
        for (k, src) in susp.spheres.iter().enumerate() {
            let (f, tq) = strengths[k];
            let f_re = [f[0].re, f[1].re, f[2].re];
            let f_im = [f[0].im, f[1].im, f[2].im];
            let t_re = [tq[0].re, tq[1].re, tq[2].re];
            let t_im = [tq[0].im, tq[1].im, tq[2].im];
            let g = &susp.grid;
            for j in 0..g.n_theta() {
                for kk in 0..g.n_phi() {
                    let i = j * g.n_phi() + kk;
                    let x = trg.node(j, kk);
                    let ure = add(
                        stokeslet_apply(x, src.center, f_re)?,
                        rotlet_apply(x, src.center, t_re)?,
                    );
                    let uim = add(
                        stokeslet_apply(x, src.center, f_im)?,
                        rotlet_apply(x, src.center, t_im)?,
                    );
                    for c in 0..3 {
                        out[t][i][c] += Complex::new(ure[c], uim[c]);
                    }
                }
            }
        }
    }
    Ok(out)
}

fn psi_strengths(susp: &Suspension, psi: &[VectorCoeffsVWX]) -> Vec<([Complex; 3], [Complex; 3])> {
    susp.spheres
        .iter()
        .zip(psi)
        .map(|(s, c)| {
            let vals = cartesian_values(s, c);
            field_moments(s, &vals)
        })
        .collect()
}

/// Resistance operator: `(D_+ + N)[psi]` blockwise.
pub fn apply_resistance(
    susp: &Suspension,
    backend: &dyn FarFieldBackend,
    opts: &SolverOptions,
    psi: &[VectorCoeffsVWX],
) -> Result<Vec<VectorCoeffsVWX>> {
    let mut out =
        composite_apply_vector_coeffs(OperatorKind::StokesDplus, susp, psi, backend, opts.composite())?;
    let strengths = psi_strengths(susp, psi);
    let nvals = completion_n_values(susp, &strengths)?;
    for (k, vals) in nvals.iter().enumerate() {
        let g = &susp.grid;
        let n_phi = g.n_phi();
        let mut fr = vec![Complex::ZERO; g.n_nodes()];
        let mut ft = vec![Complex::ZERO; g.n_nodes()];
        let mut fp = vec![Complex::ZERO; g.n_nodes()];
        for j in 0..g.n_theta() {
            for kk in 0..n_phi {
                let i = j * n_phi + kk;
                let sph = crate::harmonics::cart_to_sph(g.theta[j], g.phi[kk], vals[i]);
                fr[i] = sph[0];
                ft[i] = sph[1];
                fp[i] = sph[2];
            }
        }
        let nc = crate::harmonics::vsht_forward(g, &fr, &ft, &fp)?;
        out[k].axpy(Complex::ONE, &nc);
    }
    Ok(out)
}

struct ResistanceOperator<'a> {
    susp: &'a Suspension,
    backend: &'a dyn FarFieldBackend,
    opts: SolverOptions,
    layout: VectorLayout,
}

impl LinearOperator for ResistanceOperator<'_> {
    fn dim(&self) -> usize {
        self.layout.dim()
    }
    fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        let (psi, _) = self.layout.unpack(x);
        let out = apply_resistance(self.susp, self.backend, &self.opts, &psi)?;
        Ok(self.layout.pack(&out, &[]))
    }
}

#[derive(Debug)]
pub struct ResistanceSolution {
    pub psi: Vec<VectorCoeffsVWX>,
    pub forces: Vec<BodyForce>,
    pub report: GmresReport,
}

/// Solves the resistance problem: given rigid motions, returns the applied
/// forces and torques (read from the completion strengths).
pub fn solve_resistance(
    susp: &Suspension,
    backend: &dyn FarFieldBackend,
    opts: &SolverOptions,
    motions: &[RigidMotion],
) -> Result<ResistanceSolution> {
    if motions.len() != susp.n_bodies() {
        return Err(Error::ShapeMismatch { expected: susp.n_bodies(), got: motions.len() });
    }
    let layout = VectorLayout::new(susp.p(), susp.n_bodies(), false);
    let mut rhs = Vec::with_capacity(susp.n_bodies());
    for (s, m) in susp.spheres.iter().zip(motions) {
        let m = *m;
        let center = s.center;
        rhs.push(coeffs_from_cartesian_field(s, move |x| {
            let u = m.at(x, center);
            [Complex::from(u[0]), Complex::from(u[1]), Complex::from(u[2])]
        })?);
    }
    let op = ResistanceOperator { susp, backend, opts: *opts, layout };
    let b = layout.pack(&rhs, &[]);
    let (x, report) = gmres(&op, &b, opts.tol, opts.restart, opts.max_iter)?;
    check_convergence(&report)?;
    let (psi, _) = layout.unpack(&x);
    let strengths = psi_strengths(susp, &psi);
    // the applied force equals the Stokeslet strength (momentum balance:
    // the traction integral of the completion flow over the enclosing
    // surface is minus the strength, and Eq 5.6 carries its own sign)
    let forces = strengths
        .iter()
        .map(|(f, t)| BodyForce {
            force: [f[0].re, f[1].re, f[2].re],
            torque: [t[0].re, t[1].re, t[2].re],
        })
        .collect();
    Ok(ResistanceSolution { psi, forces, report })
}

/// Velocity field of a resistance solution at exterior points.
pub fn resistance_velocity_at(
    susp: &Suspension,
    sol: &ResistanceSolution,
    points: &[Vec3],
) -> Result<Vec<[Complex; 3]>> {
    let mut out = sum_layer_fields(susp, &sol.psi, points, &[OperatorKind::StokesDplus])?;
    let strengths = psi_strengths(susp, &sol.psi);
    for (i, &x) in points.iter().enumerate() {
        for (k, s) in susp.spheres.iter().enumerate() {
            let (f, tq) = strengths[k];
            let ure = add(
                stokeslet_apply(x, s.center, [f[0].re, f[1].re, f[2].re])?,
                rotlet_apply(x, s.center, [tq[0].re, tq[1].re, tq[2].re])?,
            );
            let uim = add(
                stokeslet_apply(x, s.center, [f[0].im, f[1].im, f[2].im])?,
                rotlet_apply(x, s.center, [tq[0].im, tq[1].im, tq[2].im])?,
            );
            for c in 0..3 {
                out[i][c] += Complex::new(ure[c], uim[c]);
            }
        }
    }
    Ok(out)
}

/// Squirmer system: surface rows `(S + D_+)[mu] - v_i - omega_i x (x - c_i)`
/// against the slip data, plus force-free and torque-free closure rows on
/// the single-layer moments.
pub struct SquirmerOperator<'a> {
    pub susp: &'a Suspension,
    pub backend: &'a dyn FarFieldBackend,
    pub opts: SolverOptions,
    pub layout: VectorLayout,
}

impl SquirmerOperator<'_> {
    /// scale factors keeping the closure rows at the magnitude of the
    /// surface rows
    fn closure_scales(&self, k: usize) -> (f64, f64) {
        let a = self.susp.spheres[k].radius;
        (1.0 / (4.0 * std::f64::consts::PI * a * a), 3.0 / (8.0 * std::f64::consts::PI * a.powi(4)))
    }
}

impl LinearOperator for SquirmerOperator<'_> {
    fn dim(&self) -> usize {
        self.layout.dim()
    }
    fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        let (mu, rigid) = self.layout.unpack(x);
        let mut out = apply_porous(self.susp, self.backend, &self.opts, &mu)?;
        // subtract the rigid-motion fields
        for (k, s) in self.susp.spheres.iter().enumerate() {
            let m = RigidMotion {
                velocity: [rigid[k][0], rigid[k][1], rigid[k][2]],
                omega: [rigid[k][3], rigid[k][4], rigid[k][5]],
            };
            let center = s.center;
            let rc = coeffs_from_cartesian_field(s, move |y| {
                let u = m.at(y, center);
                [Complex::from(-u[0]), Complex::from(-u[1]), Complex::from(-u[2])]
            })?;
            out[k].axpy(Complex::ONE, &rc);
        }
        // closure rows: moments of mu per body
        let mut rigid_out = Vec::with_capacity(self.susp.n_bodies());
        for (k, s) in self.susp.spheres.iter().enumerate() {
            let vals = cartesian_values(s, &mu[k]);
            let (f, t) = field_moments(s, &vals);
            let (sf, st) = self.closure_scales(k);
            rigid_out.push([
                sf * f[0].re,
                sf * f[1].re,
                sf * f[2].re,
                st * t[0].re,
                st * t[1].re,
                st * t[2].re,
            ]);
        }
        Ok(self.layout.pack(&out, &rigid_out))
    }
}

#[derive(Debug)]
pub struct SquirmerSolution {
    pub mu: Vec<VectorCoeffsVWX>,
    pub motions: Vec<RigidMotion>,
    pub report: GmresReport,
}

/// Solves the squirmer problem for prescribed slip coefficients per body.
pub fn solve_squirmer(
    susp: &Suspension,
    backend: &dyn FarFieldBackend,
    opts: &SolverOptions,
    slip: &[VectorCoeffsVWX],
) -> Result<SquirmerSolution> {
    if slip.len() != susp.n_bodies() {
        return Err(Error::ShapeMismatch { expected: susp.n_bodies(), got: slip.len() });
    }
    let layout = VectorLayout::new(susp.p(), susp.n_bodies(), true);
    let op = SquirmerOperator { susp, backend, opts: *opts, layout };
    let b = layout.pack(slip, &vec![[0.0; 6]; susp.n_bodies()]);
    let (x, report) = gmres(&op, &b, opts.tol, opts.restart, opts.max_iter)?;
    check_convergence(&report)?;
    let (mu, rigid) = layout.unpack(&x);
    let motions = rigid
        .iter()
        .map(|r| RigidMotion { velocity: [r[0], r[1], r[2]], omega: [r[3], r[4], r[5]] })
        .collect();
    Ok(SquirmerSolution { mu, motions, report })
}

/// Traction field of the single-layer part on a body (for force-free
/// verification): exterior-limit `K_+[mu] + (1/2) mu`-free diagnostics are
/// done by the caller through the composite machinery.
pub fn single_layer_traction_on_surface(
    susp: &Suspension,
    backend: &dyn FarFieldBackend,
    opts: &SolverOptions,
    mu: &[VectorCoeffsVWX],
) -> Result<Vec<Vec<[Complex; 3]>>> {
    let (vals, _) = crate::evaluation::composite::composite_apply_vector(
        OperatorKind::StokesKplus,
        susp,
        mu,
        backend,
        opts.composite(),
    )?;
    Ok(vals)
}
