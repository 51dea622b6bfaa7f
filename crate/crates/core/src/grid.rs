//! The (p+1) x (2p+2) Gauss-Legendre x equispaced sampling grid.

use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::legendre::{dtheta_norm_plm_col, gauss_legendre, norm_plm_col};
use crate::Complex;

/// Truncation order of a grid; the implied grid has (p+1) polar and
/// (2p+2) azimuthal nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSpec {
    pub p: usize,
}

impl GridSpec {
    pub fn new(p: usize) -> Result<Self> {
        if p < 1 || p > crate::P_MAX {
            return Err(Error::InvalidArgument(format!(
                "truncation order p={p} outside supported range 1..={}",
                crate::P_MAX
            )));
        }
        Ok(Self { p })
    }
}

/// Precomputed normalized Legendre tables on the polar nodes, for degrees up
/// to p+1 (the vector transforms need one extra degree internally).
struct LegendreTable {
    p_work: usize,
    n_theta: usize,
    /// layout: for m in 0..=p_work, for n in m..=p_work, a run of n_theta values
    plm: Vec<f64>,
    dplm: Vec<f64>,
    /// offset of the (m, n) run
    offsets: Vec<usize>,
}

impl LegendreTable {
    fn build(p_work: usize, cos_t: &[f64], sin_t: &[f64]) -> Self {
        let n_theta = cos_t.len();
        let mut offsets = vec![0usize; (p_work + 1) * (p_work + 1)];
        let mut total = 0usize;
        for m in 0..=p_work {
            for n in m..=p_work {
                offsets[m * (p_work + 1) + n] = total;
                total += n_theta;
            }
        }
        let mut plm = vec![0.0; total];
        let mut dplm = vec![0.0; total];
        let mut col = vec![0.0; p_work + 1];
        let mut dcol = vec![0.0; p_work + 1];
        for (j, (&x, &s)) in cos_t.iter().zip(sin_t).enumerate() {
            for m in 0..=p_work {
                norm_plm_col(m, p_work, x, s, &mut col[..p_work + 1 - m]);
                dtheta_norm_plm_col(m, p_work, x, s, &col[..p_work + 1 - m], &mut dcol[..p_work + 1 - m]);
                for n in m..=p_work {
                    let o = offsets[m * (p_work + 1) + n];
                    plm[o + j] = col[n - m];
                    dplm[o + j] = dcol[n - m];
                }
            }
        }
        Self { p_work, n_theta, plm, dplm, offsets }
    }

    #[inline]
    fn run(&self, m: usize, n: usize) -> usize {
        debug_assert!(m <= n && n <= self.p_work);
        self.offsets[m * (self.p_work + 1) + n]
    }
}

/// Sampling grid of a unit sphere: Gauss-Legendre latitudes (never touching
/// the poles), equispaced longitudes starting at 0, plus cached Legendre
/// tables and FFT plans. Immutable after construction and shareable across
/// threads.
pub struct SphGrid {
    p: usize,
    pub theta: Vec<f64>,
    pub cos_theta: Vec<f64>,
    pub sin_theta: Vec<f64>,
    pub phi: Vec<f64>,
    /// Gauss-Legendre weights; sum to 2.
    pub lambda: Vec<f64>,
    table: LegendreTable,
    fft_fwd: Arc<dyn Fft<f64>>,
    fft_inv: Arc<dyn Fft<f64>>,
    traction_tables: std::sync::OnceLock<crate::evaluation::traction_tables::TractionCouplingTables>,
}

impl SphGrid {
    pub fn new(spec: GridSpec) -> Self {
        let p = spec.p;
        let (x, lambda) = gauss_legendre(p + 1);
        // descending colatitude order: theta_0 nearest the north pole
        let cos_theta: Vec<f64> = x.iter().rev().copied().collect();
        let theta: Vec<f64> = cos_theta.iter().map(|c| c.acos()).collect();
        let sin_theta: Vec<f64> = theta.iter().map(|t| t.sin()).collect();
        let lambda: Vec<f64> = lambda.iter().rev().copied().collect();
        let n_phi = 2 * p + 2;
        let phi = (0..n_phi).map(|k| 2.0 * std::f64::consts::PI * k as f64 / n_phi as f64).collect();
        let table = LegendreTable::build(p + 1, &cos_theta, &sin_theta);
        let mut planner = FftPlanner::new();
        let fft_fwd = planner.plan_fft_forward(n_phi);
        let fft_inv = planner.plan_fft_inverse(n_phi);
        Self {
            p,
            theta,
            cos_theta,
            sin_theta,
            phi,
            lambda,
            table,
            fft_fwd,
            fft_inv,
            traction_tables: std::sync::OnceLock::new(),
        }
    }

    /// Lazily built traction coupling tables for this order.
    pub fn traction_tables(&self) -> &crate::evaluation::traction_tables::TractionCouplingTables {
        self.traction_tables
            .get_or_init(|| crate::evaluation::traction_tables::TractionCouplingTables::build(self.p))
    }

    #[inline]
    pub fn p(&self) -> usize {
        self.p
    }

    #[inline]
    pub fn n_theta(&self) -> usize {
        self.p + 1
    }

    #[inline]
    pub fn n_phi(&self) -> usize {
        2 * self.p + 2
    }

    #[inline]
    pub fn n_nodes(&self) -> usize {
        self.n_theta() * self.n_phi()
    }

    /// Angular quadrature weight of row j: `2 pi lambda_j / (2p+2)`; the
    /// factor sin(theta) of the area element is absorbed by the
    /// Gauss-Legendre substitution x = cos(theta).
    #[inline]
    pub fn row_weight(&self, j: usize) -> f64 {
        2.0 * std::f64::consts::PI * self.lambda[j] / self.n_phi() as f64
    }

    /// Unit-sphere node direction (j, k).
    #[inline]
    pub fn node_dir(&self, j: usize, k: usize) -> [f64; 3] {
        let (s, c) = (self.sin_theta[j], self.cos_theta[j]);
        let (sp, cp) = self.phi[k].sin_cos();
        [s * cp, s * sp, c]
    }

    /// Normalized Legendre run `ptilde_n^m` over the polar nodes.
    #[inline]
    pub fn plm(&self, m: usize, n: usize) -> &[f64] {
        let o = self.table.run(m, n);
        &self.table.plm[o..o + self.table.n_theta]
    }

    /// Theta-derivative run over the polar nodes.
    #[inline]
    pub fn dplm(&self, m: usize, n: usize) -> &[f64] {
        let o = self.table.run(m, n);
        &self.table.dplm[o..o + self.table.n_theta]
    }

    pub(crate) fn fft_forward_rows(&self, data: &mut [Complex]) {
        debug_assert_eq!(data.len() % self.n_phi(), 0);
        for row in data.chunks_mut(self.n_phi()) {
            self.fft_fwd.process(row);
        }
    }

    pub(crate) fn fft_inverse_rows(&self, data: &mut [Complex]) {
        debug_assert_eq!(data.len() % self.n_phi(), 0);
        for row in data.chunks_mut(self.n_phi()) {
            self.fft_inv.process(row);
        }
    }

    /// Integrates a sampled scalar field over the unit sphere.
    pub fn integrate(&self, values: &[Complex]) -> Complex {
        assert_eq!(values.len(), self.n_nodes());
        let mut acc = Complex::ZERO;
        for j in 0..self.n_theta() {
            let w = self.row_weight(j);
            for k in 0..self.n_phi() {
                acc += w * values[j * self.n_phi() + k];
            }
        }
        acc
    }
}

impl std::fmt::Debug for SphGrid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SphGrid").field("p", &self.p).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_shape_and_weights() {
        let g = SphGrid::new(GridSpec::new(8).unwrap());
        assert_eq!(g.n_theta(), 9);
        assert_eq!(g.n_phi(), 18);
        assert!((g.lambda.iter().sum::<f64>() - 2.0).abs() < 1e-13);
        for &t in &g.theta {
            assert!(t > 0.0 && t < std::f64::consts::PI);
        }
        assert_eq!(g.phi[0], 0.0);
        // integral of 1 over the sphere
        let ones = vec![Complex::ONE; g.n_nodes()];
        assert!((g.integrate(&ones).re - 4.0 * std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn theta_descending_in_cos() {
        let g = SphGrid::new(GridSpec::new(5).unwrap());
        for j in 1..g.n_theta() {
            assert!(g.theta[j] > g.theta[j - 1]);
        }
    }
}
