//! Spheres, suspensions and target batches.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::SphGrid;
use crate::linalg::{norm, sub, Vec3};

#[derive(Debug, Clone)]
pub struct Sphere {
    pub id: usize,
    pub center: Vec3,
    pub radius: f64,
    pub grid: Arc<SphGrid>,
}

impl Sphere {
    pub fn new(id: usize, center: Vec3, radius: f64, grid: Arc<SphGrid>) -> Result<Self> {
        if radius <= 0.0 {
            return Err(Error::InvalidArgument(format!("sphere {id}: radius {radius} must be positive")));
        }
        Ok(Self { id, center, radius, grid })
    }

    #[inline]
    pub fn diameter(&self) -> f64 {
        2.0 * self.radius
    }

    /// Physical surface node (j, k).
    #[inline]
    pub fn node(&self, j: usize, k: usize) -> Vec3 {
        let d = self.grid.node_dir(j, k);
        [
            self.center[0] + self.radius * d[0],
            self.center[1] + self.radius * d[1],
            self.center[2] + self.radius * d[2],
        ]
    }

    /// Outward unit normal at node (j, k).
    #[inline]
    pub fn normal(&self, j: usize, k: usize) -> Vec3 {
        self.grid.node_dir(j, k)
    }

    /// Physical quadrature weight of node (j, k): `2 pi lambda_j/(2p+2) a^2`.
    #[inline]
    pub fn node_weight(&self, j: usize) -> f64 {
        self.grid.row_weight(j) * self.radius * self.radius
    }

    pub fn nodes(&self) -> Vec<Vec3> {
        let g = &self.grid;
        let mut v = Vec::with_capacity(g.n_nodes());
        for j in 0..g.n_theta() {
            for k in 0..g.n_phi() {
                v.push(self.node(j, k));
            }
        }
        v
    }

    pub fn normals(&self) -> Vec<Vec3> {
        let g = &self.grid;
        let mut v = Vec::with_capacity(g.n_nodes());
        for j in 0..g.n_theta() {
            for k in 0..g.n_phi() {
                v.push(self.normal(j, k));
            }
        }
        v
    }
}

/// Collection of non-overlapping spheres sharing one grid order, plus the
/// well-separation parameter eta.
#[derive(Debug, Clone)]
pub struct Suspension {
    pub spheres: Vec<Sphere>,
    pub eta: f64,
    pub grid: Arc<SphGrid>,
}

impl Suspension {
    pub fn new(spheres: Vec<Sphere>, eta: f64) -> Result<Self> {
        if spheres.is_empty() {
            return Err(Error::Geometry("empty suspension".into()));
        }
        if eta <= 0.0 {
            return Err(Error::InvalidArgument(format!("eta {eta} must be positive")));
        }
        let grid = spheres[0].grid.clone();
        for s in &spheres {
            if s.grid.p() != grid.p() {
                return Err(Error::Geometry("all spheres must share one grid order".into()));
            }
        }
        for i in 0..spheres.len() {
            for j in i + 1..spheres.len() {
                let d = norm(sub(spheres[i].center, spheres[j].center));
                if d <= spheres[i].radius + spheres[j].radius {
                    return Err(Error::Geometry(format!(
                        "spheres {} and {} overlap (center distance {d:.6}, radii {} + {})",
                        spheres[i].id, spheres[j].id, spheres[i].radius, spheres[j].radius
                    )));
                }
            }
        }
        Ok(Self { spheres, eta, grid })
    }

    pub fn n_bodies(&self) -> usize {
        self.spheres.len()
    }

    pub fn p(&self) -> usize {
        self.grid.p()
    }
}

/// Evaluation targets; normals are required for flux and traction targets.
#[derive(Debug, Clone, Default)]
pub struct TargetBatch {
    pub points: Vec<Vec3>,
    pub normals: Option<Vec<Vec3>>,
}

impl TargetBatch {
    pub fn points(points: Vec<Vec3>) -> Self {
        Self { points, normals: None }
    }

    pub fn with_normals(points: Vec<Vec3>, normals: Vec<Vec3>) -> Result<Self> {
        if points.len() != normals.len() {
            return Err(Error::ShapeMismatch { expected: points.len(), got: normals.len() });
        }
        for n in &normals {
            if (norm(*n) - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidArgument("target normals must have unit length".into()));
            }
        }
        Ok(Self { points, normals: Some(normals) })
    }
}

/// Well-separation criterion between two sphere surfaces:
/// `dist(G_src, G_trg) >= eta max(diam_src, diam_trg)`, ties counting as
/// separated.
pub fn well_separated(a: &Sphere, b: &Sphere, eta: f64) -> bool {
    let dist = norm(sub(a.center, b.center)) - a.radius - b.radius;
    dist >= eta * a.diameter().max(b.diameter())
}

/// Well-separation of a target batch from a sphere surface (targets have
/// zero diameter).
pub fn well_separated_targets(a: &Sphere, targets: &TargetBatch, eta: f64) -> bool {
    let mut dist = f64::INFINITY;
    for p in &targets.points {
        dist = dist.min(norm(sub(*p, a.center)) - a.radius);
    }
    dist >= eta * a.diameter()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;

    fn grid() -> Arc<SphGrid> {
        Arc::new(SphGrid::new(GridSpec::new(4).unwrap()))
    }

    #[test]
    fn separation_cases() {
        let g = grid();
        let a = Sphere::new(0, [0.0; 3], 1.0, g.clone()).unwrap();
        let b = Sphere::new(1, [6.0, 0.0, 0.0], 1.0, g.clone()).unwrap();
        assert!(well_separated(&a, &b, 1.0));
        let c = Sphere::new(2, [3.0, 0.0, 0.0], 1.0, g.clone()).unwrap();
        assert!(!well_separated(&a, &c, 1.0));
        // boundary case dist == eta * diam counts as separated
        let d = Sphere::new(3, [4.0, 0.0, 0.0], 1.0, g.clone()).unwrap();
        assert!(well_separated(&a, &d, 1.0));
    }

    #[test]
    fn suspension_rejects_overlap() {
        let g = grid();
        let a = Sphere::new(0, [0.0; 3], 1.0, g.clone()).unwrap();
        let b = Sphere::new(1, [1.5, 0.0, 0.0], 1.0, g.clone()).unwrap();
        assert!(Suspension::new(vec![a, b], 1.0).is_err());
    }

    #[test]
    fn quadrature_weights_total_area() {
        let g = grid();
        let s = Sphere::new(0, [1.0, 2.0, 3.0], 2.5, g).unwrap();
        let mut area = 0.0;
        for j in 0..s.grid.n_theta() {
            area += s.node_weight(j) * s.grid.n_phi() as f64;
        }
        assert!((area - 4.0 * std::f64::consts::PI * 2.5 * 2.5).abs() < 1e-10);
    }
}
