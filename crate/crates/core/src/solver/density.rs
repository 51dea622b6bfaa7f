//! Flattening of per-sphere coefficient blocks into real unknown vectors.
//!
//! Vector problems carry, per body, the V channel for n <= p and the W, X
//! channels for 1 <= n <= p (W_0^0 and X_0^0 vanish identically and are
//! excluded so the operators stay nonsingular); scalar problems carry the
//! full (p+1)^2 set. Each complex coefficient contributes (re, im). The
//! squirmer problem appends 6 rigid-motion unknowns per body.

use crate::coeffs::{coeff_index, coeff_len, ScalarCoeffs, VectorCoeffsVWX};
use crate::Complex;

#[derive(Debug, Clone, Copy)]
pub struct VectorLayout {
    pub p: usize,
    pub n_bodies: usize,
    /// number of trailing rigid-motion unknowns per body (0 or 6)
    pub rigid: usize,
}

impl VectorLayout {
    pub fn new(p: usize, n_bodies: usize, rigid: bool) -> Self {
        Self { p, n_bodies, rigid: if rigid { 6 } else { 0 } }
    }

    /// complex coefficients per body: full V + degenerate-free W, X
    pub fn modes_per_body(&self) -> usize {
        3 * coeff_len(self.p) - 2
    }

    pub fn body_stride(&self) -> usize {
        2 * self.modes_per_body()
    }

    pub fn dim(&self) -> usize {
        self.n_bodies * (self.body_stride() + self.rigid)
    }

    pub fn pack(&self, coeffs: &[VectorCoeffsVWX], rigid: &[[f64; 6]]) -> Vec<f64> {
        assert_eq!(coeffs.len(), self.n_bodies);
        let mut out = Vec::with_capacity(self.dim());
        for c in coeffs {
            debug_assert_eq!(c.p(), self.p);
            for z in &c.v {
                out.push(z.re);
                out.push(z.im);
            }
            for z in &c.w[1..] {
                out.push(z.re);
                out.push(z.im);
            }
            for z in &c.x[1..] {
                out.push(z.re);
                out.push(z.im);
            }
        }
        if self.rigid == 6 {
            assert_eq!(rigid.len(), self.n_bodies);
            for r in rigid {
                out.extend_from_slice(r);
            }
        }
        out
    }

    pub fn unpack(&self, flat: &[f64]) -> (Vec<VectorCoeffsVWX>, Vec<[f64; 6]>) {
        assert_eq!(flat.len(), self.dim());
        let len = coeff_len(self.p);
        let mut coeffs = Vec::with_capacity(self.n_bodies);
        let mut pos = 0usize;
        for _ in 0..self.n_bodies {
            let mut c = VectorCoeffsVWX::zeros(self.p);
            for i in 0..len {
                c.v[i] = Complex::new(flat[pos], flat[pos + 1]);
                pos += 2;
            }
            for i in 1..len {
                c.w[i] = Complex::new(flat[pos], flat[pos + 1]);
                pos += 2;
            }
            for i in 1..len {
                c.x[i] = Complex::new(flat[pos], flat[pos + 1]);
                pos += 2;
            }
            coeffs.push(c);
        }
        let mut rigid = Vec::new();
        if self.rigid == 6 {
            for _ in 0..self.n_bodies {
                let mut r = [0.0; 6];
                r.copy_from_slice(&flat[pos..pos + 6]);
                pos += 6;
                rigid.push(r);
            }
        }
        (coeffs, rigid)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ScalarLayout {
    pub p: usize,
    pub n_bodies: usize,
}

impl ScalarLayout {
    pub fn new(p: usize, n_bodies: usize) -> Self {
        Self { p, n_bodies }
    }

    pub fn dim(&self) -> usize {
        self.n_bodies * 2 * coeff_len(self.p)
    }

    pub fn pack(&self, coeffs: &[ScalarCoeffs]) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.dim());
        for c in coeffs {
            for z in &c.data {
                out.push(z.re);
                out.push(z.im);
            }
        }
        out
    }

    pub fn unpack(&self, flat: &[f64]) -> Vec<ScalarCoeffs> {
        assert_eq!(flat.len(), self.dim());
        let len = coeff_len(self.p);
        let mut out = Vec::with_capacity(self.n_bodies);
        let mut pos = 0usize;
        for _ in 0..self.n_bodies {
            let mut c = ScalarCoeffs::zeros(self.p);
            for i in 0..len {
                c.data[i] = Complex::new(flat[pos], flat[pos + 1]);
                pos += 2;
            }
            out.push(c);
        }
        out
    }
}

/// Convenience: the coefficient index of (n, m) (re-exported for tests).
pub fn mode_index(n: usize, m: i64) -> usize {
    coeff_index(n, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthetic::random_vector_density;

    #[test]
    fn pack_unpack_roundtrip() {
        let layout = VectorLayout::new(4, 3, true);
        let coeffs: Vec<VectorCoeffsVWX> =
            (0..3).map(|i| random_vector_density(4, 1.0, i as u64)).collect();
        let rigid = vec![[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]; 3];
        let flat = layout.pack(&coeffs, &rigid);
        assert_eq!(flat.len(), layout.dim());
        let (c2, r2) = layout.unpack(&flat);
        for (a, b) in coeffs.iter().zip(&c2) {
            assert_eq!(a.v, b.v);
            assert_eq!(a.w, b.w);
            assert_eq!(a.x, b.x);
        }
        assert_eq!(rigid, r2);
    }
}
