//! Truncated spherical-harmonic coefficient containers.
//!
//! Dense triangular (n, m) packing in n-major order with m running from -n
//! to n, so the (p+1)^2 entries of a degree-p expansion are contiguous per
//! degree. Real-valued fields satisfy `c[n][-m] = conj(c[n][m])`.

use crate::Complex;

#[inline]
pub fn coeff_index(n: usize, m: i64) -> usize {
    debug_assert!(m.unsigned_abs() as usize <= n);
    n * n + (n as i64 + m) as usize
}

#[inline]
pub fn coeff_len(p: usize) -> usize {
    (p + 1) * (p + 1)
}

/// Scalar spherical-harmonic coefficients of degree <= p.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarCoeffs {
    p: usize,
    pub data: Vec<Complex>,
}

impl ScalarCoeffs {
    pub fn zeros(p: usize) -> Self {
        Self { p, data: vec![Complex::ZERO; coeff_len(p)] }
    }

    pub fn from_data(p: usize, data: Vec<Complex>) -> Self {
        assert_eq!(data.len(), coeff_len(p));
        Self { p, data }
    }

    /// Single unit mode Y_n^m.
    pub fn unit(p: usize, n: usize, m: i64) -> Self {
        let mut c = Self::zeros(p);
        c.set(n, m, Complex::ONE);
        c
    }

    #[inline]
    pub fn p(&self) -> usize {
        self.p
    }

    #[inline]
    pub fn get(&self, n: usize, m: i64) -> Complex {
        self.data[coeff_index(n, m)]
    }

    #[inline]
    pub fn set(&mut self, n: usize, m: i64, v: Complex) {
        self.data[coeff_index(n, m)] = v;
    }

    pub fn norm_sq(&self) -> f64 {
        self.data.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Max deviation from the real-field conjugate symmetry
    /// `c[n][-m] = conj(c[n][m])`.
    pub fn conjugate_symmetry_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for n in 0..=self.p {
            for m in 0..=n as i64 {
                let d = (self.get(n, -m) - self.get(n, m).conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// Truncate (or zero-pad) to degree `p_new`.
    pub fn resized(&self, p_new: usize) -> ScalarCoeffs {
        let mut out = ScalarCoeffs::zeros(p_new);
        for n in 0..=self.p.min(p_new) {
            for m in -(n as i64)..=n as i64 {
                out.set(n, m, self.get(n, m));
            }
        }
        out
    }
}

/// Vector coefficients in the {V, W, X} basis; the W and X channels start
/// at degree 1 (W_0^0 and X_0^0 vanish identically; their slots are kept
/// zero).
#[derive(Debug, Clone, PartialEq)]
pub struct VectorCoeffsVWX {
    p: usize,
    pub v: Vec<Complex>,
    pub w: Vec<Complex>,
    pub x: Vec<Complex>,
}

/// Vector coefficients in the {Y e_r, G, X} basis.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorCoeffsYGX {
    p: usize,
    pub y: Vec<Complex>,
    pub g: Vec<Complex>,
    pub x: Vec<Complex>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VectorChannel {
    V,
    W,
    X,
}

impl VectorCoeffsVWX {
    pub fn zeros(p: usize) -> Self {
        let len = coeff_len(p);
        Self { p, v: vec![Complex::ZERO; len], w: vec![Complex::ZERO; len], x: vec![Complex::ZERO; len] }
    }

    pub fn unit(p: usize, channel: VectorChannel, n: usize, m: i64) -> Self {
        let mut c = Self::zeros(p);
        c.channel_mut(channel)[coeff_index(n, m)] = Complex::ONE;
        c
    }

    #[inline]
    pub fn p(&self) -> usize {
        self.p
    }

    pub fn channel(&self, ch: VectorChannel) -> &[Complex] {
        match ch {
            VectorChannel::V => &self.v,
            VectorChannel::W => &self.w,
            VectorChannel::X => &self.x,
        }
    }

    pub fn channel_mut(&mut self, ch: VectorChannel) -> &mut [Complex] {
        match ch {
            VectorChannel::V => &mut self.v,
            VectorChannel::W => &mut self.w,
            VectorChannel::X => &mut self.x,
        }
    }

    pub fn norm_sq(&self) -> f64 {
        self.v.iter().chain(&self.w).chain(&self.x).map(|c| c.norm_sqr()).sum()
    }

    pub fn axpy(&mut self, a: Complex, other: &Self) {
        for (d, s) in self.v.iter_mut().zip(&other.v) {
            *d += a * s;
        }
        for (d, s) in self.w.iter_mut().zip(&other.w) {
            *d += a * s;
        }
        for (d, s) in self.x.iter_mut().zip(&other.x) {
            *d += a * s;
        }
    }

    /// Zeroes the structurally absent W_0^0 and X_0^0 slots.
    pub fn clear_degenerate(&mut self) {
        self.w[0] = Complex::ZERO;
        self.x[0] = Complex::ZERO;
    }

    pub fn resized(&self, p_new: usize) -> VectorCoeffsVWX {
        let mut out = VectorCoeffsVWX::zeros(p_new);
        for n in 0..=self.p.min(p_new) {
            for m in -(n as i64)..=n as i64 {
                let i = coeff_index(n, m);
                out.v[i] = self.v[i];
                out.w[i] = self.w[i];
                out.x[i] = self.x[i];
            }
        }
        out
    }
}

impl VectorCoeffsYGX {
    pub fn zeros(p: usize) -> Self {
        let len = coeff_len(p);
        Self { p, y: vec![Complex::ZERO; len], g: vec![Complex::ZERO; len], x: vec![Complex::ZERO; len] }
    }

    #[inline]
    pub fn p(&self) -> usize {
        self.p
    }
}

/// Conversion VWX -> YGX per-mode: g = v + w, y = -(n+1) v + n w.
pub fn vwx_to_ygx(c: &VectorCoeffsVWX) -> VectorCoeffsYGX {
    let mut out = VectorCoeffsYGX::zeros(c.p);
    for n in 0..=c.p {
        let nf = n as f64;
        for m in -(n as i64)..=n as i64 {
            let i = coeff_index(n, m);
            out.g[i] = c.v[i] + c.w[i];
            out.y[i] = -(nf + 1.0) * c.v[i] + nf * c.w[i];
            out.x[i] = c.x[i];
        }
    }
    // G_0^0 is identically zero
    out.g[0] = Complex::ZERO;
    out
}

/// Conversion YGX -> VWX per-mode: v = (n g - y)/(2n+1), w = ((n+1) g + y)/(2n+1).
pub fn ygx_to_vwx(c: &VectorCoeffsYGX) -> VectorCoeffsVWX {
    let mut out = VectorCoeffsVWX::zeros(c.p);
    for n in 0..=c.p {
        let nf = n as f64;
        for m in -(n as i64)..=n as i64 {
            let i = coeff_index(n, m);
            out.v[i] = (nf * c.g[i] - c.y[i]) / (2.0 * nf + 1.0);
            out.w[i] = ((nf + 1.0) * c.g[i] + c.y[i]) / (2.0 * nf + 1.0);
            out.x[i] = c.x[i];
        }
    }
    out.clear_degenerate();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indexing_roundtrip() {
        let p = 5;
        let mut k = 0;
        for n in 0..=p {
            for m in -(n as i64)..=n as i64 {
                assert_eq!(coeff_index(n, m), k);
                k += 1;
            }
        }
        assert_eq!(k, coeff_len(p));
    }

    #[test]
    fn vwx_ygx_x_channel_decoupled() {
        let mut c = VectorCoeffsVWX::zeros(4);
        c.set_x(3, 2, Complex::new(1.5, -0.5));
        let g = vwx_to_ygx(&c);
        assert_eq!(g.y.iter().map(|z| z.norm()).sum::<f64>(), 0.0);
        assert_eq!(g.g.iter().map(|z| z.norm()).sum::<f64>(), 0.0);
        assert_eq!(g.x[coeff_index(3, 2)], Complex::new(1.5, -0.5));
    }

    impl VectorCoeffsVWX {
        fn set_x(&mut self, n: usize, m: i64, v: Complex) {
            self.x[coeff_index(n, m)] = v;
        }
    }

    #[test]
    fn n1_conversion_values() {
        // v=1, w=0 at n=1 -> g = 1, y = -2
        let mut c = VectorCoeffsVWX::zeros(2);
        c.v[coeff_index(1, 0)] = Complex::ONE;
        let g = vwx_to_ygx(&c);
        assert_eq!(g.g[coeff_index(1, 0)], Complex::ONE);
        assert_eq!(g.y[coeff_index(1, 0)], Complex::new(-2.0, 0.0));
    }

    #[test]
    fn conversion_roundtrip_identity() {
        let p = 6;
        let mut c = VectorCoeffsVWX::zeros(p);
        let mut seed = 1u64;
        let mut next = || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (seed >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        for n in 0..=p {
            for m in -(n as i64)..=n as i64 {
                let i = coeff_index(n, m);
                c.v[i] = Complex::new(next(), next());
                if n >= 1 {
                    c.w[i] = Complex::new(next(), next());
                    c.x[i] = Complex::new(next(), next());
                }
            }
        }
        let back = ygx_to_vwx(&vwx_to_ygx(&c));
        for i in 0..coeff_len(p) {
            assert!((back.v[i] - c.v[i]).norm() < 1e-14);
            assert!((back.w[i] - c.w[i]).norm() < 1e-14);
            assert!((back.x[i] - c.x[i]).norm() < 1e-14);
        }
    }
}
