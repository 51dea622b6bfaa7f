//! Seeded synthetic densities with algebraic coefficient decay, used by the
//! convergence experiments and tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coeffs::{coeff_index, ScalarCoeffs, VectorCoeffsVWX};
use crate::Complex;

/// Random real-valued scalar density of degree <= p with coefficients
/// decaying like (1+n)^(-decay).
pub fn random_scalar_density(p: usize, decay: f64, seed: u64) -> ScalarCoeffs {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = ScalarCoeffs::zeros(p);
    for n in 0..=p {
        let amp = (1.0 + n as f64).powf(-decay);
        let re0: f64 = rng.gen_range(-1.0..1.0);
        c.set(n, 0, Complex::from(amp * re0));
        for m in 1..=n as i64 {
            let z = Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * amp;
            c.set(n, m, z);
            c.set(n, -m, z.conj());
        }
    }
    c
}

/// Random real-valued vector density of degree <= p in the {V, W, X} basis
/// with per-degree amplitude (1+n)^(-decay).
pub fn random_vector_density(p: usize, decay: f64, seed: u64) -> VectorCoeffsVWX {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = VectorCoeffsVWX::zeros(p);
    {
        let mut fill = |data: &mut [Complex], n_min: usize| {
            for n in n_min..=p {
                let amp = (1.0 + n as f64).powf(-decay);
                data[coeff_index(n, 0)] = Complex::from(amp * rng.gen_range(-1.0..1.0f64));
                for m in 1..=n as i64 {
                    let z = Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * amp;
                    data[coeff_index(n, m)] = z;
                    data[coeff_index(n, -m)] = z.conj();
                }
            }
        };
        fill(&mut c.v, 0);
        fill(&mut c.w, 1);
        fill(&mut c.x, 1);
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_real() {
        let a = random_scalar_density(6, 2.0, 99);
        let b = random_scalar_density(6, 2.0, 99);
        assert_eq!(a.data, b.data);
        assert!(a.conjugate_symmetry_defect() == 0.0);
        let v = random_vector_density(5, 2.0, 7);
        let v2 = random_vector_density(5, 2.0, 7);
        assert_eq!(v.v, v2.v);
        assert_eq!(v.w[0], Complex::ZERO);
    }
}
