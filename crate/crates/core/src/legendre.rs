//! Associated Legendre functions and Gauss-Legendre quadrature.
//!
//! Normalization follows the harmonic convention used throughout:
//! `Y_n^m = ptilde_n^{|m|}(cos theta) e^{i m phi}` with
//! `ptilde_n^m = sqrt((2n+1)/(4 pi) (n-m)!/(n+m)!) P_n^m` and plain
//! (no Condon-Shortley) `P_n^m(x) = (2m-1)!! (1-x^2)^{m/2} * ...`.

use crate::error::{Error, Result};

/// Nodes and weights of the `n`-point Gauss-Legendre rule on [-1, 1].
///
/// Newton iteration on the Legendre recurrence; nodes are returned in
/// increasing order and the weights sum to 2.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi-style initial guess, then Newton
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_pair(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                let (p2, d2) = legendre_pair(n, x);
                dp = d2;
                x -= p2 / d2;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        let (_, d) = legendre_pair(n, 0.0);
        nodes[n / 2] = 0.0;
        weights[n / 2] = 2.0 / (d * d);
    }
    (nodes, weights)
}

/// (P_n(x), P_n'(x)) by the three-term recurrence.
fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Unnormalized associated Legendre function `P_n^m(x)`, plain convention
/// (no Condon-Shortley sign). Overflows for large degree; intended for
/// p <= 32 cross-checks, use the normalized variant otherwise.
pub fn assoc_legendre(n: usize, m: usize, x: f64) -> Result<f64> {
    if m > n {
        return Err(Error::InvalidArgument(format!("order m={m} exceeds degree n={n}")));
    }
    if !(-1.0..=1.0).contains(&x) {
        return Err(Error::InvalidArgument(format!("argument x={x} outside [-1,1]")));
    }
    let s = (1.0 - x * x).sqrt();
    // P_m^m = (2m-1)!! s^m
    let mut pmm = 1.0;
    for k in 1..=m {
        pmm *= (2 * k - 1) as f64 * s;
    }
    if n == m {
        return Ok(pmm);
    }
    let mut pm1 = x * (2 * m + 1) as f64 * pmm; // P_{m+1}^m
    if n == m + 1 {
        return Ok(pm1);
    }
    let mut p = 0.0;
    for k in m + 2..=n {
        p = ((2 * k - 1) as f64 * x * pm1 - (k + m - 1) as f64 * pmm) / (k - m) as f64;
        pmm = pm1;
        pm1 = p;
    }
    Ok(p)
}

/// Fills `out[n - m]` with the fully normalized `ptilde_n^m(x)` for
/// n = m..=n_max. `s` must equal `sqrt(1 - x^2)`.
pub fn norm_plm_col(m: usize, n_max: usize, x: f64, s: f64, out: &mut [f64]) {
    debug_assert!(out.len() >= n_max + 1 - m);
    // sectoral seed ptilde_m^m
    let mut pmm = 1.0 / (4.0 * std::f64::consts::PI).sqrt();
    for k in 1..=m {
        pmm *= s * ((2 * k + 1) as f64 / (2 * k) as f64).sqrt();
    }
    out[0] = pmm;
    if n_max == m {
        return;
    }
    let mf = m as f64;
    // ptilde_{m+1}^m = sqrt(2m+3) x ptilde_m^m
    let mut prev = pmm;
    let mut cur = (2.0 * mf + 3.0).sqrt() * x * pmm;
    out[1] = cur;
    for n in m + 2..=n_max {
        let nf = n as f64;
        let a = ((4.0 * nf * nf - 1.0) / (nf * nf - mf * mf)).sqrt();
        let b = (((nf - 1.0) * (nf - 1.0) - mf * mf) / (4.0 * (nf - 1.0) * (nf - 1.0) - 1.0)).sqrt();
        let next = a * (x * cur - b * prev);
        prev = cur;
        cur = next;
        out[n - m] = cur;
    }
}

/// Fills `out[n - m]` with `d ptilde_n^m / d theta` at `x = cos theta`,
/// given the values `plm[n - m] = ptilde_n^m(x)` from [`norm_plm_col`].
///
/// Uses `d/dtheta ptilde_n^m = (n x ptilde_n^m - c_nm ptilde_{n-1}^m)/sin theta`
/// with `c_nm = sqrt((n^2-m^2)(2n+1)/(2n-1))`; valid away from the poles.
pub fn dtheta_norm_plm_col(m: usize, n_max: usize, x: f64, s: f64, plm: &[f64], out: &mut [f64]) {
    let mf = m as f64;
    for n in m..=n_max {
        let nf = n as f64;
        let below = if n > m { plm[n - 1 - m] } else { 0.0 };
        let c = if n > m {
            ((nf * nf - mf * mf) * (2.0 * nf + 1.0) / (2.0 * nf - 1.0)).sqrt()
        } else {
            0.0
        };
        out[n - m] = (nf * x * plm[n - m] - c * below) / s;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_nodes_weights() {
        for n in [1, 2, 5, 17, 65, 257] {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
            for i in 1..n {
                assert!(x[i] > x[i - 1]);
            }
            assert!(x[0] > -1.0 && x[n - 1] < 1.0);
            // integrates x^2 exactly for n >= 2
            if n >= 2 {
                let s: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi * xi).sum();
                assert!((s - 2.0 / 3.0).abs() < 1e-13, "n={n}: {s}");
            }
        }
    }

    #[test]
    fn gauss_integrates_high_degree() {
        // (p+1)-point rule is exact up to degree 2p+1
        let p = 12;
        let (x, w) = gauss_legendre(p + 1);
        let d = 2 * p + 1;
        let exact = 2.0 / (d as f64 + 1.0); // integral of x^d for even d+? d odd -> 0
        let s_odd: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(d as i32)).sum();
        assert!(s_odd.abs() < 1e-12);
        let s_even: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(d as i32 - 1)).sum();
        assert!((s_even - exact * (d as f64 + 1.0) / (d as f64)).abs() < 1e-12);
    }

    #[test]
    fn assoc_legendre_low_degree_table() {
        // closed forms, plain convention
        assert_eq!(assoc_legendre(0, 0, 0.3).unwrap(), 1.0);
        assert!((assoc_legendre(1, 0, 0.5).unwrap() - 0.5).abs() < 1e-15);
        let x: f64 = 0.0;
        assert!((assoc_legendre(2, 1, x).unwrap() - 3.0 * x * (1.0 - x * x).sqrt()).abs() < 1e-15);
        for &x in &[-0.9, -0.4, 0.1, 0.7] {
            let x: f64 = x;
            let s = (1.0 - x * x).sqrt();
            assert!((assoc_legendre(2, 1, x).unwrap() - 3.0 * x * s).abs() < 1e-13);
            assert!((assoc_legendre(2, 2, x).unwrap() - 3.0 * (1.0 - x * x)).abs() < 1e-13);
            assert!((assoc_legendre(3, 1, x).unwrap() - 1.5 * (5.0 * x * x - 1.0) * s).abs() < 1e-12);
        }
    }

    #[test]
    fn assoc_legendre_domain_errors() {
        assert!(assoc_legendre(2, 3, 0.0).is_err());
        assert!(assoc_legendre(2, 1, 1.5).is_err());
    }

    #[test]
    fn normalized_matches_unnormalized() {
        let x: f64 = 0.37;
        let s = (1.0 - x * x).sqrt();
        for m in 0..=8usize {
            let mut col = vec![0.0; 20 - m + 1];
            norm_plm_col(m, 20, x, s, &mut col);
            for n in m..=20usize {
                let mut nf = ((2 * n + 1) as f64 / (4.0 * std::f64::consts::PI)).sqrt();
                for k in (n - m + 1)..=(n + m) {
                    nf /= (k as f64).sqrt();
                }
                let want = nf * assoc_legendre(n, m, x).unwrap();
                assert!(
                    (col[n - m] - want).abs() < 1e-12 * (1.0 + want.abs()),
                    "n={n} m={m}: {} vs {}",
                    col[n - m],
                    want
                );
            }
        }
    }

    #[test]
    fn no_overflow_at_p256() {
        let x: f64 = 0.11;
        let s = (1.0 - x * x).sqrt();
        for m in [0, 64, 200, 256] {
            let mut col = vec![0.0; 257 - m];
            norm_plm_col(m, 256, x, s, &mut col);
            for v in &col {
                assert!(v.is_finite());
            }
        }
    }

    #[test]
    fn theta_derivative_matches_finite_difference() {
        let theta: f64 = 1.1;
        let h = 1e-6;
        for m in [0usize, 1, 3] {
            let nmax = 10;
            let eval = |t: f64| {
                let mut col = vec![0.0; nmax + 1 - m];
                norm_plm_col(m, nmax, t.cos(), t.sin(), &mut col);
                col
            };
            let c0 = eval(theta);
            let cp = eval(theta + h);
            let cm = eval(theta - h);
            let mut d = vec![0.0; nmax + 1 - m];
            dtheta_norm_plm_col(m, nmax, theta.cos(), theta.sin(), &c0, &mut d);
            for n in m..=nmax {
                let fd = (cp[n - m] - cm[n - m]) / (2.0 * h);
                assert!((d[n - m] - fd).abs() < 1e-8, "n={n} m={m}");
            }
        }
    }
}
