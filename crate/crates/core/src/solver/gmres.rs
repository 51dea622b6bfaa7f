//! Restarted GMRES over real-flattened unknown vectors.

use crate::error::{Error, Result};

/// A real-linear operator on flat vectors.
pub trait LinearOperator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64]) -> Result<Vec<f64>>;
}

#[derive(Debug, Clone)]
pub struct GmresReport {
    pub iterations: usize,
    pub converged: bool,
    /// relative residual after each iteration
    pub residual_history: Vec<f64>,
}

impl GmresReport {
    pub fn final_residual(&self) -> f64 {
        self.residual_history.last().copied().unwrap_or(1.0)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn nrm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Solves `A x = b` by restarted GMRES with Givens rotations; the residual
/// tolerance is relative to |b|.
pub fn gmres(
    op: &dyn LinearOperator,
    rhs: &[f64],
    tol: f64,
    restart: usize,
    max_iter: usize,
) -> Result<(Vec<f64>, GmresReport)> {
    let n = op.dim();
    if rhs.len() != n {
        return Err(Error::ShapeMismatch { expected: n, got: rhs.len() });
    }
    let bnorm = nrm2(rhs);
    let mut report = GmresReport { iterations: 0, converged: false, residual_history: Vec::new() };
    if bnorm == 0.0 {
        report.converged = true;
        report.residual_history.push(0.0);
        return Ok((vec![0.0; n], report));
    }
    let m = restart.max(1);
    let mut x = vec![0.0; n];
    let mut total_iters = 0usize;

    'outer: loop {
        // residual of the current iterate
        let ax = op.apply(&x)?;
        let mut r: Vec<f64> = rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
        let beta = nrm2(&r);
        if beta / bnorm <= tol {
            report.converged = true;
            if report.residual_history.is_empty() {
                report.residual_history.push(beta / bnorm);
            }
            break;
        }
        for v in r.iter_mut() {
            *v /= beta;
        }
        let mut basis: Vec<Vec<f64>> = vec![r];
        let mut h = vec![vec![0.0f64; m]; m + 1]; // h[i][j]
        let mut cs = vec![0.0f64; m];
        let mut sn = vec![0.0f64; m];
        let mut g = vec![0.0f64; m + 1];
        g[0] = beta;
        let mut k_used = 0usize;

        for j in 0..m {
            if total_iters >= max_iter {
                break;
            }
            total_iters += 1;
            let mut w = op.apply(&basis[j])?;
            // modified Gram-Schmidt
            for i in 0..=j {
                let hij = dot(&w, &basis[i]);
                h[i][j] = hij;
                for (wv, bv) in w.iter_mut().zip(&basis[i]) {
                    *wv -= hij * bv;
                }
            }
            let hnext = nrm2(&w);
            h[j + 1][j] = hnext;
            // apply accumulated Givens rotations to the new column
            for i in 0..j {
                let t = cs[i] * h[i][j] + sn[i] * h[i + 1][j];
                h[i + 1][j] = -sn[i] * h[i][j] + cs[i] * h[i + 1][j];
                h[i][j] = t;
            }
            let denom = (h[j][j] * h[j][j] + hnext * hnext).sqrt();
            if denom == 0.0 {
                // exact breakdown: solution lies in the current subspace
                k_used = j;
                break;
            }
            cs[j] = h[j][j] / denom;
            sn[j] = hnext / denom;
            h[j][j] = denom;
            h[j + 1][j] = 0.0;
            g[j + 1] = -sn[j] * g[j];
            g[j] *= cs[j];
            k_used = j + 1;
            let rel = g[j + 1].abs() / bnorm;
            report.residual_history.push(rel);
            if rel <= tol {
                break;
            }
            if hnext == 0.0 {
                break; // lucky breakdown
            }
            if j + 1 < m {
                for v in w.iter_mut() {
                    *v /= hnext;
                }
                basis.push(w);
            }
        }

        // back substitution for the least-squares coefficients
        let mut y = vec![0.0f64; k_used];
        for i in (0..k_used).rev() {
            let mut s = g[i];
            for k in i + 1..k_used {
                s -= h[i][k] * y[k];
            }
            y[i] = s / h[i][i];
        }
        for (i, yi) in y.iter().enumerate() {
            for (xv, bv) in x.iter_mut().zip(&basis[i]) {
                *xv += yi * bv;
            }
        }

        let rel = report.residual_history.last().copied().unwrap_or(1.0);
        if rel <= tol {
            report.converged = true;
            break 'outer;
        }
        if total_iters >= max_iter {
            break 'outer;
        }
    }

    report.iterations = total_iters;
    if !report.converged {
        let rel = report.final_residual();
        if rel > tol {
            // reported, not silently accepted: caller decides
            return Ok((x, report));
        }
        report.converged = true;
    }
    Ok((x, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Identity(usize);
    impl LinearOperator for Identity {
        fn dim(&self) -> usize {
            self.0
        }
        fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
            Ok(x.to_vec())
        }
    }

    struct Diag(Vec<f64>);
    impl LinearOperator for Diag {
        fn dim(&self) -> usize {
            self.0.len()
        }
        fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
            Ok(x.iter().zip(&self.0).map(|(a, d)| a * d).collect())
        }
    }

    #[test]
    fn identity_converges_immediately() {
        let b = vec![1.0, -2.0, 3.0];
        let (x, rep) = gmres(&Identity(3), &b, 1e-12, 10, 100).unwrap();
        assert!(rep.converged && rep.iterations <= 1);
        for i in 0..3 {
            assert!((x[i] - b[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn second_kind_diagonal_matches_direct_solve() {
        // (1/2) I + diagonal with known spectrum
        let d: Vec<f64> = (0..40).map(|i| 0.5 + 0.3 / (1.0 + i as f64)).collect();
        let b: Vec<f64> = (0..40).map(|i| (i as f64 * 0.37).sin()).collect();
        let (x, rep) = gmres(&Diag(d.clone()), &b, 1e-12, 20, 200).unwrap();
        assert!(rep.converged);
        for i in 0..40 {
            assert!((x[i] - b[i] / d[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn zero_rhs_returns_zero() {
        let (x, rep) = gmres(&Identity(5), &[0.0; 5], 1e-10, 5, 10).unwrap();
        assert!(rep.converged);
        assert!(x.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn nonconvergence_is_reported() {
        // rotation-like operator that GMRES cannot crack in few iterations
        struct Shift;
        impl LinearOperator for Shift {
            fn dim(&self) -> usize {
                50
            }
            fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
                let mut y = vec![0.0; 50];
                for i in 0..49 {
                    y[i + 1] = x[i];
                }
                y[0] = x[49];
                Ok(y)
            }
        }
        let mut b = vec![0.0; 50];
        b[0] = 1.0;
        let (_, rep) = gmres(&Shift, &b, 1e-14, 10, 20).unwrap();
        assert!(!rep.converged);
        assert!(rep.final_residual() > 1e-14);
    }
}
