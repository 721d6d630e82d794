use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, SymmetricEigen};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use super::{axpy, wdot};
use crate::error::{Error, Result};
use crate::math;

#[derive(Debug, Clone)]
pub struct LanczosOptions {
    /// Number of extreme Ritz pairs wanted.
    pub nev: usize,
    pub max_iter: usize,
    /// Relative Ritz residual `|beta_m s_mi| / |theta_i|` at convergence.
    pub tol: f64,
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self { nev: 1, max_iter: 300, tol: 1e-12, seed: 0x5eed }
    }
}

#[derive(Debug, Clone)]
pub struct LanczosOutput {
    /// Largest Ritz values, descending.
    pub values: Vec<f64>,
    /// Ritz vectors, normalized in the weighted inner product.
    pub vectors: Vec<Vec<f64>>,
    pub estimates: Vec<f64>,
    pub iterations: usize,
}

/// Largest eigenpairs of an operator that is self-adjoint in the inner
/// product `<x, y> = sum w_i x_i y_i` (`w = None` for the Euclidean one).
///
/// Full reorthogonalization, so the basis is kept for the whole run; used
/// only in shift-invert mode where a few dozen steps suffice.
pub fn lanczos_largest<F>(n: usize, weight: Option<&[f64]>, mut op: F, opts: &LanczosOptions) -> Result<LanczosOutput>
where
    F: FnMut(&[f64]) -> Vec<f64>,
{
    let nev = opts.nev.min(n).max(1);
    let max_iter = opts.max_iter.min(n).max(nev);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut v: Vec<f64> = (0..n).map(|_| (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64 - 0.5).collect();
    let nv = math::sqrt(wdot(weight, &v, &v));
    v.iter_mut().for_each(|x| *x /= nv);

    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(max_iter);
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut last: Option<(Vec<f64>, Vec<f64>, Vec<f64>)> = None;

    for j in 0..max_iter {
        let mut w = op(&v);
        let a = wdot(weight, &w, &v);
        axpy(-a, &v, &mut w);
        if let Some(prev) = basis.last() {
            axpy(-beta[j - 1], prev, &mut w);
        }
        basis.push(v);
        alpha.push(a);
        for _ in 0..2 {
            for q in &basis {
                let c = wdot(weight, &w, q);
                axpy(-c, q, &mut w);
            }
        }
        let b = math::sqrt(wdot(weight, &w, &w).max(0.0));
        let m = j + 1;
        let check = m >= nev && (m % 4 == 0 || m == max_iter || m == n || b == 0.0);
        if check {
            let (vals, vecs) = tridiag_eig(&alpha, &beta);
            let scale = vals.iter().fold(0.0f64, |s, x| s.max(x.abs())).max(f64::MIN_POSITIVE);
            let mut order: Vec<usize> = (0..m).collect();
            order.sort_by(|&x, &y| vals[y].partial_cmp(&vals[x]).unwrap());
            let top: Vec<usize> = order.into_iter().take(nev).collect();
            let est: Vec<f64> = top.iter().map(|&i| (b * vecs[(m - 1, i)]).abs()).collect();
            let done = top.iter().zip(&est).all(|(&i, e)| *e <= opts.tol * vals[i].abs().max(opts.tol * scale));
            let sel_vals: Vec<f64> = top.iter().map(|&i| vals[i]).collect();
            let coeffs: Vec<f64> = top.iter().flat_map(|&i| (0..m).map(move |k| (i, k))).map(|(i, k)| vecs[(k, i)]).collect();
            last = Some((sel_vals, coeffs, est));
            if done || b <= 1e-14 * scale || m == n {
                break;
            }
        }
        if b == 0.0 {
            break;
        }
        beta.push(b);
        v = w;
        v.iter_mut().for_each(|x| *x /= b);
    }

    let (values, coeffs, estimates) = last.ok_or(Error::NoConvergence { iterations: basis.len(), residual: f64::INFINITY })?;
    let m = basis.len().min(coeffs.len() / values.len().max(1));
    let worst = estimates
        .iter()
        .zip(&values)
        .map(|(e, v)| e / v.abs().max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max);
    if worst > opts.tol.max(1e-8) * 1e3 {
        return Err(Error::NoConvergence { iterations: basis.len(), residual: worst });
    }
    let vectors = (0..values.len())
        .map(|i| {
            let mut x = vec![0.0; n];
            for k in 0..m {
                axpy(coeffs[i * m + k], &basis[k], &mut x);
            }
            let nx = math::sqrt(wdot(weight, &x, &x));
            x.iter_mut().for_each(|t| *t /= nx);
            x
        })
        .collect();
    Ok(LanczosOutput { values, vectors, estimates, iterations: basis.len() })
}

fn tridiag_eig(alpha: &[f64], beta: &[f64]) -> (Vec<f64>, DMatrix<f64>) {
    let m = alpha.len();
    let mut t = DMatrix::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alpha[i];
        if i + 1 < m {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    let e = SymmetricEigen::new(t);
    (e.eigenvalues.iter().copied().collect(), e.eigenvectors)
}
