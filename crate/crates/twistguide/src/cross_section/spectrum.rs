
use alloc::vec::Vec;

use nalgebra::SymmetricEigen;

use super::{CrossSectionDomain, Shape};
use crate::error::{Error, Result};
use crate::linalg::{self, lanczos_largest, CsrMatrix, EnvelopeCholesky, LanczosOptions};
use crate::math;

/// Below this many unknowns a dense eigensolver is cheaper and more robust.
const DENSE_LIMIT: usize = 600;

/// `E2 - E1` below this is treated as a degenerate ground state.
pub const GAP_FLOOR: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct GroundPair {
    pub e1: f64,
    pub e2: f64,
    /// Positive ground state normalized to `sum delta^2 phi^2 = 1`.
    pub ground: Vec<f64>,
    /// `||K phi - E1 phi|| / ||phi||`
    pub residual: f64,
}

impl GroundPair {
    pub fn gap(&self) -> f64 {
        self.e2 - self.e1
    }
}

#[derive(Debug, Clone)]
pub struct LambdaResult {
    pub delta: f64,
    pub lambda: f64,
    pub e1: f64,
    pub e2: f64,
    /// Minimizer of the `lambda` Rayleigh quotient, same normalization as the ground state.
    pub minimizer: Vec<f64>,
    pub residual: f64,
    /// `max |B - B^T|` of the assembled operator (zero by construction).
    pub asymmetry: f64,
}

/// Lowest `k` eigenpairs of a sparse symmetric matrix bounded below by `floor`.
/// Vectors are Euclidean-normalized; values ascend.
pub fn lowest_eigenpairs(a: &CsrMatrix, floor: f64, k: usize) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = a.nrows();
    let k = k.min(n);
    if n <= DENSE_LIMIT {
        let e = SymmetricEigen::new(a.to_dense());
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_by(|&i, &j| e.eigenvalues[i].partial_cmp(&e.eigenvalues[j]).unwrap());
        let vals = idx[..k].iter().map(|&i| e.eigenvalues[i]).collect();
        let vecs = idx[..k].iter().map(|&i| e.eigenvectors.column(i).iter().copied().collect()).collect();
        return Ok((vals, vecs));
    }
    let shift = floor;
    let chol = EnvelopeCholesky::factor(a, -shift)?;
    let opts = LanczosOptions { nev: k, max_iter: 400, tol: 1e-13, seed: 7 };
    let out = lanczos_largest(n, None, |x| chol.solve(x), &opts)?;
    let mut pairs: Vec<(f64, Vec<f64>)> = out
        .vectors
        .into_iter()
        .map(|v| {
            let av = a.apply(&v);
            (linalg::dot(&v, &av) / linalg::dot(&v, &v), v)
        })
        .collect();
    pairs.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    Ok(pairs.into_iter().unzip())
}

fn residual(a: &CsrMatrix, value: f64, v: &[f64]) -> f64 {
    let mut r = a.apply(v);
    linalg::axpy(-value, v, &mut r);
    linalg::norm(&r) / linalg::norm(v)
}

/// Two lowest Dirichlet eigenvalues and the positive ground state.
pub fn dirichlet_ground_pair(dom: &CrossSectionDomain) -> Result<GroundPair> {
    let k = dom.stiffness();
    // the Laplacian is positive definite; zero is a valid shift
    let (vals, mut vecs) = lowest_eigenpairs(&k, 0.0, 2)?;
    if vals.len() < 2 {
        return Err(Error::DegenerateDiscretization(alloc::format!("{} node(s) give no second eigenvalue", dom.len())));
    }
    let mut g = vecs.swap_remove(0);
    let s: f64 = g.iter().sum();
    let nrm = math::sqrt(dom.inner(&g, &g));
    let sign = if s < 0.0 { -1.0 } else { 1.0 };
    g.iter_mut().for_each(|x| *x *= sign / nrm);
    let res = residual(&k, vals[0], &g);
    if !(res <= 1e-7 * vals[0].abs().max(1.0)) {
        return Err(Error::NoConvergence { iterations: 0, residual: res });
    }
    Ok(GroundPair { e1: vals[0], e2: vals[1], ground: g, residual: res })
}

/// The operator `B = K - E1 + d_tau^* d_tau` whose bottom is `lambda`.
pub fn lambda_operator(dom: &CrossSectionDomain, e1: f64) -> CsrMatrix {
    let k = dom.stiffness();
    let g = dom.tangential().gram();
    CsrMatrix::lincomb(1.0, &k.shifted(-e1), 1.0, &g)
}

/// `lambda = inf (||grad phi||^2 - E1 ||phi||^2 + ||d_tau phi||^2) / ||phi||^2`.
pub fn compute_lambda(dom: &CrossSectionDomain) -> Result<LambdaResult> {
    let gp = dirichlet_ground_pair(dom)?;
    if gp.gap() < GAP_FLOOR {
        return Err(Error::DegenerateGroundState { gap: gp.gap() });
    }
    let b = lambda_operator(dom, gp.e1);
    let asymmetry = b.asymmetry();
    // B >= 0 up to rounding, so B + 1 is safely definite
    let (vals, mut vecs) = lowest_eigenpairs(&b, -1.0, 1)?;
    let mut phi = vecs.swap_remove(0);
    let bphi = b.apply(&phi);
    let lambda = linalg::dot(&phi, &bphi) / linalg::dot(&phi, &phi);
    let res = residual(&b, lambda, &phi);
    let _ = vals;
    let s: f64 = phi.iter().sum();
    let nrm = math::sqrt(dom.inner(&phi, &phi));
    let sign = if s < 0.0 { -1.0 } else { 1.0 };
    phi.iter_mut().for_each(|x| *x *= sign / nrm);
    Ok(LambdaResult { delta: dom.delta(), lambda, e1: gp.e1, e2: gp.e2, minimizer: phi, residual: res, asymmetry })
}

/// `lambda` on a sequence of grids, coarse to fine.
pub fn lambda_refinement(shape: &Shape, deltas: &[f64]) -> Result<Vec<LambdaResult>> {
    deltas.iter().map(|&d| compute_lambda(&CrossSectionDomain::new(shape.clone(), d)?)).collect()
}

/// Eigenvalue history for a refinement study of `E1`.
pub fn ground_refinement(shape: &Shape, deltas: &[f64]) -> Result<Vec<(f64, f64)>> {
    deltas
        .iter()
        .map(|&d| Ok((d, dirichlet_ground_pair(&CrossSectionDomain::new(shape.clone(), d)?)?.e1)))
        .collect()
}

