//! Unpivoted dense `L D L^T` used on the modal Schur complements.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub(crate) struct Ldl {
    /// Unit lower factor in the strict lower triangle, column-major.
    l: DMatrix<f64>,
    d: Vec<f64>,
}

impl Ldl {
    /// Factors the lower triangle of `a`. Fails on a pivot below
    /// `1e-14 max|a_ii|`, where the inertia would not be trustworthy.
    pub(crate) fn factor(mut a: DMatrix<f64>) -> Result<Self> {
        let n = a.nrows();
        let scale = (0..n).map(|i| a[(i, i)].abs()).fold(0.0, f64::max);
        let tiny = 1e-14 * scale;
        let mut d = vec![0.0; n];
        let m = a.as_mut_slice();
        for k in 0..n {
            let dk = m[k * n + k];
            if !(dk.abs() > tiny) {
                return Err(Error::NotPositiveDefinite { index: k });
            }
            d[k] = dk;
            let (head, tail) = m.split_at_mut((k + 1) * n);
            let colk = &mut head[k * n..];
            for v in &mut colk[k + 1..n] {
                *v /= dk;
            }
            for j in k + 1..n {
                let f = colk[j] * dk;
                if f == 0.0 {
                    continue;
                }
                let colj = &mut tail[(j - k - 1) * n..(j - k) * n];
                for i in j..n {
                    colj[i] -= f * colk[i];
                }
            }
        }
        Ok(Self { l: a, d })
    }

    pub(crate) fn negatives(&self) -> usize {
        self.d.iter().filter(|&&x| x < 0.0).count()
    }

    pub(crate) fn dim(&self) -> usize {
        self.d.len()
    }

    /// In place `L^{-1} x`.
    fn forward(&self, x: &mut [f64]) {
        let n = self.d.len();
        let l = self.l.as_slice();
        for k in 0..n {
            let xk = x[k];
            if xk != 0.0 {
                let col = &l[k * n..(k + 1) * n];
                for i in k + 1..n {
                    x[i] -= xk * col[i];
                }
            }
        }
    }

    fn backward(&self, x: &mut [f64]) {
        let n = self.d.len();
        let l = self.l.as_slice();
        for k in (0..n).rev() {
            let col = &l[k * n..(k + 1) * n];
            let mut s = x[k];
            for i in k + 1..n {
                s -= col[i] * x[i];
            }
            x[k] = s;
        }
    }

    pub(crate) fn solve_in_place(&self, x: &mut [f64]) {
        self.forward(x);
        for (v, d) in x.iter_mut().zip(&self.d) {
            *v /= d;
        }
        self.backward(x);
    }

    /// `C^T S^{-1} C` for a square `C`, formed as `Y^T D^{-1} Y` with `Y = L^{-1} C`.
    pub(crate) fn congruence(&self, c: &DMatrix<f64>) -> DMatrix<f64> {
        let n = self.d.len();
        let mut y = c.clone();
        for j in 0..c.ncols() {
            let col = &mut y.as_mut_slice()[j * n..(j + 1) * n];
            self.forward(col);
        }
        let mut z = y.clone();
        for j in 0..z.ncols() {
            for (i, v) in z.column_mut(j).iter_mut().enumerate() {
                *v /= self.d[i];
            }
        }
        y.transpose() * z
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indefinite_inertia_and_solve() {
        let a = DMatrix::from_row_slice(3, 3, &[4.0, 1.0, 0.5, 1.0, -3.0, 0.2, 0.5, 0.2, 2.0]);
        let f = Ldl::factor(a.clone()).unwrap();
        assert_eq!(f.negatives(), 1);
        let b = [1.0, 2.0, 3.0];
        let mut x = b;
        f.solve_in_place(&mut x);
        let r = &a * nalgebra::DVector::from_column_slice(&x);
        for i in 0..3 {
            assert!((r[i] - b[i]).abs() < 1e-13);
        }
        let c = DMatrix::from_fn(3, 3, |i, j| (i + 2 * j) as f64 * 0.1);
        let want = c.transpose() * a.clone().try_inverse().unwrap() * &c;
        assert!((f.congruence(&c) - want).amax() < 1e-12);
    }
}
