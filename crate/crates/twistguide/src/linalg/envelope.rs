use alloc::vec;
use alloc::vec::Vec;

use super::CsrMatrix;
use crate::error::{Error, Result};
use crate::math;

/// Row-envelope Cholesky factor `A = L L^T` of a sparse symmetric matrix.
///
/// Only the lower triangle of the input is read. Fill is confined to the
/// envelope, which for lexicographically ordered grids is one grid line wide.
#[derive(Debug, Clone)]
pub struct EnvelopeCholesky {
    n: usize,
    first: Vec<usize>,
    start: Vec<usize>,
    data: Vec<f64>,
}

impl EnvelopeCholesky {
    /// Factors `A + shift * I`.
    pub fn factor(a: &CsrMatrix, shift: f64) -> Result<Self> {
        let n = a.nrows();
        assert_eq!(n, a.ncols());
        let mut first = vec![0usize; n];
        let mut start = vec![0usize; n + 1];
        for i in 0..n {
            let (cols, _) = a.row(i);
            first[i] = cols.first().copied().filter(|&j| j <= i).unwrap_or(i);
            start[i + 1] = start[i] + (i - first[i] + 1);
        }
        let mut data = vec![0.0; start[n]];
        for i in 0..n {
            let (cols, vals) = a.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                if j <= i {
                    data[start[i] + j - first[i]] += v;
                }
            }
            data[start[i + 1] - 1] += shift;
        }
        for i in 0..n {
            let fi = first[i];
            let ri = start[i];
            for j in fi..i {
                let fj = first[j];
                let k0 = fi.max(fj);
                let rj = start[j];
                let s: f64 = (k0..j).map(|k| data[ri + k - fi] * data[rj + k - fj]).sum();
                let ljj = data[start[j + 1] - 1];
                data[ri + j - fi] = (data[ri + j - fi] - s) / ljj;
            }
            let s: f64 = data[ri..ri + (i - fi)].iter().map(|x| x * x).sum();
            let d = data[ri + i - fi] - s;
            if !(d > 0.0) {
                return Err(Error::NotPositiveDefinite { index: i });
            }
            data[ri + i - fi] = math::sqrt(d);
        }
        Ok(Self { n, first, start, data })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn envelope_len(&self) -> usize {
        self.data.len()
    }

    pub fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.n;
        for i in 0..n {
            let fi = self.first[i];
            let ri = self.start[i];
            let s: f64 = (fi..i).map(|k| self.data[ri + k - fi] * b[k]).sum();
            b[i] = (b[i] - s) / self.data[ri + i - fi];
        }
        for i in (0..n).rev() {
            let fi = self.first[i];
            let ri = self.start[i];
            b[i] /= self.data[ri + i - fi];
            let bi = b[i];
            for k in fi..i {
                b[k] -= self.data[ri + k - fi] * bi;
            }
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}
