use alloc::vec;
use alloc::vec::Vec;

/// Compressed sparse row matrix with sorted column indices.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

/// Collects `(row, col, value)` triplets. Duplicates are summed in insertion
/// order, so two builders fed the same sequence produce identical bits.
#[derive(Debug, Clone, Default)]
pub struct TripletBuilder {
    nrows: usize,
    ncols: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl TripletBuilder {
    pub fn new(nrows: usize, ncols: usize) -> Self {
        Self { nrows, ncols, entries: Vec::new() }
    }

    #[inline]
    pub fn push(&mut self, row: usize, col: usize, value: f64) {
        debug_assert!(row < self.nrows && col < self.ncols);
        self.entries.push((row, col, value));
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn build(mut self) -> CsrMatrix {
        // stable sort keeps insertion order among duplicates
        self.entries.sort_by_key(|&(r, c, _)| (r, c));
        let mut indptr = vec![0usize; self.nrows + 1];
        let mut indices = Vec::with_capacity(self.entries.len());
        let mut values: Vec<f64> = Vec::with_capacity(self.entries.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in self.entries {
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                indices.push(c);
                values.push(v);
                indptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for r in 0..self.nrows {
            indptr[r + 1] += indptr[r];
        }
        CsrMatrix { nrows: self.nrows, ncols: self.ncols, indptr, indices, values }
    }
}

impl CsrMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self { nrows, ncols, indptr: vec![0; nrows + 1], indices: Vec::new(), values: Vec::new() }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![1.0; n])
    }

    pub fn from_diagonal(d: &[f64]) -> Self {
        let n = d.len();
        Self {
            nrows: n,
            ncols: n,
            indptr: (0..=n).collect(),
            indices: (0..n).collect(),
            values: d.to_vec(),
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Column indices and values of row `i`.
    #[inline]
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let (a, b) = (self.indptr[i], self.indptr[i + 1]);
        (&self.indices[a..b], &self.values[a..b])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(k) => vals[k],
            Err(_) => 0.0,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.nrows).flat_map(move |i| {
            let (c, v) = self.row(i);
            c.iter().zip(v).map(move |(&j, &x)| (i, j, x))
        })
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.nrows.min(self.ncols)).map(|i| self.get(i, i)).collect()
    }

    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.ncols);
        assert_eq!(y.len(), self.nrows);
        for (i, yi) in y.iter_mut().enumerate() {
            let (c, v) = self.row(i);
            *yi = c.iter().zip(v).map(|(&j, &a)| a * x[j]).sum();
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.nrows];
        self.mul_vec(x, &mut y);
        y
    }

    /// `y += A^T x`
    pub fn mul_transpose_add(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.nrows);
        assert_eq!(y.len(), self.ncols);
        for (i, &xi) in x.iter().enumerate() {
            let (c, v) = self.row(i);
            for (&j, &a) in c.iter().zip(v) {
                y[j] += a * xi;
            }
        }
    }

    pub fn transpose(&self) -> CsrMatrix {
        let mut t = TripletBuilder::new(self.ncols, self.nrows);
        for (i, j, v) in self.iter() {
            t.push(j, i, v);
        }
        t.build()
    }

    pub fn scaled(&self, alpha: f64) -> CsrMatrix {
        let mut m = self.clone();
        for v in &mut m.values {
            *v *= alpha;
        }
        m
    }

    /// `alpha A + beta B`, entries summed as `alpha a + beta b` in that order.
    pub fn lincomb(alpha: f64, a: &CsrMatrix, beta: f64, b: &CsrMatrix) -> CsrMatrix {
        assert_eq!((a.nrows, a.ncols), (b.nrows, b.ncols));
        let mut t = TripletBuilder::new(a.nrows, a.ncols);
        for i in 0..a.nrows {
            let (ca, va) = a.row(i);
            let (cb, vb) = b.row(i);
            let (mut p, mut q) = (0, 0);
            while p < ca.len() || q < cb.len() {
                let ja = ca.get(p).copied().unwrap_or(usize::MAX);
                let jb = cb.get(q).copied().unwrap_or(usize::MAX);
                if ja == jb {
                    t.push(i, ja, alpha * va[p] + beta * vb[q]);
                    p += 1;
                    q += 1;
                } else if ja < jb {
                    t.push(i, ja, alpha * va[p]);
                    p += 1;
                } else {
                    t.push(i, jb, beta * vb[q]);
                    q += 1;
                }
            }
        }
        t.build()
    }

    pub fn add(&self, other: &CsrMatrix) -> CsrMatrix {
        Self::lincomb(1.0, self, 1.0, other)
    }

    /// `A^T diag(w) A` accumulated row by row of `A`; symmetric to the last bit.
    pub fn gram(&self, w: Option<&[f64]>) -> CsrMatrix {
        let mut t = TripletBuilder::new(self.ncols, self.ncols);
        for i in 0..self.nrows {
            let wi = w.map_or(1.0, |w| w[i]);
            let (c, v) = self.row(i);
            for (&ja, &a) in c.iter().zip(v) {
                for (&jb, &b) in c.iter().zip(v) {
                    t.push(ja, jb, wi * (a * b));
                }
            }
        }
        t.build()
    }

    /// Largest `|A_ij - A_ji|`.
    pub fn asymmetry(&self) -> f64 {
        if self.nrows != self.ncols {
            return f64::INFINITY;
        }
        self.iter().map(|(i, j, v)| (v - self.get(j, i)).abs()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &CsrMatrix) -> f64 {
        CsrMatrix::lincomb(1.0, self, -1.0, other)
            .values
            .iter()
            .fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Same matrix with `shift` added on the diagonal.
    pub fn shifted(&self, shift: f64) -> CsrMatrix {
        CsrMatrix::lincomb(1.0, self, shift, &CsrMatrix::identity(self.nrows))
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let mut m = nalgebra::DMatrix::zeros(self.nrows, self.ncols);
        for (i, j, v) in self.iter() {
            m[(i, j)] += v;
        }
        m
    }

    /// Keeps the first `n` rows.
    pub fn truncate_rows(&mut self, n: usize) {
        if n < self.nrows {
            let end = self.indptr[n];
            self.indptr.truncate(n + 1);
            self.indices.truncate(end);
            self.values.truncate(end);
            self.nrows = n;
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}
