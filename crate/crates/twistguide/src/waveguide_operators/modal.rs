//! Modal block-tridiagonal representation of a form and its shifted factorization.
//!
//! In the eigenbasis of the transverse stiffness every reference slab is
//! diagonal, so the straight parts of the tube split into independent
//! tridiagonal chains, one per transverse mode ("arms"). Only the core slabs
//! carry dense modal blocks.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use nalgebra::DMatrix;

use super::dense::Ldl;
use super::form::SymmetricForm;
use super::grid::EndCondition;
use crate::error::{Error, Result};
use crate::linalg::CsrMatrix;
use crate::math;

/// Treatment of the far end of an arm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Closure {
    /// Zero beyond the last explicit slab.
    Dirichlet,
    /// Exact elimination of the constant-coefficient semi-infinite chain.
    Transparent,
    /// `psi_{N+1} = ratio psi_N`.
    Robin { ratio: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arm {
    pub len: usize,
    pub closure: Closure,
}

#[derive(Debug, Clone)]
pub struct ModalOperator {
    nt: usize,
    b: f64,
    ds: f64,
    energies: Vec<f64>,
    modes: DMatrix<f64>,
    core: Range<usize>,
    core_s: Vec<f64>,
    diag: Vec<DMatrix<f64>>,
    upper: Vec<DMatrix<f64>>,
    /// `[mode][side]`, side 0 = left.
    arms: Vec<[Arm; 2]>,
    offsets: Vec<[usize; 2]>,
    len: usize,
    grid_slabs: usize,
    half_length: f64,
}

/// Pivot of the infinite chain `a, -b` below the threshold.
fn chain_pivot(a: f64, b: f64) -> f64 {
    let delta = a - 2.0 * b;
    0.5 * (a + math::sqrt(delta * (delta + 4.0 * b)))
}

fn sparse_times_dense(a: &CsrMatrix, u: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(a.nrows(), u.ncols());
    for c in 0..u.ncols() {
        let (src, dst) = (u.column(c), out.column_mut(c));
        let mut dst = dst;
        for i in 0..a.nrows() {
            let (cols, vals) = a.row(i);
            dst[i] = cols.iter().zip(vals).map(|(&j, &v)| v * src[j]).sum();
        }
    }
    out
}

impl ModalOperator {
    /// Arms follow the end condition of the form's grid.
    pub fn new(form: &SymmetricForm) -> Result<Self> {
        let closure = match form.grid().end() {
            EndCondition::Dirichlet => Closure::Dirichlet,
            EndCondition::Transparent => Closure::Transparent,
        };
        Self::with_arms(form, |_, _, len| Arm { len, closure })
    }

    /// `arm(mode, side, grid_len)` chooses each arm; `grid_len` is the number
    /// of slabs between the core and the end of the grid on that side.
    pub fn with_arms(form: &SymmetricForm, arm: impl Fn(usize, usize, usize) -> Arm) -> Result<Self> {
        let grid = form.grid();
        let tb = grid.transverse();
        let nt = tb.len();
        let inv_ds = 1.0 / grid.ds();
        let b = inv_ds * inv_ds;
        let core = form.core();
        let n = grid.slabs();
        let grid_len = [core.start, n - core.end];
        if grid_len[0] == 0 || grid_len[1] == 0 {
            return Err(Error::param("half_length", "the core region reaches the truncation end"));
        }
        let u = tb.modes();
        let ut = u.transpose();
        let refd = form.reference_diag();
        let refu = form.reference_upper();
        let mut diag = Vec::with_capacity(core.len());
        let mut upper = Vec::with_capacity(core.len());
        for k in core.clone() {
            let delta = CsrMatrix::lincomb(1.0, form.diag_block(k), -1.0, refd);
            let mut m = &ut * sparse_times_dense(&delta, u);
            let sym = (&m + m.transpose()) * 0.5;
            m = sym;
            for (i, e) in tb.energies().iter().enumerate() {
                m[(i, i)] += 2.0 * b + e;
            }
            diag.push(m);
            if k + 1 < core.end {
                let delta = CsrMatrix::lincomb(1.0, form.upper_block(k), -1.0, refu);
                let mut m = &ut * sparse_times_dense(&delta, u);
                for i in 0..nt {
                    m[(i, i)] -= b;
                }
                upper.push(m);
            }
        }
        let mut arms = Vec::with_capacity(nt);
        let mut offsets = Vec::with_capacity(nt);
        let mut len = core.len() * nt;
        for mode in 0..nt {
            let pair = [arm(mode, 0, grid_len[0]), arm(mode, 1, grid_len[1])];
            if pair[0].len == 0 || pair[1].len == 0 {
                return Err(Error::param("arm", "every arm needs at least one explicit slab"));
            }
            offsets.push([len, len + pair[0].len]);
            len += pair[0].len + pair[1].len;
            arms.push(pair);
        }
        Ok(Self {
            nt,
            b,
            ds: grid.ds(),
            energies: tb.energies().to_vec(),
            modes: u.clone(),
            core_s: core.clone().map(|k| grid.slab_s(k as isize)).collect(),
            core,
            diag,
            upper,
            arms,
            offsets,
            len,
            grid_slabs: n,
            half_length: grid.half_length(),
        })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn nt(&self) -> usize {
        self.nt
    }

    pub fn core(&self) -> Range<usize> {
        self.core.clone()
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn arm(&self, mode: usize, side: usize) -> Arm {
        self.arms[mode][side]
    }

    pub fn set_closure(&mut self, mode: usize, side: usize, closure: Closure) {
        self.arms[mode][side].closure = closure;
    }

    fn slab_s(&self, k: isize) -> f64 {
        -self.half_length + (k + 1) as f64 * self.ds
    }

    /// Slab index of entry `j` of an arm (may fall outside the grid).
    pub fn arm_slab(&self, side: usize, j: usize) -> isize {
        if side == 0 {
            self.core.start as isize - 1 - j as isize
        } else {
            (self.core.end + j) as isize
        }
    }

    /// Longitudinal position of every entry of a modal vector.
    pub fn positions(&self) -> Vec<f64> {
        let mut s = Vec::with_capacity(self.len);
        for &sk in &self.core_s {
            s.extend(core::iter::repeat(sk).take(self.nt));
        }
        for mode in 0..self.nt {
            for side in 0..2 {
                for j in 0..self.arms[mode][side].len {
                    s.push(self.slab_s(self.arm_slab(side, j)));
                }
            }
        }
        s
    }

    fn closure_term(&self, mode: usize, side: usize, tau: f64) -> f64 {
        match self.arms[mode][side].closure {
            Closure::Dirichlet => 0.0,
            Closure::Transparent => {
                let a = 2.0 * self.b + self.energies[mode] - tau;
                -self.b * self.b / chain_pivot(a, self.b)
            }
            Closure::Robin { ratio } => -self.b * ratio,
        }
    }

    /// `(A - tau) v`; the closures are evaluated at `tau`.
    pub fn apply_shifted(&self, v: &[f64], tau: f64) -> Vec<f64> {
        let (nt, b) = (self.nt, self.b);
        let nc = self.core.len();
        let mut y = vec![0.0; self.len];
        for k in 0..nc {
            let r = k * nt..(k + 1) * nt;
            let xk = nalgebra::DVectorView::from_slice(&v[r.clone()], nt);
            let mut acc = &self.diag[k] * xk - xk * tau;
            if k + 1 < nc {
                let xn = nalgebra::DVectorView::from_slice(&v[(k + 1) * nt..(k + 2) * nt], nt);
                acc += &self.upper[k] * xn;
            }
            if k > 0 {
                let xp = nalgebra::DVectorView::from_slice(&v[(k - 1) * nt..k * nt], nt);
                acc += self.upper[k - 1].tr_mul(&xp);
            }
            y[r].copy_from_slice(acc.as_slice());
        }
        for mode in 0..nt {
            for side in 0..2 {
                let arm = self.arms[mode][side];
                let off = self.offsets[mode][side];
                let inner = if side == 0 { mode } else { (nc - 1) * nt + mode };
                let a = 2.0 * b + self.energies[mode] - tau;
                y[inner] -= b * v[off];
                for j in 0..arm.len {
                    let mut s = a * v[off + j] - b * if j == 0 { v[inner] } else { v[off + j - 1] };
                    if j + 1 < arm.len {
                        s -= b * v[off + j + 1];
                    } else {
                        s += self.closure_term(mode, side, tau) * v[off + j];
                    }
                    y[off + j] = s;
                }
            }
        }
        y
    }

    /// Nodal slab-major vector on the grid; arm entries beyond it are dropped.
    pub fn to_nodal(&self, v: &[f64]) -> Vec<f64> {
        let nt = self.nt;
        let mut coef = vec![0.0; self.grid_slabs * nt];
        for (k, slab) in self.core.clone().enumerate() {
            coef[slab * nt..(slab + 1) * nt].copy_from_slice(&v[k * nt..(k + 1) * nt]);
        }
        for mode in 0..nt {
            for side in 0..2 {
                for j in 0..self.arms[mode][side].len {
                    let s = self.arm_slab(side, j);
                    if s >= 0 && (s as usize) < self.grid_slabs {
                        coef[s as usize * nt + mode] = v[self.offsets[mode][side] + j];
                    }
                }
            }
        }
        let mut out = vec![0.0; coef.len()];
        for k in 0..self.grid_slabs {
            let c = nalgebra::DVectorView::from_slice(&coef[k * nt..(k + 1) * nt], nt);
            out[k * nt..(k + 1) * nt].copy_from_slice((&self.modes * c).as_slice());
        }
        out
    }

    /// Inverse of [`to_nodal`](Self::to_nodal) on the grid part.
    pub fn from_nodal(&self, x: &[f64]) -> Vec<f64> {
        let nt = self.nt;
        let mut coef = vec![0.0; self.grid_slabs * nt];
        for k in 0..self.grid_slabs {
            let c = nalgebra::DVectorView::from_slice(&x[k * nt..(k + 1) * nt], nt);
            coef[k * nt..(k + 1) * nt].copy_from_slice(self.modes.tr_mul(&c).as_slice());
        }
        let mut v = vec![0.0; self.len];
        for (k, slab) in self.core.clone().enumerate() {
            v[k * nt..(k + 1) * nt].copy_from_slice(&coef[slab * nt..(slab + 1) * nt]);
        }
        for mode in 0..nt {
            for side in 0..2 {
                for j in 0..self.arms[mode][side].len {
                    let s = self.arm_slab(side, j);
                    if s >= 0 && (s as usize) < self.grid_slabs {
                        v[self.offsets[mode][side] + j] = coef[s as usize * nt + mode];
                    }
                }
            }
        }
        v
    }

    /// Block `L D L^T` of `A - tau`. Arm pivots run from the far end inward,
    /// then the core slabs left to right.
    pub fn factor(&self, tau: f64) -> Result<ShiftedFactor<'_>> {
        let (nt, b) = (self.nt, self.b);
        let nc = self.core.len();
        let tiny = 1e-14 * b;
        let mut negatives = 0;
        let mut pivots: Vec<[Vec<f64>; 2]> = Vec::with_capacity(nt);
        for mode in 0..nt {
            let a = 2.0 * b + self.energies[mode] - tau;
            let mut pair: [Vec<f64>; 2] = [Vec::new(), Vec::new()];
            for (side, p) in pair.iter_mut().enumerate() {
                let arm = self.arms[mode][side];
                let mut d = vec![0.0; arm.len];
                let mut prev = f64::NAN;
                for j in (0..arm.len).rev() {
                    let mut dj = if j + 1 == arm.len { a + self.closure_term(mode, side, tau) } else { a - b * b / prev };
                    if dj.abs() < tiny {
                        dj = tiny;
                    }
                    if dj < 0.0 {
                        negatives += 1;
                    }
                    d[j] = dj;
                    prev = dj;
                }
                *p = d;
            }
            pivots.push(pair);
        }
        let mut blocks = Vec::with_capacity(nc);
        let mut carry: Option<DMatrix<f64>> = None;
        for k in 0..nc {
            let mut s = self.diag[k].clone();
            for i in 0..nt {
                s[(i, i)] -= tau;
                if k == 0 {
                    s[(i, i)] -= b * b / pivots[i][0][0];
                }
                if k + 1 == nc {
                    s[(i, i)] -= b * b / pivots[i][1][0];
                }
            }
            if let Some(c) = carry.take() {
                s -= c;
            }
            let f = Ldl::factor(s)?;
            negatives += f.negatives();
            if k + 1 < nc {
                carry = Some(f.congruence(&self.upper[k]));
            }
            blocks.push(f);
        }
        Ok(ShiftedFactor { op: self, tau, pivots, blocks, negatives })
    }
}

/// Factorization of `A - tau` with its inertia.
pub struct ShiftedFactor<'a> {
    op: &'a ModalOperator,
    tau: f64,
    pivots: Vec<[Vec<f64>; 2]>,
    blocks: Vec<Ldl>,
    negatives: usize,
}

impl ShiftedFactor<'_> {
    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Number of eigenvalues below `tau`.
    pub fn negatives(&self) -> usize {
        self.negatives
    }

    pub fn solve(&self, r: &[f64]) -> Vec<f64> {
        let op = self.op;
        let (nt, b) = (op.nt, op.b);
        let nc = op.core.len();
        let mut z = r.to_vec();
        // arms, far end inward
        for mode in 0..nt {
            for side in 0..2 {
                let off = op.offsets[mode][side];
                let d = &self.pivots[mode][side];
                for j in (0..d.len() - 1).rev() {
                    z[off + j] += b * z[off + j + 1] / d[j + 1];
                }
                let inner = if side == 0 { mode } else { (nc - 1) * nt + mode };
                z[inner] += b * z[off] / d[0];
            }
        }
        // core forward: z_k -= C_{k-1}^T S_{k-1}^{-1} z_{k-1}
        let mut t: Vec<Vec<f64>> = Vec::with_capacity(nc);
        for k in 0..nc {
            if k > 0 {
                let prev = nalgebra::DVectorView::from_slice(&t[k - 1], nt);
                let corr = op.upper[k - 1].tr_mul(&prev);
                for i in 0..nt {
                    z[k * nt + i] -= corr[i];
                }
            }
            let mut tk = z[k * nt..(k + 1) * nt].to_vec();
            self.blocks[k].solve_in_place(&mut tk);
            t.push(tk);
        }
        let mut x = vec![0.0; z.len()];
        for k in (0..nc).rev() {
            let xs = if k + 1 == nc {
                t[k].clone()
            } else {
                let next = nalgebra::DVectorView::from_slice(&x[(k + 1) * nt..(k + 2) * nt], nt);
                let cx = &op.upper[k] * next;
                let mut v: Vec<f64> = (0..nt).map(|i| z[k * nt + i] - cx[i]).collect();
                self.blocks[k].solve_in_place(&mut v);
                v
            };
            x[k * nt..(k + 1) * nt].copy_from_slice(&xs);
        }
        for mode in 0..nt {
            for side in 0..2 {
                let off = op.offsets[mode][side];
                let d = &self.pivots[mode][side];
                let inner = if side == 0 { mode } else { (nc - 1) * nt + mode };
                x[off] = (z[off] + b * x[inner]) / d[0];
                for j in 1..d.len() {
                    x[off + j] = (z[off + j] + b * x[off + j - 1]) / d[j];
                }
            }
        }
        x
    }

    pub fn dim(&self) -> usize {
        self.blocks.first().map_or(0, |f| f.dim())
    }
}
