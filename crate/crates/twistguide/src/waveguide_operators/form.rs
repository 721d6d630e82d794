use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use super::grid::TruncatedTubeGrid;
use crate::cross_section::EdgeFunctional;
use crate::curve_geometry::{check_injectivity, ellipticity_bounds, metric_at, CurvatureProfile, InjectivityVerdict};
use crate::error::Result;
use crate::linalg::{CsrMatrix, TripletBuilder};

/// Which of the two equivalent sign conventions of the mixed derivative is used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TwistSign {
    /// `d1 psi - sigma d_tau psi`
    #[default]
    Minus,
    /// `d1 psi + sigma d_tau psi`
    Plus,
}

impl TwistSign {
    fn factor(self) -> f64 {
        match self {
            TwistSign::Minus => -1.0,
            TwistSign::Plus => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormKind {
    Laplacian,
    Twisted,
    Curved,
}

/// Discrete quadratic form on a truncated tube, stored by slab blocks.
///
/// The mass matrix is the identity: node values are normalized so that the
/// physical `L^2` product is `delta^2 ds` times the Euclidean one. Every slab
/// outside `core` carries the straight reference blocks `2/ds^2 + K` and
/// `-1/ds^2`, which is what lets the solvers treat the exterior mode by mode.
#[derive(Debug, Clone)]
pub struct SymmetricForm {
    grid: TruncatedTubeGrid,
    kind: FormKind,
    reference_diag: CsrMatrix,
    reference_upper: CsrMatrix,
    core: Range<usize>,
    core_diag: Vec<CsrMatrix>,
    core_upper: Vec<CsrMatrix>,
    warnings: Vec<String>,
}

/// Blocks of `sum_r w_r f_r f_r^T` for the functionals of one edge, split by
/// the left / right slab.
struct EdgeBlocks {
    ll: CsrMatrix,
    lr: CsrMatrix,
    rr: CsrMatrix,
}

impl EdgeBlocks {
    fn from_functionals(nt: usize, rows: impl IntoIterator<Item = (f64, EdgeFunctional)>) -> Self {
        let mut t = TripletBuilder::new(2 * nt, 2 * nt);
        for (w, f) in rows {
            f.accumulate(&mut t, 0, w);
        }
        let full = t.build();
        let (mut ll, mut lr, mut rr) =
            (TripletBuilder::new(nt, nt), TripletBuilder::new(nt, nt), TripletBuilder::new(nt, nt));
        for (i, j, v) in full.iter() {
            match (i < nt, j < nt) {
                (true, true) => ll.push(i, j, v),
                (true, false) => lr.push(i, j - nt, v),
                (false, false) => rr.push(i - nt, j - nt, v),
                (false, true) => {}
            }
        }
        Self { ll: ll.build(), lr: lr.build(), rr: rr.build() }
    }

    fn reference(nt: usize, inv_ds: f64) -> Self {
        Self::from_functionals(nt, (0..nt).map(|j| (1.0, EdgeFunctional { terms: vec![(j, -inv_ds), (nt + j, inv_ds)] })))
    }
}

fn add_term(f: &mut EdgeFunctional, i: usize, c: f64) {
    match f.terms.iter_mut().find(|t| t.0 == i) {
        Some(t) => t.1 += c,
        None => f.terms.push((i, c)),
    }
}

/// Per-edge and per-slab generators; `None` marks a reference piece.
trait Assembler {
    fn edge(&self, e: usize) -> Result<Option<EdgeBlocks>>;
    fn slab(&self, k: usize) -> Result<Option<CsrMatrix>>;
}

impl SymmetricForm {
    fn build(grid: &TruncatedTubeGrid, kind: FormKind, asm: &dyn Assembler, warnings: Vec<String>) -> Result<Self> {
        let nt = grid.nt();
        let n = grid.slabs();
        let inv_ds = 1.0 / grid.ds();
        let stiff = grid.transverse().stiffness();
        let reference = EdgeBlocks::reference(nt, inv_ds);
        let reference_diag = CsrMatrix::lincomb(1.0, &CsrMatrix::lincomb(1.0, &reference.rr, 1.0, &reference.ll), 1.0, stiff);

        let mut edges: Vec<(usize, EdgeBlocks)> = Vec::new();
        for e in 0..=n {
            if let Some(b) = asm.edge(e)? {
                edges.push((e, b));
            }
        }
        let mut slabs: Vec<(usize, CsrMatrix)> = Vec::new();
        for k in 0..n {
            if let Some(m) = asm.slab(k)? {
                slabs.push((k, m));
            }
        }
        let lo = edges.iter().map(|(e, _)| e - 1).chain(slabs.iter().map(|(k, _)| *k)).min();
        let hi = edges.iter().map(|(e, _)| e + 1).chain(slabs.iter().map(|(k, _)| k + 1)).max();
        let core = match (lo, hi) {
            (Some(a), Some(b)) => a..b,
            _ => n / 2..n / 2 + 1,
        };
        debug_assert!(core.end <= n);

        let edge_at = |e: usize| edges.iter().find(|(x, _)| *x == e).map_or(&reference, |(_, b)| b);
        let mut core_diag = Vec::with_capacity(core.len());
        let mut core_upper = Vec::with_capacity(core.len().saturating_sub(1));
        for k in core.clone() {
            let t = slabs.iter().find(|(x, _)| *x == k).map_or(stiff, |(_, m)| m);
            let d = CsrMatrix::lincomb(1.0, &CsrMatrix::lincomb(1.0, &edge_at(k).rr, 1.0, &edge_at(k + 1).ll), 1.0, t);
            core_diag.push(d);
            if k + 1 < core.end {
                core_upper.push(edge_at(k + 1).lr.clone());
            }
        }
        Ok(Self { grid: grid.clone(), kind, reference_diag, reference_upper: reference.lr, core, core_diag, core_upper, warnings })
    }

    pub fn grid(&self) -> &TruncatedTubeGrid {
        &self.grid
    }

    pub fn kind(&self) -> FormKind {
        self.kind
    }

    /// Discrete threshold `E1` of the section.
    pub fn e1(&self) -> f64 {
        self.grid.transverse().e1()
    }

    pub fn nt(&self) -> usize {
        self.grid.nt()
    }

    pub fn dofs(&self) -> usize {
        self.grid.dofs()
    }

    /// Slabs whose blocks differ from the straight reference.
    pub fn core(&self) -> Range<usize> {
        self.core.clone()
    }

    pub fn reference_diag(&self) -> &CsrMatrix {
        &self.reference_diag
    }

    pub fn reference_upper(&self) -> &CsrMatrix {
        &self.reference_upper
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn diag_block(&self, k: usize) -> &CsrMatrix {
        if self.core.contains(&k) {
            &self.core_diag[k - self.core.start]
        } else {
            &self.reference_diag
        }
    }

    /// Coupling block between slabs `k` and `k + 1`.
    pub fn upper_block(&self, k: usize) -> &CsrMatrix {
        if k >= self.core.start && k + 1 < self.core.end {
            &self.core_upper[k - self.core.start]
        } else {
            &self.reference_upper
        }
    }

    /// `A x` on slab-major nodal vectors.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let nt = self.nt();
        let n = self.grid.slabs();
        assert_eq!(x.len(), n * nt);
        let mut y = vec![0.0; x.len()];
        for k in 0..n {
            let r = k * nt..(k + 1) * nt;
            let mut t = vec![0.0; nt];
            self.diag_block(k).mul_vec(&x[r.clone()], &mut t);
            y[r.clone()].iter_mut().zip(&t).for_each(|(a, b)| *a += b);
            if k + 1 < n {
                let up = self.upper_block(k);
                let rn = (k + 1) * nt..(k + 2) * nt;
                up.mul_vec(&x[rn.clone()], &mut t);
                y[r.clone()].iter_mut().zip(&t).for_each(|(a, b)| *a += b);
                up.mul_transpose_add(&x[r], &mut y[rn]);
            }
        }
        y
    }

    /// `x^T A x`
    pub fn quadratic(&self, x: &[f64]) -> f64 {
        self.apply(x).iter().zip(x).map(|(a, b)| a * b).sum()
    }

    /// Assembled global matrix; meant for small grids and tests.
    pub fn to_csr(&self) -> CsrMatrix {
        let nt = self.nt();
        let n = self.grid.slabs();
        let mut t = TripletBuilder::new(n * nt, n * nt);
        for k in 0..n {
            for (i, j, v) in self.diag_block(k).iter() {
                t.push(k * nt + i, k * nt + j, v);
            }
            if k + 1 < n {
                for (i, j, v) in self.upper_block(k).iter() {
                    t.push(k * nt + i, (k + 1) * nt + j, v);
                    t.push((k + 1) * nt + j, k * nt + i, v);
                }
            }
        }
        t.build()
    }
}

struct Flat;

impl Assembler for Flat {
    fn edge(&self, _: usize) -> Result<Option<EdgeBlocks>> {
        Ok(None)
    }

    fn slab(&self, _: usize) -> Result<Option<CsrMatrix>> {
        Ok(None)
    }
}

/// Plain Dirichlet Laplacian of the truncated straight tube.
pub fn assemble_laplacian(grid: &TruncatedTubeGrid) -> Result<SymmetricForm> {
    SymmetricForm::build(grid, FormKind::Laplacian, &Flat, Vec::new())
}

struct Twist<'a> {
    grid: &'a TruncatedTubeGrid,
    sigma: &'a dyn Fn(f64) -> f64,
    sign: f64,
}

impl Assembler for Twist<'_> {
    fn edge(&self, e: usize) -> Result<Option<EdgeBlocks>> {
        let sg = (self.sigma)(self.grid.edge_s(e));
        if sg == 0.0 {
            return Ok(None);
        }
        let s = self.sign * sg;
        let nt = self.grid.nt();
        let inv_ds = 1.0 / self.grid.ds();
        let tan = self.grid.transverse().tangential();
        let rows = tan.rows();
        let mut out = Vec::with_capacity(rows.nrows());
        for r in 0..rows.nrows() {
            let mut f = EdgeFunctional::default();
            if r < nt {
                add_term(&mut f, r, -inv_ds);
                add_term(&mut f, nt + r, inv_ds);
            }
            let (cols, vals) = rows.row(r);
            for (&m, &c) in cols.iter().zip(vals) {
                add_term(&mut f, m, s * (0.5 * c));
                add_term(&mut f, nt + m, s * (0.5 * c));
            }
            out.push((tan.weights()[r], f));
        }
        Ok(Some(EdgeBlocks::from_functionals(nt, out)))
    }

    fn slab(&self, _: usize) -> Result<Option<CsrMatrix>> {
        Ok(None)
    }
}

/// Straight twisted form `||d1 psi -+ sigma d_tau psi||^2 + ||d2 psi||^2 + ||d3 psi||^2`.
///
/// `sigma` is sampled at the edge midpoints; the mixed operator is a single
/// first-order stencil per edge and the form is its weighted Gram matrix, so
/// it is symmetric and bounded below by `E1` exactly.
pub fn assemble_l_sigma(grid: &TruncatedTubeGrid, sigma: &dyn Fn(f64) -> f64, sign: TwistSign) -> Result<SymmetricForm> {
    let active: Vec<f64> = (0..=grid.slabs()).map(|e| grid.edge_s(e)).filter(|&s| sigma(s) != 0.0).collect();
    grid.check_support(active.first().zip(active.last()).map(|(a, b)| (*a, *b)))?;
    SymmetricForm::build(grid, FormKind::Twisted, &Twist { grid, sigma, sign: sign.factor() }, Vec::new())
}

struct Curved<'a> {
    grid: &'a TruncatedTubeGrid,
    profile: &'a CurvatureProfile,
}

impl Assembler for Curved<'_> {
    fn edge(&self, e: usize) -> Result<Option<EdgeBlocks>> {
        let p = self.profile;
        let s = self.grid.edge_s(e);
        let rho = p.kappa2(s) - p.theta_dot(s);
        if p.kappa1(s) == 0.0 && p.kappa1_dot(s) == 0.0 && rho == 0.0 {
            return Ok(None);
        }
        let nt = self.grid.nt();
        let inv_ds = 1.0 / self.grid.ds();
        let tb = self.grid.transverse();
        let tan = tb.tangential();
        let rows = tan.rows();
        let pts = tan.row_points();
        let mut out = Vec::with_capacity(rows.nrows());
        for r in 0..rows.nrows() {
            if r >= nt && rho == 0.0 {
                break;
            }
            let ms = metric_at(p, s, pts[r])?;
            let mut f = EdgeFunctional::default();
            if r < nt {
                let f1 = ms.grad_f[0];
                add_term(&mut f, r, -inv_ds - 0.5 * f1);
                add_term(&mut f, nt + r, inv_ds - 0.5 * f1);
            }
            if rho != 0.0 {
                let (cols, vals) = rows.row(r);
                for (&m, &c) in cols.iter().zip(vals) {
                    add_term(&mut f, m, rho * (0.5 * c));
                    add_term(&mut f, nt + m, rho * (0.5 * c));
                }
                if r < nt && ms.tau_f != 0.0 {
                    add_term(&mut f, r, -rho * (0.5 * ms.tau_f));
                    add_term(&mut f, nt + r, -rho * (0.5 * ms.tau_f));
                }
            }
            out.push((tan.weights()[r] / (ms.h * ms.h), f));
        }
        Ok(Some(EdgeBlocks::from_functionals(nt, out)))
    }

    fn slab(&self, k: usize) -> Result<Option<CsrMatrix>> {
        let p = self.profile;
        let s = self.grid.slab_s(k as isize);
        if p.kappa1(s) == 0.0 {
            return Ok(None);
        }
        let dom = self.grid.transverse().domain();
        let mut t = TripletBuilder::new(dom.len(), dom.len());
        for e in dom.edges() {
            let fm = metric_at(p, s, e.midpoint)?.grad_f[1 + e.axis];
            let mut f = EdgeFunctional::default();
            f.terms.push((e.a, -e.inv_len - 0.5 * fm));
            if let Some(b) = e.b {
                f.terms.push((b, e.inv_len - 0.5 * fm));
            }
            f.accumulate(&mut t, 0, e.theta);
        }
        Ok(Some(t.build()))
    }
}

/// Straightened Laplace-Beltrami form of the curved tube,
/// `q[psi] = sum (d_i psi - psi d_i F) G^{ij} (d_j psi - psi d_j F)` with
/// `F = log(h)/2`, coefficients at the staggered quadrature points.
///
/// Fails on an immersion violation; an inconclusive injectivity check is
/// attached as a warning.
pub fn assemble_q(grid: &TruncatedTubeGrid, profile: &CurvatureProfile) -> Result<SymmetricForm> {
    let a = grid.transverse().domain().radius();
    ellipticity_bounds(profile, a)?;
    grid.check_support(profile.active_interval())?;
    let mut warnings = Vec::new();
    let report = check_injectivity(profile, a);
    if report.verdict == InjectivityVerdict::Inconclusive {
        warnings.push(format!(
            "injectivity not certified: max{{4|I|^2 k1^2, 4a(k1 + k2)}} = {} >= 1",
            report.condition
        ));
    }
    SymmetricForm::build(grid, FormKind::Curved, &Curved { grid, profile }, warnings)
}
