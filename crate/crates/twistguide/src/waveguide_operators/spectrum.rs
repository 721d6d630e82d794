use alloc::string::String;
use alloc::vec::Vec;
use alloc::format;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use super::form::SymmetricForm;
use super::grid::{EndCondition, TruncatedTubeGrid};
use super::modal::{Arm, Closure, ModalOperator, ShiftedFactor};
use crate::error::{Error, Result};
use crate::linalg::{dot, lanczos_largest, norm, LanczosOptions};
use crate::math;

/// Solver settings for [`eigenvalues_below_threshold`].
#[derive(Debug, Clone)]
pub struct SpectralOptions {
    /// At most this many eigenvalues are resolved.
    pub max_count: usize,
    /// Eigenvalues must lie below `E1 - gap_tol`; defaults to `1e-10 E1`.
    pub gap_tol: Option<f64>,
    /// Absolute bisection width; defaults to `1e-13 E1`.
    pub tol: Option<f64>,
    pub seed: u64,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        Self { max_count: 5, gap_tol: None, tol: None, seed: 0x7a11 }
    }
}

#[derive(Debug, Clone)]
pub struct SpectralResult {
    /// Eigenvalues below `threshold - gap_tol`, ascending.
    pub values: Vec<f64>,
    /// Nodal eigenvectors on the grid (slab-major, unit Euclidean norm).
    pub vectors: Vec<Vec<f64>>,
    /// `||(A - mu) psi|| / ||psi||` per pair.
    pub residuals: Vec<f64>,
    /// Total number of eigenvalues below `threshold - gap_tol`; may exceed `values.len()`.
    pub count_below: usize,
    pub threshold: f64,
    pub gap_tol: f64,
    /// With no eigenvalue below the threshold: the smallest eigenvalue above
    /// it (Dirichlet ends) or the threshold itself, where the continuum starts
    /// (transparent ends).
    pub diagnostic: Option<f64>,
    pub half_length: f64,
    pub ds: f64,
    pub delta: f64,
    pub end: EndCondition,
    pub factorizations: usize,
    pub warnings: Vec<String>,
}

impl SpectralResult {
    pub fn lowest(&self) -> Option<f64> {
        self.values.first().copied().or(self.diagnostic)
    }
}

/// Sylvester counts of `A - tau`, cached for bisection.
struct Counter<'a> {
    op: &'a ModalOperator,
    cache: Vec<(f64, usize)>,
    calls: usize,
}

impl<'a> Counter<'a> {
    fn new(op: &'a ModalOperator) -> Self {
        Self { op, cache: Vec::new(), calls: 0 }
    }

    fn factor(&mut self, tau: f64) -> Result<ShiftedFactor<'a>> {
        let mut t = tau;
        let mut last = None;
        for _ in 0..4 {
            self.calls += 1;
            match self.op.factor(t) {
                Ok(f) => return Ok(f),
                Err(e @ Error::NotPositiveDefinite { .. }) => {
                    last = Some(e);
                    t -= 1e-13 * t.abs().max(1.0);
                }
                Err(e) => return Err(e),
            }
        }
        Err(last.unwrap())
    }

    fn count(&mut self, tau: f64) -> Result<usize> {
        if let Some(&(_, c)) = self.cache.iter().find(|(t, _)| *t == tau) {
            return Ok(c);
        }
        let c = self.factor(tau)?.negatives();
        self.cache.push((tau, c));
        Ok(c)
    }

    /// The `(i+1)`-th eigenvalue inside `(lo, hi)`, where `count(lo) <= i < count(hi)`.
    fn bisect(&mut self, i: usize, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
        for &(t, c) in &self.cache {
            if c <= i && t > lo {
                lo = t;
            }
            if c > i && t < hi {
                hi = t;
            }
        }
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count(mid)? > i {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

fn random_vector(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64 - 0.5).collect()
}

fn normalize(v: &mut [f64]) {
    let n = norm(v);
    v.iter_mut().for_each(|x| *x /= n);
}

/// All eigenvalues of the form strictly below `E1 - gap_tol` (at most
/// `max_count` of them resolved), with eigenvectors and residuals.
///
/// Bisection on Sylvester inertia counts of the modal block factorization;
/// eigenvectors by inverse iteration at the converged shift. With transparent
/// ends the counts are those of the infinite discrete tube.
pub fn eigenvalues_below_threshold(form: &SymmetricForm, opts: &SpectralOptions) -> Result<SpectralResult> {
    if opts.max_count == 0 {
        return Err(Error::param("max_count", "must be at least 1"));
    }
    let op = ModalOperator::new(form)?;
    let e1 = form.e1();
    let gap_tol = opts.gap_tol.unwrap_or(1e-10 * e1);
    let tol = opts.tol.unwrap_or(1e-13 * e1);
    let thr = e1 - gap_tol;
    let grid = form.grid();
    let mut counter = Counter::new(&op);
    let total = counter.count(thr)?;
    let k = total.min(opts.max_count);

    let mut values = Vec::with_capacity(k);
    if k > 0 {
        let mut step = 1.0;
        while counter.count(e1 - step)? > 0 {
            step *= 2.0;
            if step > 1e12 {
                return Err(Error::NoConvergence { iterations: counter.calls, residual: step });
            }
        }
        for i in 0..k {
            values.push(counter.bisect(i, e1 - step, thr, tol)?);
        }
    }

    let mut diagnostic = None;
    if total == 0 {
        diagnostic = Some(match grid.end() {
            EndCondition::Transparent => e1,
            EndCondition::Dirichlet => {
                let mut step = 1e-3 * e1;
                while counter.count(thr + step)? == 0 {
                    step *= 2.0;
                }
                counter.bisect(0, thr, thr + step, tol)?
            }
        });
    }

    let mut modal_vecs: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut residuals = Vec::with_capacity(k);
    for (i, &mu) in values.iter().enumerate() {
        let f = counter.factor(mu)?;
        let mut x = random_vector(op.len(), opts.seed.wrapping_add(i as u64));
        let cluster: Vec<usize> = (0..i).filter(|&j| (values[j] - mu).abs() < 1e-8 * e1).collect();
        for _ in 0..4 {
            for &j in &cluster {
                let c = dot(&modal_vecs[j], &x);
                x.iter_mut().zip(&modal_vecs[j]).for_each(|(a, b)| *a -= c * b);
            }
            normalize(&mut x);
            x = f.solve(&x);
        }
        for &j in &cluster {
            let c = dot(&modal_vecs[j], &x);
            x.iter_mut().zip(&modal_vecs[j]).for_each(|(a, b)| *a -= c * b);
        }
        normalize(&mut x);
        let r = op.apply_shifted(&x, mu);
        residuals.push(norm(&r));
        modal_vecs.push(x);
    }
    let vectors = modal_vecs
        .iter()
        .map(|v| {
            let mut x = op.to_nodal(v);
            normalize(&mut x);
            x
        })
        .collect();
    let mut warnings: Vec<String> = form.warnings().to_vec();
    if total > k {
        warnings.push(format!("{total} eigenvalues below the threshold, {k} resolved"));
    }
    Ok(SpectralResult {
        values,
        vectors,
        residuals,
        count_below: total,
        threshold: e1,
        gap_tol,
        diagnostic,
        half_length: grid.half_length(),
        ds: grid.ds(),
        delta: grid.transverse().domain().delta(),
        end: grid.end(),
        factorizations: counter.calls,
        warnings,
    })
}

/// Number of eigenvalues below `tau` (one factorization).
pub fn count_below(form: &SymmetricForm, tau: f64) -> Result<usize> {
    let op = ModalOperator::new(form)?;
    Counter::new(&op).count(tau)
}

/// Lowest eigenvalue of the pencil `(A - E1) psi = mu W psi` with a diagonal
/// longitudinal weight `W = w(s)`.
#[derive(Debug, Clone)]
pub struct WeightedEigen {
    pub mu: f64,
    /// Nodal eigenvector on the grid, unit Euclidean norm.
    pub vector: Vec<f64>,
    /// `||(A - E1) psi - mu W psi|| / ||psi||`
    pub residual: f64,
    pub lanczos_steps: usize,
    /// Far-field passes (1 without a far field).
    pub passes: usize,
    pub far_ratio: Option<[f64; 2]>,
}

/// Far-field treatment for the weighted problem with transparent ends.
///
/// The lowest transverse mode is continued explicitly `extra_slabs` beyond
/// each end and closed with the power-law ratio of the decaying solution
/// of `-g'' = mu w g`, `w ~ (s - s0)^-2`; higher modes are eliminated exactly
/// with the weight dropped beyond the grid.
#[derive(Debug, Clone, Copy)]
pub struct FarField {
    pub s0: f64,
    pub extra_slabs: usize,
}

#[derive(Debug, Clone)]
pub struct WeightedOptions {
    pub far_field: Option<FarField>,
    pub max_passes: usize,
    pub lanczos: LanczosOptions,
}

impl Default for WeightedOptions {
    fn default() -> Self {
        Self { far_field: None, max_passes: 6, lanczos: LanczosOptions { nev: 1, max_iter: 0, tol: 1e-12, seed: 0x4a4d } }
    }
}

/// Exponent of the recessive far-field solution `|s - s0|^alpha`.
fn far_exponent(mu: f64) -> f64 {
    if mu >= 0.25 {
        0.5
    } else {
        0.5 - math::sqrt(0.25 - mu)
    }
}

pub fn lowest_weighted(form: &SymmetricForm, weight: &dyn Fn(f64) -> f64, opts: &WeightedOptions) -> Result<WeightedEigen> {
    let e1 = form.e1();
    let grid: &TruncatedTubeGrid = form.grid();
    let mut op = match (opts.far_field, grid.end()) {
        (Some(ff), EndCondition::Transparent) => ModalOperator::with_arms(form, |mode, _, len| {
            if mode == 0 {
                Arm { len: len + ff.extra_slabs, closure: Closure::Robin { ratio: 1.0 } }
            } else {
                Arm { len, closure: Closure::Transparent }
            }
        })?,
        (Some(_), EndCondition::Dirichlet) => {
            return Err(Error::param("far_field", "requires transparent ends"));
        }
        (None, _) => ModalOperator::new(form)?,
    };
    let w: Vec<f64> = op.positions().iter().map(|&s| weight(s)).collect();
    if w.iter().any(|&x| !(x > 0.0)) {
        return Err(Error::param("weight", "must be positive"));
    }
    let mut lopts = opts.lanczos.clone();
    if lopts.max_iter == 0 {
        lopts.max_iter = (4e7 / op.len() as f64).clamp(40.0, 300.0) as usize;
    }
    let mut mu = f64::NAN;
    let mut passes = 0;
    let mut ratios = None;
    let mut last = None;
    for _ in 0..opts.max_passes.max(1) {
        passes += 1;
        let f = op.factor(e1)?;
        if f.negatives() > 0 {
            return Err(Error::NotPositiveDefinite { index: f.negatives() });
        }
        let out = lanczos_largest(
            op.len(),
            Some(&w),
            |v| {
                let wv: Vec<f64> = v.iter().zip(&w).map(|(a, b)| a * b).collect();
                f.solve(&wv)
            },
            &lopts,
        )?;
        let new_mu = 1.0 / out.values[0];
        let done = (new_mu - mu).abs() <= 1e-10 * new_mu.abs();
        mu = new_mu;
        last = Some(out);
        let Some(ff) = opts.far_field else { break };
        if done {
            break;
        }
        let alpha = far_exponent(mu);
        let mut pair = [0.0; 2];
        for (side, r) in pair.iter_mut().enumerate() {
            let len = op.arm(0, side).len;
            let s_last = grid.slab_s(op.arm_slab(side, len - 1));
            let s_next = grid.slab_s(op.arm_slab(side, len));
            *r = math::powf((s_next - ff.s0).abs() / (s_last - ff.s0).abs(), alpha);
            op.set_closure(0, side, Closure::Robin { ratio: *r });
        }
        ratios = Some(pair);
    }
    let out = last.unwrap();
    let x = out.vectors[0].clone();
    let kx = op.apply_shifted(&x, e1);
    let r: Vec<f64> = kx.iter().zip(&x).zip(&w).map(|((a, b), c)| a - mu * c * b).collect();
    let residual = norm(&r) / norm(&x);
    let mut vector = op.to_nodal(&x);
    normalize(&mut vector);
    Ok(WeightedEigen { mu, vector, residual, lanczos_steps: out.iterations, passes, far_ratio: ratios })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruncationRow {
    pub half_length: f64,
    /// Lowest eigenvalue below the threshold, or the diagnostic value.
    pub lowest: f64,
    pub count_below: usize,
    pub residual: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct TruncationStudy {
    pub rows: Vec<TruncationRow>,
    pub threshold: f64,
    /// `|lowest(L_last) - lowest(L_prev)|` when both lie below the threshold.
    pub last_change: Option<f64>,
}

impl TruncationStudy {
    /// Cauchy criterion on the last two lengths.
    pub fn converged(&self, tol: f64) -> bool {
        self.last_change.is_some_and(|d| d < tol)
    }
}

/// Repeats the spectral computation on growing truncation lengths.
pub fn truncation_study(
    base: &TruncatedTubeGrid,
    lengths: &[f64],
    build: &dyn Fn(&TruncatedTubeGrid) -> Result<SymmetricForm>,
    opts: &SpectralOptions,
) -> Result<TruncationStudy> {
    if lengths.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::param("lengths", "must be increasing"));
    }
    let mut rows = Vec::with_capacity(lengths.len());
    for &l in lengths {
        let grid = base.with_half_length(l)?;
        let res = eigenvalues_below_threshold(&build(&grid)?, opts)?;
        rows.push(TruncationRow {
            half_length: l,
            lowest: res.lowest().unwrap_or(f64::NAN),
            count_below: res.count_below,
            residual: res.residuals.first().copied(),
        });
    }
    let last_change = match rows.as_slice() {
        [.., a, b] if a.count_below > 0 && b.count_below > 0 => Some((b.lowest - a.lowest).abs()),
        _ => None,
    };
    Ok(TruncationStudy { rows, threshold: base.transverse().e1(), last_change })
}
