use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::constants::{best_local_coefficient, MixedTermInputs};
use super::decomposition::SigmaDecomposition;
use crate::curve_geometry::Bump;
use crate::error::Result;
use crate::math::{self, sq};
use crate::waveguide_operators::{lowest_weighted, SymmetricForm, TruncatedTubeGrid, TwistSign, WeightedEigen, WeightedOptions};

/// Floating-point slack allowed on every discrete inequality margin.
pub const MARGIN_SLACK: f64 = 1e-8;

/// Measured weighted ground state against an explicit bound.
#[derive(Debug, Clone)]
pub struct HardyCheck {
    pub eigen: WeightedEigen,
    pub bound: Option<f64>,
    /// `mu* >= bound - slack`
    pub holds: bool,
    /// `mu* / bound`
    pub sharpness: Option<f64>,
}

impl HardyCheck {
    pub fn mu(&self) -> f64 {
        self.eigen.mu
    }
}

/// `1 / (1 + (s - s0)^2)`
pub fn hardy_weight(s0: f64) -> impl Fn(f64) -> f64 {
    move |s| 1.0 / (1.0 + sq(s - s0))
}

/// Lowest `mu` of `(A - E1) psi = mu W psi` for the assembled form.
pub fn verify_hardy(form: &SymmetricForm, s0: f64, opts: &WeightedOptions, bound: Option<f64>) -> Result<HardyCheck> {
    let eigen = lowest_weighted(form, &hardy_weight(s0), opts)?;
    let holds = eigen.mu >= 0.0 && bound.map_or(true, |b| eigen.mu >= b - MARGIN_SLACK);
    let sharpness = bound.filter(|b| *b > 0.0).map(|b| eigen.mu / b);
    Ok(HardyCheck { eigen, bound, holds, sharpness })
}

/// Twisted form with the transverse energy shifted by `E1`, restricted to the
/// edges and slabs whose position lies in `window`, for a nodal vector `psi`.
///
/// Summed over the whole line this is `l_sigma[psi] - E1 ||psi||^2` of the
/// assembled form (same normalization).
pub fn twisted_local_energy(grid: &TruncatedTubeGrid, sigma: &dyn Fn(f64) -> f64, sign: TwistSign, psi: &[f64], window: (f64, f64)) -> f64 {
    let nt = grid.nt();
    let n = grid.slabs();
    let inv_ds = 1.0 / grid.ds();
    let tb = grid.transverse();
    let tan = tb.tangential();
    let rows = tan.rows();
    let w = tan.weights();
    let factor = match sign {
        TwistSign::Minus => -1.0,
        TwistSign::Plus => 1.0,
    };
    let inside = |s: f64| s >= window.0 && s <= window.1;
    let zero = vec![0.0; nt];
    let slab = |k: usize| -> &[f64] { &psi[k * nt..(k + 1) * nt] };
    let mut total = 0.0;
    for e in 0..=n {
        let s = grid.edge_s(e);
        if !inside(s) {
            continue;
        }
        let left = if e == 0 { &zero[..] } else { slab(e - 1) };
        let right = if e == n { &zero[..] } else { slab(e) };
        let sg = factor * sigma(s);
        let mean: Vec<f64> = left.iter().zip(right).map(|(a, b)| 0.5 * (a + b)).collect();
        let tm = if sg != 0.0 { rows.apply(&mean) } else { Vec::new() };
        for r in 0..rows.nrows() {
            let mut x = if r < nt { (right[r] - left[r]) * inv_ds } else { 0.0 };
            if sg != 0.0 {
                x += sg * tm[r];
            }
            total += w[r] * x * x;
        }
    }
    let e1 = tb.e1();
    for k in 0..n {
        if inside(grid.slab_s(k as isize)) {
            let v = slab(k);
            let kv = tb.stiffness().apply(v);
            total += v.iter().zip(&kv).map(|(a, b)| a * b - e1 * a * a).sum::<f64>();
        }
    }
    total
}

/// `sum sigma(s_k)^2 |psi_k|^2` over slabs in `window`.
pub fn weighted_mass(grid: &TruncatedTubeGrid, sigma: &dyn Fn(f64) -> f64, psi: &[f64], window: (f64, f64)) -> f64 {
    let nt = grid.nt();
    (0..grid.slabs())
        .filter(|&k| {
            let s = grid.slab_s(k as isize);
            s >= window.0 && s <= window.1
        })
        .map(|k| sq(sigma(grid.slab_s(k as isize))) * psi[k * nt..(k + 1) * nt].iter().map(|x| x * x).sum::<f64>())
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalHardyCheck {
    pub a_j: f64,
    pub lambda: f64,
    /// Smallest `LHS - a_j lambda sum |sigma psi|^2` over unit trials.
    pub min_margin: f64,
    pub trials: usize,
}

impl LocalHardyCheck {
    pub fn holds(&self) -> bool {
        self.min_margin >= -MARGIN_SLACK
    }
}

/// Random trials `g(s) J1(t)` with `g` a short sine series vanishing at the
/// window ends, followed by the supplied vectors.
pub fn verify_local_hardy(
    grid: &TruncatedTubeGrid,
    sigma: &dyn Fn(f64) -> f64,
    sign: TwistSign,
    window: (f64, f64),
    a_j: f64,
    lambda: f64,
    random: usize,
    seed: u64,
    extra: &[Vec<f64>],
) -> LocalHardyCheck {
    let nt = grid.nt();
    let j1: Vec<f64> = grid.transverse().modes().column(0).iter().copied().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut uniform = move || (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64 - 0.5;
    let margin = |psi: &[f64]| {
        let norm2: f64 = psi.iter().map(|x| x * x).sum();
        let lhs = twisted_local_energy(grid, sigma, sign, psi, window);
        (lhs - a_j * lambda * weighted_mass(grid, sigma, psi, window)) / norm2
    };
    let mut min_margin = f64::INFINITY;
    let len = window.1 - window.0;
    for _ in 0..random {
        let modes = 1 + ((uniform() + 0.5) * 4.0) as usize;
        let coef: Vec<f64> = (0..modes).map(|_| uniform()).collect();
        let mut psi = vec![0.0; grid.dofs()];
        for k in 0..grid.slabs() {
            let x = (grid.slab_s(k as isize) - window.0) / len;
            if !(0.0..=1.0).contains(&x) {
                continue;
            }
            let g: f64 = coef.iter().enumerate().map(|(m, c)| c * math::sin((m + 1) as f64 * PI * x)).sum();
            for (dst, j) in psi[k * nt..(k + 1) * nt].iter_mut().zip(&j1) {
                *dst = g * j;
            }
        }
        if psi.iter().any(|x| *x != 0.0) {
            min_margin = min_margin.min(margin(&psi));
        }
    }
    for v in extra {
        min_margin = min_margin.min(margin(v));
    }
    LocalHardyCheck { a_j, lambda, min_margin, trials: random + extra.len() }
}

/// `sum_{i>=1} v_i^2 / x_i^2 / sum_{i>=1} ((v_i - v_{i-1}) / h)^2` with
/// `x_i = i h` and `v_0 = 0`; `v` holds `v_1, v_2, ...`.
pub fn hardy_1d_ratio(v: &[f64], h: f64) -> f64 {
    let (mut num, mut den, mut prev) = (0.0, 0.0, 0.0);
    for (i, &x) in v.iter().enumerate() {
        num += sq(x / ((i + 1) as f64 * h));
        den += sq((x - prev) / h);
        prev = x;
    }
    num / den
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = math::cos(PI * (i as f64 + 0.75) / (n as f64 + 0.5));
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = p1;
            dp = n as f64 * (z * p - p0) / (z * z - 1.0);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Radial test function `g(s) f(|t|)` on `A x omega` with
/// `f(r) = (1 - r^2 / r0^2)^3` for `r < r0` and `g` a `cos^2` bump filling `A`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialTrial {
    pub r0: f64,
    pub window: (f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingRow {
    pub n: f64,
    /// `int |grad' psi|^2 + |d1 psi + n sigma d_tau psi|^2 - E1 |psi|^2`
    pub lhs: f64,
    /// `a_j(n) lambda int |n sigma psi|^2`
    pub rhs: f64,
    /// Same with `a_j` frozen at the value of the first `n`.
    pub rhs_frozen: f64,
    pub a_j: f64,
}

/// Local Hardy inequality on the radial trial for `sigma = n sigma~`.
///
/// Integrals by Gauss-Legendre in `s` and `r` and the trapezoid rule in the
/// polar angle; `d_tau psi` is evaluated from the Cartesian gradient, so it
/// vanishes only to rounding.
pub fn remark_scaling(shape: &Bump, trial: RadialTrial, e1: f64, lambda: f64, a: f64, ns: &[f64], ds: f64) -> Result<Vec<ScalingRow>> {
    let (gx, gw) = gauss_legendre(24);
    let (lo, hi) = trial.window;
    let panels = 16;
    let ph = (hi - lo) / panels as f64;
    let g_bump = Bump::cos2(0.5 * (lo + hi), hi - lo, 1.0);
    let (rx, rw) = gauss_legendre(24);
    let angles = 64;
    let r0 = trial.r0;
    let f = |r: f64| if r < r0 { (1.0 - r * r / (r0 * r0)).powi(3) } else { 0.0 };
    let df = |r: f64| if r < r0 { -6.0 * r / (r0 * r0) * (1.0 - r * r / (r0 * r0)).powi(2) } else { 0.0 };

    let (supp_lo, supp_hi) = shape.support();
    let pad = 4.0 * ds;
    let mut frozen = None;
    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        let scaled = shape.with_amplitude(n * shape.amplitude);
        let decomp = SigmaDecomposition::new(&|s| scaled.value(s), &|s| scaled.derivative(s), (supp_lo - pad, supp_hi + pad), ds)?;
        let comp = decomp.components()[decomp.component_at(scaled.center).expect("centre lies in the support")];
        let a_j = best_local_coefficient(&MixedTermInputs::from_component(&comp, a, lambda))?.a_j;
        let (mut lhs, mut mass) = (0.0, 0.0);
        for p in 0..panels {
            for (xi, wi) in gx.iter().zip(&gw) {
                let s = lo + ph * (p as f64 + 0.5 * (xi + 1.0));
                let ws = 0.5 * ph * wi;
                let (g, dg) = (g_bump.value(s), g_bump.derivative(s));
                let sg = scaled.value(s);
                for (ri, rwi) in rx.iter().zip(&rw) {
                    let r = 0.5 * r0 * (ri + 1.0);
                    let wr = 0.5 * r0 * rwi * r * (2.0 * PI / angles as f64);
                    for m in 0..angles {
                        let phi = 2.0 * PI * m as f64 / angles as f64;
                        let t = [r * math::cos(phi), r * math::sin(phi)];
                        let (fr, dfr) = (f(r), df(r));
                        let psi = g * fr;
                        let grad = [g * dfr * t[0] / r, g * dfr * t[1] / r];
                        let d_tau = t[1] * grad[0] - t[0] * grad[1];
                        let d1 = dg * fr + sg * d_tau;
                        let w = ws * wr;
                        lhs += w * (grad[0] * grad[0] + grad[1] * grad[1] + d1 * d1 - e1 * psi * psi);
                        mass += w * sq(sg * psi);
                    }
                }
            }
        }
        let a1 = *frozen.get_or_insert(a_j);
        rows.push(ScalingRow { n, lhs, rhs: a_j * lambda * mass, rhs_frozen: a1 * lambda * mass, a_j });
    }
    Ok(rows)
}
