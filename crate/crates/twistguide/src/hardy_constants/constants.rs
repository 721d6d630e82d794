use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::decomposition::{SigmaDecomposition, SupportComponent};
use crate::error::{Error, Result};
use crate::math::{self, sq};

/// `c(L, L') = max{2 + 16 (|L| / |L'|)^2, 4 |L|^2}`.
pub fn birman_constant(outer: (f64, f64), inner: (f64, f64)) -> Result<f64> {
    let (l, lp) = (outer.1 - outer.0, inner.1 - inner.0);
    if !(lp > 0.0) || !(l > 0.0) {
        return Err(Error::param("inner", format!("intervals need positive length, got {l} and {lp}")));
    }
    if inner.0 < outer.0 || inner.1 > outer.1 {
        return Err(Error::param("inner", "must lie inside the outer interval"));
    }
    Ok((2.0 + 16.0 * sq(l / lp)).max(4.0 * l * l))
}

/// Trial function for [`birman_inequality_check`].
#[derive(Debug, Clone, PartialEq)]
pub enum Trial {
    /// Continuous piecewise-linear interpolant of `values` on a uniform partition of the outer interval.
    PiecewiseLinear(Vec<f64>),
    /// `c0 + sum_k (a_k cos(k pi x / l) + b_k sin(k pi x / l))` on `x = s - lo`.
    Fourier { c0: f64, cos: Vec<f64>, sin: Vec<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BirmanCheck {
    pub constant: f64,
    pub max_ratio: f64,
    /// `constant - max_ratio`
    pub margin: f64,
    pub trials: usize,
}

/// `||f||^2_outer / (||f||^2_inner + ||f'||^2_outer)`; integrals are exact for
/// piecewise-linear trials and use composite Simpson with 512 intervals otherwise.
pub fn birman_ratio(outer: (f64, f64), inner: (f64, f64), f: &Trial) -> f64 {
    match f {
        Trial::PiecewiseLinear(v) => {
            let m = v.len() - 1;
            let h = (outer.1 - outer.0) / m as f64;
            // exact integral of a squared linear piece over [x0, x1] within a cell
            let piece = |a: f64, b: f64, x0: f64, x1: f64| {
                let (fa, fb) = (a + (b - a) * x0, a + (b - a) * x1);
                (x1 - x0) * (fa * fa + fa * fb + fb * fb) / 3.0
            };
            let (mut all, mut sub, mut grad) = (0.0, 0.0, 0.0);
            for i in 0..m {
                let (a, b) = (v[i], v[i + 1]);
                let c0 = outer.0 + i as f64 * h;
                all += h * piece(a, b, 0.0, 1.0);
                grad += sq(b - a) / h;
                let (x0, x1) = (((inner.0 - c0) / h).clamp(0.0, 1.0), ((inner.1 - c0) / h).clamp(0.0, 1.0));
                if x1 > x0 {
                    sub += h * piece(a, b, x0, x1);
                }
            }
            all / (sub + grad)
        }
        Trial::Fourier { c0, cos, sin } => {
            let l = outer.1 - outer.0;
            let eval = |s: f64| {
                let x = s - outer.0;
                let (mut v, mut d) = (*c0, 0.0);
                for (k, (a, b)) in cos.iter().zip(sin).enumerate() {
                    let w = (k + 1) as f64 * PI / l;
                    v += a * math::cos(w * x) + b * math::sin(w * x);
                    d += w * (b * math::cos(w * x) - a * math::sin(w * x));
                }
                (v, d)
            };
            let simpson = |lo: f64, hi: f64, g: &dyn Fn(f64) -> f64| {
                let n = 512;
                let h = (hi - lo) / n as f64;
                let mut acc = g(lo) + g(hi);
                for i in 1..n {
                    acc += if i % 2 == 1 { 4.0 } else { 2.0 } * g(lo + i as f64 * h);
                }
                acc * h / 3.0
            };
            let all = simpson(outer.0, outer.1, &|s| sq(eval(s).0));
            let grad = simpson(outer.0, outer.1, &|s| sq(eval(s).1));
            let sub = simpson(inner.0, inner.1, &|s| sq(eval(s).0));
            all / (sub + grad)
        }
    }
}

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

/// Random trials, alternating piecewise-linear and Fourier, deterministic in `seed`.
pub fn random_trials(count: usize, seed: u64) -> Vec<Trial> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            if i % 2 == 0 {
                let m = 2 + (rng.next_u64() % 40) as usize;
                Trial::PiecewiseLinear((0..=m).map(|_| 2.0 * uniform(&mut rng) - 1.0).collect())
            } else {
                let k = 1 + (rng.next_u64() % 8) as usize;
                let mut coef = |n: usize| -> Vec<f64> { (0..n).map(|j| (2.0 * uniform(&mut rng) - 1.0) / (1 + j) as f64).collect() };
                let c0 = coef(1)[0];
                Trial::Fourier { c0, cos: coef(k), sin: coef(k) }
            }
        })
        .collect()
}

/// Largest measured ratio over the trials against `c(L, L')`.
pub fn birman_inequality_check(outer: (f64, f64), inner: (f64, f64), trials: &[Trial]) -> Result<BirmanCheck> {
    let constant = birman_constant(outer, inner)?;
    let max_ratio = trials.iter().map(|t| birman_ratio(outer, inner, t)).filter(|r| r.is_finite()).fold(0.0, f64::max);
    Ok(BirmanCheck { constant, max_ratio, margin: constant - max_ratio, trials: trials.len() })
}

/// Raw inputs of the mixed-term estimate on one support set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixedTermInputs {
    pub sup_sigma: f64,
    pub sup_sigma_dot: f64,
    /// Radius of the cross-section about the origin.
    pub a: f64,
    /// `c(B, A')`
    pub birman: f64,
    pub lambda: f64,
    pub sigma0: f64,
}

impl MixedTermInputs {
    pub fn from_component(c: &SupportComponent, a: f64, lambda: f64) -> Self {
        Self { sup_sigma: c.sup_sigma, sup_sigma_dot: c.sup_sigma_dot, a, birman: c.birman, lambda, sigma0: c.sigma0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixedTerm {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub gamma_tilde: f64,
    pub gamma: f64,
}

/// `c1 = ||sigma||^2 a^2`, `c2 = ||sigma'||^2 a^2`, `c3 = c2 c(B,A') / (lambda sigma0^2)`,
/// `gamma~ = max{sqrt(c3) ||sigma||, c3 / (2 beta), c3 lambda sigma0^2 / alpha}`,
/// `gamma = gamma~ + 2 c1 / alpha`.
pub fn mixed_term_gamma(inp: &MixedTermInputs, alpha: f64, beta: f64) -> Result<MixedTerm> {
    if !(inp.lambda > 0.0) {
        return Err(Error::HardyUnavailable { lambda: inp.lambda });
    }
    if !(alpha > 0.0) || !(beta > 0.0) {
        return Err(Error::param("alpha", format!("alpha = {alpha} and beta = {beta} must be positive")));
    }
    if !(inp.sigma0 > 0.0) {
        return Err(Error::param("sigma0", "sigma has no positive level on the chosen sub-interval"));
    }
    let a2 = inp.a * inp.a;
    let c1 = sq(inp.sup_sigma) * a2;
    let c2 = sq(inp.sup_sigma_dot) * a2;
    let s02 = sq(inp.sigma0);
    let c3 = c2 * inp.birman / (inp.lambda * s02);
    let gamma_tilde = (math::sqrt(c3) * inp.sup_sigma).max(c3 / (2.0 * beta)).max(c3 * inp.lambda * s02 / alpha);
    Ok(MixedTerm { c1, c2, c3, gamma_tilde, gamma: gamma_tilde + 2.0 * c1 / alpha })
}

/// `beta` grid of the local coefficient scan.
pub fn beta_grid() -> Vec<f64> {
    (1..20).map(|i| i as f64 / 20.0).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalCoefficient {
    pub beta: f64,
    /// `gamma(beta, j) = max{1/2, gamma_{1,beta}}`
    pub gamma: f64,
    pub a_j: f64,
}

/// `a_j = min{||sigma||^-2, (1 - beta) / gamma(beta, j)} / 2` for one `beta`.
pub fn local_hardy_coefficient(sup_sigma: f64, beta: f64, gamma_beta: f64) -> f64 {
    0.5 * (1.0 / sq(sup_sigma)).min((1.0 - beta) / gamma_beta)
}

/// Scans `beta` and returns the largest `a_j`.
pub fn best_local_coefficient(inp: &MixedTermInputs) -> Result<LocalCoefficient> {
    let mut best: Option<LocalCoefficient> = None;
    for beta in beta_grid() {
        let gamma = mixed_term_gamma(inp, 1.0, beta)?.gamma.max(0.5);
        let a_j = local_hardy_coefficient(inp.sup_sigma, beta, gamma);
        if best.map_or(true, |b| a_j > b.a_j) {
            best = Some(LocalCoefficient { beta, gamma, a_j });
        }
    }
    Ok(best.expect("non-empty beta grid"))
}

/// Which power of `min_J |sigma|` enters the global bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MinSigmaPower {
    /// As in the displayed formula.
    #[default]
    Squared,
    /// As in the prose preceding it.
    Linear,
}

/// `c_h >= [(16 + 2 b^2) / (b^2 c0 lambda m) + 16 (gamma_alpha / (1 - alpha) + 1)]^-1`
/// with `m = min_J |sigma|^2` or `min_J |sigma|`.
pub fn global_hardy_bound(b: f64, c0: f64, lambda: f64, min_sigma: f64, gamma_alpha: f64, alpha: f64, power: MinSigmaPower) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::HardyUnavailable { lambda });
    }
    if !(min_sigma > 0.0) {
        return Err(Error::param("min_sigma", "sigma vanishes on the window"));
    }
    if !(alpha > 0.0 && alpha < 1.0) || !(b > 0.0) || !(c0 > 0.0) {
        return Err(Error::param("alpha", format!("need alpha in (0,1), b > 0, c0 > 0; got {alpha}, {b}, {c0}")));
    }
    let m = match power {
        MinSigmaPower::Squared => min_sigma * min_sigma,
        MinSigmaPower::Linear => min_sigma,
    };
    let inv = (16.0 + 2.0 * b * b) / (b * b * c0 * lambda * m) + 16.0 * (gamma_alpha / (1.0 - alpha) + 1.0);
    Ok(1.0 / inv)
}

/// `alpha` grid of the global optimization.
pub fn alpha_grid() -> Vec<f64> {
    (1..10).map(|i| i as f64 / 10.0).collect()
}

/// Dyadic fractions `k / 2^depth` of the maximal window.
pub fn window_fractions(depth: u32) -> Vec<f64> {
    let n = 1usize << depth;
    (1..n).map(|k| k as f64 / n as f64).collect()
}

/// One ledger line for reports.
#[derive(Debug, Clone, PartialEq)]
pub struct LedgerEntry {
    pub name: &'static str,
    pub value: f64,
    pub formula: &'static str,
    pub inputs: String,
}

/// Every constant of the Hardy chain with the inputs that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantsLedger {
    pub lambda: f64,
    pub a: f64,
    pub s0: f64,
    pub alpha: f64,
    /// Window half-width.
    pub b: f64,
    pub min_sigma: f64,
    pub power: MinSigmaPower,
    /// Mixed-term constants on the whole support at `(alpha, 1)`.
    pub mixed: MixedTerm,
    pub birman: f64,
    pub gamma_alpha: f64,
    /// `a_j` with its `beta`, per support component.
    pub local: Vec<LocalCoefficient>,
    /// Component containing the window.
    pub j_star: usize,
    /// Identified with `a_{j*}`.
    pub c0: f64,
    pub c_h: f64,
}

impl ConstantsLedger {
    /// Optimizes the global bound over `alpha`, the window half-width and,
    /// when `s0` is `None`, takes the window centre at the peak of `|sigma|`.
    pub fn evaluate(
        decomp: &SigmaDecomposition,
        sigma: &dyn Fn(f64) -> f64,
        lambda: f64,
        a: f64,
        s0: Option<f64>,
        power: MinSigmaPower,
    ) -> Result<Self> {
        if !(lambda > 0.0) {
            return Err(Error::HardyUnavailable { lambda });
        }
        let local = decomp
            .components()
            .iter()
            .map(|c| best_local_coefficient(&MixedTermInputs::from_component(c, a, lambda)))
            .collect::<Result<Vec<_>>>()?;
        let s0 = s0.unwrap_or_else(|| decomp.peak());
        let j_star = decomp.component_at(s0).ok_or_else(|| Error::param("s0", format!("sigma vanishes at {s0}")))?;
        let b_max = decomp.max_window(s0).expect("s0 lies in a component");
        let c0 = local[j_star].a_j;
        let agg = MixedTermInputs::from_component(decomp.aggregate(), a, lambda);
        let mut best: Option<Self> = None;
        for alpha in alpha_grid() {
            let mixed = mixed_term_gamma(&agg, alpha, 1.0)?;
            let gamma_alpha = mixed.gamma.max(1.0);
            for f in window_fractions(4) {
                let b = f * b_max;
                let min_sigma = decomp.min_on(sigma, s0, b);
                if !(min_sigma > 0.0) {
                    continue;
                }
                let c_h = global_hardy_bound(b, c0, lambda, min_sigma, gamma_alpha, alpha, power)?;
                if best.as_ref().map_or(true, |x| c_h > x.c_h) {
                    best = Some(Self {
                        lambda,
                        a,
                        s0,
                        alpha,
                        b,
                        min_sigma,
                        power,
                        mixed,
                        birman: agg.birman,
                        gamma_alpha,
                        local: local.clone(),
                        j_star,
                        c0,
                        c_h,
                    });
                }
            }
        }
        best.ok_or_else(|| Error::param("sigma", "no window with positive min |sigma|"))
    }

    pub fn entries(&self) -> Vec<LedgerEntry> {
        let m = &self.mixed;
        let aj = &self.local[self.j_star];
        let min_formula = match self.power {
            MinSigmaPower::Squared => "c_h = [(16 + 2b^2)/(b^2 c0 lambda min_J|sigma|^2) + 16(gamma_alpha/(1-alpha) + 1)]^-1",
            MinSigmaPower::Linear => "c_h = [(16 + 2b^2)/(b^2 c0 lambda min_J|sigma|) + 16(gamma_alpha/(1-alpha) + 1)]^-1",
        };
        let mut out = vec![
            LedgerEntry { name: "lambda", value: self.lambda, formula: "inf (||grad' phi||^2 - E1||phi||^2 + ||d_tau phi||^2)/||phi||^2", inputs: String::new() },
            LedgerEntry { name: "a", value: self.a, formula: "sup_{t in omega} |t|", inputs: String::new() },
            LedgerEntry { name: "c(B,A')", value: self.birman, formula: "max{2 + 16(|B|/|A'|)^2, 4|B|^2}", inputs: String::new() },
            LedgerEntry { name: "c1", value: m.c1, formula: "||sigma|A||^2 a^2", inputs: format!("a={}", self.a) },
            LedgerEntry { name: "c2", value: m.c2, formula: "||sigma'|A||^2 a^2", inputs: format!("a={}", self.a) },
            LedgerEntry { name: "c3", value: m.c3, formula: "c2 c(B,A') / (lambda sigma0^2)", inputs: String::new() },
            LedgerEntry {
                name: "gamma_tilde",
                value: m.gamma_tilde,
                formula: "max{sqrt(c3)||sigma||, c3/(2 beta), c3 lambda sigma0^2/alpha}",
                inputs: format!("alpha={}, beta=1", self.alpha),
            },
            LedgerEntry { name: "gamma", value: m.gamma, formula: "gamma_tilde + 2 c1/alpha", inputs: format!("alpha={}", self.alpha) },
            LedgerEntry { name: "gamma_alpha", value: self.gamma_alpha, formula: "max{1, gamma_{alpha,1}}", inputs: String::new() },
        ];
        for (j, l) in self.local.iter().enumerate() {
            out.push(LedgerEntry {
                name: "a_j",
                value: l.a_j,
                formula: "min{||sigma|A_j||^-2, (1-beta)/gamma(beta,j)}/2, gamma(beta,j) = max{1/2, gamma_{1,beta}}",
                inputs: format!("j={j}, beta={}, gamma={}", l.beta, l.gamma),
            });
        }
        out.push(LedgerEntry { name: "c0", value: self.c0, formula: "a_{j*} of the component A_{j*} containing J", inputs: format!("j*={}, beta={}", self.j_star, aj.beta) });
        out.push(LedgerEntry { name: "min_J|sigma|", value: self.min_sigma, formula: "min over J = [s0-b, s0+b]", inputs: format!("s0={}, b={}", self.s0, self.b) });
        out.push(LedgerEntry { name: "c_h", value: self.c_h, formula: min_formula, inputs: format!("alpha={}, b={}", self.alpha, self.b) });
        out
    }
}
