use alloc::format;
use alloc::vec::Vec;

use super::constants::birman_constant;
use crate::error::{Error, Result};
use crate::math;

/// Fraction of `||sigma||` below which a sample counts as zero.
pub const ZERO_FRACTION: f64 = 1e-12;

/// Levels `c` tried for `A' = {|sigma| >= c ||sigma||}`.
pub const SUBINTERVAL_LEVELS: [f64; 3] = [0.25, 0.5, 0.75];

/// One support interval of `sigma` with the data the local estimates consume.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportComponent {
    /// Closed interval `A_j`; it is also its own hull `B`.
    pub interval: (f64, f64),
    pub sup_sigma: f64,
    pub sup_sigma_dot: f64,
    /// `A' subset A_j` where `|sigma| >= sigma0`.
    pub sub: (f64, f64),
    pub sigma0: f64,
    /// Level `c` that produced `A'`.
    pub level: f64,
    /// `c(B, A')`
    pub birman: f64,
}

impl SupportComponent {
    pub fn len(&self) -> f64 {
        self.interval.1 - self.interval.0
    }

    pub fn is_empty(&self) -> bool {
        self.len() <= 0.0
    }

    pub fn contains(&self, s: f64) -> bool {
        s >= self.interval.0 && s <= self.interval.1
    }
}

/// `sigma` sampled on a uniform grid and split into support intervals.
#[derive(Debug, Clone)]
pub struct SigmaDecomposition {
    start: f64,
    ds: f64,
    samples: Vec<f64>,
    components: Vec<SupportComponent>,
    /// The whole support `A = supp sigma` treated as one set, hull `B`.
    aggregate: SupportComponent,
}

/// `sup |f|` on `[lo, hi]`: sample maximum polished by golden section.
fn refined_sup(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, ds: f64) -> f64 {
    let n = math::ceil((hi - lo) / ds) as usize;
    let h = (hi - lo) / n.max(1) as f64;
    let (mut best, mut at) = (0.0f64, lo);
    for i in 0..=n {
        let s = lo + i as f64 * h;
        let v = f(s).abs();
        if v > best {
            best = v;
            at = s;
        }
    }
    let g = (math::sqrt(5.0) - 1.0) / 2.0;
    let (mut a, mut b) = ((at - h).max(lo), (at + h).min(hi));
    for _ in 0..60 {
        let (x1, x2) = (b - g * (b - a), a + g * (b - a));
        if f(x1).abs() > f(x2).abs() {
            b = x2;
        } else {
            a = x1;
        }
    }
    best.max(f(0.5 * (a + b)).abs())
}

impl SigmaDecomposition {
    /// Samples `sigma` at `lo + i ds` up to `hi`. `sigma_dot` is its derivative.
    pub fn new(sigma: &dyn Fn(f64) -> f64, sigma_dot: &dyn Fn(f64) -> f64, range: (f64, f64), ds: f64) -> Result<Self> {
        let (lo, hi) = range;
        if !(ds > 0.0) || !(hi > lo) {
            return Err(Error::param("range", format!("need lo < hi and ds > 0, got ({lo}, {hi}), {ds}")));
        }
        let n = math::round((hi - lo) / ds) as usize;
        let samples: Vec<f64> = (0..=n).map(|i| sigma(lo + i as f64 * ds)).collect();
        let peak = samples.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if peak == 0.0 {
            return Err(Error::param("sigma", "vanishes on every sample"));
        }
        let zero = ZERO_FRACTION * peak;
        let mut runs = Vec::new();
        let mut i = 0;
        while i <= n {
            if samples[i].abs() > zero {
                let first = i;
                while i < n && samples[i + 1].abs() > zero {
                    i += 1;
                }
                runs.push((first, i));
            }
            i += 1;
        }
        if runs.first().is_some_and(|r| r.0 == 0) || runs.last().is_some_and(|r| r.1 == n) {
            return Err(Error::param("range", "sigma does not vanish at the ends of the sampled range"));
        }
        let mut d = Self { start: lo, ds, samples, components: Vec::new(), aggregate: placeholder() };
        d.components = runs.iter().map(|&(a, b)| d.component(a - 1, b + 1, sigma, sigma_dot)).collect();
        d.aggregate = d.component(runs[0].0 - 1, runs[runs.len() - 1].1 + 1, sigma, sigma_dot);
        Ok(d)
    }

    fn s(&self, i: usize) -> f64 {
        self.start + i as f64 * self.ds
    }

    fn component(&self, a: usize, b: usize, sigma: &dyn Fn(f64) -> f64, sigma_dot: &dyn Fn(f64) -> f64) -> SupportComponent {
        let interval = (self.s(a), self.s(b));
        let sup_sigma = refined_sup(sigma, interval.0, interval.1, self.ds);
        let sup_sigma_dot = refined_sup(sigma_dot, interval.0, interval.1, self.ds);
        let mut best: Option<SupportComponent> = None;
        for &c in &SUBINTERVAL_LEVELS {
            let cut = c * sup_sigma;
            // longest run of samples at or above the level
            let (mut run, mut cur) = ((0, 0, 0usize), None::<usize>);
            for i in a..=b {
                if self.samples[i].abs() >= cut {
                    let f = *cur.get_or_insert(i);
                    if i + 1 - f > run.2 {
                        run = (f, i, i + 1 - f);
                    }
                } else {
                    cur = None;
                }
            }
            if run.2 < 2 {
                continue;
            }
            let sub = (self.s(run.0), self.s(run.1));
            let sigma0 = self.samples[run.0..=run.1].iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
            let birman = birman_constant(interval, sub).expect("sub-interval has positive length");
            let cand = SupportComponent { interval, sup_sigma, sup_sigma_dot, sub, sigma0, level: c, birman };
            let score = |x: &SupportComponent| x.sigma0 * x.sigma0 / x.birman;
            if best.as_ref().map_or(true, |b| score(&cand) > score(b)) {
                best = Some(cand);
            }
        }
        best.unwrap_or(SupportComponent {
            // a support too narrow for the grid: fall back to the whole interval
            interval,
            sup_sigma,
            sup_sigma_dot,
            sub: interval,
            sigma0: 0.0,
            level: 0.0,
            birman: birman_constant(interval, interval).expect("positive length"),
        })
    }

    pub fn components(&self) -> &[SupportComponent] {
        &self.components
    }

    pub fn aggregate(&self) -> &SupportComponent {
        &self.aggregate
    }

    pub fn ds(&self) -> f64 {
        self.ds
    }

    /// `sum |A_j|`
    pub fn support_measure(&self) -> f64 {
        self.components.iter().map(|c| c.len()).sum()
    }

    /// Index of the component containing `s`.
    pub fn component_at(&self, s: f64) -> Option<usize> {
        self.components.iter().position(|c| c.contains(s))
    }

    /// Sample with the largest `|sigma|`.
    pub fn peak(&self) -> f64 {
        let i = (0..self.samples.len()).fold(0, |b, i| if self.samples[i].abs() > self.samples[b].abs() { i } else { b });
        self.s(i)
    }

    /// `min |sigma|` over `[s0 - b, s0 + b]`, sampled with the end points.
    pub fn min_on(&self, sigma: &dyn Fn(f64) -> f64, s0: f64, b: f64) -> f64 {
        let (lo, hi) = (s0 - b, s0 + b);
        let inner = (0..self.samples.len()).filter(|&i| self.s(i) > lo && self.s(i) < hi).map(|i| self.samples[i].abs());
        inner.chain([sigma(lo).abs(), sigma(hi).abs()]).fold(f64::INFINITY, f64::min)
    }

    /// Largest half-width of a window around `s0` on which `sigma` has no zero sample.
    pub fn max_window(&self, s0: f64) -> Option<f64> {
        let c = self.components[self.component_at(s0)?];
        Some((s0 - c.interval.0).min(c.interval.1 - s0))
    }
}

fn placeholder() -> SupportComponent {
    SupportComponent { interval: (0.0, 0.0), sup_sigma: 0.0, sup_sigma_dot: 0.0, sub: (0.0, 0.0), sigma0: 0.0, level: 0.0, birman: 0.0 }
}
