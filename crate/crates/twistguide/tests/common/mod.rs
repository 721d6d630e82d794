#![allow(dead_code)]

/// `J_0(x)` by its power series; accurate to rounding for `x < 10`.
pub fn bessel_j0(x: f64) -> f64 {
    let q = -x * x / 4.0;
    let (mut term, mut sum) = (1.0, 1.0);
    for k in 1..60 {
        term *= q / (k as f64 * k as f64);
        sum += term;
    }
    sum
}

/// First positive zero of `J_0` by bisection on `[2, 3]`.
pub fn j01() -> f64 {
    let (mut lo, mut hi) = (2.0, 3.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if bessel_j0(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

pub fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}
