//! Sparse storage and the eigen machinery shared by the 2-D and 3-D problems.

mod csr;
mod envelope;
mod lanczos;

pub use csr::{CsrMatrix, TripletBuilder};
pub use envelope::EnvelopeCholesky;
pub use lanczos::{lanczos_largest, LanczosOptions, LanczosOutput};

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `sum w_i a_i b_i`, or the plain dot product when `w` is `None`.
#[inline]
pub fn wdot(w: Option<&[f64]>, a: &[f64], b: &[f64]) -> f64 {
    match w {
        None => dot(a, b),
        Some(w) => w.iter().zip(a.iter().zip(b)).map(|(w, (x, y))| w * x * y).sum(),
    }
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    crate::math::sqrt(dot(a, a))
}

#[inline]
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

#[inline]
pub fn scale(alpha: f64, x: &mut [f64]) {
    for v in x {
        *v *= alpha;
    }
}
