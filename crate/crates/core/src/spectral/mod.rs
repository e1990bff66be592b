//! Fourier representation of periodic vector fields on `[0,1]^3` and the
//! linear multiplier operators acting on them.
//!
//! Convention: a field is `u(x) = Σ_k û(k) e^{2πi k·x}`. Gradients carry the
//! factor `2πi k`, while the fractional Laplacian `(-Δ)^γ` uses the bare
//! symbol `|k|^{2γ}`. The two conventions differ by `(2π)²` at `γ = 1`;
//! comparisons between the noise corrector and the Laplacian are always made
//! with the `2π` convention on both sides.

mod fft;
mod field;
mod grid;
mod ops;

pub use fft::Transformer;
pub use field::{Snapshot, SnapshotMode, SpectralField, DIVERGENCE_TOL};
pub use grid::{add, as_real, is_positive_half, neg, norm2, norm_inf, Grid, Wavevector};
pub use ops::{
    besov_norm, constant_drift, dealias, dyadic_block, fractional_laplacian, gradient_part,
    helmholtz_project, mean, project_mode, sobolev_norm, subtract_mean, MultiplierOp, Symbol,
};

use num_complex::Complex64;

/// Complex 3-vector: one Fourier coefficient of a vector field.
pub type CVec3 = [Complex64; 3];

pub const ZERO3: CVec3 = [Complex64 { re: 0.0, im: 0.0 }; 3];

pub const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

#[inline]
pub fn cnorm2(c: &CVec3) -> f64 {
    c[0].norm_sqr() + c[1].norm_sqr() + c[2].norm_sqr()
}

#[inline]
pub(crate) fn dot_real(c: &CVec3, r: [f64; 3]) -> Complex64 {
    c[0] * r[0] + c[1] * r[1] + c[2] * r[2]
}
