use serde::Serialize;

use super::basis::NoiseBasis;
use super::theta::ThetaSpectrum;
use super::transport::{require_basis_covers, transport_mode_apply};
use crate::error::Result;
use crate::spectral::{is_positive_half, neg, SpectralField, Transformer, Wavevector, TWO_PI};

/// Mismatch above which a pair is flagged.
pub const COVARIANCE_TOL: f64 = 1e-10;

/// One conjugate pair `{k, -k}`.
#[derive(Debug, Clone, Serialize)]
pub struct PairCovariance {
    pub k: Wavevector,
    /// `tr C` of the complex formulation, per unit time.
    pub complex_trace: f64,
    /// `tr C` of the real `ξ` formulation, per unit time.
    pub real_trace: f64,
    /// `real_trace / complex_trace`; `None` when both vanish.
    pub ratio: Option<f64>,
    /// `‖C_complex - C_real‖_F / ‖C_complex‖_F` (absolute when `C_complex = 0`).
    pub mismatch: f64,
    pub flagged: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CovarianceReport {
    pub pairs: Vec<PairCovariance>,
    pub max_mismatch: f64,
    pub flagged: bool,
}

/// Compares, pair by pair, the one-step covariance of the forcing
/// `θ_k Σ_α (ℙ[(σ_{k,α}·∇)v] ΔW^{k,α} + ℙ[(σ_{-k,α}·∇)v] ΔW^{-k,α})` with that of
/// `θ_k Σ_α (ℙ[(ξ_{k,α}·∇)v] ΔB^{k,α} + ℙ[(ξ_{-k,α}·∇)v] ΔB^{-k,α})`, where
/// `ξ_{k,α} = 2 Re σ_{k,α}` and `ξ_{-k,α} = 2 Im σ_{k,α}` for `k` in the positive half.
///
/// The complex side is expanded from `ΔW = ΔB^{k} + iΔB^{-k}` with the
/// single-mode transport operator; the real side advects by `ξ` sampled on
/// the grid. Both covariance operators are finite rank and are compared
/// through their generating fields.
pub fn real_noise_covariance_check(
    theta: &ThetaSpectrum,
    basis: &NoiseBasis,
    v: &SpectralField,
) -> Result<CovarianceReport> {
    require_basis_covers(theta, basis)?;
    let grid = v.grid();
    let mut transformer = Transformer::new(grid);
    let i = num_complex::Complex64::new(0.0, 1.0);
    let mut pairs = Vec::new();
    for &(k, t) in theta.entries() {
        if !is_positive_half(k) {
            continue;
        }
        let frame = basis.frame(k).expect("covered by basis");
        let mut complex_gen = Vec::with_capacity(4);
        let mut real_gen = Vec::with_capacity(4);
        for (alpha, a) in frame.iter().enumerate() {
            let gp = transport_mode_apply(v, k, alpha, basis)?;
            let gm = transport_mode_apply(v, neg(k), alpha, basis)?;
            // coefficient of ΔB^{k,α} and of ΔB^{-k,α}
            complex_gen.push(&gp + &gm);
            complex_gen.push((&gp - &gm).scale_complex(i));
            let (xc, xs) = xi_grid(&transformer, k, *a);
            real_gen.push(transformer.advect_by_grid_field(v, &xc));
            real_gen.push(transformer.advect_by_grid_field(v, &xs));
        }
        let w = t * t;
        let complex_trace = w * complex_gen.iter().map(|g| g.energy()).sum::<f64>();
        let real_trace = w * real_gen.iter().map(|g| g.energy()).sum::<f64>();
        let fc = covariance_difference(&complex_gen, &[]);
        let diff = covariance_difference(&complex_gen, &real_gen);
        let mismatch = if fc > 0.0 { diff / fc } else { w * diff };
        let ratio = (complex_trace > 0.0 || real_trace > 0.0).then(|| real_trace / complex_trace);
        pairs.push(PairCovariance {
            k,
            complex_trace,
            real_trace,
            ratio,
            mismatch,
            flagged: mismatch > COVARIANCE_TOL,
        });
    }
    let max_mismatch = pairs.iter().map(|p| p.mismatch).fold(0.0, f64::max);
    Ok(CovarianceReport {
        flagged: max_mismatch > COVARIANCE_TOL,
        pairs,
        max_mismatch,
    })
}

/// Grid values of `2a cos(2πk·x)` and `2a sin(2πk·x)`.
fn xi_grid(t: &Transformer, k: Wavevector, a: [f64; 3]) -> ([Vec<f64>; 3], [Vec<f64>; 3]) {
    let n = t.grid().points();
    let total = n * n * n;
    let mut c: [Vec<f64>; 3] = Default::default();
    let mut s: [Vec<f64>; 3] = Default::default();
    for d in 0..3 {
        c[d] = vec![0.0; total];
        s[d] = vec![0.0; total];
    }
    for m in 0..total {
        let x = t.grid_point(m);
        let phase = TWO_PI * (k[0] as f64 * x[0] + k[1] as f64 * x[1] + k[2] as f64 * x[2]);
        let (sn, cs) = phase.sin_cos();
        for d in 0..3 {
            c[d][m] = 2.0 * a[d] * cs;
            s[d][m] = 2.0 * a[d] * sn;
        }
    }
    (c, s)
}

/// `‖Σ_i a_i a_iᵀ - Σ_i b_i b_iᵀ‖_F`. Both sets are expanded in an
/// orthonormal basis of their joint span (modified Gram–Schmidt), so nearly
/// equal covariances do not lose accuracy to cancellation.
fn covariance_difference(a: &[SpectralField], b: &[SpectralField]) -> f64 {
    let all: Vec<&SpectralField> = a.iter().chain(b).collect();
    let scale = all.iter().map(|g| g.energy().sqrt()).fold(0.0, f64::max);
    if scale == 0.0 {
        return 0.0;
    }
    let mut basis: Vec<SpectralField> = Vec::new();
    let mut coords: Vec<Vec<f64>> = Vec::new();
    for g in &all {
        let mut r = (*g).clone();
        let mut c = Vec::with_capacity(all.len());
        for q in &basis {
            let x = r.inner(q).re;
            r.axpy(num_complex::Complex64::new(-x, 0.0), q);
            c.push(x);
        }
        let n = r.energy().sqrt();
        if n > 1e-14 * scale {
            basis.push(r.scale(1.0 / n));
            c.push(n);
        }
        coords.push(c);
    }
    let dim = basis.len();
    let mut d = vec![vec![0.0; dim]; dim];
    for (i, c) in coords.iter().enumerate() {
        let sign = if i < a.len() { 1.0 } else { -1.0 };
        for (r, x) in c.iter().enumerate() {
            for (s, y) in c.iter().enumerate() {
                d[r][s] += sign * x * y;
            }
        }
    }
    d.iter().flatten().map(|x| x * x).sum::<f64>().sqrt()
}
