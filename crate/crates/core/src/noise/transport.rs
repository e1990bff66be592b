use num_complex::Complex64;

use super::basis::NoiseBasis;
use super::driver::Increments;
use super::theta::ThetaSpectrum;
use crate::error::{Error, Result};
use crate::spectral::{
    add, as_real, norm_inf, project_mode, CVec3, SpectralField, Transformer, Wavevector, TWO_PI,
    ZERO3,
};

/// How the stochastic forcing is assembled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoisePath {
    /// Sum of single-mode transport terms; slow, used as an oracle.
    PerMode,
    /// Random transport field assembled first, then one pseudo-spectral
    /// advection.
    PseudoSpectral,
}

pub(crate) fn require_basis_covers(theta: &ThetaSpectrum, basis: &NoiseBasis) -> Result<()> {
    if theta.max_norm_inf() > basis.kmax() {
        return Err(Error::InvalidParameter {
            name: "basis",
            reason: format!(
                "basis kmax {} does not cover spectrum support up to {}",
                basis.kmax(),
                theta.max_norm_inf()
            ),
        });
    }
    Ok(())
}

fn frame_vector(basis: &NoiseBasis, k: Wavevector, alpha: usize) -> Result<[f64; 3]> {
    if alpha > 1 {
        return Err(Error::InvalidParameter {
            name: "alpha",
            reason: format!("frame index must be 0 or 1, got {alpha}"),
        });
    }
    basis
        .frame(k)
        .map(|f| f[alpha])
        .ok_or(Error::InvalidParameter {
            name: "k",
            reason: format!("{k:?} is outside the noise basis (kmax {})", basis.kmax()),
        })
}

/// `ℙ[(σ_{k,α}·∇) v]` with `σ_{k,α} = a_{k,α} e^{2πik·x}`.
///
/// The coefficient `û(j)` contributes `2πi (a_{k,α}·j) û(j)` at `j + k`;
/// contributions landing outside the dealias cube are dropped. The result is
/// a complex intermediate, not conjugate symmetric on its own.
pub fn transport_mode_apply(
    v: &SpectralField,
    k: Wavevector,
    alpha: usize,
    basis: &NoiseBasis,
) -> Result<SpectralField> {
    v.require_divergence_free()?;
    let a = frame_vector(basis, k, alpha)?;
    let grid = v.grid();
    let cut = grid.dealias_cutoff();
    let mut out = SpectralField::zeros(grid);
    for (j, c) in v.modes() {
        let target = add(j, k);
        if norm_inf(target) > cut {
            continue;
        }
        let aj = dot(a, as_real(j));
        let s = Complex64::new(0.0, TWO_PI * aj);
        out.set(target, project_mode(target, [c[0] * s, c[1] * s, c[2] * s]));
    }
    Ok(out)
}

/// `‖ℙ[(σ_{k,α}·∇) v]‖²_{L²}`, evaluated modewise without building the field.
pub fn transport_energy(v: &SpectralField, k: Wavevector, alpha: usize, basis: &NoiseBasis) -> Result<f64> {
    let a = frame_vector(basis, k, alpha)?;
    let cut = v.grid().dealias_cutoff();
    let mut total = 0.0;
    for (j, c) in v.modes() {
        let target = add(j, k);
        if norm_inf(target) > cut {
            continue;
        }
        let aj = TWO_PI * dot(a, as_real(j));
        let p = project_mode(target, c);
        total += aj * aj * (p[0].norm_sqr() + p[1].norm_sqr() + p[2].norm_sqr());
    }
    Ok(total)
}

/// Spectral coefficients of the transport field
/// `ΔX = √(3μ/2) Σ_{k,α} θ_k σ_{k,α} ΔW^{k,α}`.
pub fn noise_velocity(
    grid: crate::spectral::Grid,
    theta: &ThetaSpectrum,
    basis: &NoiseBasis,
    increments: &Increments,
    mu: f64,
) -> Result<SpectralField> {
    require_basis_covers(theta, basis)?;
    let amp = (1.5 * mu).sqrt();
    let mut out = SpectralField::zeros(grid);
    for &(k, w) in &increments.values {
        let t = theta.get(k);
        if t == 0.0 {
            continue;
        }
        if !grid.contains(k) {
            return Err(Error::InvalidParameter {
                name: "theta",
                reason: format!("noise mode {k:?} does not fit on the grid"),
            });
        }
        let frame = basis.frame(k).expect("covered by basis");
        let mut c: CVec3 = ZERO3;
        for (alpha, a) in frame.iter().enumerate() {
            for d in 0..3 {
                c[d] += w[alpha] * (amp * t * a[d]);
            }
        }
        out.set(k, c);
    }
    Ok(out)
}

/// One-step Itô forcing `√(3μ/2) Σ_{k,α} θ_k ℙ[(σ_{k,α}·∇)v] ΔW^{k,α}`.
pub fn noise_increment_field(
    v: &SpectralField,
    theta: &ThetaSpectrum,
    basis: &NoiseBasis,
    increments: &Increments,
    mu: f64,
    path: NoisePath,
    transformer: &mut Transformer,
) -> Result<SpectralField> {
    v.require_divergence_free()?;
    require_basis_covers(theta, basis)?;
    match path {
        NoisePath::PerMode => {
            let amp = (1.5 * mu).sqrt();
            let mut out = SpectralField::zeros(v.grid());
            for &(k, w) in &increments.values {
                let t = theta.get(k);
                if t == 0.0 {
                    continue;
                }
                for (alpha, dw) in w.iter().enumerate() {
                    let term = transport_mode_apply(v, k, alpha, basis)?;
                    out.axpy(dw * (amp * t), &term);
                }
            }
            Ok(out)
        }
        NoisePath::PseudoSpectral => {
            let dx = noise_velocity(v.grid(), theta, basis, increments, mu)?;
            Ok(transformer.advect(v, &dx))
        }
    }
}

/// Itô quadratic-variation rate of the forcing,
/// `Σ_{k,α} (E|ΔW^{k,α}|²/dt) ‖√(3μ/2) θ_k ℙ[(σ_{k,α}·∇)v]‖²`, where each
/// complex increment has `E|ΔW|² = 2 dt`.
pub fn noise_quadratic_variation(
    v: &SpectralField,
    theta: &ThetaSpectrum,
    basis: &NoiseBasis,
    mu: f64,
) -> Result<f64> {
    require_basis_covers(theta, basis)?;
    let mut total = 0.0;
    for &(k, t) in theta.entries() {
        for alpha in 0..2 {
            total += 2.0 * 1.5 * mu * t * t * transport_energy(v, k, alpha, basis)?;
        }
    }
    Ok(total)
}

#[inline]
pub(crate) fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}
