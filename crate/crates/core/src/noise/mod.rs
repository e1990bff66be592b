//! Transport noise: lattice partition and frames, shell spectra, Brownian
//! increments, the transport operator and the Itô–Stratonovich corrector.
//!
//! Noise fields are `σ_{k,α}(x) = a_{k,α} e^{2πik·x}` and the forcing in Itô
//! form is `√(3μ/2) Σ_{k,α} θ_k ℙ[(σ_{k,α}·∇)v] dW^{k,α}` with complex
//! `W^{k,α} = B^{k,α} + iB^{-k,α}` on the positive half.

mod basis;
mod corrector;
mod driver;
mod real_noise;
mod theta;
mod transport;

pub use basis::{Half, NoiseBasis};
pub use corrector::{
    corrector_apply, corrector_limit_error, corrector_matrix, CorrectorTable, Mat3, Truncation,
};
pub use driver::{BrownianDriver, Increments};
pub use real_noise::{real_noise_covariance_check, CovarianceReport, PairCovariance, COVARIANCE_TOL};
pub use theta::{ShellParams, ThetaEntry, ThetaFile, ThetaSpectrum};
pub use transport::{
    noise_increment_field, noise_quadratic_variation, noise_velocity, transport_energy,
    transport_mode_apply, NoisePath,
};
