use crate::error::Result;
use crate::spectral::{SpectralField, Transformer};

/// `ℙ[∇·(v⊗v)]`, dealiased, formed from grid products.
pub fn nonlinearity(v: &SpectralField) -> Result<SpectralField> {
    nonlinearity_with(&mut Transformer::new(v.grid()), v)
}

/// As [`nonlinearity`], reusing the caller's FFT scratch.
pub fn nonlinearity_with(t: &mut Transformer, v: &SpectralField) -> Result<SpectralField> {
    v.require_divergence_free()?;
    Ok(t.convection(v))
}
