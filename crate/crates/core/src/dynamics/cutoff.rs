use crate::spectral::{sobolev_norm, SpectralField};

fn f(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

/// Smooth bump: `1` on `(-∞, 1]`, `0` on `[2, ∞)` and
/// `f(2-x) / (f(2-x) + f(x-1))` in between, with `f(t) = e^{-1/t}` for
/// `t > 0`. Nonincreasing and `C^∞`.
pub fn bump(x: f64) -> f64 {
    if x <= 1.0 {
        1.0
    } else if x >= 2.0 {
        0.0
    } else {
        let a = f(2.0 - x);
        a / (a + f(x - 1.0))
    }
}

/// `φ(‖v‖_{H^r} / R)`.
pub fn cutoff_factor(v: &SpectralField, radius: f64, r: f64) -> f64 {
    bump(sobolev_norm(v, r) / radius)
}
