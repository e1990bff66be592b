use serde::Serialize;

use crate::error::{Error, Result};

/// Scaling exponents of the hyperviscous equation for a given `γ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalExponents {
    pub gamma: f64,
    /// Critical Sobolev index `5/2 - 2γ`.
    pub delta: f64,
    /// `4γ / (6γ - 5)`.
    pub p_critical: f64,
    /// `5/4 - γ/2`.
    pub beta: f64,
}

impl CriticalExponents {
    /// `β₀(p) = γ(1 - 1/p)`.
    pub fn beta0(&self, p: f64) -> f64 {
        self.gamma * (1.0 - 1.0 / p)
    }

    /// Upper end `γ(1 - 2/p)` of the admissible cut-off index window.
    pub fn trace_index(&self, p: f64) -> f64 {
        self.gamma * (1.0 - 2.0 / p)
    }
}

pub fn critical_exponents(gamma: f64) -> Result<CriticalExponents> {
    if !(gamma > 1.0 && gamma.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "gamma",
            reason: format!("must exceed 1, got {gamma}"),
        });
    }
    Ok(CriticalExponents {
        gamma,
        delta: 2.5 - 2.0 * gamma,
        p_critical: 4.0 * gamma / (6.0 * gamma - 5.0),
        beta: 1.25 - 0.5 * gamma,
    })
}

/// Best rational approximation `num/den` with `den <= max_den`, by
/// continued fractions.
pub fn rational_approximation(x: f64, max_den: u64) -> (i64, u64) {
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1u64, 0u64);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        let h2 = a as i64 * h1 + h0;
        let k2 = a as u64 * k1 + k0;
        if k2 > max_den {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = r - a;
        if frac.abs() < 1e-12 {
            break;
        }
        r = 1.0 / frac;
    }
    (h1, k1)
}
