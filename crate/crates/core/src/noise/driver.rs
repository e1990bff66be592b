use num_complex::Complex64;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::theta::ThetaSpectrum;
use crate::spectral::{is_positive_half, neg, Wavevector};

/// Counter-addressed source of Brownian increments.
///
/// The real increment `ΔB^{k,α}` of step `step` in Monte Carlo sample
/// `sample` is a pure function of `(seed, sample, step, k, α, dt)`: the ChaCha
/// key is derived from `(seed, sample)`, the stream from `step`, and the word
/// position from `(k, α)`. Any worker can evaluate any increment without
/// coordination.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BrownianDriver {
    seed: u64,
}

/// Complex increments `ΔW^{k,α}`, `α ∈ {0, 1}`, for every `k` in a
/// spectrum's support. `ΔW^{-k,α} = conj ΔW^{k,α}` holds exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct Increments {
    pub dt: f64,
    pub values: Vec<(Wavevector, [Complex64; 2])>,
}

impl BrownianDriver {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    fn rng(&self, sample: u64, step: u64) -> ChaCha8Rng {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&self.seed.to_le_bytes());
        key[8..16].copy_from_slice(&sample.to_le_bytes());
        key[16..24].copy_from_slice(b"hnslab-B");
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(step);
        rng
    }

    /// Standard normal attached to `(sample, step, k, α)`.
    pub fn standard_normal(&self, sample: u64, step: u64, k: Wavevector, alpha: usize) -> f64 {
        let mut rng = self.rng(sample, step);
        normal_at(&mut rng, k, alpha)
    }

    /// Real increment `ΔB^{k,α}` over a step of length `dt`.
    pub fn real_increment(&self, sample: u64, step: u64, k: Wavevector, alpha: usize, dt: f64) -> f64 {
        dt.sqrt() * self.standard_normal(sample, step, k, alpha)
    }

    /// Complex increments for the support of `theta`:
    /// `ΔW^{k,α} = ΔB^{k,α} + i ΔB^{-k,α}` on the positive half and the
    /// conjugate of the partner on the negative half.
    pub fn increments(&self, sample: u64, step: u64, dt: f64, theta: &ThetaSpectrum) -> Increments {
        let mut rng = self.rng(sample, step);
        let sd = dt.sqrt();
        let values = theta
            .entries()
            .iter()
            .map(|&(k, _)| {
                let pos = if is_positive_half(k) { k } else { neg(k) };
                let w = [0, 1].map(|alpha| {
                    let re = sd * normal_at(&mut rng, pos, alpha);
                    let im = sd * normal_at(&mut rng, neg(pos), alpha);
                    Complex64::new(re, im)
                });
                if pos == k {
                    (k, w)
                } else {
                    (k, w.map(|z| z.conj()))
                }
            })
            .collect();
        Increments { dt, values }
    }

    /// Sum of `count` consecutive increments of length `sub_dt`, starting at
    /// fine step `first`. Coarse and fine runs built this way share one
    /// Brownian path.
    pub fn summed_increments(
        &self,
        sample: u64,
        first: u64,
        count: u64,
        sub_dt: f64,
        theta: &ThetaSpectrum,
    ) -> Increments {
        let mut acc = self.increments(sample, first, sub_dt, theta);
        for s in 1..count {
            let next = self.increments(sample, first + s, sub_dt, theta);
            for (a, b) in acc.values.iter_mut().zip(&next.values) {
                a.1[0] += b.1[0];
                a.1[1] += b.1[1];
            }
        }
        acc.dt = sub_dt * count as f64;
        acc
    }
}

impl Increments {
    pub fn get(&self, k: Wavevector) -> Option<[Complex64; 2]> {
        self.values.iter().find(|e| e.0 == k).map(|e| e.1)
    }
}

/// Zigzag-packed address of `(k, α)`, 21 bits per coordinate; distinct for
/// `|k_i| < 2^20`. ChaCha word positions carry 68 bits, so the address times
/// four must stay below `2^68`.
fn address(k: Wavevector, alpha: usize) -> u128 {
    let zz = |c: i32| (((c << 1) ^ (c >> 31)) as u32 as u128) & 0x1f_ffff;
    (((zz(k[0]) << 42) | (zz(k[1]) << 21) | zz(k[2])) << 1) | alpha as u128
}

fn normal_at(rng: &mut ChaCha8Rng, k: Wavevector, alpha: usize) -> f64 {
    // four 32-bit words per normal
    rng.set_word_pos(address(k, alpha) * 4);
    let u1 = 1.0 - ((rng.next_u64() >> 11) as f64) * (1.0 / (1u64 << 53) as f64);
    let u2 = ((rng.next_u64() >> 11) as f64) * (1.0 / (1u64 << 53) as f64);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn increments_are_addressable_and_conjugate_paired() {
        let d = BrownianDriver::new(42);
        let theta = ThetaSpectrum::shell(1, 1.0).unwrap();
        let inc = d.increments(3, 17, 1e-3, &theta);
        for &(k, w) in &inc.values {
            let wm = inc.get(neg(k)).unwrap();
            assert_eq!(wm, [w[0].conj(), w[1].conj()]);
            if is_positive_half(k) {
                for alpha in 0..2 {
                    assert_eq!(w[alpha].re, d.real_increment(3, 17, k, alpha, 1e-3));
                    assert_eq!(w[alpha].im, d.real_increment(3, 17, neg(k), alpha, 1e-3));
                }
            }
        }
        assert_eq!(inc, d.increments(3, 17, 1e-3, &theta));
        assert_ne!(inc, d.increments(3, 18, 1e-3, &theta));
        assert_ne!(inc, d.increments(4, 17, 1e-3, &theta));
    }

    #[test]
    fn addresses_are_distinct() {
        let mut seen = std::collections::HashSet::new();
        for a in -3..=3 {
            for b in -3..=3 {
                for c in -3..=3 {
                    for alpha in 0..2 {
                        assert!(seen.insert(address([a, b, c], alpha)));
                    }
                }
            }
        }
    }

    #[test]
    fn increment_moments() {
        let d = BrownianDriver::new(7);
        let dt = 0.01;
        let n = 40_000;
        let (mut s1, mut s2) = (0.0, 0.0);
        for step in 0..n {
            let x = d.real_increment(0, step, [1, -2, 0], 1, dt);
            s1 += x;
            s2 += x * x;
        }
        let mean = s1 / n as f64;
        let var = s2 / n as f64 - mean * mean;
        // 5 standard errors
        assert!(mean.abs() < 5.0 * (dt / n as f64).sqrt());
        assert!((var - dt).abs() < 5.0 * dt * (2.0 / n as f64).sqrt());
    }
}
