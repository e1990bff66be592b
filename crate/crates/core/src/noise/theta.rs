use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{norm2, norm_inf, Wavevector};

/// Nonnegative noise weights `θ_k` on a finite subset of `ℤ³ \ {0}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaSpectrum {
    entries: Vec<(Wavevector, f64)>,
    lookup: HashMap<Wavevector, usize>,
    normalized: bool,
    radially_symmetric: bool,
    shell: Option<ShellParams>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShellParams {
    pub n: u32,
    pub alpha_decay: f64,
}

impl ThetaSpectrum {
    pub fn empty() -> Self {
        Self::from_parts(Vec::new(), None)
    }

    /// `θⁿ_k ∝ |k|^{-α} 1{n <= |k| <= 2n}`, normalized in `ℓ²`.
    pub fn shell(n: u32, alpha_decay: f64) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidParameter {
                name: "n",
                reason: "shell index must be at least 1".into(),
            });
        }
        if !(alpha_decay > 0.0) {
            return Err(Error::InvalidParameter {
                name: "alpha_decay",
                reason: format!("must be positive, got {alpha_decay}"),
            });
        }
        let lo = (n as i64).pow(2);
        let hi = 4 * lo;
        let r = 2 * n as i32;
        let mut entries = Vec::new();
        for a in -r..=r {
            for b in -r..=r {
                for c in -r..=r {
                    let k = [a, b, c];
                    let kk = norm2(k);
                    if kk >= lo && kk <= hi {
                        entries.push((k, (kk as f64).powf(-alpha_decay / 2.0)));
                    }
                }
            }
        }
        if entries.is_empty() {
            return Err(Error::InvalidParameter {
                name: "n",
                reason: format!("shell {n} <= |k| <= {} contains no lattice points", 2 * n),
            });
        }
        let norm = entries.iter().map(|(_, t)| t * t).sum::<f64>().sqrt();
        for (_, t) in &mut entries {
            *t /= norm;
        }
        Ok(Self::from_parts(
            entries,
            Some(ShellParams { n, alpha_decay }),
        ))
    }

    /// Arbitrary spectrum; flags are derived from the values.
    pub fn from_entries(entries: Vec<(Wavevector, f64)>) -> Result<Self> {
        for &(k, t) in &entries {
            if k == [0, 0, 0] {
                return Err(Error::InvalidParameter {
                    name: "theta",
                    reason: "the zero wavevector carries no noise".into(),
                });
            }
            if !(t >= 0.0 && t.is_finite()) {
                return Err(Error::InvalidParameter {
                    name: "theta",
                    reason: format!("weight at {k:?} must be finite and nonnegative, got {t}"),
                });
            }
        }
        let mut seen = HashMap::new();
        for &(k, _) in &entries {
            if seen.insert(k, ()).is_some() {
                return Err(Error::InvalidParameter {
                    name: "theta",
                    reason: format!("duplicate entry {k:?}"),
                });
            }
        }
        let entries = entries.into_iter().filter(|&(_, t)| t > 0.0).collect();
        Ok(Self::from_parts(entries, None))
    }

    fn from_parts(mut entries: Vec<(Wavevector, f64)>, shell: Option<ShellParams>) -> Self {
        entries.sort_by_key(|e| e.0);
        let lookup = entries.iter().enumerate().map(|(i, e)| (e.0, i)).collect();
        let l2 = entries.iter().map(|(_, t)| t * t).sum::<f64>();
        let mut spectrum = Self {
            entries,
            lookup,
            normalized: (l2 - 1.0).abs() <= 1e-12,
            radially_symmetric: false,
            shell,
        };
        spectrum.radially_symmetric = spectrum.check_radial();
        spectrum
    }

    fn check_radial(&self) -> bool {
        let mut by_norm: BTreeMap<i64, (f64, usize)> = BTreeMap::new();
        for &(k, t) in &self.entries {
            let e = by_norm.entry(norm2(k)).or_insert((t, 0));
            if e.0 != t {
                return false;
            }
            e.1 += 1;
        }
        // every lattice point on an occupied sphere must carry the weight
        by_norm
            .iter()
            .all(|(&kk, &(_, count))| count == sphere_count(kk))
    }

    pub fn entries(&self) -> &[(Wavevector, f64)] {
        &self.entries
    }

    pub fn get(&self, k: Wavevector) -> f64 {
        self.lookup.get(&k).map_or(0.0, |&i| self.entries[i].1)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn is_radially_symmetric(&self) -> bool {
        self.radially_symmetric
    }

    pub fn shell_params(&self) -> Option<ShellParams> {
        self.shell
    }

    pub fn l2_norm(&self) -> f64 {
        self.entries.iter().map(|(_, t)| t * t).sum::<f64>().sqrt()
    }

    pub fn linf_norm(&self) -> f64 {
        self.entries.iter().map(|e| e.1).fold(0.0, f64::max)
    }

    /// Largest `|k|_∞` in the support (0 when empty).
    pub fn max_norm_inf(&self) -> i32 {
        self.entries.iter().map(|e| norm_inf(e.0)).max().unwrap_or(0)
    }

    /// `(3μ/2) Σ_k θ_k² (2π|k|)²`: rate of the velocity-gradient variance
    /// carried by the transport field.
    pub fn transport_intensity(&self, mu: f64) -> f64 {
        let two_pi = 2.0 * std::f64::consts::PI;
        1.5 * mu
            * self
                .entries
                .iter()
                .map(|&(k, t)| t * t * two_pi * two_pi * norm2(k) as f64)
                .sum::<f64>()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&ThetaFile::from(self))?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: ThetaFile = serde_json::from_str(s)?;
        let entries = file.entries.into_iter().map(|e| (e.k, e.theta)).collect();
        let mut out = Self::from_entries(entries)?;
        if let (Some(n), Some(alpha_decay)) = (file.n, file.alpha_decay) {
            out.shell = Some(ShellParams { n, alpha_decay });
        }
        Ok(out)
    }
}

/// Number of lattice points with `|k|² = kk`.
fn sphere_count(kk: i64) -> usize {
    let r = (kk as f64).sqrt().ceil() as i64;
    let mut count = 0;
    for a in -r..=r {
        for b in -r..=r {
            let rest = kk - a * a - b * b;
            if rest < 0 {
                continue;
            }
            let c = (rest as f64).sqrt().round() as i64;
            if c * c == rest {
                count += if c == 0 { 1 } else { 2 };
            }
        }
    }
    count
}

/// JSON layout of a serialized spectrum.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ThetaFile {
    pub n: Option<u32>,
    pub alpha_decay: Option<f64>,
    pub normalized: bool,
    pub radially_symmetric: bool,
    pub entries: Vec<ThetaEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaEntry {
    pub k: Wavevector,
    pub theta: f64,
}

impl From<&ThetaSpectrum> for ThetaFile {
    fn from(t: &ThetaSpectrum) -> Self {
        Self {
            n: t.shell.map(|s| s.n),
            alpha_decay: t.shell.map(|s| s.alpha_decay),
            normalized: t.normalized,
            radially_symmetric: t.radially_symmetric,
            entries: t
                .entries
                .iter()
                .map(|&(k, theta)| ThetaEntry { k, theta })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_shell_has_32_points() {
        let t = ThetaSpectrum::shell(1, 1.0).unwrap();
        assert_eq!(t.len(), 6 + 12 + 8 + 6);
        assert!((t.l2_norm() - 1.0).abs() < 1e-14);
        assert!(t.is_normalized());
        assert!(t.is_radially_symmetric());
    }

    #[test]
    fn shells_are_radial_and_flatten() {
        let mut prev = f64::INFINITY;
        for n in [1, 2, 4, 8, 16] {
            let t = ThetaSpectrum::shell(n, 1.0).unwrap();
            assert!(t.is_radially_symmetric());
            assert!((t.l2_norm() - 1.0).abs() < 1e-12);
            for &(k, v) in t.entries() {
                assert_eq!(t.get([k[1], k[2], k[0]]), v);
                assert_eq!(t.get([-k[0], k[1], -k[2]]), v);
            }
            assert!(t.linf_norm() < prev);
            prev = t.linf_norm();
        }
    }

    #[test]
    fn shell_parameters_validated() {
        assert!(ThetaSpectrum::shell(0, 1.0).is_err());
        assert!(ThetaSpectrum::shell(2, 0.0).is_err());
    }

    #[test]
    fn radial_flag_detects_partial_spheres() {
        let partial = ThetaSpectrum::from_entries(vec![([1, 0, 0], 1.0), ([-1, 0, 0], 1.0)]).unwrap();
        assert!(!partial.is_radially_symmetric());
        let axes: Vec<_> = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
            .iter()
            .flat_map(|&k| [(k, 0.5), ([-k[0], -k[1], -k[2]], 0.5)])
            .collect();
        let full = ThetaSpectrum::from_entries(axes).unwrap();
        assert!(full.is_radially_symmetric());
        assert!(!full.is_normalized());
        assert_eq!(sphere_count(1), 6);
        assert_eq!(sphere_count(2), 12);
        assert_eq!(sphere_count(3), 8);
        assert_eq!(sphere_count(9), 30);
    }

    #[test]
    fn json_roundtrip() {
        let t = ThetaSpectrum::shell(2, 1.5).unwrap();
        let back = ThetaSpectrum::from_json(&t.to_json().unwrap()).unwrap();
        assert_eq!(back.entries(), t.entries());
        assert_eq!(back.shell_params(), t.shell_params());
        assert!(back.is_normalized());
    }
}
