mod common;

use common::*;
use hnslab::noise::*;
use hnslab::spectral::{helmholtz_project, neg, CVec3, Grid, SpectralField, Transformer, Wavevector};
use num_complex::Complex64;

fn grid(n: usize) -> Grid {
    Grid::new(n).unwrap()
}

fn rand_field(g: Grid, band: f64, seed: u64) -> SpectralField {
    hnslab::dynamics::random_field(g, band, 1.0, seed).unwrap()
}

#[test]
fn basis_frames() {
    let b = NoiseBasis::build(3).unwrap();
    let f = b.frame([1, 0, 0]).unwrap();
    for a in f {
        assert_eq!(a[0], 0.0);
    }
    assert!(dotr(f[0], f[1]).abs() < 1e-15);
    assert_eq!(b.half([0, 0, 1]), Some(Half::Positive));
    assert_eq!(b.half([0, 0, -1]), Some(Half::Negative));
    assert_eq!(b.half([0, 0, 0]), None);

    for x in -3..=3 {
        for y in -3..=3 {
            for z in -3..=3 {
                let k = [x, y, z];
                if k == [0, 0, 0] {
                    continue;
                }
                let f = b.frame(k).unwrap();
                assert_eq!(f, b.frame(neg(k)).unwrap());
                assert_ne!(b.half(k), b.half(neg(k)));
                let p = leray(k);
                for r in 0..3 {
                    for c in 0..3 {
                        let s = f[0][r] * f[0][c] + f[1][r] * f[1][c];
                        assert!((s - p[r][c]).abs() < 1e-14);
                    }
                }
                for a in f {
                    assert!(dotr(a, realv(k)).abs() < 1e-14);
                    assert!((dotr(a, a) - 1.0).abs() < 1e-14);
                }
            }
        }
    }
}

#[test]
fn shell_spectra() {
    let t1 = ThetaSpectrum::shell(1, 1.0).unwrap();
    assert_eq!(t1.len(), 32);
    assert!(t1.is_normalized() && t1.is_radially_symmetric());
    let oracle = shell_weights(1, 1.0);
    for &(k, w) in &oracle {
        assert!((t1.get(k) - w).abs() < 1e-15);
    }
    let mut prev = f64::INFINITY;
    for n in [1, 2, 4, 8] {
        let t = ThetaSpectrum::shell(n, 1.0).unwrap();
        assert!((t.l2_norm() - 1.0).abs() < 1e-12);
        assert!(t.linf_norm() < prev);
        prev = t.linf_norm();
    }
    let json = t1.to_json().unwrap();
    let back = ThetaSpectrum::from_json(&json).unwrap();
    assert_eq!(back.entries(), t1.entries());
}

#[test]
fn transport_examples() {
    let g = grid(16);
    let b = NoiseBasis::build(4).unwrap();
    let constant = SpectralField::from_modes(
        g,
        &[([0, 0, 0], [1.0, 2.0, 3.0].map(|x| Complex64::new(x, 0.0)))],
    )
    .unwrap();
    for alpha in 0..2 {
        assert_eq!(transport_mode_apply(&constant, [1, 2, 0], alpha, &b).unwrap().energy(), 0.0);
    }

    // a_{k,α}·j = 0 for the frame vector normal to j.
    let j = [1, 0, 0];
    let v = single_mode(g, j);
    let k = [0, 2, 0];
    let frame = b.frame(k).unwrap();
    for (alpha, a) in frame.iter().enumerate() {
        let out = transport_mode_apply(&v, k, alpha, &b).unwrap();
        let support: Vec<Wavevector> = out.modes().map(|m| m.0).collect();
        if a[0].abs() < 1e-15 {
            assert!(support.is_empty());
            continue;
        }
        assert_eq!(support.len(), 2);
        assert!(support.contains(&[1, 2, 0]) && support.contains(&[-1, 2, 0]));
        let s = Complex64::new(0.0, TWO_PI * a[0]);
        let want = matvec(&leray([1, 2, 0]), &v.get(j)).map(|z| z * s);
        let got = out.get([1, 2, 0]);
        for d in 0..3 {
            assert!((got[d] - want[d]).norm() < 1e-14);
        }
    }
}

#[test]
fn increment_field_paths() {
    let g = grid(24);
    let theta = ThetaSpectrum::shell(2, 1.0).unwrap();
    let b = NoiseBasis::build(theta.max_norm_inf()).unwrap();
    let v = rand_field(g, 4.0, 11);
    let drv = BrownianDriver::new(3);
    let inc = drv.increments(0, 7, 1e-3, &theta);
    let mut t = Transformer::new(g);
    let a = noise_increment_field(&v, &theta, &b, &inc, 1.0, NoisePath::PerMode, &mut t).unwrap();
    let p = noise_increment_field(&v, &theta, &b, &inc, 1.0, NoisePath::PseudoSpectral, &mut t)
        .unwrap();
    assert!(rel_diff(&p, &a) < 1e-10, "{}", rel_diff(&p, &a));
    assert!(a.conjugate_asymmetry() <= 1e-12 * a.max_amplitude());
    let phys = t.to_physical_complex(&p);
    let re = phys.iter().flatten().map(|z| z.re.abs()).fold(0.0, f64::max);
    let im = phys.iter().flatten().map(|z| z.im.abs()).fold(0.0, f64::max);
    assert!(im <= 1e-12 * re);
    assert!(p.relative_divergence() < 1e-12);

    let empty = ThetaSpectrum::empty();
    let none = drv.increments(0, 0, 1e-3, &empty);
    let z = noise_increment_field(&v, &empty, &b, &none, 1.0, NoisePath::PerMode, &mut t).unwrap();
    assert_eq!(z.energy(), 0.0);
}

#[test]
fn single_pair_matches_hand_assembly() {
    let g = grid(16);
    let k = [1, 1, 0];
    let w = 0.5f64.sqrt();
    let theta = ThetaSpectrum::from_entries(vec![(k, w), (neg(k), w)]).unwrap();
    let b = NoiseBasis::build(1).unwrap();
    let v = rand_field(g, 3.0, 4);
    let inc = BrownianDriver::new(1).increments(2, 5, 1e-2, &theta);
    let mut t = Transformer::new(g);
    let mu = 0.7;
    let got =
        noise_increment_field(&v, &theta, &b, &inc, mu, NoisePath::PseudoSpectral, &mut t).unwrap();
    let amp = (1.5 * mu).sqrt() * w;
    let mut want = SpectralField::zeros(g);
    for kk in [k, neg(k)] {
        let dw = inc.get(kk).unwrap();
        for alpha in 0..2 {
            let term = transport_mode_apply(&v, kk, alpha, &b).unwrap();
            want.axpy(dw[alpha] * amp, &term);
        }
    }
    assert!(rel_diff(&got, &want) < 1e-10);
}

#[test]
fn driver_statistics_and_conjugacy() {
    let theta = ThetaSpectrum::shell(1, 1.0).unwrap();
    let drv = BrownianDriver::new(42);
    let dt = 0.01;
    let k = [1, 0, 0];
    let n = 4000;
    let (mut s, mut s2, mut sw2) = (0.0, 0.0, 0.0);
    for sample in 0..n {
        let inc = drv.increments(sample, 0, dt, &theta);
        let w = inc.get(k).unwrap();
        assert_eq!(inc.get(neg(k)).unwrap(), w.map(|z| z.conj()));
        s += w[0].re;
        s2 += w[0].re * w[0].re;
        sw2 += w[1].norm_sqr();
    }
    let nf = n as f64;
    let mean = s / nf;
    let var = s2 / nf - mean * mean;
    assert!(mean.abs() < 4.0 * (dt / nf).sqrt());
    assert!((var / dt - 1.0).abs() < 0.1, "{var}");
    assert!((sw2 / nf / (2.0 * dt) - 1.0).abs() < 0.1);

    // replay and nesting
    assert_eq!(drv.increments(3, 9, dt, &theta), drv.increments(3, 9, dt, &theta));
    let summed = drv.summed_increments(0, 4, 4, dt / 4.0, &theta);
    for (i, &(kk, w)) in summed.values.iter().enumerate() {
        let mut acc = [Complex64::new(0.0, 0.0); 2];
        for step in 4..8 {
            let f = drv.increments(0, step, dt / 4.0, &theta).values[i];
            assert_eq!(f.0, kk);
            acc[0] += f.1[0];
            acc[1] += f.1[1];
        }
        assert_eq!(acc, w);
    }
}

#[test]
fn corrector_matches_frame_free_oracle() {
    let g = grid(24);
    let cut = g.dealias_cutoff();
    let mu = 1.3;
    for n in [1u32, 2] {
        let theta = ThetaSpectrum::shell(n, 1.0).unwrap();
        let b = NoiseBasis::build(theta.max_norm_inf()).unwrap();
        let table = CorrectorTable::build(g, &theta, &b, mu).unwrap();
        let weights = shell_weights(n as i32, 1.0);
        for x in -2..=2 {
            for y in -2..=2 {
                for z in -2..=2 {
                    let j = [x, y, z];
                    let got = table.matrix(j);
                    let want = corrector_oracle(j, &weights, mu, Some(cut));
                    let scale = want.iter().flatten().map(|v| v.abs()).fold(1e-300, f64::max);
                    for r in 0..3 {
                        for c in 0..3 {
                            assert!((got[r][c] - want[r][c]).abs() <= 1e-12 * scale, "{j:?}");
                        }
                    }
                }
            }
        }
        let lat = corrector_matrix([1, 2, 0], &theta, &b, mu, Truncation::Lattice);
        let want = corrector_oracle([1, 2, 0], &weights, mu, None);
        for r in 0..3 {
            for c in 0..3 {
                assert!((lat[r][c] - want[r][c]).abs() <= 1e-12 * want[r][r].abs().max(1.0));
            }
        }
    }
}

#[test]
fn corrector_equals_composed_transport() {
    let g = grid(16);
    let theta = ThetaSpectrum::shell(1, 1.0).unwrap();
    let b = NoiseBasis::build(theta.max_norm_inf()).unwrap();
    let v = rand_field(g, 3.0, 8);
    let mu = 1.0;
    let got = corrector_apply(&v, &theta, &b, mu).unwrap();
    let mut want = SpectralField::zeros(g);
    for &(k, t) in theta.entries() {
        for alpha in 0..2 {
            let once = transport_mode_apply(&v, k, alpha, &b).unwrap();
            let twice = transport_mode_apply(&once, neg(k), alpha, &b).unwrap();
            want.axpy(Complex64::new(1.5 * mu * t * t, 0.0), &twice);
        }
    }
    assert!(rel_diff(&got, &want) < 1e-12, "{}", rel_diff(&got, &want));
}

#[test]
fn corrector_is_dissipative_and_solenoidal() {
    let g = grid(24);
    let theta = ThetaSpectrum::shell(2, 1.0).unwrap();
    let b = NoiseBasis::build(theta.max_norm_inf()).unwrap();
    let constant = SpectralField::from_modes(
        g,
        &[([0, 0, 0], [1.0, 0.0, 0.0].map(|x| Complex64::new(x, 0.0)))],
    )
    .unwrap();
    assert_eq!(corrector_apply(&constant, &theta, &b, 1.0).unwrap().energy(), 0.0);
    for seed in 0..5 {
        let v = rand_field(g, 6.0, seed);
        let p = corrector_apply(&v, &theta, &b, 1.0).unwrap();
        assert!(p.inner(&v).re < 0.0);
        assert!(p.relative_divergence() < 1e-12);
        assert!(p.conjugate_asymmetry() <= 1e-14 * p.max_amplitude());
    }
}

#[test]
fn energy_identity_holds() {
    let g = grid(24);
    let theta = ThetaSpectrum::shell(2, 1.0).unwrap();
    let b = NoiseBasis::build(theta.max_norm_inf()).unwrap();
    let mu = 0.8;
    for seed in 0..5 {
        let v = rand_field(g, 5.0, 100 + seed);
        let p = corrector_apply(&v, &theta, &b, mu).unwrap();
        let qv = noise_quadratic_variation(&v, &theta, &b, mu).unwrap();
        let h1 = hnslab::spectral::sobolev_norm(&v, 1.0).powi(2);
        assert!((2.0 * p.inner(&v).re + qv).abs() <= 1e-9 * h1);
    }
}

#[test]
fn limit_error_scales_and_decreases() {
    let a = hnslab::experiments::orthogonal_amplitude([1, 0, 0]);
    let e1 = corrector_limit_error([1, 0, 0], a, 2, 1.0, 1.0).unwrap();
    let e2 = corrector_limit_error([1, 0, 0], a, 2, 1.0, 2.0).unwrap();
    assert!((e1 - e2).abs() <= 1e-13 * e1);
    let e4 = corrector_limit_error([1, 0, 0], a, 4, 1.0, 1.0).unwrap();
    assert!(e4.is_finite() && e4 < e1);

    // value against the frame-free lattice sum
    let m = corrector_oracle([1, 0, 0], &shell_weights(2, 1.0), 1.0, None);
    let got = matvec(&m, &a);
    let lap = -0.6 * TWO_PI * TWO_PI;
    let err: f64 = (0..3).map(|d| (got[d] - a[d] * lap).norm_sqr()).sum::<f64>().sqrt();
    assert!((err / lap.abs() - e1).abs() <= 1e-12 * e1);
    assert!(corrector_limit_error([0, 0, 0], a, 2, 1.0, 1.0).is_err());
}

fn transport_norm2(v: &SpectralField, k: Wavevector, a: [f64; 3]) -> f64 {
    v.modes()
        .map(|(m, c)| {
            let s = TWO_PI * dotr(a, realv(m));
            let p: CVec3 = matvec(&leray([m[0] + k[0], m[1] + k[1], m[2] + k[2]]), &c);
            s * s * p.iter().map(|z| z.norm_sqr()).sum::<f64>()
        })
        .sum()
}

#[test]
fn real_noise_covariance() {
    let g = grid(16);
    let theta = ThetaSpectrum::shell(1, 1.0).unwrap();
    let b = NoiseBasis::build(theta.max_norm_inf()).unwrap();

    let zero = real_noise_covariance_check(&theta, &b, &SpectralField::zeros(g)).unwrap();
    assert!(zero.pairs.iter().all(|p| p.complex_trace == 0.0 && p.real_trace == 0.0));
    assert!(zero.pairs.iter().all(|p| p.ratio.is_none()) && !zero.flagged);

    // single mode, single pair: traces from the 2x2 Gaussian expansion
    let k = [0, 1, 1];
    let w = 0.5f64.sqrt();
    let pair = ThetaSpectrum::from_entries(vec![(k, w), (neg(k), w)]).unwrap();
    let v = single_mode(g, [1, 0, 0]);
    let rep = real_noise_covariance_check(&pair, &b, &v).unwrap();
    assert_eq!(rep.pairs.len(), 1);
    let frame = b.frame(k).unwrap();
    let mut want = 0.0;
    for a in frame {
        // (T_k + T_-k) and i(T_k - T_-k) have disjoint supports here
        want += 2.0 * (transport_norm2(&v, k, a) + transport_norm2(&v, neg(k), a));
    }
    want *= w * w;
    let got = rep.pairs[0].complex_trace;
    assert!((got - want).abs() <= 1e-12 * want, "{got} {want}");
    assert!((rep.pairs[0].real_trace - want).abs() <= 1e-10 * want);

    let v = rand_field(g, 3.0, 77);
    let rep = real_noise_covariance_check(&theta, &b, &v).unwrap();
    assert_eq!(rep.pairs.len(), 16);
    let r0 = rep.pairs[0].ratio.unwrap();
    assert!((r0 - 1.0).abs() < 1e-10);
    for p in &rep.pairs {
        assert!((p.ratio.unwrap() - r0).abs() < 1e-10);
    }
    assert!(!rep.flagged, "{}", rep.max_mismatch);
}

#[test]
fn non_radial_spectrum_rejected() {
    let g = grid(16);
    let theta = ThetaSpectrum::from_entries(vec![
        ([1, 0, 0], 0.6),
        ([-1, 0, 0], 0.6),
        ([0, 1, 0], 0.3),
        ([0, -1, 0], 0.3),
    ])
    .unwrap();
    assert!(!theta.is_radially_symmetric());
    let b = NoiseBasis::build(1).unwrap();
    let v = helmholtz_project(&rand_field(g, 2.0, 1));
    assert!(corrector_apply(&v, &theta, &b, 1.0).is_err());
}
