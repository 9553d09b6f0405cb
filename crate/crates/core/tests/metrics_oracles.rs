//! Monte-Carlo estimators against quadrature, sampling and limiting cases.

use ssm_core::beamformer::design;
use ssm_core::metrics::{
    discrete_input_mi, discrete_input_mi_unclamped, mutual_info_mc, noise_cov_bob, sjnr, Detector,
    Side,
};
use ssm_core::numerics::{CMatrix, C64};
use ssm_core::rng::stream;
use ssm_core::signal::receive;
use ssm_core::{ChannelSet, Method, SystemConfig, TxCodebook};

const TAG: u64 = 0x6d65_7472;

/// `log2(1 + e^x)` without overflow.
fn log2_1p_exp(x: f64) -> f64 {
    if x > 0.0 {
        (x + (-x).exp().ln_1p()) / std::f64::consts::LN_2
    } else {
        x.exp().ln_1p() / std::f64::consts::LN_2
    }
}

/// MI of `{+a, -a}` in `CN(0, 1)` noise by Simpson's rule. Only the real
/// part of the noise matters; it is `N(0, 1/2)`.
fn bpsk_mi_quadrature(snr_db: f64) -> f64 {
    let a = 10f64.powf(snr_db / 20.0);
    let sd = 0.5f64.sqrt();
    let (lo, hi) = (a - 12.0 * sd, a + 12.0 * sd);
    let n = 20_000;
    let h = (hi - lo) / n as f64;
    let f = |t: f64| {
        let pdf = (-(t - a) * (t - a) / (2.0 * sd * sd)).exp()
            / (sd * (2.0 * std::f64::consts::PI).sqrt());
        pdf * log2_1p_exp(-4.0 * a * t)
    };
    let mut acc = f(lo) + f(hi);
    for i in 1..n {
        acc += f(lo + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    1.0 - acc * h / 3.0
}

#[test]
fn quadrature_reference_limits() {
    assert!(bpsk_mi_quadrature(-40.0) < 1e-3);
    assert!((bpsk_mi_quadrature(20.0) - 1.0).abs() < 1e-9);
    // BPSK at 0 dB on a complex channel, from tabulated capacity curves
    assert!((bpsk_mi_quadrature(0.0) - 0.7).abs() < 0.05);
}

#[test]
fn bpsk_estimator_matches_quadrature() {
    for (i, snr) in [-5.0, 0.0, 5.0, 10.0].into_iter().enumerate() {
        let a = 10f64.powf(snr / 20.0);
        let points = [C64::new(a, 0.0), C64::new(-a, 0.0)];
        let est = discrete_input_mi(&points, 20_000, &mut stream(3, &[TAG, 1, i as u64])).unwrap();
        let exact = bpsk_mi_quadrature(snr);
        assert!((est - exact).abs() <= 0.02, "{snr} dB: {est} vs {exact}");
    }
}

fn operating_points() -> Vec<SystemConfig> {
    let mut out = Vec::new();
    for p_m in [1.0, 10.0] {
        for snr in [-5.0, 0.0, 5.0, 10.0] {
            out.push(SystemConfig::default().with_snr_db(snr).with_p_mallory(p_m));
        }
    }
    out
}

/// The operating-point MI is a realization average; that average, and the
/// RMS per-realization change, must both stay within 0.03 bits.
#[test]
fn halving_noise_draws_moves_mi_little() {
    let n_real = 20;
    let mut sq = 0.0;
    let mut count = 0;
    for (k, cfg) in operating_points().iter().enumerate() {
        for side in [Side::Bob, Side::Mallory] {
            let (mut full_avg, mut half_avg) = (0.0, 0.0);
            for r in 0..n_real {
                let ch = ChannelSet::realize(cfg, r).unwrap();
                let u = match side {
                    Side::Bob => design(Method::MaxSjnr, &ch, cfg).unwrap().u_br,
                    Side::Mallory => ch.u_er.clone(),
                };
                let key = [TAG, 2, k as u64, r];
                let full = mutual_info_mc(&u, side, &ch, cfg, 500, &mut stream(5, &key)).unwrap();
                let half = mutual_info_mc(&u, side, &ch, cfg, 250, &mut stream(6, &key)).unwrap();
                full_avg += full / n_real as f64;
                half_avg += half / n_real as f64;
                sq += (full - half) * (full - half);
                count += 1;
            }
            let d = (full_avg - half_avg).abs();
            assert!(d < 0.03, "point {k} {side:?}: averages differ by {d}");
        }
    }
    let rms = (sq / count as f64).sqrt();
    assert!(rms < 0.03, "per-realization RMS change {rms}");
}

#[test]
fn mi_bounds_and_scale_invariance() {
    let k = 5.0;
    for (i, cfg) in operating_points().iter().enumerate() {
        for r in 0..10 {
            let ch = ChannelSet::realize(cfg, r).unwrap();
            for method in Method::ALL {
                let bf = design(method, &ch, cfg).unwrap();
                let key = [TAG, 3, i as u64, r];
                let mi = mutual_info_mc(&bf.u_br, Side::Bob, &ch, cfg, 200, &mut stream(1, &key))
                    .unwrap();
                assert!((0.0..=k).contains(&mi));
                let scaled = &bf.u_br * C64::from(7.5);
                let mi2 = mutual_info_mc(&scaled, Side::Bob, &ch, cfg, 200, &mut stream(1, &key))
                    .unwrap();
                assert!((mi - mi2).abs() <= 1e-9, "{mi} vs {mi2}");
            }
        }
    }
    // far apart points: unclamped estimate only jitters past log2 K
    let pts: Vec<C64> = (0..32).map(|i| C64::new(40.0 * i as f64, 0.0)).collect();
    let raw = discrete_input_mi_unclamped(&pts, 100, &mut stream(1, &[TAG, 4])).unwrap();
    assert!((raw - k).abs() <= 0.02);
}

#[test]
fn bob_covariance_matches_samples() {
    let cfg = SystemConfig {
        an_mode: ssm_core::AnMode::Random,
        p_mallory: 10.0,
        ..SystemConfig::default().with_snr_db(5.0)
    };
    let ch = ChannelSet::realize(&cfg, 3).unwrap();
    let cb = TxCodebook::for_config(&cfg).unwrap();
    let n_b = ch.n_bob();
    let mut rng = stream(1, &[TAG, 5]);
    let n = 100_000;
    let mut acc = CMatrix::zeros(n_b, n_b);
    let amp = (cfg.beta * cfg.p_alice).sqrt();
    for t in 0..n {
        let idx = t % cb.len();
        let rx = receive(&cb, idx, &ch, &cfg, &mut rng);
        let e = cb.entry(idx);
        let w = rx.y_b - ch.ht.column(e.antenna) * (e.symbol * amp);
        acc += &w * w.adjoint();
    }
    let emp = acc / C64::from(n as f64);
    let model = noise_cov_bob(&ch, &cfg);
    let rel = (emp - model.as_matrix()).norm() / model.as_matrix().norm();
    assert!(rel <= 0.03, "relative error {rel}");
}

#[test]
fn very_low_snr_detection_is_a_uniform_guess() {
    let cfg = SystemConfig::default().with_snr_db(-60.0);
    let cb = TxCodebook::for_config(&cfg).unwrap();
    let k = cb.len() as f64;
    let mut rng = stream(1, &[TAG, 6]);
    let (mut sym_err, mut bit_err, mut bits) = (0u64, 0u64, 0u64);
    let trials = 100_000;
    for r in 0..20 {
        let ch = ChannelSet::realize(&cfg, r).unwrap();
        let bf = design(Method::MaxSjnr, &ch, &cfg).unwrap();
        let det = Detector::new(&bf, &ch, &cfg, &cb);
        for _ in 0..trials / 20 {
            let sent = rand::Rng::gen_range(&mut rng, 0..cb.len());
            let got = det.detect(&receive(&cb, sent, &ch, &cfg, &mut rng).y_b);
            sym_err += u64::from(got != sent);
            bit_err += u64::from(cb.bit_errors(sent, got));
            bits += u64::from(cb.bits_per_use());
        }
    }
    let ser = sym_err as f64 / trials as f64;
    let ber = bit_err as f64 / bits as f64;
    assert!((ser - (k - 1.0) / k).abs() <= 0.02, "SER {ser}");
    assert!((ber - 0.5).abs() <= 0.02, "BER {ber}");
}

#[test]
fn noiseless_detection_is_exact() {
    let cfg = SystemConfig {
        p_mallory: 0.0,
        ..SystemConfig::default().with_snr_db(200.0)
    };
    let cb = TxCodebook::for_config(&cfg).unwrap();
    let mut rng = stream(1, &[TAG, 7]);
    for r in 0..10 {
        let ch = ChannelSet::realize(&cfg, r).unwrap();
        for method in Method::ALL {
            let bf = design(method, &ch, &cfg).unwrap();
            let det = Detector::new(&bf, &ch, &cfg, &cb);
            for sent in 0..cb.len() {
                assert_eq!(
                    det.detect(&receive(&cb, sent, &ch, &cfg, &mut rng).y_b),
                    sent
                );
            }
        }
    }
}

#[test]
fn sjnr_beamformer_dominates() {
    for (i, cfg) in operating_points().iter().enumerate() {
        for r in 0..50 {
            let ch = ChannelSet::realize(cfg, 1000 + r).unwrap();
            let best = sjnr(&design(Method::MaxSjnr, &ch, cfg).unwrap().u_br, &ch, cfg);
            for method in [Method::MaxRp, Method::MaxWfrp, Method::MaxRpZfc] {
                let other = sjnr(&design(method, &ch, cfg).unwrap().u_br, &ch, cfg);
                assert!(
                    best >= other * (1.0 - 1e-9),
                    "point {i} r {r} {method}: {best} < {other}"
                );
            }
        }
    }
}
