//! Spatial-modulation codebook and sample generation at Bob and Mallory.

use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::Rng;

use crate::channel::ChannelSet;
use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::numerics::{CVector, C64};
use crate::rng::complex_normal;

/// One SM transmit vector `e_n s_m` with its bit label.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CodebookEntry {
    /// Spatial bits in the high-order positions, Gray symbol bits below.
    pub label: u32,
    /// Zero-based index into the active antennas.
    pub antenna: usize,
    /// Zero-based position on the PSK circle.
    pub symbol_index: usize,
    pub symbol: C64,
}

/// All `N_t * M` SM transmit vectors. Entry `k` has antenna `k / M` and
/// constellation point `k % M`.
#[derive(Debug, Clone, PartialEq)]
pub struct TxCodebook {
    entries: Vec<CodebookEntry>,
    n_active: usize,
    order: usize,
}

fn gray(k: usize) -> usize {
    k ^ (k >> 1)
}

/// Gray-labeled unit-energy `M`-PSK combined with `N_t` antenna indices.
///
/// BPSK sits on the real axis; higher orders are rotated by `pi / M`
/// (QPSK is the usual `(+-1 +-j)/sqrt(2)`).
pub fn build_codebook(n_active: usize, order: usize) -> Result<TxCodebook> {
    if !n_active.is_power_of_two() {
        return Err(Error::invalid(
            "n_t",
            alloc::format!("must be a power of two, got {n_active}"),
        ));
    }
    if !order.is_power_of_two() {
        return Err(Error::invalid(
            "m",
            alloc::format!("must be a power of two, got {order}"),
        ));
    }
    let symbol_bits = order.trailing_zeros();
    let offset = if order <= 2 { 0.0 } else { PI / order as f64 };
    let points: Vec<C64> = (0..order)
        .map(|k| {
            let phase = 2.0 * PI * k as f64 / order as f64 + offset;
            C64::new(libm::cos(phase), libm::sin(phase))
        })
        .collect();
    let mut entries = Vec::with_capacity(n_active * order);
    for antenna in 0..n_active {
        for (k, &symbol) in points.iter().enumerate() {
            entries.push(CodebookEntry {
                label: ((antenna << symbol_bits) | gray(k)) as u32,
                antenna,
                symbol_index: k,
                symbol,
            });
        }
    }
    Ok(TxCodebook {
        entries,
        n_active,
        order,
    })
}

impl TxCodebook {
    pub fn for_config(cfg: &SystemConfig) -> Result<Self> {
        build_codebook(cfg.n_active, cfg.constellation_order)
    }

    pub fn entries(&self) -> &[CodebookEntry] {
        &self.entries
    }

    pub fn entry(&self, index: usize) -> &CodebookEntry {
        &self.entries[index]
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn n_active(&self) -> usize {
        self.n_active
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn bits_per_use(&self) -> u32 {
        self.entries.len().trailing_zeros()
    }

    /// Codebook index carrying `label`, if any.
    pub fn index_of_label(&self, label: u32) -> Option<usize> {
        self.entries.iter().position(|e| e.label == label)
    }

    /// Number of differing bits between the labels of two entries.
    pub fn bit_errors(&self, sent: usize, detected: usize) -> u32 {
        (self.entries[sent].label ^ self.entries[detected].label).count_ones()
    }
}

/// Pre-beamforming receive vectors for one channel use.
#[derive(Debug, Clone, PartialEq)]
pub struct RxSample {
    /// `N_b` antenna outputs at Bob.
    pub y_b: CVector,
    /// `N_m` antenna outputs at Mallory.
    pub y_e: CVector,
    /// Codebook index that was sent.
    pub truth: usize,
}

fn complex_normal_vector<R: Rng + ?Sized>(rng: &mut R, len: usize, variance: f64) -> CVector {
    CVector::from_fn(len, |_, _| complex_normal(rng, variance))
}

/// `x_a = T (sqrt(beta P) e_n s_m + sqrt((1 - beta) P) P_AN n_a)`, an
/// `N`-vector.
pub fn transmit_alice<R: Rng + ?Sized>(
    entry: &CodebookEntry,
    ch: &ChannelSet,
    cfg: &SystemConfig,
    rng: &mut R,
) -> CVector {
    let n_active = ch.n_active();
    let n_a = complex_normal_vector(rng, n_active, cfg.sigma_a2);
    let mut s = &ch.p_an * n_a * C64::from(libm::sqrt((1.0 - cfg.beta) * cfg.p_alice));
    s[entry.antenna] += entry.symbol * libm::sqrt(cfg.beta * cfg.p_alice);
    ch.selection.embed(&s)
}

/// `x_m = sqrt(P_M) P_JM n_m`.
pub fn transmit_mallory<R: Rng + ?Sized>(
    ch: &ChannelSet,
    cfg: &SystemConfig,
    rng: &mut R,
) -> CVector {
    let n_m = complex_normal_vector(rng, ch.p_jm.ncols(), cfg.sigma_m2);
    &ch.p_jm * n_m * C64::from(libm::sqrt(cfg.p_mallory))
}

/// One channel use: Alice sends `codebook[index]`, Mallory jams, both
/// receivers add their own thermal noise.
pub fn receive<R: Rng + ?Sized>(
    codebook: &TxCodebook,
    index: usize,
    ch: &ChannelSet,
    cfg: &SystemConfig,
    rng: &mut R,
) -> RxSample {
    let x_a = transmit_alice(codebook.entry(index), ch, cfg, rng);
    let x_m = transmit_mallory(ch, cfg, rng);
    let n_b = complex_normal_vector(rng, ch.n_bob(), cfg.sigma_b2);
    let n_e = complex_normal_vector(rng, ch.n_mallory(), cfg.sigma_e2);
    let y_b = &ch.h * &x_a + &ch.f * &x_m + n_b;
    let y_e = &ch.g * &x_a + &ch.mself * &x_m + n_e;
    RxSample {
        y_b,
        y_e,
        truth: index,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{norm, CMatrix};
    use crate::rng::stream;

    #[test]
    fn bpsk_two_antennas() {
        let cb = build_codebook(2, 2).unwrap();
        assert_eq!(cb.len(), 4);
        let want = [(0, 1.0), (0, -1.0), (1, 1.0), (1, -1.0)];
        for (e, (a, s)) in cb.entries().iter().zip(want) {
            assert_eq!(e.antenna, a);
            assert!((e.symbol - C64::new(s, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn qpsk_eight_antennas() {
        let cb = build_codebook(8, 4).unwrap();
        assert_eq!(cb.len(), 32);
        assert_eq!(cb.bits_per_use(), 5);
        let mean: f64 = cb
            .entries()
            .iter()
            .map(|e| e.symbol.norm_sqr())
            .sum::<f64>()
            / 32.0;
        assert!((mean - 1.0).abs() < 1e-15);
        // spatial bits are the high-order bits
        assert_eq!(cb.entry(31).label >> 2, 7);
    }

    #[test]
    fn labels_are_a_bijection() {
        for (nt, m) in [(1, 2), (2, 4), (8, 4), (4, 8), (16, 16)] {
            let cb = build_codebook(nt, m).unwrap();
            let mut labels: Vec<u32> = cb.entries().iter().map(|e| e.label).collect();
            labels.sort_unstable();
            assert_eq!(labels, (0..(nt * m) as u32).collect::<Vec<_>>());
            for (k, e) in cb.entries().iter().enumerate() {
                assert_eq!(cb.index_of_label(e.label), Some(k));
            }
        }
    }

    #[test]
    fn gray_neighbours_differ_by_one_bit() {
        let cb = build_codebook(1, 8).unwrap();
        for k in 0..8 {
            assert_eq!(cb.bit_errors(k, (k + 1) % 8), 1);
        }
    }

    #[test]
    fn rejects_non_powers_of_two() {
        assert!(build_codebook(3, 4).is_err());
        assert!(build_codebook(4, 6).is_err());
    }

    fn realize(cfg: &SystemConfig) -> ChannelSet {
        ChannelSet::realize(cfg, 0).unwrap()
    }

    #[test]
    fn alice_without_an() {
        let cfg = SystemConfig {
            beta: 1.0,
            ..Default::default()
        };
        let ch = realize(&cfg);
        let cb = TxCodebook::for_config(&cfg).unwrap();
        let mut rng = stream(1, &[1]);
        let e = cb.entry(13);
        let x = transmit_alice(e, &ch, &cfg, &mut rng);
        assert!((norm(&x).powi(2) - cfg.p_alice).abs() < 1e-12);
        let antenna = ch.selection.indices()[e.antenna];
        assert!((x[antenna] - e.symbol * cfg.p_alice.sqrt()).norm() < 1e-12);
    }

    #[test]
    fn alice_power_accounting() {
        for (beta, an_mode) in [
            (0.0, crate::AnMode::NullSpace),
            (0.0, crate::AnMode::Random),
            (0.5, crate::AnMode::NullSpace),
        ] {
            let cfg = SystemConfig {
                beta,
                an_mode,
                ..Default::default()
            };
            let ch = realize(&cfg);
            let cb = TxCodebook::for_config(&cfg).unwrap();
            let mut rng = stream(2, &[1]);
            let n = 10_000;
            let mut total = 0.0;
            let mut an = 0.0;
            for i in 0..n {
                let e = cb.entry(i % cb.len());
                let x = transmit_alice(e, &ch, &cfg, &mut rng);
                total += norm(&x).powi(2);
                let mut sym = x.clone();
                sym[ch.selection.indices()[e.antenna]] -=
                    e.symbol * (cfg.beta * cfg.p_alice).sqrt();
                an += norm(&sym).powi(2);
            }
            let total = total / n as f64;
            assert!(
                (total - cfg.p_alice).abs() < 0.02 * cfg.p_alice,
                "beta {beta}: {total}"
            );
            // what remains after removing the symbol is the AN part
            let an = an / n as f64;
            assert!(
                (an - (1.0 - beta) * cfg.p_alice).abs() <= 0.02 * cfg.p_alice,
                "{an}"
            );
        }
    }

    #[test]
    fn mallory_power_and_null() {
        let cfg = SystemConfig {
            n_mallory: 4,
            ..Default::default()
        };
        let ch = realize(&cfg);
        let mut rng = stream(3, &[1]);
        let n = 10_000;
        let mut total = 0.0;
        for _ in 0..n {
            let x = transmit_mallory(&ch, &cfg, &mut rng);
            total += norm(&x).powi(2);
            let leak = (ch.u_er.adjoint() * &ch.mself * &x)[(0, 0)].norm();
            assert!(leak <= 1e-9 * norm(&x));
        }
        let total = total / n as f64;
        assert!((total - 1.0).abs() < 0.02, "{total}");

        let silent = SystemConfig {
            p_mallory: 0.0,
            ..cfg
        };
        let x = transmit_mallory(&ch, &silent, &mut rng);
        assert!(x.iter().all(|z| *z == C64::new(0.0, 0.0)));
    }

    #[test]
    fn noiseless_receive() {
        let cfg = SystemConfig {
            beta: 1.0,
            p_mallory: 0.0,
            sigma_b2: 0.0,
            sigma_e2: 0.0,
            ..Default::default()
        };
        let ch = realize(&cfg);
        let cb = TxCodebook::for_config(&cfg).unwrap();
        let mut rng = stream(4, &[1]);
        let e = cb.entry(6);
        let rx = receive(&cb, 6, &ch, &cfg, &mut rng);
        let expect = ch.ht.column(e.antenna) * (e.symbol * cfg.p_alice.sqrt());
        assert!(norm(&(rx.y_b - expect)) < 1e-12);
        assert_eq!(rx.truth, 6);
    }

    #[test]
    fn bob_noise_covariance() {
        let cfg = SystemConfig {
            beta: 1.0,
            p_mallory: 0.0,
            sigma_b2: 2.0,
            ..Default::default()
        };
        let ch = realize(&cfg);
        let cb = TxCodebook::for_config(&cfg).unwrap();
        let mut rng = stream(5, &[1]);
        let e = cb.entry(0);
        let mean = ch.ht.column(e.antenna) * (e.symbol * cfg.p_alice.sqrt());
        let n = 20_000;
        let mut cov = CMatrix::zeros(6, 6);
        for _ in 0..n {
            let d = receive(&cb, 0, &ch, &cfg, &mut rng).y_b - &mean;
            cov += &d * d.adjoint();
        }
        cov /= C64::from(n as f64);
        for i in 0..6 {
            for j in 0..6 {
                let want = if i == j { 2.0 } else { 0.0 };
                assert!(
                    (cov[(i, j)] - C64::from(want)).norm() < 0.05 * 2.0,
                    "({i},{j}) {}",
                    cov[(i, j)]
                );
            }
        }
    }

    #[test]
    fn receive_is_reproducible() {
        let cfg = SystemConfig::default();
        let ch = realize(&cfg);
        let cb = TxCodebook::for_config(&cfg).unwrap();
        let a = receive(&cb, 3, &ch, &cfg, &mut stream(6, &[1]));
        let b = receive(&cb, 3, &ch, &cfg, &mut stream(6, &[1]));
        assert_eq!(a, b);
    }
}
