//! Link metrics: interference-plus-noise covariances, SJNR, discrete-input
//! mutual information and secrecy rate, ML detection and BER, plus the
//! per-method FLOP model.
//!
//! Mutual information is computed on the scalar channel after receive
//! beamforming. With `W = u^H R u` the interference-plus-noise power at the
//! beamformer output, the whitened output is
//! `y' = sqrt(beta P / W) (u^H H T)_n s_m + n'` with `n' ~ CN(0, 1)`, and
//!
//! ```text
//! I = log2 K - 1/K sum_i E_n' log2 sum_j exp(-|a_i - a_j + n'|^2 + |n'|^2)
//! ```
//!
//! over the `K = N_t M` effective constellation points `a_k`.

use alloc::vec::Vec;

use rand::Rng;

use crate::beamformer::{self, Beamformer, Method};
use crate::channel::ChannelSet;
use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::numerics::{CMatrix, CVector, HermitianMatrix, C64};
use crate::rng::complex_normal;
use crate::signal::{self, TxCodebook};

/// Receiver whose beamformer output is being evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Bob,
    Mallory,
}

/// `R_w = (1-beta) P sigma_a^2 H T P_AN P_AN^H T^H H^H
///       + P_M sigma_m^2 F P_JM P_JM^H F^H + sigma_b^2 I`.
pub fn noise_cov_bob(ch: &ChannelSet, cfg: &SystemConfig) -> HermitianMatrix {
    let an = HermitianMatrix::gram(&(&ch.ht * &ch.p_an))
        .scaled((1.0 - cfg.beta) * cfg.p_alice * cfg.sigma_a2);
    let jam = HermitianMatrix::gram(&ch.jamming_channel_bob()).scaled(cfg.p_mallory * cfg.sigma_m2);
    an.plus(&jam).plus_identity(cfg.sigma_b2)
}

fn row_power(u: &CVector, m: &CMatrix) -> f64 {
    (u.adjoint() * m).iter().map(|z| z.norm_sqr()).sum()
}

/// Interference-plus-noise power at a beamformer output.
///
/// For [`Side::Mallory`] `u` is Mallory's receive vector and both quadratic
/// forms use it.
pub fn scalar_inpn_cov(u: &CVector, ch: &ChannelSet, cfg: &SystemConfig, side: Side) -> f64 {
    match side {
        Side::Bob => noise_cov_bob(ch, cfg).quad_form(u),
        Side::Mallory => {
            let an =
                row_power(u, &(&ch.gt * &ch.p_an)) * (1.0 - cfg.beta) * cfg.p_alice * cfg.sigma_a2;
            let si = row_power(u, &(&ch.mself * &ch.p_jm)) * cfg.p_mallory * cfg.sigma_m2;
            an + si + cfg.sigma_e2
        }
    }
}

/// `(beta P / N_t) u^H H T T^H H^H u / (u^H R_w u)`.
pub fn sjnr(u: &CVector, ch: &ChannelSet, cfg: &SystemConfig) -> f64 {
    let signal = cfg.beta * cfg.p_alice / cfg.n_active as f64 * ch.signal_gram_bob().quad_form(u);
    let inpn = noise_cov_bob(ch, cfg).quad_form(u);
    if signal == 0.0 {
        0.0
    } else {
        signal / inpn
    }
}

/// Per-antenna gains `u^H H T` (Bob) or `u^H G T` (Mallory).
fn beam_gains(u: &CVector, ch: &ChannelSet, side: Side) -> CVector {
    let eff = match side {
        Side::Bob => &ch.ht,
        Side::Mallory => &ch.gt,
    };
    (u.adjoint() * eff).transpose()
}

/// Noise-normalized constellation seen at a beamformer output:
/// `sqrt(beta P / W) g_n s_m` for every codebook entry, in codebook order.
pub fn effective_constellation(
    u: &CVector,
    side: Side,
    ch: &ChannelSet,
    cfg: &SystemConfig,
    codebook: &TxCodebook,
) -> Result<Vec<C64>> {
    let w = scalar_inpn_cov(u, ch, cfg, side);
    if w.is_nan() || w <= 0.0 {
        return Err(Error::invalid(
            "sigma_b2",
            "beamformer output has zero interference-plus-noise power",
        ));
    }
    let gains = beam_gains(u, ch, side);
    let amp = libm::sqrt(cfg.beta * cfg.p_alice / w);
    Ok(codebook
        .entries()
        .iter()
        .map(|e| gains[e.antenna] * e.symbol * amp)
        .collect())
}

/// Monte-Carlo estimate of the discrete-input MI (bits) of `y = a_k + n`,
/// `n ~ CN(0, 1)`, with `n_noise` noise draws per point. Not clamped.
pub fn discrete_input_mi_unclamped<R: Rng + ?Sized>(
    points: &[C64],
    n_noise: usize,
    rng: &mut R,
) -> Result<f64> {
    if n_noise == 0 {
        return Err(Error::invalid("n_noise", "must be at least 1"));
    }
    let k = points.len();
    if k == 0 {
        return Err(Error::invalid("points", "empty constellation"));
    }
    let mut diff = Vec::with_capacity(k);
    let mut dist = Vec::with_capacity(k);
    let mut expo = alloc::vec![0.0_f64; k];
    let mut total = 0.0;
    for a in points {
        diff.clear();
        dist.clear();
        for b in points {
            let d = a - b;
            diff.push(d);
            dist.push(d.norm_sqr());
        }
        let mut acc = 0.0;
        for _ in 0..n_noise {
            let n = complex_normal(rng, 1.0);
            // -|d + n|^2 + |n|^2 = -|d|^2 - 2 Re(d conj(n))
            let mut peak = f64::NEG_INFINITY;
            for ((e, d), dd) in expo.iter_mut().zip(&diff).zip(&dist) {
                *e = -dd - 2.0 * (d.re * n.re + d.im * n.im);
                peak = peak.max(*e);
            }
            let sum: f64 = expo
                .iter()
                .map(|&e| {
                    let x = e - peak;
                    // below e^-745 the term underflows to zero anyway
                    if x < -745.0 {
                        0.0
                    } else {
                        libm::exp(x)
                    }
                })
                .sum();
            acc += peak + libm::log(sum);
        }
        total += acc / n_noise as f64;
    }
    let log2k = libm::log2(k as f64);
    Ok(log2k - total / (k as f64 * core::f64::consts::LN_2))
}

/// [`discrete_input_mi_unclamped`] clamped to `[0, log2 K]`.
pub fn discrete_input_mi<R: Rng + ?Sized>(
    points: &[C64],
    n_noise: usize,
    rng: &mut R,
) -> Result<f64> {
    let raw = discrete_input_mi_unclamped(points, n_noise, rng)?;
    Ok(raw.clamp(0.0, libm::log2(points.len() as f64)))
}

/// Mutual information between the SM transmit vector and the beamformer
/// output at `side`, in bits per channel use.
pub fn mutual_info_mc<R: Rng + ?Sized>(
    u: &CVector,
    side: Side,
    ch: &ChannelSet,
    cfg: &SystemConfig,
    n_noise: usize,
    rng: &mut R,
) -> Result<f64> {
    if n_noise == 0 {
        return Err(Error::invalid("n_noise", "must be at least 1"));
    }
    let codebook = TxCodebook::for_config(cfg)?;
    let points = effective_constellation(u, side, ch, cfg, &codebook)?;
    discrete_input_mi(&points, n_noise, rng)
}

/// `max(0, I(x; y_b) - I(x; y_e))` for one channel realization, with Bob
/// using `bf` and Mallory using `ch.u_er`.
///
/// Both sides see the same whitened noise draws.
pub fn secrecy_rate<R: Rng + Clone>(
    bf: &Beamformer,
    ch: &ChannelSet,
    cfg: &SystemConfig,
    n_noise: usize,
    rng: &mut R,
) -> Result<f64> {
    let mut shared = rng.clone();
    let i_b = mutual_info_mc(&bf.u_br, Side::Bob, ch, cfg, n_noise, rng)?;
    let i_e = mutual_info_mc(&ch.u_er, Side::Mallory, ch, cfg, n_noise, &mut shared)?;
    Ok((i_b - i_e).max(0.0))
}

/// Minimum-distance detector on Bob's whitened beamformer output.
#[derive(Debug, Clone)]
pub struct Detector {
    u_br: CVector,
    /// `1 / sqrt(W)`, or 1 when the output is noise-free.
    whiten: f64,
    references: Vec<C64>,
}

impl Detector {
    pub fn new(
        bf: &Beamformer,
        ch: &ChannelSet,
        cfg: &SystemConfig,
        codebook: &TxCodebook,
    ) -> Self {
        let w = scalar_inpn_cov(&bf.u_br, ch, cfg, Side::Bob);
        let whiten = if w > 0.0 { 1.0 / libm::sqrt(w) } else { 1.0 };
        let gains = beam_gains(&bf.u_br, ch, Side::Bob);
        let amp = libm::sqrt(cfg.beta * cfg.p_alice) * whiten;
        let references = codebook
            .entries()
            .iter()
            .map(|e| gains[e.antenna] * e.symbol * amp)
            .collect();
        Self {
            u_br: bf.u_br.clone(),
            whiten,
            references,
        }
    }

    /// Codebook index closest to the whitened output; lowest index on ties.
    pub fn detect(&self, y_b: &CVector) -> usize {
        let z = self.u_br.dotc(y_b) * self.whiten;
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (k, r) in self.references.iter().enumerate() {
            let d = (z - r).norm_sqr();
            if d < best_d {
                best = k;
                best_d = d;
            }
        }
        best
    }
}

pub fn ml_detect(
    y_b: &CVector,
    bf: &Beamformer,
    ch: &ChannelSet,
    cfg: &SystemConfig,
    codebook: &TxCodebook,
) -> usize {
    Detector::new(bf, ch, cfg, codebook).detect(y_b)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BitErrors {
    pub bits: u64,
    pub errors: u64,
}

impl BitErrors {
    pub fn rate(&self) -> f64 {
        if self.bits == 0 {
            0.0
        } else {
            self.errors as f64 / self.bits as f64
        }
    }

    pub fn merge(self, other: Self) -> Self {
        Self {
            bits: self.bits + other.bits,
            errors: self.errors + other.errors,
        }
    }
}

/// `n_trials` channel uses on a fixed realization with uniformly drawn
/// codebook entries.
pub fn ber_trials<R: Rng + ?Sized>(
    bf: &Beamformer,
    ch: &ChannelSet,
    cfg: &SystemConfig,
    codebook: &TxCodebook,
    n_trials: usize,
    rng: &mut R,
) -> BitErrors {
    let detector = Detector::new(bf, ch, cfg, codebook);
    let bits_per_use = u64::from(codebook.bits_per_use());
    let mut out = BitErrors::default();
    for _ in 0..n_trials {
        let sent = rng.gen_range(0..codebook.len());
        let rx = signal::receive(codebook, sent, ch, cfg, rng);
        let got = detector.detect(&rx.y_b);
        out.bits += bits_per_use;
        out.errors += u64::from(codebook.bit_errors(sent, got));
    }
    out
}

/// BER of `method` over a stream of channel realizations; trial `t` uses
/// `channels[t % channels.len()]`.
pub fn ber<R: Rng + ?Sized>(
    method: Method,
    channels: &[ChannelSet],
    cfg: &SystemConfig,
    n_trials: usize,
    rng: &mut R,
) -> Result<f64> {
    if n_trials == 0 {
        return Err(Error::invalid("n_ber_trials", "must be at least 1"));
    }
    if channels.is_empty() {
        return Err(Error::invalid("channels", "need at least one realization"));
    }
    let codebook = TxCodebook::for_config(cfg)?;
    let per = n_trials / channels.len();
    let extra = n_trials % channels.len();
    let mut total = BitErrors::default();
    for (i, ch) in channels.iter().enumerate() {
        let trials = per + usize::from(i < extra);
        if trials == 0 {
            continue;
        }
        let bf = beamformer::design(method, ch, cfg)?;
        total = total.merge(ber_trials(&bf, ch, cfg, &codebook, trials, rng));
    }
    Ok(total.rate())
}

/// Approximate FLOP count of computing one beamformer with `n_bob` receive
/// antennas.
pub fn flop_estimate(method: Method, n_bob: usize) -> f64 {
    let n = n_bob as f64;
    let cube = n * n * n;
    match method {
        Method::MaxRp => 129.0 * cube,
        Method::MaxWfrp => 266.0 * cube + 3.0 * n,
        Method::MaxRpZfc => 259.0 * cube,
        Method::MaxSjnr => 268.0 * cube + 3.0 * n,
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TrialCounts {
    /// Channel realizations attempted.
    pub realizations: u64,
    /// Realizations where the method could not be built (ZFC only).
    pub zfc_infeasible: u64,
    pub ber_trials: u64,
    pub ber_bits: u64,
    pub bit_errors: u64,
    pub n_noise: u64,
}

impl TrialCounts {
    pub fn feasible(&self) -> u64 {
        self.realizations - self.zfc_infeasible
    }
}

/// Aggregate for one `(method, SNR, P_M)` point.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRecord {
    pub method: Method,
    pub snr_db: f64,
    pub p_m: f64,
    /// Mean per-realization secrecy rate, bits per channel use.
    pub avg_sr: f64,
    pub ber: f64,
    /// Standard error of `ber` across realizations.
    pub ber_std_err: f64,
    /// `10 log10` of the mean linear SJNR.
    pub avg_sjnr_db: f64,
    /// Per-realization secrecy rates in realization order.
    pub sr_samples: Vec<f64>,
    pub trial_counts: TrialCounts,
}

impl MetricsRecord {
    /// Standard error of `avg_sr`.
    pub fn sr_std_err(&self) -> f64 {
        mean_and_std_err(&self.sr_samples).1
    }
}

/// Sample mean and standard error of the mean (zero for fewer than two
/// samples).
pub fn mean_and_std_err(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, libm::sqrt(var / n as f64))
}

/// `(value, F(value))` pairs of the empirical CDF, ascending.
pub fn empirical_cdf(samples: &[f64]) -> Vec<(f64, f64)> {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted
        .into_iter()
        .enumerate()
        .map(|(i, x)| (x, (i + 1) as f64 / n))
        .collect()
}
