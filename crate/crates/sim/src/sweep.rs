//! Parallel Monte-Carlo sweep over `(P_M, SNR, method)`.
//!
//! Work is split by channel realization. Every random draw is keyed by
//! `(seed, tag, realization, snr index, p_m index)`, and per-realization
//! results are reduced in index order, so the records do not depend on
//! the thread count or scheduling.

use std::time::{Duration, Instant};

use rayon::prelude::*;

use ssm_core::beamformer::design;
use ssm_core::metrics::{self, mutual_info_mc, BitErrors, Side};
use ssm_core::rng::{stream, tag};
use ssm_core::{ChannelSet, Error, Method, MetricsRecord, SystemConfig, TrialCounts, TxCodebook};

use crate::config::SweepSpec;

#[derive(Debug, thiserror::Error)]
pub enum SweepError {
    #[error("invalid sweep: {0}")]
    Config(#[from] crate::config::ConfigError),

    #[error("invalid scenario: {0}")]
    Scenario(Error),

    #[error("realization {index}: {source}")]
    Realization { index: u64, source: Error },

    #[error("cannot build a pool of {threads} threads: {source}")]
    ThreadPool {
        threads: usize,
        source: rayon::ThreadPoolBuildError,
    },
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    /// Ordered by `p_m_list`, then `snr_grid_db`, then `methods`.
    pub records: Vec<MetricsRecord>,
    /// Kept apart from the records, which must be reproducible.
    pub wall_clock: Duration,
}

#[derive(Debug, Clone, Copy)]
enum Cell {
    Infeasible,
    Done { sr: f64, sjnr: f64, ber: BitErrors },
}

/// BER trials assigned to realization `r`; the remainder goes to the
/// lowest indices.
fn ber_share(n_trials: usize, n_real: usize, r: usize) -> usize {
    n_trials / n_real + usize::from(r < n_trials % n_real)
}

fn evaluate(
    cfg: &SystemConfig,
    spec: &SweepSpec,
    codebook: &TxCodebook,
    r: usize,
) -> Result<Vec<Cell>, Error> {
    let index = r as u64;
    let ch = ChannelSet::realize(cfg, index)?;
    let trials = ber_share(spec.n_ber_trials, spec.n_channel_realizations, r);
    let mut cells =
        Vec::with_capacity(spec.p_m_list.len() * spec.snr_grid_db.len() * spec.methods.len());
    for (pi, &p_m) in spec.p_m_list.iter().enumerate() {
        for (si, &snr) in spec.snr_grid_db.iter().enumerate() {
            let point = cfg.with_snr_db(snr).with_p_mallory(p_m);
            let key = [tag::MI, index, si as u64, pi as u64];
            // common noise for both receivers and every method
            let i_e = mutual_info_mc(
                &ch.u_er,
                Side::Mallory,
                &ch,
                &point,
                spec.n_noise,
                &mut stream(cfg.seed, &key),
            )?;
            for &method in &spec.methods {
                let bf = match design(method, &ch, &point) {
                    Ok(bf) => bf,
                    Err(Error::ZfcInfeasible { .. }) => {
                        cells.push(Cell::Infeasible);
                        continue;
                    }
                    Err(e) => return Err(e),
                };
                let i_b = mutual_info_mc(
                    &bf.u_br,
                    Side::Bob,
                    &ch,
                    &point,
                    spec.n_noise,
                    &mut stream(cfg.seed, &key),
                )?;
                let sjnr = metrics::sjnr(&bf.u_br, &ch, &point);
                let mut ber_rng = stream(cfg.seed, &[tag::BER, index, si as u64, pi as u64]);
                let ber = metrics::ber_trials(&bf, &ch, &point, codebook, trials, &mut ber_rng);
                cells.push(Cell::Done {
                    sr: (i_b - i_e).max(0.0),
                    sjnr,
                    ber,
                });
            }
        }
    }
    Ok(cells)
}

fn reduce(spec: &SweepSpec, per_real: &[Vec<Cell>]) -> Vec<MetricsRecord> {
    let mut records = Vec::new();
    let mut c = 0;
    for &p_m in &spec.p_m_list {
        for &snr in &spec.snr_grid_db {
            for &method in &spec.methods {
                records.push(reduce_cell(
                    spec,
                    method,
                    snr,
                    p_m,
                    per_real.iter().map(|cells| cells[c]),
                ));
                c += 1;
            }
        }
    }
    records
}

fn reduce_cell(
    spec: &SweepSpec,
    method: Method,
    snr_db: f64,
    p_m: f64,
    cells: impl Iterator<Item = Cell>,
) -> MetricsRecord {
    let mut counts = TrialCounts {
        n_noise: spec.n_noise as u64,
        ..Default::default()
    };
    let mut sr_samples = Vec::new();
    let mut sjnr_sum = 0.0;
    let mut total = BitErrors::default();
    let mut per_real_ber = Vec::new();
    for (r, cell) in cells.enumerate() {
        counts.realizations += 1;
        match cell {
            Cell::Infeasible => counts.zfc_infeasible += 1,
            Cell::Done { sr, sjnr, ber } => {
                sr_samples.push(sr);
                sjnr_sum += sjnr;
                total = total.merge(ber);
                counts.ber_trials +=
                    ber_share(spec.n_ber_trials, spec.n_channel_realizations, r) as u64;
                if ber.bits > 0 {
                    per_real_ber.push(ber.rate());
                }
            }
        }
    }
    counts.ber_bits = total.bits;
    counts.bit_errors = total.errors;
    let feasible = sr_samples.len();
    let (avg_sr, avg_sjnr_db, ber) = if feasible == 0 {
        (f64::NAN, f64::NAN, f64::NAN)
    } else {
        let mean_sr = sr_samples.iter().sum::<f64>() / feasible as f64;
        let mean_sjnr = sjnr_sum / feasible as f64;
        let ber = if total.bits == 0 {
            f64::NAN
        } else {
            total.rate()
        };
        (mean_sr, 10.0 * mean_sjnr.log10(), ber)
    };
    MetricsRecord {
        method,
        snr_db,
        p_m,
        avg_sr,
        ber,
        ber_std_err: metrics::mean_and_std_err(&per_real_ber).1,
        avg_sjnr_db,
        sr_samples,
        trial_counts: counts,
    }
}

/// Runs the sweep on the current rayon pool.
pub fn run_sweep(cfg: &SystemConfig, spec: &SweepSpec) -> Result<SweepOutcome, SweepError> {
    spec.validate()?;
    cfg.validate().map_err(SweepError::Scenario)?;
    let codebook = TxCodebook::for_config(cfg).map_err(SweepError::Scenario)?;
    let start = Instant::now();
    let per_real = (0..spec.n_channel_realizations)
        .into_par_iter()
        .map(|r| {
            evaluate(cfg, spec, &codebook, r).map_err(|source| SweepError::Realization {
                index: r as u64,
                source,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let records = reduce(spec, &per_real);
    Ok(SweepOutcome {
        records,
        wall_clock: start.elapsed(),
    })
}

/// Runs the sweep on a dedicated pool; `None` uses rayon's default size.
pub fn run_sweep_with_threads(
    cfg: &SystemConfig,
    spec: &SweepSpec,
    threads: Option<usize>,
) -> Result<SweepOutcome, SweepError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|source| SweepError::ThreadPool {
        threads: threads.unwrap_or(0),
        source,
    })?;
    pool.install(|| run_sweep(cfg, spec))
}
