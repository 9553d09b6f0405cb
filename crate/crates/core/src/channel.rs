//! Channel realizations and the matrices derived from them: antenna
//! selection `T`, Alice's AN projection `P_AN`, and Mallory's receive vector
//! `u_er` with the self-interference-free jamming precoder `P_JM`.

use alloc::vec::Vec;

use nalgebra::{DMatrix, RowDVector};
use rand::Rng;

use crate::config::{AnMode, SystemConfig};
use crate::error::{Error, Result};
use crate::numerics::{self, CMatrix, CVector, HermitianMatrix, C64};
use crate::rng::{self, tag};

/// Small-scale fading draw: `H` (Alice to Bob), `G` (Alice to Mallory),
/// `F` (Mallory to Bob) and `M` (Mallory's self-interference).
#[derive(Debug, Clone, PartialEq)]
pub struct Fading {
    pub h: CMatrix,
    pub g: CMatrix,
    pub f: CMatrix,
    pub mself: CMatrix,
}

/// The `N_t` antennas Alice may activate, as indices into `0..N` in
/// increasing order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AntennaSelection {
    n_total: usize,
    indices: Vec<usize>,
}

impl AntennaSelection {
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn n_total(&self) -> usize {
        self.n_total
    }

    pub fn n_active(&self) -> usize {
        self.indices.len()
    }

    /// The `N x N_t` 0/1 matrix `T`.
    pub fn matrix(&self) -> DMatrix<f64> {
        let mut t = DMatrix::zeros(self.n_total, self.indices.len());
        for (col, &row) in self.indices.iter().enumerate() {
            t[(row, col)] = 1.0;
        }
        t
    }

    /// `X T`, i.e. the selected columns of `X`.
    pub fn select(&self, x: &CMatrix) -> CMatrix {
        x.select_columns(self.indices.iter())
    }

    /// `T v` for `v` of length `N_t`.
    pub fn embed(&self, v: &CVector) -> CVector {
        let mut out = CVector::zeros(self.n_total);
        for (k, &i) in self.indices.iter().enumerate() {
            out[i] = v[k];
        }
        out
    }
}

/// One full channel realization with every derived precoder.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    pub h: CMatrix,
    pub g: CMatrix,
    pub f: CMatrix,
    pub mself: CMatrix,
    pub selection: AntennaSelection,
    /// `H T`, `N_b x N_t`.
    pub ht: CMatrix,
    /// `G T`, `N_m x N_t`.
    pub gt: CMatrix,
    /// `N_t x N_t`, with `trace(P_AN P_AN^H) sigma_a^2 = 1`.
    pub p_an: CMatrix,
    pub u_er: CVector,
    /// `N_m x (N_m - 1)`, with `trace(P_JM P_JM^H) sigma_m^2 = 1`.
    pub p_jm: CMatrix,
}

fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    // column-major fill order is part of the determinism contract
    CMatrix::from_fn(rows, cols, |_, _| rng::complex_normal(rng, 1.0))
}

/// i.i.d. Rayleigh fading with unit-variance entries.
pub fn sample_channels<R: Rng + ?Sized>(cfg: &SystemConfig, rng: &mut R) -> Result<Fading> {
    cfg.validate()?;
    let h = gaussian_matrix(rng, cfg.n_bob, cfg.n_total);
    let g = gaussian_matrix(rng, cfg.n_mallory, cfg.n_total);
    let f = gaussian_matrix(rng, cfg.n_bob, cfg.n_mallory);
    let mself = gaussian_matrix(rng, cfg.n_mallory, cfg.n_mallory);
    Ok(Fading { h, g, f, mself })
}

/// Keeps the `n_active` columns of `H` with the largest squared norms
/// (lower index wins ties), in increasing antenna order.
pub fn build_tas_matrix(h: &CMatrix, n_active: usize) -> Result<AntennaSelection> {
    let n_total = h.ncols();
    if n_active == 0 || n_active > n_total {
        return Err(Error::invalid(
            "n_t",
            alloc::format!("cannot select {n_active} of {n_total} antennas"),
        ));
    }
    let norms: Vec<f64> = h.column_iter().map(|c| c.norm_squared()).collect();
    let mut order: Vec<usize> = (0..n_total).collect();
    // stable sort keeps lower indices first among equal norms
    order.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]));
    let mut indices: Vec<usize> = order.into_iter().take(n_active).collect();
    indices.sort_unstable();
    Ok(AntennaSelection { n_total, indices })
}

fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    let z = gaussian_matrix(rng, n, n);
    let (mut q, r) = z.qr().unpack();
    for j in 0..n {
        let d = r[(j, j)];
        let m = d.norm();
        if m > 0.0 {
            let phase = d / m;
            for i in 0..n {
                q[(i, j)] *= phase;
            }
        }
    }
    q
}

/// Alice's AN projection on the active antennas.
///
/// `rng` is only consumed in [`AnMode::Random`].
pub fn build_an_projection<R: Rng + ?Sized>(
    ht: &CMatrix,
    mode: AnMode,
    sigma_a2: f64,
    rng: &mut R,
) -> Result<CMatrix> {
    let n_active = ht.ncols();
    let (basis, width) = match mode {
        AnMode::NullSpace => {
            // {x : H T x = 0} is the complement of the column space of (H T)^H
            let ns = numerics::null_space_basis(&ht.adjoint())?;
            if ns.basis.is_empty() {
                return Err(Error::AnNullSpaceEmpty {
                    n_active,
                    rank: ns.rank,
                });
            }
            let width = ns.basis.width();
            let mut padded = CMatrix::zeros(n_active, n_active);
            padded.columns_mut(0, width).copy_from(ns.basis.columns());
            (padded, width)
        }
        AnMode::Random => (haar_unitary(rng, n_active), n_active),
    };
    let scale = 1.0 / libm::sqrt(width as f64 * sigma_a2);
    Ok(basis.map(|z| z * scale))
}

/// Mallory's interception vector and jamming precoder.
///
/// `u_er` maximizes intercepted signal power; `P_JM` spans the complement of
/// `M^H u_er`, so the jamming never leaks into Mallory's own beamformer
/// output.
pub fn build_mallory_chain(
    gt: &CMatrix,
    mself: &CMatrix,
    sigma_m2: f64,
) -> Result<(CVector, CMatrix)> {
    let n_mallory = mself.nrows();
    if n_mallory < 2 {
        return Err(Error::invalid("n_m", "need at least 2 antennas"));
    }
    let u_er = numerics::max_eigvec_hermitian(&HermitianMatrix::gram(gt)).vector;
    let mut leak = mself.adjoint() * &u_er;
    if numerics::norm(&leak) == 0.0 {
        log::warn!("M^H u_er vanished; jamming precoder falls back to the complement of u_er");
        leak = u_er.clone();
    }
    let ns = numerics::null_space_basis(&CMatrix::from_columns(&[leak]))?;
    let width = ns.basis.width();
    let scale = 1.0 / libm::sqrt(width as f64 * sigma_m2);
    Ok((u_er, ns.basis.into_columns().map(|z| z * scale)))
}

impl ChannelSet {
    /// Derives every precoder from a fading draw. The RNG is consumed only
    /// for the random AN mode.
    pub fn assemble<R: Rng + ?Sized>(
        cfg: &SystemConfig,
        fading: Fading,
        rng: &mut R,
    ) -> Result<Self> {
        cfg.validate()?;
        let Fading { h, g, f, mself } = fading;
        let selection = build_tas_matrix(&h, cfg.n_active)?;
        let ht = selection.select(&h);
        let gt = selection.select(&g);
        let p_an = build_an_projection(&ht, cfg.an_mode, cfg.sigma_a2, rng)?;
        let (u_er, p_jm) = build_mallory_chain(&gt, &mself, cfg.sigma_m2)?;
        Ok(Self {
            h,
            g,
            f,
            mself,
            selection,
            ht,
            gt,
            p_an,
            u_er,
            p_jm,
        })
    }

    /// Realization number `index` of the seeded channel stream.
    pub fn realize(cfg: &SystemConfig, index: u64) -> Result<Self> {
        let mut rng = rng::stream(cfg.seed, &[tag::CHANNEL, index]);
        let fading = sample_channels(cfg, &mut rng)?;
        Self::assemble(cfg, fading, &mut rng)
    }

    pub fn n_bob(&self) -> usize {
        self.h.nrows()
    }

    pub fn n_mallory(&self) -> usize {
        self.mself.nrows()
    }

    pub fn n_active(&self) -> usize {
        self.ht.ncols()
    }

    /// `H T T^H H^H`.
    pub fn signal_gram_bob(&self) -> HermitianMatrix {
        HermitianMatrix::gram(&self.ht)
    }

    /// `F P_JM`.
    pub fn jamming_channel_bob(&self) -> CMatrix {
        &self.f * &self.p_jm
    }

    /// `u_er^H M P_JM`, which is zero by construction.
    pub fn self_interference_row(&self) -> RowDVector<C64> {
        self.u_er.adjoint() * &self.mself * &self.p_jm
    }
}
