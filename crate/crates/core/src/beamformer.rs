//! Bob's four closed-form receive beamformers.
//!
//! | method     | criterion                                              |
//! |------------|--------------------------------------------------------|
//! | `MaxRP`    | max `u^H H T T^H H^H u`, interference treated as white |
//! | `MaxWFRP`  | whiten with `R_w^{-1/2}`, then max receive power       |
//! | `MaxRPZFC` | max receive power subject to `u^H F P_JM = 0`          |
//! | `MaxSJNR`  | max generalized Rayleigh quotient against `R_w`        |
//!
//! `MaxWFRP` and `MaxSJNR` reach the same SJNR; they differ only in how the
//! solution is computed.

use core::fmt;
use core::str::FromStr;

use crate::channel::ChannelSet;
use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::metrics;
use crate::numerics::{self, CMatrix, CVector, HermitianMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    MaxRp,
    MaxWfrp,
    MaxRpZfc,
    MaxSjnr,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::MaxRp,
        Method::MaxWfrp,
        Method::MaxRpZfc,
        Method::MaxSjnr,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::MaxRp => "MaxRP",
            Method::MaxWfrp => "MaxWFRP",
            Method::MaxRpZfc => "MaxRPZFC",
            Method::MaxSjnr => "MaxSJNR",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                Error::invalid(
                    "methods",
                    alloc::format!(
                        "unknown method `{s}` (expected MaxRP, MaxWFRP, MaxRPZFC or MaxSJNR)"
                    ),
                )
            })
    }
}

/// A unit-norm receive vector applied to Bob's raw antenna outputs as
/// `u_br^H y_b`.
#[derive(Debug, Clone, PartialEq)]
pub struct Beamformer {
    pub method: Method,
    pub u_br: CVector,
    /// The quantity the method maximizes, at the returned vector.
    pub objective: f64,
    /// `W_WF` for [`Method::MaxWfrp`].
    pub whitening: Option<CMatrix>,
}

pub fn design(method: Method, ch: &ChannelSet, cfg: &SystemConfig) -> Result<Beamformer> {
    match method {
        Method::MaxRp => max_rp(ch, cfg),
        Method::MaxWfrp => max_wfrp(ch, cfg),
        Method::MaxRpZfc => max_rp_zfc(ch, cfg),
        Method::MaxSjnr => max_sjnr(ch, cfg),
    }
}

fn signal_scale(cfg: &SystemConfig) -> f64 {
    cfg.beta * cfg.p_alice / cfg.n_active as f64
}

/// Dominant eigenvector of `H T T^H H^H`.
///
/// The objective uses `sigma_w^2 = trace(R_w) / N_b` as the white-noise
/// level; it scales the objective but not the vector.
pub fn max_rp(ch: &ChannelSet, cfg: &SystemConfig) -> Result<Beamformer> {
    let pair = numerics::max_eigvec_hermitian(&ch.signal_gram_bob());
    let sigma_w2 = metrics::noise_cov_bob(ch, cfg).trace() / ch.n_bob() as f64;
    let objective = if sigma_w2 > 0.0 {
        signal_scale(cfg) * pair.value / sigma_w2
    } else if pair.value > 0.0 {
        f64::INFINITY
    } else {
        0.0
    };
    Ok(Beamformer {
        method: Method::MaxRp,
        u_br: pair.vector,
        objective,
        whitening: None,
    })
}

/// Max receive power after whitening with `W_WF = Lambda^{-1/2} U_w^H`.
///
/// The returned `u_br` is the equivalent vector on the raw outputs,
/// `W_WF^H u` normalized, since `u^H W_WF y_b = (W_WF^H u)^H y_b`.
pub fn max_wfrp(ch: &ChannelSet, cfg: &SystemConfig) -> Result<Beamformer> {
    let r_w = metrics::noise_cov_bob(ch, cfg);
    let w = numerics::whitening_matrix(&r_w)?;
    let whitened = HermitianMatrix::gram(&(&w * &ch.ht));
    let pair = numerics::max_eigvec_hermitian(&whitened);
    let u_br = numerics::canonicalize(w.adjoint() * pair.vector);
    Ok(Beamformer {
        method: Method::MaxWfrp,
        u_br,
        objective: signal_scale(cfg) * pair.value,
        whitening: Some(w),
    })
}

/// Max receive power restricted to the orthogonal complement of the
/// jamming subspace `span(F P_JM)`.
pub fn max_rp_zfc(ch: &ChannelSet, cfg: &SystemConfig) -> Result<Beamformer> {
    let jam = ch.jamming_channel_bob();
    let ns = numerics::null_space_basis(&jam)?;
    if ns.basis.is_empty() {
        return Err(Error::ZfcInfeasible {
            rank: ns.rank,
            n_bob: ch.n_bob(),
        });
    }
    let u_perp = ns.basis.columns();
    // A = (U^H U)^{-1} (beta P U^H H T T^H H^H U), solved as a generalized
    // eigenproblem; U^H U is the identity up to rounding
    let num = HermitianMatrix::gram(&(u_perp.adjoint() * &ch.ht)).scaled(cfg.beta * cfg.p_alice);
    let den = HermitianMatrix::gram(&u_perp.adjoint());
    let eta = numerics::gen_max_eigvec(&num, &den)?.vector;
    let u_br = numerics::canonicalize(u_perp * eta);
    let objective = signal_scale(cfg) * ch.signal_gram_bob().quad_form(&u_br);
    Ok(Beamformer {
        method: Method::MaxRpZfc,
        u_br,
        objective,
        whitening: None,
    })
}

/// Dominant generalized eigenvector of `(beta P / N_t) H T T^H H^H`
/// against `R_w`; the objective is the achieved SJNR.
pub fn max_sjnr(ch: &ChannelSet, cfg: &SystemConfig) -> Result<Beamformer> {
    let num = ch.signal_gram_bob().scaled(signal_scale(cfg));
    let den = metrics::noise_cov_bob(ch, cfg);
    let pair = numerics::gen_max_eigvec(&num, &den)?;
    Ok(Beamformer {
        method: Method::MaxSjnr,
        u_br: pair.vector,
        objective: pair.ratio,
        whitening: None,
    })
}
