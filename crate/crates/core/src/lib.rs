//! Secure spatial-modulation link model with a full-duplex jamming
//! eavesdropper, plus four closed-form receive beamformers for the
//! legitimate receiver and the metrics used to compare them.
//!
//! The crate is `no_std` (it needs `alloc`). IO, configuration files and
//! the parallel sweep driver live in the `ssm-sim` crate.

#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod beamformer;
pub mod channel;
pub mod config;
mod error;
pub mod metrics;
pub mod numerics;
pub mod rng;
pub mod signal;

pub use crate::beamformer::{design, Beamformer, Method};
pub use crate::channel::ChannelSet;
pub use crate::config::{AnMode, SystemConfig};
pub use crate::error::{Error, Result};
pub use crate::metrics::{MetricsRecord, Side, TrialCounts};
pub use crate::numerics::{CMatrix, CVector, HermitianMatrix, OrthonormalBasis, C64};
pub use crate::signal::{RxSample, TxCodebook};
