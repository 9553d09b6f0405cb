use alloc::format;

use crate::error::{Error, Result};

/// How Alice's artificial-noise projection is built.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AnMode {
    /// Orthonormal basis of the null space of `H T`, zero-padded to
    /// `N_t x N_t`; the AN never reaches Bob.
    #[default]
    NullSpace,
    /// Haar-random unitary `N_t x N_t`; the AN reaches Bob as well.
    Random,
}

impl AnMode {
    pub fn as_str(self) -> &'static str {
        match self {
            AnMode::NullSpace => "nullspace",
            AnMode::Random => "random",
        }
    }
}

impl core::str::FromStr for AnMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nullspace" => Ok(AnMode::NullSpace),
            "random" => Ok(AnMode::Random),
            other => Err(Error::invalid(
                "an_mode",
                format!("expected `nullspace` or `random`, got `{other}`"),
            )),
        }
    }
}

/// Scenario parameters. Powers are in watts, variances are linear.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    /// Alice's total transmit antennas `N`.
    pub n_total: usize,
    /// Active (selectable) antennas `N_t = 2^floor(log2 N)`.
    pub n_active: usize,
    /// Bob's receive antennas `N_b`.
    pub n_bob: usize,
    /// Mallory's antennas `N_m`.
    pub n_mallory: usize,
    pub p_alice: f64,
    pub p_mallory: f64,
    /// Fraction of Alice's power carried by the data symbol.
    pub beta: f64,
    pub sigma_a2: f64,
    pub sigma_m2: f64,
    pub sigma_b2: f64,
    pub sigma_e2: f64,
    /// PSK order `M`.
    pub constellation_order: usize,
    pub an_mode: AnMode,
    pub seed: u64,
}

impl Default for SystemConfig {
    fn default() -> Self {
        Self {
            n_total: 8,
            n_active: 8,
            n_bob: 6,
            n_mallory: 2,
            p_alice: 10.0,
            p_mallory: 1.0,
            beta: 0.5,
            sigma_a2: 1.0,
            sigma_m2: 1.0,
            sigma_b2: 1.0,
            sigma_e2: 1.0,
            constellation_order: 4,
            an_mode: AnMode::NullSpace,
            seed: 1,
        }
    }
}

/// `2^floor(log2 n)` for `n >= 1`.
pub fn active_antennas_for(n_total: usize) -> usize {
    assert!(n_total >= 1);
    1 << (usize::BITS - 1 - n_total.leading_zeros())
}

impl SystemConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_total == 0 {
            return Err(Error::invalid("n", "must be at least 1"));
        }
        let expected = active_antennas_for(self.n_total);
        if !self.n_active.is_power_of_two() {
            return Err(Error::invalid(
                "n_t",
                format!("must be a power of two, got {}", self.n_active),
            ));
        }
        if self.n_active != expected {
            return Err(Error::invalid(
                "n_t",
                format!(
                    "must equal 2^floor(log2 n) = {expected} for n = {}, got {}",
                    self.n_total, self.n_active
                ),
            ));
        }
        if self.n_bob == 0 {
            return Err(Error::invalid("n_b", "must be at least 1"));
        }
        if self.n_mallory < 2 {
            return Err(Error::invalid(
                "n_m",
                format!(
                    "a full-duplex attacker needs at least 2 antennas, got {}",
                    self.n_mallory
                ),
            ));
        }
        if !self.constellation_order.is_power_of_two() {
            return Err(Error::invalid(
                "m",
                format!("must be a power of two, got {}", self.constellation_order),
            ));
        }
        if !(0.0..=1.0).contains(&self.beta) {
            return Err(Error::invalid(
                "beta",
                format!("must lie in [0, 1], got {}", self.beta),
            ));
        }
        let nonneg = [
            ("p", self.p_alice),
            ("p_m", self.p_mallory),
            ("sigma_b2", self.sigma_b2),
            ("sigma_e2", self.sigma_e2),
        ];
        for (name, v) in nonneg {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::invalid(
                    name,
                    format!("must be finite and >= 0, got {v}"),
                ));
            }
        }
        // the precoders are normalized by these, so they must be nonzero
        for (name, v) in [("sigma_a2", self.sigma_a2), ("sigma_m2", self.sigma_m2)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(
                    name,
                    format!("must be finite and > 0, got {v}"),
                ));
            }
        }
        Ok(())
    }

    /// Sets `sigma_b2 = sigma_e2 = P / 10^(snr/10)`.
    pub fn with_snr_db(&self, snr_db: f64) -> Self {
        let noise = self.p_alice / libm::pow(10.0, snr_db / 10.0);
        Self {
            sigma_b2: noise,
            sigma_e2: noise,
            ..self.clone()
        }
    }

    pub fn with_p_mallory(&self, p_mallory: f64) -> Self {
        Self {
            p_mallory,
            ..self.clone()
        }
    }

    /// `N_m' = N_m - 1` jamming streams.
    pub fn n_jamming_streams(&self) -> usize {
        self.n_mallory - 1
    }

    pub fn codebook_size(&self) -> usize {
        self.n_active * self.constellation_order
    }

    pub fn bits_per_use(&self) -> u32 {
        self.codebook_size().trailing_zeros()
    }
}
