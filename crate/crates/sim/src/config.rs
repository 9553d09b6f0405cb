//! Flat `key = value` configuration documents.
//!
//! One assignment per line, `#` starts a comment, lists are comma
//! separated. Every key is optional except the three sweep axes
//! (`snr_grid_db`, `p_m_list`, `methods`). `simulate --print-defaults`
//! prints a complete document with every default filled in.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use ssm_core::config::active_antennas_for;
use ssm_core::{AnMode, Method, SystemConfig};

/// Sweep axes and Monte-Carlo budgets.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub snr_grid_db: Vec<f64>,
    pub p_m_list: Vec<f64>,
    pub methods: Vec<Method>,
    pub n_channel_realizations: usize,
    /// Noise draws per codebook entry in the MI estimator.
    pub n_noise: usize,
    /// BER channel uses per `(SNR, P_M, method)` point, spread over the
    /// realizations.
    pub n_ber_trials: usize,
    pub output_dir: PathBuf,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            snr_grid_db: (0..=15).map(|k| -10.0 + 2.0 * k as f64).collect(),
            p_m_list: vec![1.0, 10.0],
            methods: Method::ALL.to_vec(),
            n_channel_realizations: 200,
            n_noise: 500,
            n_ber_trials: 100_000,
            output_dir: PathBuf::from("results"),
        }
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |key: &'static str, reason: &str| ConfigError::Invalid {
            line: None,
            key: key.to_string(),
            reason: reason.to_string(),
        };
        if self.snr_grid_db.is_empty() {
            return Err(invalid("snr_grid_db", "must not be empty"));
        }
        if self.snr_grid_db.iter().any(|s| !s.is_finite()) {
            return Err(invalid("snr_grid_db", "entries must be finite"));
        }
        if self.p_m_list.is_empty() {
            return Err(invalid("p_m_list", "must not be empty"));
        }
        if self.p_m_list.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(invalid("p_m_list", "entries must be finite and >= 0"));
        }
        if self.methods.is_empty() {
            return Err(invalid("methods", "must not be empty"));
        }
        for (key, v) in [
            ("n_channel_realizations", self.n_channel_realizations),
            ("n_noise", self.n_noise),
            ("n_ber_trials", self.n_ber_trials),
        ] {
            if v == 0 {
                return Err(invalid(key, "must be at least 1"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },

    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },

    #[error("line {line}: key `{key}` already set on line {first}")]
    DuplicateKey {
        line: usize,
        key: String,
        first: usize,
    },

    #[error("missing required key `{key}`")]
    MissingKey { key: &'static str },

    #[error("line {line}: `{key}` expects {expected}, got `{value}`")]
    Type {
        line: usize,
        key: String,
        expected: &'static str,
        value: String,
    },

    #[error("{}`{key}`: {reason}", line.map(|l| format!("line {l}: ")).unwrap_or_default())]
    Invalid {
        line: Option<usize>,
        key: String,
        reason: String,
    },
}

const KEYS: &[&str] = &[
    "n",
    "n_t",
    "n_b",
    "n_m",
    "p",
    "beta",
    "sigma_a2",
    "sigma_m2",
    "m",
    "seed",
    "an_mode",
    "snr_grid_db",
    "p_m_list",
    "methods",
    "n_channel_realizations",
    "n_noise",
    "n_ber_trials",
    "output_dir",
];

const REQUIRED: &[&str] = &["snr_grid_db", "p_m_list", "methods"];

struct Entry<'a> {
    line: usize,
    value: &'a str,
}

struct Document<'a> {
    entries: HashMap<&'a str, Entry<'a>>,
}

impl<'a> Document<'a> {
    fn parse(text: &'a str) -> Result<Self, ConfigError> {
        let mut entries: HashMap<&str, Entry> = HashMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line,
                message: format!("expected `key = value`, got `{content}`"),
            })?;
            let key = key.trim();
            let value = value.trim();
            if key.is_empty() {
                return Err(ConfigError::Syntax {
                    line,
                    message: "empty key".into(),
                });
            }
            let Some(&key) = KEYS.iter().find(|k| **k == key) else {
                return Err(ConfigError::UnknownKey {
                    line,
                    key: key.to_string(),
                });
            };
            if let Some(prev) = entries.get(key) {
                return Err(ConfigError::DuplicateKey {
                    line,
                    key: key.to_string(),
                    first: prev.line,
                });
            }
            entries.insert(key, Entry { line, value });
        }
        for key in REQUIRED {
            if !entries.contains_key(key) {
                return Err(ConfigError::MissingKey { key });
            }
        }
        Ok(Self { entries })
    }

    fn line(&self, key: &str) -> Option<usize> {
        self.entries.get(key).map(|e| e.line)
    }

    fn scalar<T: FromStr>(
        &self,
        key: &'static str,
        expected: &'static str,
    ) -> Result<Option<T>, ConfigError> {
        let Some(e) = self.entries.get(key) else {
            return Ok(None);
        };
        e.value.parse().map(Some).map_err(|_| ConfigError::Type {
            line: e.line,
            key: key.to_string(),
            expected,
            value: e.value.to_string(),
        })
    }

    fn list<T: FromStr>(
        &self,
        key: &'static str,
        expected: &'static str,
    ) -> Result<Option<Vec<T>>, ConfigError> {
        let Some(e) = self.entries.get(key) else {
            return Ok(None);
        };
        if e.value.is_empty() {
            return Ok(Some(Vec::new()));
        }
        e.value
            .split(',')
            .map(|item| {
                let item = item.trim();
                item.parse().map_err(|_| ConfigError::Type {
                    line: e.line,
                    key: key.to_string(),
                    expected,
                    value: item.to_string(),
                })
            })
            .collect::<Result<Vec<T>, _>>()
            .map(Some)
    }
}

/// Parses a configuration document into the scenario and the sweep.
pub fn parse_config(text: &str) -> Result<(SystemConfig, SweepSpec), ConfigError> {
    let doc = Document::parse(text)?;
    let mut cfg = SystemConfig::default();
    let mut spec = SweepSpec::default();

    const UINT: &str = "a non-negative integer";
    const REAL: &str = "a real number";

    if let Some(v) = doc.scalar("n", UINT)? {
        cfg.n_total = v;
        if v >= 1 {
            cfg.n_active = active_antennas_for(v);
        }
    }
    if let Some(v) = doc.scalar("n_t", UINT)? {
        cfg.n_active = v;
    }
    if let Some(v) = doc.scalar("n_b", UINT)? {
        cfg.n_bob = v;
    }
    if let Some(v) = doc.scalar("n_m", UINT)? {
        cfg.n_mallory = v;
    }
    if let Some(v) = doc.scalar("p", REAL)? {
        cfg.p_alice = v;
    }
    if let Some(v) = doc.scalar("beta", REAL)? {
        cfg.beta = v;
    }
    if let Some(v) = doc.scalar("sigma_a2", REAL)? {
        cfg.sigma_a2 = v;
    }
    if let Some(v) = doc.scalar("sigma_m2", REAL)? {
        cfg.sigma_m2 = v;
    }
    if let Some(v) = doc.scalar("m", UINT)? {
        cfg.constellation_order = v;
    }
    if let Some(v) = doc.scalar("seed", UINT)? {
        cfg.seed = v;
    }
    if let Some(v) = doc.scalar::<AnMode>("an_mode", "`nullspace` or `random`")? {
        cfg.an_mode = v;
    }
    if let Some(v) = doc.list("snr_grid_db", "a list of real numbers")? {
        spec.snr_grid_db = v;
    }
    if let Some(v) = doc.list("p_m_list", "a list of real numbers")? {
        spec.p_m_list = v;
    }
    if let Some(v) = doc.list::<Method>("methods", "a list of MaxRP, MaxWFRP, MaxRPZFC, MaxSJNR")? {
        spec.methods = v;
    }
    if let Some(v) = doc.scalar("n_channel_realizations", UINT)? {
        spec.n_channel_realizations = v;
    }
    if let Some(v) = doc.scalar("n_noise", UINT)? {
        spec.n_noise = v;
    }
    if let Some(v) = doc.scalar("n_ber_trials", UINT)? {
        spec.n_ber_trials = v;
    }
    if let Some(v) = doc.scalar::<String>("output_dir", "a path")? {
        spec.output_dir = PathBuf::from(v);
    }
    if let Some(&p_m) = spec.p_m_list.first() {
        cfg.p_mallory = p_m;
    }

    cfg.validate().map_err(|e| match e {
        ssm_core::Error::InvalidParameter { name, reason } => ConfigError::Invalid {
            line: doc.line(name),
            key: name.to_string(),
            reason,
        },
        other => ConfigError::Invalid {
            line: None,
            key: "config".into(),
            reason: other.to_string(),
        },
    })?;
    spec.validate().map_err(|e| match e {
        ConfigError::Invalid { key, reason, .. } => ConfigError::Invalid {
            line: doc.line(&key),
            key,
            reason,
        },
        other => other,
    })?;
    Ok((cfg, spec))
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(", ")
}

fn assign(s: &mut String, key: &str, value: impl std::fmt::Display, comment: &str) {
    let line = format!("{key} = {value}");
    if comment.is_empty() {
        let _ = writeln!(s, "{line}");
    } else {
        let _ = writeln!(s, "{line:<24}# {comment}");
    }
}

/// Renders a complete document; `parse_config` reads it back unchanged.
pub fn render_config(cfg: &SystemConfig, spec: &SweepSpec) -> String {
    let mut s = String::from("# scenario\n");
    assign(&mut s, "n", cfg.n_total, "Alice's transmit antennas");
    assign(
        &mut s,
        "n_t",
        cfg.n_active,
        "active antennas, 2^floor(log2 n)",
    );
    assign(&mut s, "n_b", cfg.n_bob, "Bob's receive antennas");
    assign(
        &mut s,
        "n_m",
        cfg.n_mallory,
        "Mallory's antennas, n_m - 1 jamming streams",
    );
    assign(&mut s, "p", cfg.p_alice, "Alice's total power, W");
    assign(&mut s, "beta", cfg.beta, "share of p on the data symbol");
    assign(&mut s, "sigma_a2", cfg.sigma_a2, "AN variance");
    assign(&mut s, "sigma_m2", cfg.sigma_m2, "jamming variance");
    assign(&mut s, "m", cfg.constellation_order, "PSK order");
    assign(&mut s, "seed", cfg.seed, "");
    assign(
        &mut s,
        "an_mode",
        cfg.an_mode.as_str(),
        "nullspace | random",
    );
    s.push_str("\n# sweep; SNR = 10 log10(p / sigma^2) with sigma_b2 = sigma_e2 = sigma^2\n");
    assign(&mut s, "snr_grid_db", join(&spec.snr_grid_db), "");
    assign(
        &mut s,
        "p_m_list",
        join(&spec.p_m_list),
        "Mallory's jamming power, W",
    );
    assign(&mut s, "methods", join(&spec.methods), "");
    assign(
        &mut s,
        "n_channel_realizations",
        spec.n_channel_realizations,
        "",
    );
    assign(
        &mut s,
        "n_noise",
        spec.n_noise,
        "noise draws per codebook entry in the MI estimate",
    );
    assign(
        &mut s,
        "n_ber_trials",
        spec.n_ber_trials,
        "channel uses per point, over all realizations",
    );
    assign(&mut s, "output_dir", spec.output_dir.display(), "");
    s
}

/// The document `--print-defaults` emits.
pub fn default_document() -> String {
    render_config(&SystemConfig::default(), &SweepSpec::default())
}
