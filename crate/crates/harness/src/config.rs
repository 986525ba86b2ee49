//! Experiment configuration: one JSON document, unknown keys rejected.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use wigner_core::{builtin_law, EntryLaw, GridSpec, LawSpec};

use crate::error::{HarnessError, Result};
use crate::experiments;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LawRef {
    Name(String),
    Inline(LawSpec),
}

impl LawRef {
    pub fn resolve(&self) -> Result<EntryLaw> {
        match self {
            LawRef::Name(name) => {
                builtin_law(name).ok_or_else(|| HarnessError::Config(format!("unknown entry law `{name}`")))
            }
            LawRef::Inline(spec) => Ok(EntryLaw::custom("custom", spec)?),
        }
    }
}

/// How the regularization scale depends on `N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case", deny_unknown_fields)]
pub enum EtaRule {
    Fixed {
        values: Vec<f64>,
    },
    /// `eta = N^{-gamma}` for each gamma.
    Power {
        gammas: Vec<f64>,
    },
    /// `eta = ln N / N`.
    Log,
    /// `eta = N^{-gamma} (ln N)^{log_power}` for each gamma.
    PowerLog {
        gammas: Vec<f64>,
        log_power: f64,
    },
}

impl EtaRule {
    pub fn etas(&self, n: usize) -> Vec<f64> {
        let nf = n as f64;
        match self {
            EtaRule::Fixed { values } => values.clone(),
            EtaRule::Power { gammas } => gammas.iter().map(|g| nf.powf(-g)).collect(),
            EtaRule::Log => vec![nf.ln() / nf],
            EtaRule::PowerLog { gammas, log_power } => {
                gammas.iter().map(|g| nf.powf(-g) * nf.ln().powf(*log_power)).collect()
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = match self {
            EtaRule::Fixed { values } => values.is_empty() || values.iter().any(|v| !(*v > 0.0)),
            EtaRule::Power { gammas } => gammas.is_empty() || gammas.iter().any(|g| !g.is_finite()),
            EtaRule::Log => false,
            EtaRule::PowerLog { gammas, log_power } => {
                gammas.is_empty() || gammas.iter().any(|g| !g.is_finite()) || !log_power.is_finite()
            }
        };
        if bad {
            return Err(HarnessError::Config(format!(
                "eta rule {self:?} needs a non-empty list of valid values"
            )));
        }
        Ok(())
    }
}

/// A calibrated bound standing in for one of the unspecified constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Cap {
    pub value: f64,
    pub provenance: String,
}

/// Experiment-specific knobs; each experiment reads the ones it needs.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Extra {
    pub q_list: Vec<f64>,
    pub p_list: Vec<f64>,
    /// Block size `L` of the localization detector.
    pub l: Option<usize>,
    pub eta_loc: Option<f64>,
    /// Aspect ratios `L/N` for the block covariance.
    pub nu_list: Vec<f64>,
    /// Projection ranks `m`.
    pub rank_list: Vec<usize>,
    /// Length of the random vectors in the projection experiment.
    pub vector_len: Option<usize>,
    /// Exponent `c` in `E exp(-c X)`.
    pub lemma_c: Option<f64>,
    pub laws: Vec<LawRef>,
    /// `eta* = N^{-eta_star_exponent}` for the counting statistic.
    pub eta_star_exponent: Option<f64>,
    /// Number of geometric levels between the smallest eta and 1.
    pub eta_levels: Option<usize>,
    /// Threshold `(ln N)^p` for the resolvent second moment.
    pub threshold_log_power: Option<f64>,
    /// Deviation levels for empirical concentration tails.
    pub tail_eps: Vec<f64>,
    /// Minor indices used by the identity suite (0-based; `-1` means last).
    pub minor_indices: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub n_list: Vec<usize>,
    pub trials: u64,
    pub master_seed: u64,
    #[serde(default = "default_offdiag")]
    pub offdiag_law: LawRef,
    #[serde(default = "default_diag")]
    pub diag_law: LawRef,
    pub grid: GridSpec,
    pub eta_rule: EtaRule,
    #[serde(default)]
    pub extra: Extra,
    #[serde(default)]
    pub caps: BTreeMap<String, Cap>,
    #[serde(default)]
    pub threads: Option<usize>,
}

fn default_offdiag() -> LawRef {
    LawRef::Name("gauss_half".into())
}

fn default_diag() -> LawRef {
    LawRef::Name("gauss_one".into())
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let exp = experiments::lookup(&self.experiment)?;
        if self.trials == 0 {
            return Err(HarnessError::Config("trials must be at least 1".into()));
        }
        if self.n_list.is_empty() {
            return Err(HarnessError::Config("n_list is empty".into()));
        }
        if let Some(n) = self.n_list.iter().find(|&&n| n < 2) {
            return Err(HarnessError::Config(format!("every n must be at least 2, got {n}")));
        }
        if self.threads == Some(0) {
            return Err(HarnessError::Config("threads must be at least 1".into()));
        }
        self.grid.validate()?;
        self.eta_rule.validate()?;
        let offdiag = self.offdiag_law.resolve()?;
        if (offdiag.variance - 0.5).abs() > 1e-6 {
            return Err(HarnessError::Config(format!(
                "off-diagonal law `{}` must have variance 1/2",
                offdiag.name
            )));
        }
        self.diag_law.resolve()?;
        for law in &self.extra.laws {
            law.resolve()?;
        }
        for (name, cap) in &self.caps {
            if !cap.provenance.starts_with("[DERIVED]") {
                return Err(HarnessError::Config(format!(
                    "cap `{name}` must carry [DERIVED] provenance"
                )));
            }
        }
        for name in exp.required_caps() {
            if !self.caps.contains_key(*name) {
                return Err(HarnessError::Config(format!(
                    "experiment `{}` needs cap `{name}`",
                    self.experiment
                )));
            }
        }
        exp.validate(self)
    }

    pub fn cap(&self, name: &str) -> f64 {
        self.caps.get(name).map(|c| c.value).unwrap_or(f64::NAN)
    }
}
