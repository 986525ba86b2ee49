//! The experiment registry. Each experiment turns one `(trial, n)` unit into
//! records, and turns the finished record set into verdicts.

use std::collections::BTreeMap;

use wigner_core::{sample_wigner, EntryLaw, HermitianMatrix, SeedSpec};

use crate::config::ExperimentConfig;
use crate::dataset::{Record, Verdict};
use crate::error::{HarnessError, Result};

mod covariance;
mod deloc;
mod density_bound;
mod greens;
mod identity;
mod lemma23;
mod localization;
mod resolvent;
mod semicircle;
mod spectral_radius;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Unit {
    pub trial: u64,
    pub n: usize,
}

/// Per-run state shared by all units: the config and its resolved laws.
pub struct Context<'a> {
    pub config: &'a ExperimentConfig,
    pub offdiag: EntryLaw,
    pub diag: EntryLaw,
}

impl<'a> Context<'a> {
    pub fn new(config: &'a ExperimentConfig) -> Result<Self> {
        Ok(Self {
            config,
            offdiag: config.offdiag_law.resolve()?,
            diag: config.diag_law.resolve()?,
        })
    }

    /// The unit's stream: keyed by `(master_seed, trial)`, with `n` mixed in
    /// so that different sizes in one trial are independent.
    pub fn seed(&self, unit: Unit) -> SeedSpec {
        SeedSpec::new(self.config.master_seed, unit.trial).child(unit.n as u64)
    }

    pub fn wigner(&self, unit: Unit) -> Result<HermitianMatrix> {
        Ok(sample_wigner(unit.n, &self.offdiag, &self.diag, self.seed(unit))?)
    }
}

pub trait Experiment: Sync {
    fn name(&self) -> &'static str;

    fn required_caps(&self) -> &'static [&'static str] {
        &[]
    }

    fn validate(&self, _config: &ExperimentConfig) -> Result<()> {
        Ok(())
    }

    fn units(&self, config: &ExperimentConfig) -> Vec<Unit> {
        (0..config.trials)
            .flat_map(|trial| config.n_list.iter().map(move |&n| Unit { trial, n }))
            .collect()
    }

    fn trial(&self, ctx: &Context, unit: Unit) -> Result<Vec<Record>>;

    /// Pure function of the config and the finished records.
    fn verdicts(&self, config: &ExperimentConfig, records: &[Record]) -> Vec<Verdict>;
}

static REGISTRY: &[&dyn Experiment] = &[
    &identity::IdentitySuite,
    &density_bound::DensityUpperBound,
    &resolvent::VARIANCE_SCALING,
    &resolvent::XK_MOMENTS,
    &semicircle::Semicircle,
    &deloc::Deloc,
    &localization::Localization,
    &lemma23::Lemma23,
    &spectral_radius::SpectralRadius,
    &greens::Greens,
    &covariance::CovarianceTails,
];

pub fn names() -> Vec<&'static str> {
    REGISTRY.iter().map(|e| e.name()).collect()
}

pub fn lookup(name: &str) -> Result<&'static dyn Experiment> {
    REGISTRY
        .iter()
        .copied()
        .find(|e| e.name() == name)
        .ok_or_else(|| HarnessError::Config(format!("unknown experiment `{name}`; known: {}", names().join(", "))))
}

// ---- record helpers -------------------------------------------------------

pub(crate) struct Emit {
    unit: Unit,
    pub records: Vec<Record>,
}

impl Emit {
    pub fn new(unit: Unit) -> Self {
        Self {
            unit,
            records: Vec::new(),
        }
    }

    pub fn put(&mut self, statistic: &str, value: f64) {
        self.records
            .push(Record::new(self.unit.trial, self.unit.n, statistic, None, None, value));
    }

    /// Record keyed by the second coordinate only.
    pub fn at_eta(&mut self, statistic: &str, c2: f64, value: f64) {
        self.records.push(Record::new(
            self.unit.trial,
            self.unit.n,
            statistic,
            None,
            Some(c2),
            value,
        ));
    }

    pub fn at(&mut self, statistic: &str, c1: f64, c2: Option<f64>, value: f64) {
        self.records.push(Record::new(
            self.unit.trial,
            self.unit.n,
            statistic,
            Some(c1),
            c2,
            value,
        ));
    }
}

/// Values of one statistic, optionally restricted to one `n`.
pub(crate) fn values(records: &[Record], statistic: &str, n: Option<usize>) -> Vec<f64> {
    records
        .iter()
        .filter(|r| r.statistic == statistic && n.is_none_or(|n| r.n == n))
        .map(|r| r.value)
        .collect()
}

/// Key for grouping by grid coordinates; bit patterns keep it exact.
pub(crate) type CoordKey = (usize, Option<u64>, Option<u64>);

pub(crate) fn grouped(records: &[Record], statistic: &str) -> BTreeMap<CoordKey, Vec<(u64, f64)>> {
    let mut out: BTreeMap<CoordKey, Vec<(u64, f64)>> = BTreeMap::new();
    for r in records.iter().filter(|r| r.statistic == statistic) {
        out.entry((r.n, r.coord1.map(f64::to_bits), r.coord2.map(f64::to_bits)))
            .or_default()
            .push((r.trial, r.value));
    }
    out
}

pub(crate) fn max_of(xs: &[f64]) -> f64 {
    xs.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

pub(crate) fn min_of(xs: &[f64]) -> f64 {
    xs.iter().copied().fold(f64::INFINITY, f64::min)
}

pub(crate) fn need<T>(value: Option<T>, what: &str) -> Result<T> {
    value.ok_or_else(|| HarnessError::Config(format!("extra.{what} is required for this experiment")))
}
