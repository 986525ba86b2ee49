//! Scheduling units across a worker pool and assembling the dataset.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::dataset::{load, sort_records, Record, Summary, TrialDataset, Verdict};
use crate::error::{HarnessError, Result};
use crate::experiments::{self, Context, Unit};
use crate::stats::{self, Aggregate};

/// Runs above this failure rate fail as a whole.
pub const MAX_FAILURE_RATE: f64 = 0.01;

/// Runs every unit of the configured experiment. Unit failures (for example
/// eigensolver non-convergence) are counted and excluded, never fatal.
pub fn run(config: &ExperimentConfig) -> Result<TrialDataset> {
    config.validate()?;
    let exp = experiments::lookup(&config.experiment)?;
    let ctx = Context::new(config)?;
    let units = exp.units(config);

    let work = |u: &Unit| (*u, exp.trial(&ctx, *u));
    let outcomes: Vec<(Unit, Result<Vec<Record>>)> = match config.threads {
        Some(1) => units.iter().map(work).collect(),
        threads => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads.unwrap_or(0))
                .build()
                .map_err(|e| HarnessError::Config(format!("thread pool: {e}")))?;
            pool.install(|| units.par_iter().map(work).collect())
        }
    };

    let mut records = Vec::new();
    let mut failures = Vec::new();
    for (unit, outcome) in outcomes {
        match outcome {
            Ok(rs) => records.extend(rs),
            Err(e) => failures.push(format!("trial {} n {}: {e}", unit.trial, unit.n)),
        }
    }
    sort_records(&mut records);
    let summary = summarize(config, &records, failures, units.len());
    Ok(TrialDataset { summary, records })
}

/// Aggregates per `(statistic, n, coord1, coord2)` in a fixed order, so the
/// result does not depend on how units were scheduled.
pub fn aggregates(records: &[Record]) -> Vec<Aggregate> {
    type Key = (String, usize, Option<u64>, Option<u64>);
    let mut groups: BTreeMap<Key, (Option<f64>, Option<f64>, Vec<f64>)> = BTreeMap::new();
    for r in records {
        let key = (
            r.statistic.clone(),
            r.n,
            r.coord1.map(f64::to_bits),
            r.coord2.map(f64::to_bits),
        );
        groups
            .entry(key)
            .or_insert_with(|| (r.coord1, r.coord2, Vec::new()))
            .2
            .push(r.value);
    }
    let mut out: Vec<Aggregate> = groups
        .into_iter()
        .map(|((stat, n, _, _), (c1, c2, mut vals))| {
            // summation order is fixed by sorting, not by arrival
            vals.sort_by(f64::total_cmp);
            stats::aggregate(&stat, n, c1, c2, &vals)
        })
        .collect();
    out.sort_by(|a, b| {
        (a.statistic.as_str(), a.n)
            .cmp(&(b.statistic.as_str(), b.n))
            .then(cmp_opt(a.coord1, b.coord1))
            .then(cmp_opt(a.coord2, b.coord2))
    });
    out
}

fn cmp_opt(a: Option<f64>, b: Option<f64>) -> std::cmp::Ordering {
    match (a, b) {
        (Some(x), Some(y)) => x.total_cmp(&y),
        (a, b) => a.is_some().cmp(&b.is_some()),
    }
}

/// Summary of finished records; `units` is the number of scheduled units.
pub fn summarize(config: &ExperimentConfig, records: &[Record], failures: Vec<String>, units: usize) -> Summary {
    let exp = experiments::lookup(&config.experiment).expect("validated");
    let mut verdicts = exp.verdicts(config, records);
    let rate = failures.len() as f64 / units.max(1) as f64;
    if !failures.is_empty() {
        verdicts.push(Verdict::at_most(
            "failure_rate",
            rate,
            MAX_FAILURE_RATE,
            format!("{} of {units} units failed", failures.len()),
        ));
    }
    let timestamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    Summary {
        experiment: config.experiment.clone(),
        config_echo: serde_json::to_value(config).expect("config serializes"),
        caps: config.caps.clone(),
        verdicts,
        aggregates: aggregates(records),
        failure_count: failures.len(),
        failures,
        version: env!("CARGO_PKG_VERSION").to_string(),
        timestamp: timestamp.to_string(),
        record_count: records.len(),
    }
}

/// Reloads a dataset and recomputes its summary from the echoed config.
pub fn report(csv_path: &Path) -> Result<TrialDataset> {
    let old = load(csv_path)?;
    let config: ExperimentConfig = serde_json::from_value(old.summary.config_echo.clone())
        .map_err(|e| HarnessError::Config(format!("config echo: {e}")))?;
    config.validate()?;
    let units = experiments::lookup(&config.experiment)?.units(&config).len();
    let summary = summarize(&config, &old.records, old.summary.failures.clone(), units);
    Ok(TrialDataset {
        summary,
        records: old.records,
    })
}
