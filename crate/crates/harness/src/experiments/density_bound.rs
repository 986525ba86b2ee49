//! Upper bound on eigenvalue counts in short intervals.

use wigner_core::eigvalsh;

use super::{max_of, values, Context, Emit, Experiment, Unit};
use crate::config::{EtaRule, ExperimentConfig};
use crate::dataset::{Record, Verdict};
use crate::error::{HarnessError, Result};
use crate::stats;

pub struct DensityUpperBound;

/// Level `K` of the empirical tail `P{N_I >= K N |I|}`.
const TAIL_LEVEL: f64 = 5.0;

/// Largest count in any closed interval of length `len`, by a two-pointer
/// sweep over the sorted spectrum (the supremum over all placements).
pub fn max_window_count(sorted: &[f64], len: f64) -> usize {
    let mut best = 0;
    let mut hi = 0;
    for lo in 0..sorted.len() {
        while hi < sorted.len() && sorted[hi] <= sorted[lo] + len {
            hi += 1;
        }
        best = best.max(hi - lo);
    }
    best
}

impl Experiment for DensityUpperBound {
    fn name(&self) -> &'static str {
        "density_upper_bound"
    }

    fn required_caps(&self) -> &'static [&'static str] {
        &["density_ratio"]
    }

    fn validate(&self, config: &ExperimentConfig) -> Result<()> {
        if config.eta_rule != EtaRule::Log {
            return Err(HarnessError::Config(
                "density_upper_bound uses the log rule |I| = ln N / N".into(),
            ));
        }
        Ok(())
    }

    fn trial(&self, ctx: &Context, unit: Unit) -> Result<Vec<Record>> {
        let s = eigvalsh(&ctx.wigner(unit)?)?;
        let len = ctx.config.eta_rule.etas(unit.n)[0];
        let expected = unit.n as f64 * len;
        let ratio = max_window_count(s.values(), len) as f64 / expected;
        let mut out = Emit::new(unit);
        out.put("max_count_ratio", ratio);
        out.put("tail_indicator", (ratio >= TAIL_LEVEL) as u8 as f64);
        Ok(out.records)
    }

    fn verdicts(&self, config: &ExperimentConfig, records: &[Record]) -> Vec<Verdict> {
        let cap = config.cap("density_ratio");
        let mut out = Vec::new();
        let mut tails = Vec::new();
        for &n in &config.n_list {
            let xs = values(records, "max_count_ratio", Some(n));
            out.push(Verdict::at_most(
                &format!("max_count_ratio[n={n}]"),
                max_of(&xs),
                cap,
                format!("max over {} trials of sup_I N_I/(N|I|)", xs.len()),
            ));
            tails.push(stats::mean(&values(records, "tail_indicator", Some(n))));
        }
        let monotone = tails.windows(2).all(|w| w[1] <= w[0]);
        out.push(Verdict::flag(
            "tail_non_increasing",
            monotone,
            format!("P(N_I >= {TAIL_LEVEL} N|I|) by n: {tails:?}"),
        ));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_counts() {
        let xs = [0.0, 0.1, 0.2, 1.0, 1.05];
        assert_eq!(max_window_count(&xs, 0.2), 3);
        assert_eq!(max_window_count(&xs, 0.05), 2);
        assert_eq!(max_window_count(&xs, 0.01), 1);
        // spread uniformly: ratio equals the density 1
        let uniform: Vec<f64> = (0..1000).map(|i| i as f64 / 1000.0).collect();
        let len = 0.05;
        let ratio = max_window_count(&uniform, len) as f64 / (1000.0 * len);
        assert!((ratio - 1.0).abs() <= 0.03);
    }
}
