//! Convergence of the Stieltjes transform to the semicircle law, uniformly
//! on a grid of the bulk region, and of smoothed eigenvalue counts.

use wigner_core::spectral::{semicircle_density, semicircle_stieltjes};
use wigner_core::{eigvalsh, SpectralPoint};

use super::{values, Context, Emit, Experiment, Unit};
use crate::config::ExperimentConfig;
use crate::dataset::{Record, Verdict};
use crate::error::{HarnessError, Result};
use crate::stats;

pub struct Semicircle;

/// Geometric ladder of `levels` scales from `eta_min` up to 1.
pub fn eta_ladder(eta_min: f64, levels: usize) -> Vec<f64> {
    if levels <= 1 {
        return vec![eta_min];
    }
    (0..levels)
        .map(|i| eta_min.powf(1.0 - i as f64 / (levels - 1) as f64))
        .collect()
}

impl Experiment for Semicircle {
    fn name(&self) -> &'static str {
        "semicircle"
    }

    fn required_caps(&self) -> &'static [&'static str] {
        &["sup_distance_mean", "paired_fraction", "counting_discrepancy"]
    }

    fn validate(&self, config: &ExperimentConfig) -> Result<()> {
        let k = config.grid.kappa;
        if !(k > 0.0 && k <= 1.0) {
            return Err(HarnessError::Config(format!(
                "semicircle needs kappa in (0, 1], got {k}"
            )));
        }
        if config.grid.e_min < -(2.0 - k) || config.grid.e_max > 2.0 - k {
            return Err(HarnessError::Config(
                "semicircle grid must lie inside |E| <= 2 - kappa".into(),
            ));
        }
        Ok(())
    }

    fn trial(&self, ctx: &Context, unit: Unit) -> Result<Vec<Record>> {
        let s = eigvalsh(&ctx.wigner(unit)?)?;
        let n = unit.n as f64;
        let eta_min = ctx
            .config
            .eta_rule
            .etas(unit.n)
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        let ladder = eta_ladder(eta_min, ctx.config.extra.eta_levels.unwrap_or(6));
        let energies = ctx.config.grid.energies();
        let mut sup: f64 = 0.0;
        for &eta in &ladder {
            for &e in &energies {
                let pt = SpectralPoint::new(e, eta)?;
                sup = sup.max((s.stieltjes(pt) - semicircle_stieltjes(pt)).norm());
            }
        }
        let eta_star = n.powf(-ctx.config.extra.eta_star_exponent.unwrap_or(1.0 / 3.0));
        let mut counting: f64 = 0.0;
        for &e in &energies {
            counting = counting.max((s.smoothed_counting_density(e, eta_star)? - semicircle_density(e)).abs());
        }
        let mut out = Emit::new(unit);
        out.put("sup_distance", sup);
        out.put("counting_discrepancy", counting);
        Ok(out.records)
    }

    fn verdicts(&self, config: &ExperimentConfig, records: &[Record]) -> Vec<Verdict> {
        let mut ns = config.n_list.clone();
        ns.sort_unstable();
        let (n_lo, n_hi) = (ns[0], *ns.last().unwrap());
        let means: Vec<(usize, f64)> = ns
            .iter()
            .map(|&n| (n, stats::mean(&values(records, "sup_distance", Some(n)))))
            .collect();
        let mut out = vec![
            Verdict::at_most(
                "sup_distance_mean",
                means.last().unwrap().1,
                config.cap("sup_distance_mean"),
                format!("trial-mean sup |m_N - m_sc| at N={n_hi}"),
            ),
            Verdict::flag(
                "sup_distance_decreasing",
                means.windows(2).all(|w| w[1].1 < w[0].1),
                format!("trial means by N: {means:?}"),
            ),
        ];
        let per_trial = |n: usize| -> std::collections::BTreeMap<u64, f64> {
            records
                .iter()
                .filter(|r| r.n == n && r.statistic == "sup_distance")
                .map(|r| (r.trial, r.value))
                .collect()
        };
        let (lo, hi) = (per_trial(n_lo), per_trial(n_hi));
        let pairs: Vec<bool> = hi.iter().filter_map(|(t, v)| lo.get(t).map(|w| v < w)).collect();
        let frac = pairs.iter().filter(|&&b| b).count() as f64 / pairs.len().max(1) as f64;
        out.push(Verdict::at_least(
            "paired_improvement_fraction",
            frac,
            config.cap("paired_fraction"),
            format!(
                "fraction of trials with sup(N={n_hi}) < sup(N={n_lo}) over {} pairs",
                pairs.len()
            ),
        ));
        let counting = values(records, "counting_discrepancy", Some(n_hi));
        out.push(Verdict::at_most(
            "counting_discrepancy_max",
            super::max_of(&counting),
            config.cap("counting_discrepancy"),
            format!("max over trials of sup_E |N_eta*/(2N eta*) - rho_sc| at N={n_hi}"),
        ));
        out
    }
}
