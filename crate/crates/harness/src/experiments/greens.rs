//! Second moment of the resolvent diagonal on a fine energy grid, and the
//! fraction of energies where it is exceptionally large.

use wigner_core::greens::bad_energy_profile;
use wigner_core::spectral::semicircle_stieltjes;
use wigner_core::{eigh, SpectralPoint};

use super::{grouped, Context, Emit, Experiment, Unit};
use crate::config::{EtaRule, ExperimentConfig};
use crate::dataset::{Record, Verdict};
use crate::error::{HarnessError, Result};
use crate::stats;

pub struct Greens;

/// Fraction of trials that must satisfy the bad-fraction bound.
const TRIAL_QUANTILE: f64 = 0.95;

/// `eta = 0` followed by the configured scales.
fn eta_list(config: &ExperimentConfig, n: usize) -> Vec<f64> {
    let mut etas = vec![0.0];
    etas.extend(config.eta_rule.etas(n));
    etas
}

impl Experiment for Greens {
    fn name(&self) -> &'static str {
        "greens"
    }

    fn required_caps(&self) -> &'static [&'static str] {
        &["bad_fraction_coef", "moment_ratio_factor"]
    }

    fn validate(&self, config: &ExperimentConfig) -> Result<()> {
        if !matches!(config.eta_rule, EtaRule::PowerLog { .. } | EtaRule::Fixed { .. }) {
            return Err(HarnessError::Config(
                "greens needs a power_log or fixed eta rule".into(),
            ));
        }
        Ok(())
    }

    fn trial(&self, ctx: &Context, unit: Unit) -> Result<Vec<Record>> {
        let spec = eigh(&ctx.wigner(unit)?)?;
        let ln = (unit.n as f64).ln();
        let threshold = ln.powf(ctx.config.extra.threshold_log_power.unwrap_or(6.0));
        let mut out = Emit::new(unit);
        for eta in eta_list(ctx.config, unit.n) {
            let profile = bad_energy_profile(&spec, &ctx.config.grid, eta, threshold)?;
            out.at("bad_fraction", threshold, Some(eta), profile.bad_fraction);
            let none_bad = profile.moments.iter().filter(|&&m| m >= f64::INFINITY).count();
            out.at_eta("bad_fraction_inf", eta, none_bad as f64);
            out.at("jittered", threshold, Some(eta), profile.jittered as f64);
            if eta > 0.0 {
                let mut ratios = Vec::with_capacity(profile.energies.len());
                for (&e, &m) in profile.energies.iter().zip(&profile.moments) {
                    let msc = semicircle_stieltjes(SpectralPoint::new(e, eta)?).norm_sqr();
                    ratios.push(m / msc);
                }
                out.at("median_moment_ratio", threshold, Some(eta), stats::median(&ratios));
            }
        }
        Ok(out.records)
    }

    fn verdicts(&self, config: &ExperimentConfig, records: &[Record]) -> Vec<Verdict> {
        let coef = config.cap("bad_fraction_coef");
        let factor = config.cap("moment_ratio_factor");
        let mut out = Vec::new();
        for ((n, _, eta), xs) in grouped(records, "bad_fraction") {
            let eta = f64::from_bits(eta.unwrap());
            let bound = coef / (n as f64).ln();
            let ok = xs.iter().filter(|p| p.1 <= bound).count() as f64 / xs.len() as f64;
            out.push(Verdict::at_least(
                &format!("bad_fraction[n={n},eta={eta:.4e}]"),
                ok,
                TRIAL_QUANTILE,
                format!(
                    "fraction of {} trials with bad_fraction <= {coef}/ln N = {bound:.4}",
                    xs.len()
                ),
            ));
        }
        for ((n, _, eta), xs) in grouped(records, "bad_fraction_inf") {
            let eta = f64::from_bits(eta.unwrap());
            out.push(Verdict::at_most(
                &format!("bad_fraction_inf[n={n},eta={eta:.4e}]"),
                xs.iter().map(|p| p.1).sum(),
                0.0,
                "grid points at or above an infinite threshold",
            ));
        }
        for ((n, _, eta), xs) in grouped(records, "median_moment_ratio") {
            let eta = f64::from_bits(eta.unwrap());
            let vals: Vec<f64> = xs.iter().map(|p| p.1).collect();
            let med = stats::median(&vals);
            out.push(Verdict::at_most(
                &format!("median_moment_ratio[n={n},eta={eta:.4e}]"),
                med.max(1.0 / med),
                factor,
                format!("trial median of the grid-median of (1/N) sum |G_jj|^2 / |m_sc|^2 is {med:.4}"),
            ));
        }
        out
    }
}
