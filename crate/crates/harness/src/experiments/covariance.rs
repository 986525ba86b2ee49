//! Extreme eigenvalues of the Gram matrices of the off-diagonal and the
//! trailing block after splitting off `L = nu N` coordinates.

use wigner_core::localization::block_covariance;

use super::{grouped, max_of, min_of, Context, Emit, Experiment, Unit};
use crate::config::ExperimentConfig;
use crate::dataset::{Record, Verdict};
use crate::error::{HarnessError, Result};
use crate::stats;

pub struct CovarianceTails;

/// The smallest-eigenvalue checks apply from this size on, and only for
/// ratios up to `MAX_NU_FOR_FLOOR`; beyond it the edge `(1 - sqrt(nu))^2`
/// approaches the floor itself and the values are recorded only.
const MIN_N_FOR_FLOOR: usize = 400;
const MAX_NU_FOR_FLOOR: f64 = 0.1;

fn block_size(n: usize, nu: f64) -> usize {
    ((nu * n as f64).round() as usize).clamp(1, n - 1)
}

impl Experiment for CovarianceTails {
    fn name(&self) -> &'static str {
        "covariance_tails"
    }

    fn required_caps(&self) -> &'static [&'static str] {
        &["lambda_min_floor", "median_tolerance", "lambda_max_ceiling"]
    }

    fn validate(&self, config: &ExperimentConfig) -> Result<()> {
        let nus = &config.extra.nu_list;
        if nus.is_empty() || nus.iter().any(|&v| !(v > 0.0 && v <= 0.2)) {
            return Err(HarnessError::Config(
                "covariance_tails needs extra.nu_list with values in (0, 0.2]".into(),
            ));
        }
        Ok(())
    }

    fn trial(&self, ctx: &Context, unit: Unit) -> Result<Vec<Record>> {
        let h = ctx.wigner(unit)?;
        let mut out = Emit::new(unit);
        for &nu in &ctx.config.extra.nu_list {
            let bc = block_covariance(&h, block_size(unit.n, nu))?;
            out.at("lambda_min_x1", nu, None, bc.lambda_min_x1);
            out.at("lambda_max_x2", nu, None, bc.lambda_max_x2);
        }
        Ok(out.records)
    }

    fn verdicts(&self, config: &ExperimentConfig, records: &[Record]) -> Vec<Verdict> {
        let mut out = Vec::new();
        let floor = config.cap("lambda_min_floor");
        let tol = config.cap("median_tolerance");
        for ((n, nu, _), xs) in grouped(records, "lambda_min_x1") {
            let nu = f64::from_bits(nu.unwrap());
            if n < MIN_N_FOR_FLOOR || nu > MAX_NU_FOR_FLOOR + 1e-12 {
                continue;
            }
            let mut vals: Vec<f64> = xs.iter().map(|p| p.1).collect();
            out.push(Verdict::at_least(
                &format!("lambda_min_x1[n={n},nu={nu}]"),
                min_of(&vals),
                floor,
                format!("min over {} trials of lambda_min(X1* X1)", vals.len()),
            ));
            vals.sort_by(f64::total_cmp);
            let median = stats::median(&vals);
            let edge = (1.0 - nu.sqrt()).powi(2);
            let l = block_size(n, nu) as f64;
            let y = l / (n as f64 - l);
            out.push(Verdict::at_most(
                &format!("lambda_min_x1_median[n={n},nu={nu}]"),
                (median - edge).abs(),
                tol,
                format!(
                    "|median - (1 - sqrt(nu))^2| with median {median:.4}, edge {edge:.4}; \
                     edge at the block aspect ratio {y:.4} is {:.4}",
                    (1.0 - y.sqrt()).powi(2)
                ),
            ));
        }
        for ((n, nu, _), xs) in grouped(records, "lambda_max_x2") {
            let nu = f64::from_bits(nu.unwrap());
            let vals: Vec<f64> = xs.iter().map(|p| p.1).collect();
            out.push(Verdict::at_most(
                &format!("lambda_max_x2[n={n},nu={nu}]"),
                max_of(&vals),
                config.cap("lambda_max_ceiling"),
                format!("max over {} trials of lambda_max(X2* X2)", vals.len()),
            ));
        }
        out
    }
}
