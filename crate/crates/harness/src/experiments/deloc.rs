//! Eigenvector delocalization: sup norms, bulk sup norms, l^p profiles and
//! the gap sets `O_q`.

use wigner_core::eigh;
use wigner_core::localization::{deloc_report, lp_norm};

use super::{grouped, max_of, min_of, values, Context, Emit, Experiment, Unit};
use crate::config::ExperimentConfig;
use crate::dataset::{Record, Verdict};
use crate::error::{HarnessError, Result};
use crate::stats;

pub struct Deloc;

/// Eigenvalues with `|mu|` below this are treated as bulk.
const BULK_EDGE: f64 = 1.5;

impl Experiment for Deloc {
    fn name(&self) -> &'static str {
        "deloc"
    }

    fn required_caps(&self) -> &'static [&'static str] {
        &["sup_threshold_factor", "sup_exceed_fraction", "l1_floor"]
    }

    fn validate(&self, config: &ExperimentConfig) -> Result<()> {
        if config.extra.q_list.is_empty() || config.extra.p_list.is_empty() {
            return Err(HarnessError::Config("deloc needs extra.q_list and extra.p_list".into()));
        }
        Ok(())
    }

    fn trial(&self, ctx: &Context, unit: Unit) -> Result<Vec<Record>> {
        let spec = eigh(&ctx.wigner(unit)?)?;
        let n = unit.n as f64;
        let ln = n.ln();
        let extra = &ctx.config.extra;
        let report = deloc_report(&spec, &extra.p_list, &extra.q_list)?;
        let factor = ctx.config.cap("sup_threshold_factor");
        let bulk_floor = ln / n.cbrt();

        let exceed = report.iter().filter(|r| n * r.sup_norm_sq > factor * ln).count();
        let bulk_large = report
            .iter()
            .zip(spec.eigenvalues())
            .filter(|(r, mu)| mu.abs() <= BULK_EDGE && r.sup_norm_sq.sqrt() >= bulk_floor)
            .count();
        let mut min_l1 = f64::INFINITY;
        for v in spec.eigenvectors() {
            min_l1 = min_l1.min(lp_norm(v, 1.0)? / n.sqrt());
        }

        let mut out = Emit::new(unit);
        out.put("sup_exceed_fraction", exceed as f64 / n);
        out.put("bulk_large_sup_count", bulk_large as f64);
        out.put("min_l1_ratio", min_l1);
        out.put(
            "max_sup_scaled",
            report.iter().map(|r| n * r.sup_norm_sq / ln).fold(0.0, f64::max),
        );
        for (i, &p) in extra.p_list.iter().enumerate() {
            let flat = n.powf(1.0 / p - 0.5);
            let ratios: Vec<f64> = report.iter().map(|r| r.lp_norms[i].1 / flat).collect();
            out.at("lp_ratio_mean", p, None, stats::mean(&ratios));
            out.at("lp_ratio_min", p, None, min_of(&ratios));
        }
        for (i, &q) in extra.q_list.iter().enumerate() {
            let inside = report.iter().filter(|r| r.in_o_q[i].1).count();
            out.at("o_q_fraction", q, None, inside as f64 / n);
            // fraction above the threshold q^2 (ln N)^2 / N
            let big = report.iter().filter(|r| n * r.sup_norm_sq >= q * q * ln * ln).count();
            out.at("q_exceed_fraction", q, None, big as f64 / n);
        }
        Ok(out.records)
    }

    fn verdicts(&self, config: &ExperimentConfig, records: &[Record]) -> Vec<Verdict> {
        let mut out = Vec::new();
        let factor = config.cap("sup_threshold_factor");
        for &n in &config.n_list {
            let ex = values(records, "sup_exceed_fraction", Some(n));
            out.push(Verdict::at_most(
                &format!("sup_exceed_fraction[n={n}]"),
                max_of(&ex),
                config.cap("sup_exceed_fraction"),
                format!("max over trials of the fraction with N|v|_inf^2 > {factor} ln N"),
            ));
            let bulk = values(records, "bulk_large_sup_count", Some(n));
            out.push(Verdict::at_most(
                &format!("bulk_large_sup_count[n={n}]"),
                bulk.iter().sum(),
                0.0,
                format!("bulk eigenvectors (|mu| <= {BULK_EDGE}) with |v|_inf >= ln N / N^(1/3), all trials"),
            ));
            let l1 = values(records, "min_l1_ratio", Some(n));
            out.push(Verdict::at_least(
                &format!("min_l1_ratio[n={n}]"),
                min_of(&l1),
                config.cap("l1_floor"),
                "min over trials and eigenvectors of |v|_1 / sqrt(N)",
            ));
        }
        // informational: the q-threshold tail should shrink as q grows
        for ((n, q, _), xs) in grouped(records, "q_exceed_fraction") {
            let q = f64::from_bits(q.unwrap());
            let mean = stats::mean(&xs.iter().map(|p| p.1).collect::<Vec<_>>());
            if q >= 1.0 && mean * q > 1.0 {
                out.push(Verdict::flag(
                    &format!("q_exceed_fraction[n={n},q={q}]"),
                    false,
                    format!("mean fraction {mean:.3e} exceeds 1/q"),
                ));
            }
        }
        out
    }
}
