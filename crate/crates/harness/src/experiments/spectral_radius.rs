//! Spectral radius and sup-grid bounds on the density of states and the
//! Stieltjes transform on the scale `eta = ln N / N`.

use wigner_core::{eigvalsh, SpectralPoint};

use super::{max_of, values, Context, Emit, Experiment, Unit};
use crate::config::{EtaRule, ExperimentConfig};
use crate::dataset::{Record, Verdict};
use crate::error::{HarnessError, Result};

pub struct SpectralRadius;

impl Experiment for SpectralRadius {
    fn name(&self) -> &'static str {
        "spectral_radius"
    }

    fn required_caps(&self) -> &'static [&'static str] {
        &["spectral_radius", "sup_rho", "sup_m_log"]
    }

    fn validate(&self, config: &ExperimentConfig) -> Result<()> {
        if config.eta_rule != EtaRule::Log {
            return Err(HarnessError::Config(
                "spectral_radius uses the log rule eta = ln N / N".into(),
            ));
        }
        Ok(())
    }

    fn trial(&self, ctx: &Context, unit: Unit) -> Result<Vec<Record>> {
        let s = eigvalsh(&ctx.wigner(unit)?)?;
        let eta = ctx.config.eta_rule.etas(unit.n)[0];
        let (mut rho, mut m) = (0.0f64, 0.0f64);
        for e in ctx.config.grid.energies() {
            let pt = SpectralPoint::new(e, eta)?;
            rho = rho.max(s.density_of_states(pt));
            m = m.max(s.stieltjes(pt).norm());
        }
        let mut out = Emit::new(unit);
        out.put("max_abs_eigenvalue", s.spectral_radius());
        out.put("sup_rho", rho);
        out.put("sup_abs_m_over_log", m / (unit.n as f64).ln());
        Ok(out.records)
    }

    fn verdicts(&self, config: &ExperimentConfig, records: &[Record]) -> Vec<Verdict> {
        let mut out = Vec::new();
        for &n in &config.n_list {
            for (stat, cap, what) in [
                ("max_abs_eigenvalue", "spectral_radius", "max |mu|"),
                ("sup_rho", "sup_rho", "sup_E rho_eta(E), eta = ln N / N"),
                ("sup_abs_m_over_log", "sup_m_log", "sup_E |m(E + i ln N/N)| / ln N"),
            ] {
                let xs = values(records, stat, Some(n));
                out.push(Verdict::at_most(
                    &format!("{stat}[n={n}]"),
                    max_of(&xs),
                    config.cap(cap),
                    format!("max over {} trials of {what}", xs.len()),
                ));
            }
        }
        out
    }
}
