//! Fluctuations of the Stieltjes transform and moments of the centered
//! quadratic form `X`, over a sweep of `N` and power-law `eta`.

use wigner_core::minor::LeadingMinorProbe;
use wigner_core::SpectralPoint;

use super::{grouped, max_of, Context, Emit, Experiment, Unit};
use crate::config::{EtaRule, ExperimentConfig};
use crate::dataset::{Record, Verdict};
use crate::error::{HarnessError, Result};
use crate::stats;

pub struct Resolvent {
    name: &'static str,
    with_m: bool,
}

pub static VARIANCE_SCALING: Resolvent = Resolvent {
    name: "variance_scaling",
    with_m: true,
};

pub static XK_MOMENTS: Resolvent = Resolvent {
    name: "xk_moments",
    with_m: false,
};

const MIN_TRIALS_FOR_SE: u64 = 100;
const TAIL_EPS: f64 = 0.1;

impl Resolvent {
    fn m_verdicts(&self, config: &ExperimentConfig, records: &[Record], out: &mut Vec<Verdict>) {
        let cap = config.cap("variance_norm");
        let re = grouped(records, "m_re");
        let im = grouped(records, "m_im");
        let warn = if config.trials < MIN_TRIALS_FOR_SE {
            format!(" (warning: only {} trials, standard errors are large)", config.trials)
        } else {
            String::new()
        };
        let nf = |n: usize| n as f64;
        let mut worst = f64::NEG_INFINITY;
        // per eta index: (n, E-averaged normalized variance)
        let n_eta = config.eta_rule.etas(config.n_list[0]).len();
        let mut by_index: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n_eta];
        for &n in &config.n_list {
            for (idx, &eta) in config.eta_rule.etas(n).iter().enumerate() {
                let mut normed = Vec::new();
                for ((gn, e, g_eta), xs) in &re {
                    if *gn != n || *g_eta != Some(eta.to_bits()) {
                        continue;
                    }
                    let ys = &im[&(*gn, *e, *g_eta)];
                    let a: Vec<f64> = xs.iter().map(|p| p.1).collect();
                    let b: Vec<f64> = ys.iter().map(|p| p.1).collect();
                    let var = stats::variance(&a) + stats::variance(&b);
                    normed.push(var * nf(n).powi(2) * eta.powi(3));
                }
                worst = worst.max(max_of(&normed));
                by_index[idx].push((n, stats::mean(&normed)));
            }
        }
        out.push(Verdict::at_most(
            "variance_norm_max",
            worst,
            cap,
            format!("max over (N, eta, E) of Var(m) N^2 eta^3{warn}"),
        ));
        for (idx, series) in by_index.iter().enumerate() {
            let mut sorted = series.clone();
            sorted.sort_by_key(|p| p.0);
            let monotone = sorted.windows(2).all(|w| w[1].1 <= w[0].1);
            out.push(Verdict::flag(
                &format!("variance_norm_non_increasing[eta#{idx}]"),
                monotone,
                format!("E-averaged Var(m) N^2 eta^3 by N: {sorted:?}{warn}"),
            ));
        }

        // concentration tail at the largest N and the smallest eta
        let tail_cap = config.cap("concentration_tail");
        let n = *config.n_list.iter().max().unwrap();
        let eta = config.eta_rule.etas(n).into_iter().fold(f64::INFINITY, f64::min);
        let mut curve = Vec::new();
        for &eps in &config.extra.tail_eps {
            let mut hits = 0usize;
            let mut total = 0usize;
            for ((gn, e, g_eta), xs) in &re {
                if *gn != n || *g_eta != Some(eta.to_bits()) {
                    continue;
                }
                let ys = &im[&(*gn, *e, *g_eta)];
                let mr = stats::mean(&xs.iter().map(|p| p.1).collect::<Vec<_>>());
                let mi = stats::mean(&ys.iter().map(|p| p.1).collect::<Vec<_>>());
                for (x, y) in xs.iter().zip(ys) {
                    total += 1;
                    hits += ((x.1 - mr).hypot(y.1 - mi) >= eps) as usize;
                }
            }
            curve.push((eps, hits as f64 / total.max(1) as f64));
        }
        // The tail curve is recorded for every eps; only the reference level
        // carries a verdict.
        if let Some(&(_, p)) = curve.iter().find(|c| (c.0 - TAIL_EPS).abs() < 1e-12) {
            out.push(Verdict::at_most(
                &format!("concentration_tail[eps={TAIL_EPS}]"),
                p,
                tail_cap,
                format!("P(|m - mean| >= eps) at N={n}, eta={eta:.4e}; curve {curve:?}{warn}"),
            ));
        }
    }

    fn x_verdicts(&self, config: &ExperimentConfig, records: &[Record], out: &mut Vec<Verdict>) {
        let re = grouped(records, "x_re");
        let im = grouped(records, "x_im");
        let (mut w2, mut w4) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        let mut table = Vec::new();
        for ((n, e, eta), xs) in &re {
            let ys = &im[&(*n, *e, *eta)];
            let eta = f64::from_bits(eta.unwrap());
            let nf = *n as f64;
            let abs2: Vec<f64> = xs.iter().zip(ys).map(|(x, y)| x.1 * x.1 + y.1 * y.1).collect();
            let m2 = stats::mean(&abs2);
            let m4 = stats::mean(&abs2.iter().map(|a| a * a).collect::<Vec<_>>());
            let l = nf.ln();
            let s2 = m2 * nf * eta / l;
            let s4 = m4 * (nf * eta).powi(2) / (l * l);
            w2 = w2.max(s2);
            w4 = w4.max(s4);
            table.push((*n, eta, s2, s4));
        }
        out.push(Verdict::at_most(
            "x2_norm_max",
            w2,
            config.cap("x2_norm"),
            "max over (N, eta, E) of E|X|^2 N eta / ln N",
        ));
        out.push(Verdict::at_most(
            "x4_norm_max",
            w4,
            config.cap("x4_norm"),
            "max over (N, eta, E) of E|X|^4 (N eta)^2 / (ln N)^2",
        ));
    }
}

impl Experiment for Resolvent {
    fn name(&self) -> &'static str {
        self.name
    }

    fn required_caps(&self) -> &'static [&'static str] {
        if self.with_m {
            &["variance_norm", "concentration_tail", "x2_norm", "x4_norm"]
        } else {
            &["x2_norm", "x4_norm"]
        }
    }

    fn validate(&self, config: &ExperimentConfig) -> Result<()> {
        if !matches!(config.eta_rule, EtaRule::Power { .. } | EtaRule::Fixed { .. }) {
            return Err(HarnessError::Config(format!(
                "{} needs a power or fixed eta rule",
                self.name
            )));
        }
        Ok(())
    }

    fn trial(&self, ctx: &Context, unit: Unit) -> Result<Vec<Record>> {
        let probe = LeadingMinorProbe::new(&ctx.wigner(unit)?)?;
        let mut out = Emit::new(unit);
        for eta in ctx.config.eta_rule.etas(unit.n) {
            for e in ctx.config.grid.energies() {
                let pt = SpectralPoint::new(e, eta)?;
                if self.with_m {
                    let m = probe.spectrum().stieltjes(pt);
                    out.at("m_re", e, Some(eta), m.re);
                    out.at("m_im", e, Some(eta), m.im);
                }
                let x = probe.xk(pt).value;
                out.at("x_re", e, Some(eta), x.re);
                out.at("x_im", e, Some(eta), x.im);
            }
        }
        Ok(out.records)
    }

    fn verdicts(&self, config: &ExperimentConfig, records: &[Record]) -> Vec<Verdict> {
        let mut out = Vec::new();
        if self.with_m {
            self.m_verdicts(config, records, &mut out);
        }
        self.x_verdicts(config, records, &mut out);
        out
    }
}
