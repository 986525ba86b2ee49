//! `(L, eta)`-localization of eigenvectors, with a diagonal control, the
//! vacuous regime and a brute-force check of the detector.

use rand::Rng;
use wigner_core::localization::detect_localization;
use wigner_core::{eigh, Complex64, HermitianMatrix};

use super::{need, values, Context, Emit, Experiment, Unit};
use crate::config::ExperimentConfig;
use crate::dataset::{Record, Verdict};
use crate::error::{HarnessError, Result};

pub struct Localization;

/// Random vectors per trial in the brute-force comparison.
const CORPUS_PER_TRIAL: usize = 40;
const CORPUS_MAX_N: usize = 12;
const CORPUS_MAX_L: usize = 4;

/// Smallest mass outside any `l` coordinates, by enumerating subsets.
fn exhaustive_tail(v: &[Complex64], l: usize) -> f64 {
    let n = v.len();
    let total: f64 = v.iter().map(|x| x.norm_sqr()).sum();
    let mut best = f64::INFINITY;
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != l {
            continue;
        }
        let kept: f64 = (0..n).filter(|j| mask >> j & 1 == 1).map(|j| v[j].norm_sqr()).sum();
        best = best.min(total - kept);
    }
    best
}

fn count_localized(h: &HermitianMatrix, l: usize, eta: f64) -> Result<usize> {
    let spec = eigh(h)?;
    let mut hits = 0;
    for v in spec.eigenvectors() {
        hits += detect_localization(v, l, eta)?.localized as usize;
    }
    Ok(hits)
}

impl Experiment for Localization {
    fn name(&self) -> &'static str {
        "localization"
    }

    fn validate(&self, config: &ExperimentConfig) -> Result<()> {
        let l = need(config.extra.l, "l")?;
        let eta = need(config.extra.eta_loc, "eta_loc")?;
        if !(eta > 0.0 && eta < 1.0) {
            return Err(HarnessError::Config(format!("eta_loc = {eta} must lie in (0, 1)")));
        }
        if let Some(n) = config.n_list.iter().find(|&&n| l == 0 || l >= n) {
            return Err(HarnessError::Config(format!("need 1 <= L < N, got L = {l}, N = {n}")));
        }
        Ok(())
    }

    fn trial(&self, ctx: &Context, unit: Unit) -> Result<Vec<Record>> {
        let l = ctx.config.extra.l.unwrap();
        let eta = ctx.config.extra.eta_loc.unwrap();
        let h = ctx.wigner(unit)?;
        let n = unit.n;
        let mut out = Emit::new(unit);
        out.put("localized_count", count_localized(&h, l, eta)? as f64);

        let diag: Vec<f64> = (0..n).map(|i| h.get(i, i).re).collect();
        out.put(
            "control_count",
            count_localized(&HermitianMatrix::diagonal(&diag)?, 1, 0.0)? as f64,
        );
        out.put("vacuous_count", count_localized(&h, n - 1, 0.99)? as f64);

        let mut rng = ctx.seed(unit).child(u64::MAX).rng();
        let mut mismatches = 0;
        for _ in 0..CORPUS_PER_TRIAL {
            let len = rng.random_range(1..=CORPUS_MAX_N);
            let l = rng.random_range(1..=CORPUS_MAX_L.min(len));
            // a mix of spread-out and spiky vectors so both outcomes occur
            let spike = rng.random_range(0.0..4.0f64);
            let mut v: Vec<Complex64> = (0..len)
                .map(|_| {
                    let w = rng.random_range(0.0..1.0f64).powf(1.0 + spike * spike);
                    Complex64::from_polar(w, rng.random_range(0.0..std::f64::consts::TAU))
                })
                .collect();
            let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            if norm == 0.0 {
                continue;
            }
            v.iter_mut().for_each(|x| *x /= norm);
            let eta = rng.random_range(0.0..0.6);
            let greedy = detect_localization(&v, l, eta)?;
            let best = exhaustive_tail(&v, l);
            if greedy.localized != (best <= eta) || (greedy.tail_mass - best).abs() > 1e-12 {
                mismatches += 1;
            }
        }
        out.put("detector_mismatches", mismatches as f64);
        Ok(out.records)
    }

    fn verdicts(&self, config: &ExperimentConfig, records: &[Record]) -> Vec<Verdict> {
        let l = config.extra.l.unwrap_or(0);
        let eta = config.extra.eta_loc.unwrap_or(f64::NAN);
        let mut out = Vec::new();
        for &n in &config.n_list {
            let total = |s: &str| values(records, s, Some(n)).iter().sum::<f64>();
            let trials = values(records, "control_count", Some(n)).len() as f64;
            out.push(Verdict::at_most(
                &format!("localized_total[n={n}]"),
                total("localized_count"),
                0.0,
                format!("({l}, {eta})-localized eigenvectors over all trials"),
            ));
            let control = total("control_count");
            out.push(Verdict::flag(
                &format!("diagonal_control[n={n}]"),
                control == n as f64 * trials,
                format!("{control} detections, expected N per trial"),
            ));
            let vacuous = total("vacuous_count");
            out.push(Verdict::flag(
                &format!("vacuous_regime[n={n}]"),
                vacuous == n as f64 * trials,
                format!("{vacuous} detections with L = N-1, eta = 0.99"),
            ));
        }
        let mism: f64 = values(records, "detector_mismatches", None).iter().sum();
        out.push(Verdict::at_most(
            "detector_mismatches",
            mism,
            0.0,
            format!("greedy vs exhaustive over {CORPUS_PER_TRIAL} vectors per unit, N <= {CORPUS_MAX_N}, L <= {CORPUS_MAX_L}"),
        ));
        out
    }
}
