//! Exact identities between `H` and its minors, plus the deterministic
//! spectral invariants, on every sampled matrix.

use std::f64::consts::PI;

use wigner_core::greens::dense_resolvent_diag;
use wigner_core::minor::{
    check_interlacing, decompose, eigenvalue_equation_residual, eigenvalue_gradients, finite_difference_gradient,
    first_component_identity, Gradient,
};
use wigner_core::{eigh, eigvalsh, Error, SpectralPoint};

use super::{max_of, min_of, values, Context, Emit, Experiment, Unit};
use crate::config::ExperimentConfig;
use crate::dataset::{Record, Verdict};
use crate::error::Result;

pub struct IdentitySuite;

const FD_STEP: f64 = 1e-6;

/// `(statistic, bound, at_most)` tolerances of the exact-identity checks.
const TOLERANCES: &[(&str, f64, bool)] = &[
    ("eigh_residual", 1e-10, true),
    ("orthonormality_defect", 1e-10, true),
    ("interlacing_violations", 0.0, true),
    ("interlacing_count_gap", 1.0, true),
    ("eigen_equation_residual", 1e-7, true),
    ("green_minor_rel_err", 1e-9, true),
    ("green_eta_bound_ratio", 1.0, true),
    ("first_component_residual", 1e-8, true),
    ("parseval_rel_defect", 1e-9, true),
    ("gradient_abs_err", 1e-5, true),
    ("herglotz_min_im", f64::MIN_POSITIVE, false),
    ("resolvent_bound_ratio", 1.0 + 1e-12, true),
    ("pi_rho_rel_err", 1e-14, true),
    ("density_mass_err", 1e-3, true),
    ("trace_rel_err", 1e-9, true),
    ("frobenius_rel_err", 1e-9, true),
    ("halving_min_ratio", 1.0 - 1e-12, false),
    ("count_bound_ratio", 1.0, true),
];

fn minor_indices(config: &ExperimentConfig, n: usize) -> Vec<usize> {
    let raw = if config.extra.minor_indices.is_empty() {
        vec![0, -1]
    } else {
        config.extra.minor_indices.clone()
    };
    let mut ks: Vec<usize> = raw
        .iter()
        .map(|&k| {
            if k < 0 {
                (n as i64 + k).max(0) as usize
            } else {
                (k as usize).min(n - 1)
            }
        })
        .collect();
    ks.sort_unstable();
    ks.dedup();
    ks
}

impl Experiment for IdentitySuite {
    fn name(&self) -> &'static str {
        "identity_suite"
    }

    fn validate(&self, config: &ExperimentConfig) -> Result<()> {
        if config.grid.eta_list.is_empty() {
            return Err(crate::error::HarnessError::Config(
                "identity_suite needs grid.eta_list".into(),
            ));
        }
        Ok(())
    }

    fn trial(&self, ctx: &Context, unit: Unit) -> Result<Vec<Record>> {
        let n = unit.n;
        let h = ctx.wigner(unit)?;
        let spec = eigh(&h)?;
        let mut out = Emit::new(unit);
        out.put("eigh_residual", spec.residual);
        out.put("orthonormality_defect", spec.orthonormality_defect());

        // interlacing against every minor, and its counting consequence
        let mu = spec.eigenvalues();
        let mut violations = 0.0;
        let mut margin = f64::INFINITY;
        let mut count_gap: i64 = 0;
        let energies = ctx.config.grid.energies();
        for k in 0..n {
            let lambda = eigvalsh(&h.remove(k)?)?;
            let il = check_interlacing(mu, lambda.values())?;
            margin = margin.min(il.margin);
            violations += (!il.holds) as u8 as f64;
            for w in energies.windows(2) {
                let a = spec.spectrum().count_in_interval(w[0], w[1])? as i64;
                let b = lambda.count_in_interval(w[0], w[1])? as i64;
                count_gap = count_gap.max((a - b).abs());
            }
        }
        out.put("interlacing_violations", violations);
        out.put("interlacing_margin", margin);
        out.put("interlacing_count_gap", count_gap as f64);

        // identities through the minor decomposition
        let stride = (energies.len() / 5).max(1);
        let points: Vec<SpectralPoint> = energies
            .iter()
            .step_by(stride)
            .flat_map(|&e| {
                ctx.config
                    .grid
                    .eta_list
                    .iter()
                    .map(move |&eta| SpectralPoint { e, eta })
            })
            .collect();
        let dense: Vec<_> = points
            .iter()
            .map(|pt| dense_resolvent_diag(&h, pt.z()))
            .collect::<std::result::Result<_, _>>()?;
        let (mut eq_res, mut fc_res, mut parseval, mut green_err, mut green_bound) =
            (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
        let mut gated = 0.0;
        for k in minor_indices(ctx.config, n) {
            let md = decompose(&h, k)?;
            parseval = parseval.max(md.parseval_defect());
            for c in eigenvalue_equation_residual(&spec, &md) {
                if c.is_gated_in() {
                    eq_res = eq_res.max(c.residual() / (1.0 + mu[c.beta].abs()));
                } else {
                    gated += 1.0;
                }
            }
            for beta in 0..n {
                let c = first_component_identity(&spec, &md, beta)?;
                if c.is_gated_in() {
                    fc_res = fc_res.max(c.residual());
                }
            }
            for (pt, d) in points.iter().zip(&dense) {
                let via = md.green_diag(*pt);
                green_err = green_err.max((via - d[k]).norm() / d[k].norm());
                green_bound = green_bound.max(via.norm() * pt.eta);
            }
        }
        out.put("eigen_equation_residual", eq_res);
        out.put("first_component_residual", fc_res);
        out.put("near_degenerate_excluded", gated);
        out.put("parseval_rel_defect", parseval);
        out.put("green_minor_rel_err", green_err);
        out.put("green_eta_bound_ratio", green_bound);

        // eigenvalue gradients against central differences
        let mut grad_err = 0.0f64;
        let mut no_gradient = 0.0;
        let coords = [(0, 0), (n - 1, n - 1), (0, 1), (1, n - 1), (n / 2, n / 3)];
        for alpha in [0, n / 2, n - 1] {
            for &(i, j) in &coords {
                let exact = match eigenvalue_gradients(&spec, alpha, i, j) {
                    Ok(g) => g,
                    Err(Error::NoGradient { .. }) => {
                        no_gradient += 1.0;
                        continue;
                    }
                    Err(e) => return Err(e.into()),
                };
                let fd = finite_difference_gradient(&h, &spec, alpha, i, j, FD_STEP)?;
                grad_err = grad_err.max(match (exact, fd) {
                    (Gradient::Diagonal(a), Gradient::Diagonal(b)) => (a - b).abs(),
                    (Gradient::OffDiagonal { d_re, d_im }, Gradient::OffDiagonal { d_re: r, d_im: m }) => {
                        (d_re - r).abs().max((d_im - m).abs())
                    }
                    _ => f64::INFINITY,
                });
            }
        }
        out.put("gradient_abs_err", grad_err);
        out.put("gradient_skipped", no_gradient);

        // deterministic spectral invariants on the grid
        let s = spec.spectrum();
        let (mut min_im, mut bound, mut pi_rho, mut halving, mut count_ratio) =
            (f64::INFINITY, 0.0f64, 0.0f64, f64::INFINITY, 0.0f64);
        for &e in &energies {
            for &eta in &ctx.config.grid.eta_list {
                let pt = SpectralPoint::new(e, eta)?;
                let m = s.stieltjes(pt);
                min_im = min_im.min(m.im);
                bound = bound.max(m.norm() * eta);
                pi_rho = pi_rho.max((PI * s.density_of_states(pt) - m.im).abs() / m.im);
                let half = s.stieltjes(SpectralPoint::new(e, eta / 2.0)?).im;
                halving = halving.min(half / (0.5 * m.im));
                let count = s.count_in_interval(e - eta / 2.0, e + eta / 2.0)? as f64;
                count_ratio = count_ratio.max(count / (4.0 * n as f64 * eta * s.density_of_states(pt)));
            }
        }
        out.put("herglotz_min_im", min_im);
        out.put("resolvent_bound_ratio", bound);
        out.put("pi_rho_rel_err", pi_rho);
        out.put("halving_min_ratio", halving);
        out.put("count_bound_ratio", count_ratio);
        let mass_err = ctx
            .config
            .grid
            .eta_list
            .iter()
            .map(|&eta| (s.density_mass(eta) - 1.0).abs())
            .fold(0.0, f64::max);
        out.put("density_mass_err", mass_err);
        // relative to the nuclear norm, the natural scale of the trace sum
        let nuclear: f64 = mu.iter().map(|m| m.abs()).sum();
        out.put(
            "trace_rel_err",
            (mu.iter().sum::<f64>() - h.trace()).abs() / nuclear.max(f64::MIN_POSITIVE),
        );
        let frob = h.frobenius_sq();
        out.put(
            "frobenius_rel_err",
            (mu.iter().map(|m| m * m).sum::<f64>() - frob).abs() / frob.max(f64::MIN_POSITIVE),
        );
        Ok(out.records)
    }

    fn verdicts(&self, _config: &ExperimentConfig, records: &[Record]) -> Vec<Verdict> {
        TOLERANCES
            .iter()
            .map(|&(stat, bound, at_most)| {
                let xs = values(records, stat, None);
                let detail = format!("{} samples", xs.len());
                if xs.is_empty() {
                    return Verdict::flag(stat, false, "no samples");
                }
                if at_most {
                    Verdict::at_most(stat, max_of(&xs), bound, detail)
                } else {
                    Verdict::at_least(stat, min_of(&xs), bound, detail)
                }
            })
            .collect()
    }
}
