//! Entry laws and Wigner matrix sampling.
//!
//! Off-diagonal entries are `h_ij = (x + i y) / sqrt(N)` with `x, y` drawn
//! from a law of variance 1/2; diagonal entries are `x / sqrt(N)` with `x`
//! drawn from a possibly different law. Laws are densities proportional to
//! `exp(-g(x))`.

use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::matrix::HermitianMatrix;
use crate::quad::integrate;
use crate::rng::SeedSpec;

/// Half-width of the window used for every quadrature over a law.
pub const QUADRATURE_HALF_WIDTH: f64 = 20.0;
const QUADRATURE_TOL: f64 = 1e-10;
const MAX_REJECTIONS: usize = 10_000;
const MIN_ACCEPTANCE: f64 = 0.1;

/// Unscaled potential shapes.
#[derive(Debug, Clone, PartialEq)]
pub enum Potential {
    /// `c x^2`
    Quadratic(f64),
    /// `a (x^2 + x^4 / 4)`
    Quartic(f64),
    Custom(Expr),
}

impl Potential {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Potential::Quadratic(c) => c * x * x,
            Potential::Quartic(a) => a * (x * x + 0.25 * x.powi(4)),
            Potential::Custom(e) => e.eval(x),
        }
    }

    pub fn second_derivative(&self, x: f64) -> f64 {
        match self {
            Potential::Quadratic(c) => 2.0 * c,
            Potential::Quartic(a) => a * (2.0 + 3.0 * x * x),
            Potential::Custom(e) => {
                let h = 1e-4 * (1.0 + x.abs());
                (e.eval(x + h) - 2.0 * e.eval(x) + e.eval(x - h)) / (h * h)
            }
        }
    }
}

impl fmt::Display for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Potential::Quadratic(c) => write!(f, "{c}*x^2"),
            Potential::Quartic(a) => write!(f, "{a}*(x^2 + x^4/4)"),
            Potential::Custom(e) => write!(f, "{e}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Sampler {
    Normal {
        sd: f64,
    },
    /// Gaussian envelope `N(mode, sd^2)` in unscaled coordinates;
    /// `log_bound` is the sup of the log density ratio.
    Rejection {
        mode: f64,
        g_mode: f64,
        sd: f64,
        log_bound: f64,
        acceptance: f64,
    },
}

/// A centered real law with density proportional to `exp(-g(x))`, where
/// `g(x) = potential(x / scale)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EntryLaw {
    pub name: String,
    pub potential: Potential,
    pub scale: f64,
    pub variance: f64,
    pub second_derivative_bound: Option<f64>,
    pub subgaussian_delta: Option<f64>,
    pub c3_spectral_gap: bool,
    pub c4_log_sobolev: bool,
    sampler: Sampler,
}

/// A custom law as it appears in configuration files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LawSpec {
    pub g: String,
    pub target_variance: f64,
}

/// `∫ f(y) exp(-(g(y) - shift)) dy` over the quadrature window.
fn weighted<F: Fn(f64) -> f64>(p: &Potential, shift: f64, f: F) -> f64 {
    integrate(
        |y| f(y) * (shift - p.eval(y)).exp(),
        -QUADRATURE_HALF_WIDTH,
        QUADRATURE_HALF_WIDTH,
        QUADRATURE_TOL,
    )
}

/// Mean and variance of the unscaled density `exp(-potential)`.
fn raw_moments(p: &Potential, shift: f64) -> (f64, f64) {
    let z = weighted(p, shift, |_| 1.0);
    let mean = weighted(p, shift, |y| y) / z;
    let var = weighted(p, shift, |y| (y - mean) * (y - mean)) / z;
    (mean, var)
}

fn minimize_on_window(p: &Potential) -> (f64, f64) {
    let steps = 8000;
    let h = 2.0 * QUADRATURE_HALF_WIDTH / steps as f64;
    let mut best = (0.0, p.eval(0.0));
    for i in 0..=steps {
        let y = -QUADRATURE_HALF_WIDTH + i as f64 * h;
        let v = p.eval(y);
        if v < best.1 {
            best = (y, v);
        }
    }
    // golden-section refinement
    let (mut a, mut b) = (best.0 - h, best.0 + h);
    let r = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..80 {
        let c = b - r * (b - a);
        let d = a + r * (b - a);
        if p.eval(c) < p.eval(d) {
            b = d;
        } else {
            a = c;
        }
    }
    let y = 0.5 * (a + b);
    (y, p.eval(y))
}

fn build_rejection(name: &str, p: &Potential) -> Result<Sampler> {
    let (mode, g_mode) = minimize_on_window(p);
    let (_, raw_var) = raw_moments(p, g_mode);
    let z = weighted(p, g_mode, |_| 1.0);
    let curvature = p.second_derivative(mode);
    let mut candidates = Vec::new();
    if curvature > 1e-8 {
        candidates.push(1.0 / curvature.sqrt());
    }
    let sd0 = raw_var.sqrt();
    candidates.extend([1.0, 1.25, 1.5, 2.0, 3.0].iter().map(|f| f * sd0));

    let grid = 20_000;
    let h = 2.0 * QUADRATURE_HALF_WIDTH / grid as f64;
    let mut best: Option<Sampler> = None;
    for sd in candidates {
        let log_bound = (0..=grid)
            .map(|i| {
                let y = -QUADRATURE_HALF_WIDTH + i as f64 * h;
                let dy = y - mode;
                -(p.eval(y) - g_mode) + dy * dy / (2.0 * sd * sd)
            })
            .fold(0.0f64, f64::max);
        let acceptance = z / (log_bound.exp() * (2.0 * std::f64::consts::PI).sqrt() * sd);
        let better = match &best {
            Some(Sampler::Rejection { acceptance: a, .. }) => acceptance > *a,
            _ => true,
        };
        if acceptance.is_finite() && better {
            best = Some(Sampler::Rejection {
                mode,
                g_mode,
                sd,
                log_bound,
                acceptance,
            });
        }
    }
    match best {
        Some(s @ Sampler::Rejection { acceptance, .. }) if acceptance >= MIN_ACCEPTANCE => Ok(s),
        _ => Err(Error::InvalidLaw {
            law: name.to_string(),
            reason: "no Gaussian envelope reaches the minimum acceptance rate 0.1".into(),
        }),
    }
}

impl EntryLaw {
    /// Gaussian law with `g(x) = x^2 / (2 variance)`.
    pub fn gaussian(name: &str, variance: f64) -> Self {
        Self {
            name: name.to_string(),
            potential: Potential::Quadratic(1.0 / (2.0 * variance)),
            scale: 1.0,
            variance,
            second_derivative_bound: Some(1.0 / variance),
            subgaussian_delta: Some(1.0 / (4.0 * variance)),
            c3_spectral_gap: true,
            c4_log_sobolev: true,
            sampler: Sampler::Normal { sd: variance.sqrt() },
        }
    }

    /// `g(x) = a (x^2 + x^4/4)` with `a` fixed by bisection so that the
    /// variance equals 1/2.
    pub fn quartic() -> Self {
        let target = 0.5;
        let (mut lo, mut hi) = (1e-3, 1.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let (_, var) = raw_moments(&Potential::Quartic(mid), 0.0);
            // variance decreases as the confinement grows
            if var > target {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-15 {
                break;
            }
        }
        let potential = Potential::Quartic(0.5 * (lo + hi));
        let (_, variance) = raw_moments(&potential, 0.0);
        let sampler = build_rejection("quartic", &potential).expect("quartic envelope");
        let mut law = Self {
            name: "quartic".into(),
            potential,
            scale: 1.0,
            variance,
            second_derivative_bound: None,
            subgaussian_delta: Some(1.0),
            c3_spectral_gap: true,
            c4_log_sobolev: true,
            sampler,
        };
        law.second_derivative_bound = Some(law.max_second_derivative_on(-10.0, 10.0));
        law
    }

    /// Parses `g` and rescales the variate so that its variance equals
    /// `target_variance`. The law must be centered.
    pub fn custom(name: &str, spec: &LawSpec) -> Result<Self> {
        let invalid = |reason: String| Error::InvalidLaw {
            law: name.to_string(),
            reason,
        };
        if !(spec.target_variance > 0.0 && spec.target_variance.is_finite()) {
            return Err(invalid(format!(
                "target variance {} must be positive",
                spec.target_variance
            )));
        }
        let potential = Potential::Custom(Expr::parse(&spec.g)?);
        let (_, g_min) = minimize_on_window(&potential);
        if !g_min.is_finite() {
            return Err(invalid("potential is not finite on the quadrature window".into()));
        }
        let z = weighted(&potential, g_min, |_| 1.0);
        if !(z.is_finite() && z > 0.0) {
            return Err(invalid("exp(-g) is not integrable on the quadrature window".into()));
        }
        let (mean, raw_var) = raw_moments(&potential, g_min);
        if !(raw_var > 0.0 && raw_var.is_finite()) {
            return Err(invalid("density has no finite positive variance".into()));
        }
        if mean.abs() > 1e-6 * raw_var.sqrt() {
            return Err(invalid(format!("law is not centered (mean {mean:e})")));
        }
        let scale = (spec.target_variance / raw_var).sqrt();
        let sampler = build_rejection(name, &potential)?;
        let mut law = Self {
            name: name.to_string(),
            potential,
            scale,
            variance: spec.target_variance,
            second_derivative_bound: None,
            subgaussian_delta: None,
            c3_spectral_gap: false,
            c4_log_sobolev: false,
            sampler,
        };
        let m = law.max_second_derivative_on(-10.0, 10.0);
        law.second_derivative_bound = m.is_finite().then_some(m);
        Ok(law)
    }

    /// The potential of the variate itself.
    pub fn g(&self, x: f64) -> f64 {
        self.potential.eval(x / self.scale)
    }

    pub fn g_second_derivative(&self, x: f64) -> f64 {
        self.potential.second_derivative(x / self.scale) / (self.scale * self.scale)
    }

    fn max_second_derivative_on(&self, lo: f64, hi: f64) -> f64 {
        let steps = 2000;
        (0..=steps)
            .map(|i| self.g_second_derivative(lo + (hi - lo) * i as f64 / steps as f64))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Acceptance probability of the rejection sampler (1 for Gaussians).
    pub fn acceptance_rate(&self) -> f64 {
        match self.sampler {
            Sampler::Normal { .. } => 1.0,
            Sampler::Rejection { acceptance, .. } => acceptance,
        }
    }

    pub fn is_gaussian(&self) -> bool {
        matches!(self.sampler, Sampler::Normal { .. })
    }

    /// One variate.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<f64> {
        match self.sampler {
            Sampler::Normal { sd } => Ok(sd * rng.sample::<f64, _>(StandardNormal)),
            Sampler::Rejection {
                mode,
                g_mode,
                sd,
                log_bound,
                ..
            } => {
                for _ in 0..MAX_REJECTIONS {
                    let y = mode + sd * rng.sample::<f64, _>(StandardNormal);
                    let dy = y - mode;
                    let log_ratio = -(self.potential.eval(y) - g_mode) + dy * dy / (2.0 * sd * sd) - log_bound;
                    let u: f64 = rng.random();
                    if u.ln() <= log_ratio {
                        return Ok(self.scale * y);
                    }
                }
                Err(Error::SamplerMisconfigured {
                    law: self.name.clone(),
                    attempts: MAX_REJECTIONS,
                })
            }
        }
    }
}

/// The built-in laws: `gauss_half` (g = x^2), `gauss_one` (g = x^2/2) and
/// `quartic`.
pub fn builtin_laws() -> Vec<EntryLaw> {
    vec![
        EntryLaw::gaussian("gauss_half", 0.5),
        EntryLaw::gaussian("gauss_one", 1.0),
        EntryLaw::quartic(),
    ]
}

pub fn builtin_law(name: &str) -> Option<EntryLaw> {
    match name {
        "gauss_half" => Some(EntryLaw::gaussian("gauss_half", 0.5)),
        "gauss_one" => Some(EntryLaw::gaussian("gauss_one", 1.0)),
        "quartic" => Some(EntryLaw::quartic()),
        _ => None,
    }
}

pub fn sample_real(law: &EntryLaw, seed: SeedSpec, count: usize) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::InvalidParameter("sample count must be at least 1".into()));
    }
    let mut rng = seed.rng();
    (0..count).map(|_| law.draw(&mut rng)).collect()
}

/// Samples `h_ij = (x + i y)/sqrt(n)` for `i < j` and `h_ii = x/sqrt(n)`.
pub fn sample_wigner(n: usize, offdiag: &EntryLaw, diag: &EntryLaw, seed: SeedSpec) -> Result<HermitianMatrix> {
    if n == 0 {
        return Err(Error::InvalidDimension(0));
    }
    if (offdiag.variance - 0.5).abs() > 1e-9 {
        return Err(Error::InvalidLaw {
            law: offdiag.name.clone(),
            reason: format!("off-diagonal variance must be 1/2, found {}", offdiag.variance),
        });
    }
    let mut rng = seed.rng();
    let s = 1.0 / (n as f64).sqrt();
    // column-major lower triangle, drawn in a fixed order
    let mut lower = Vec::with_capacity(n * (n + 1) / 2);
    for j in 0..n {
        lower.push(Complex64::new(s * diag.draw(&mut rng)?, 0.0));
        for _ in j + 1..n {
            let x = offdiag.draw(&mut rng)?;
            let y = offdiag.draw(&mut rng)?;
            // stored entry is h_ij with i > j, i.e. conj of the upper entry x + iy
            lower.push(Complex64::new(s * x, -s * y));
        }
    }
    let mut offsets = Vec::with_capacity(n);
    let mut acc = 0;
    for j in 0..n {
        offsets.push(acc);
        acc += n - j;
    }
    Ok(HermitianMatrix::from_lower(n, |i, j| lower[offsets[j] + (i - j)])?.with_seed(seed))
}

pub fn sample_complex_vector(n: usize, law: &EntryLaw, seed: SeedSpec) -> Result<Vec<Complex64>> {
    if n == 0 {
        return Err(Error::InvalidDimension(0));
    }
    let mut rng = seed.rng();
    (0..n)
        .map(|_| Ok(Complex64::new(law.draw(&mut rng)?, law.draw(&mut rng)?)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_declared_values() {
        let laws = builtin_laws();
        assert_eq!(laws.len(), 3);
        assert_eq!(laws[0].variance, 0.5);
        assert_eq!(laws[1].variance, 1.0);
        assert!((laws[2].variance - 0.5).abs() < 1e-4);
        assert!(laws.iter().all(|l| l.c3_spectral_gap && l.c4_log_sobolev));
        assert_eq!(laws[0].g(1.5), 2.25);
        assert_eq!(laws[1].g(2.0), 2.0);
    }

    #[test]
    fn second_derivative_bound_holds_on_grid() {
        for law in builtin_laws() {
            let m = law.second_derivative_bound.unwrap();
            for i in 0..=400 {
                let x = -10.0 + 0.05 * i as f64;
                assert!(law.g_second_derivative(x) <= m + 1e-9, "{} at {x}", law.name);
            }
        }
    }

    #[test]
    fn quartic_acceptance_is_reasonable() {
        let q = EntryLaw::quartic();
        assert!(q.acceptance_rate() >= 0.1);
        assert!(q.acceptance_rate() <= 1.0);
    }

    #[test]
    fn custom_law_rescales_and_validates() {
        let spec = LawSpec {
            g: "x^2 + 0.25*x^4".into(),
            target_variance: 0.5,
        };
        let law = EntryLaw::custom("soft", &spec).unwrap();
        let z = integrate(|x| (-law.g(x)).exp(), -20.0, 20.0, 1e-12);
        let var = integrate(|x| x * x * (-law.g(x)).exp(), -20.0, 20.0, 1e-12) / z;
        assert!((var - 0.5).abs() < 1e-6, "{var}");

        let off_center = LawSpec {
            g: "(x - 1)^2".into(),
            target_variance: 0.5,
        };
        assert!(matches!(
            EntryLaw::custom("shifted", &off_center),
            Err(Error::InvalidLaw { .. })
        ));
        let bad = LawSpec {
            g: "x^2 +".into(),
            target_variance: 0.5,
        };
        assert!(matches!(EntryLaw::custom("bad", &bad), Err(Error::Expression { .. })));
    }

    #[test]
    fn wigner_shapes_and_errors() {
        let g = EntryLaw::gaussian("gauss_half", 0.5);
        let d = EntryLaw::gaussian("gauss_one", 1.0);
        let one = sample_wigner(1, &g, &d, SeedSpec::new(1, 0)).unwrap();
        assert_eq!(one.n(), 1);
        assert_eq!(one.get(0, 0).im, 0.0);
        assert_eq!(
            sample_wigner(0, &g, &d, SeedSpec::new(1, 0)),
            Err(Error::InvalidDimension(0))
        );
        assert!(matches!(
            sample_wigner(3, &d, &d, SeedSpec::new(1, 0)),
            Err(Error::InvalidLaw { .. })
        ));
        let h = sample_wigner(7, &g, &d, SeedSpec::new(1, 2)).unwrap();
        assert_eq!(h.hermiticity_defect(), 0.0);
        assert_eq!(h, sample_wigner(7, &g, &d, SeedSpec::new(1, 2)).unwrap());
        assert_ne!(h, sample_wigner(7, &g, &d, SeedSpec::new(1, 3)).unwrap());
    }
}
