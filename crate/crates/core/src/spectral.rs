//! Hermitian eigendecomposition and the spectral observables built on it:
//! counting function, Stieltjes transform, Cauchy-regularized density of
//! states, and the semicircle reference law.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::matrix::HermitianMatrix;
use crate::quad::integrate;

/// A point `z = E + i eta` in the upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralPoint {
    pub e: f64,
    pub eta: f64,
}

impl SpectralPoint {
    pub fn new(e: f64, eta: f64) -> Result<Self> {
        if !(eta > 0.0 && eta.is_finite() && e.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "spectral point needs finite E and eta > 0, got ({e}, {eta})"
            )));
        }
        Ok(Self { e, eta })
    }

    pub fn z(&self) -> Complex64 {
        Complex64::new(self.e, self.eta)
    }
}

/// Energy grid with a list of regularization scales. `kappa` defines the
/// bulk window `|E| <= 2 - kappa`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub e_min: f64,
    pub e_max: f64,
    pub n_points: usize,
    #[serde(default)]
    pub eta_list: Vec<f64>,
    #[serde(default = "GridSpec::default_kappa")]
    pub kappa: f64,
}

impl GridSpec {
    fn default_kappa() -> f64 {
        0.5
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.e_min < self.e_max) {
            return Err(Error::InvalidParameter(format!(
                "grid needs e_min < e_max, got [{}, {}]",
                self.e_min, self.e_max
            )));
        }
        if self.n_points == 0 {
            return Err(Error::InvalidParameter("grid needs at least one point".into()));
        }
        if let Some(eta) = self.eta_list.iter().find(|&&eta| !(eta > 0.0)) {
            return Err(Error::InvalidParameter(format!("grid eta {eta} must be positive")));
        }
        if !(self.kappa > 0.0 && self.kappa < 2.0) {
            return Err(Error::InvalidParameter(format!(
                "kappa {} must lie in (0, 2)",
                self.kappa
            )));
        }
        Ok(())
    }

    /// Uniformly spaced energies including both endpoints.
    pub fn energies(&self) -> Vec<f64> {
        if self.n_points == 1 {
            return vec![0.5 * (self.e_min + self.e_max)];
        }
        let step = (self.e_max - self.e_min) / (self.n_points - 1) as f64;
        (0..self.n_points).map(|i| self.e_min + step * i as f64).collect()
    }
}

/// Eigenvalues sorted ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum(Vec<f64>);

impl Spectrum {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidDimension(0));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("spectrum contains non-finite values".into()));
        }
        if values.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidInput("spectrum is not sorted ascending".into()));
        }
        Ok(Self(values))
    }

    pub fn from_unsorted(mut values: Vec<f64>) -> Result<Self> {
        values.sort_by(f64::total_cmp);
        Self::new(values)
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    /// `F(x) = |{alpha : mu_alpha <= x}| / N`.
    pub fn counting_function(&self, x: f64) -> f64 {
        self.0.partition_point(|&m| m <= x) as f64 / self.n() as f64
    }

    /// Number of eigenvalues in the closed interval `[lo, hi]`.
    pub fn count_in_interval(&self, lo: f64, hi: f64) -> Result<usize> {
        if !(lo.is_finite() && hi.is_finite()) || lo > hi {
            return Err(Error::InvalidInterval { lo, hi });
        }
        Ok(self.0.partition_point(|&m| m <= hi) - self.0.partition_point(|&m| m < lo))
    }

    /// `m(z) = (1/N) sum 1/(mu - z)`.
    pub fn stieltjes(&self, pt: SpectralPoint) -> Complex64 {
        let z = pt.z();
        let sum: Complex64 = self.0.iter().map(|&m| 1.0 / (m - z)).sum();
        sum / self.n() as f64
    }

    /// `rho_eta(E) = (1/(N pi)) sum eta / ((mu - E)^2 + eta^2)`.
    pub fn density_of_states(&self, pt: SpectralPoint) -> f64 {
        let sum: f64 = self
            .0
            .iter()
            .map(|&m| {
                let d = m - pt.e;
                pt.eta / (d * d + pt.eta * pt.eta)
            })
            .sum();
        sum / (self.n() as f64 * PI)
    }

    /// `N_{eta*}(E) / (2 N eta*)` with `N_{eta*}(E) = |{alpha : |mu - E| <= eta*}|`.
    pub fn smoothed_counting_density(&self, e: f64, eta_star: f64) -> Result<f64> {
        if !(eta_star > 0.0) {
            return Err(Error::InvalidParameter(format!("eta* = {eta_star} must be positive")));
        }
        let count = self.count_in_interval(e - eta_star, e + eta_star)?;
        Ok(count as f64 / (2.0 * self.n() as f64 * eta_star))
    }

    pub fn spectral_radius(&self) -> f64 {
        self.0.first().unwrap().abs().max(self.0.last().unwrap().abs())
    }

    pub fn min(&self) -> f64 {
        self.0[0]
    }

    pub fn max(&self) -> f64 {
        self.0[self.n() - 1]
    }

    /// Total mass of `rho_eta` over the real line, by adaptive quadrature.
    /// The window around the spectrum is split into pieces no longer than
    /// `eta`; the two tails are mapped to finite intervals by `E = b + tan t`.
    pub fn density_mass(&self, eta: f64) -> f64 {
        let rho = |e: f64| self.density_of_states(SpectralPoint { e, eta });
        let lo = self.min() - 50.0 * eta;
        let hi = self.max() + 50.0 * eta;
        let pieces = (((hi - lo) / eta).ceil() as usize).clamp(1, 200_000);
        let width = (hi - lo) / pieces as f64;
        let tol = 1e-9 / pieces as f64;
        let mut total = 0.0;
        for k in 0..pieces {
            let a = lo + width * k as f64;
            total += integrate(rho, a, a + width, tol);
        }
        let tail = |t: f64| {
            let c = t.cos();
            if c <= 0.0 {
                0.0
            } else {
                let s = t.tan();
                (rho(hi + s) + rho(lo - s)) / (c * c)
            }
        };
        total + integrate(tail, 0.0, 0.5 * PI, 1e-10)
    }
}

/// Full eigendecomposition of a Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralData {
    spectrum: Spectrum,
    /// Column-major `n x n`; column `alpha` is the eigenvector of `mu_alpha`.
    vectors: Vec<Complex64>,
    /// `max_alpha |H v - mu v|_2 / |H|_2`.
    pub residual: f64,
}

impl SpectralData {
    /// Assembles spectral data from externally supplied eigenpairs. The
    /// residual is left at zero; use [`SpectralData::residual_against`] to
    /// measure it.
    pub fn from_parts(values: Vec<f64>, vectors: Vec<Complex64>) -> Result<Self> {
        let n = values.len();
        if vectors.len() != n * n {
            return Err(Error::InvalidInput(format!(
                "expected {} eigenvector entries, got {}",
                n * n,
                vectors.len()
            )));
        }
        Ok(Self {
            spectrum: Spectrum::new(values)?,
            vectors,
            residual: 0.0,
        })
    }

    pub fn n(&self) -> usize {
        self.spectrum.n()
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn eigenvalues(&self) -> &[f64] {
        self.spectrum.values()
    }

    pub fn eigenvector(&self, alpha: usize) -> &[Complex64] {
        let n = self.n();
        &self.vectors[alpha * n..(alpha + 1) * n]
    }

    pub fn eigenvectors(&self) -> impl Iterator<Item = &[Complex64]> {
        self.vectors.chunks_exact(self.n())
    }

    /// `max_{alpha, beta} |<v_alpha, v_beta> - delta_{alpha beta}|`.
    pub fn orthonormality_defect(&self) -> f64 {
        let n = self.n();
        let mut worst: f64 = 0.0;
        for a in 0..n {
            let va = self.eigenvector(a);
            for b in a..n {
                let ip: Complex64 = va.iter().zip(self.eigenvector(b)).map(|(x, y)| x.conj() * y).sum();
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((ip - target).norm());
            }
        }
        worst
    }

    pub fn residual_against(&self, h: &HermitianMatrix) -> f64 {
        let n = self.n();
        let hv = linalg::zgemm(n, n, n, h.as_slice(), &self.vectors);
        let norm = self.spectrum.spectral_radius();
        let norm = if norm > 0.0 { norm } else { 1.0 };
        let mut worst: f64 = 0.0;
        for (alpha, &mu) in self.eigenvalues().iter().enumerate() {
            let col = &hv[alpha * n..(alpha + 1) * n];
            let r: f64 = col
                .iter()
                .zip(self.eigenvector(alpha))
                .map(|(a, v)| (a - v * mu).norm_sqr())
                .sum::<f64>()
                .sqrt();
            worst = worst.max(r / norm);
        }
        worst
    }
}

/// Eigenvalues and orthonormal eigenvectors via LAPACK divide and conquer.
pub fn eigh(h: &HermitianMatrix) -> Result<SpectralData> {
    let n = h.n();
    let mut a = h.to_vec();
    let values = linalg::heevd(n, &mut a, true).map_err(|info| Error::EigensolverFailure { info, seed: h.seed() })?;
    let mut data = SpectralData::from_parts(values, a)?;
    data.residual = data.residual_against(h);
    Ok(data)
}

/// Eigenvalues only.
pub fn eigvalsh(h: &HermitianMatrix) -> Result<Spectrum> {
    let mut a = h.to_vec();
    let values =
        linalg::heevd(h.n(), &mut a, false).map_err(|info| Error::EigensolverFailure { info, seed: h.seed() })?;
    Spectrum::new(values)
}

/// `rho_sc(x) = sqrt(4 - x^2) / (2 pi)` on `[-2, 2]`, zero outside.
pub fn semicircle_density(x: f64) -> f64 {
    if x.abs() >= 2.0 {
        0.0
    } else {
        (4.0 - x * x).sqrt() / (2.0 * PI)
    }
}

/// Stieltjes transform of the semicircle law: the root of
/// `M^2 + z M + 1 = 0` with positive imaginary part, chosen per point.
pub fn semicircle_stieltjes(pt: SpectralPoint) -> Complex64 {
    let z = pt.z();
    let s = (z * z - 4.0).sqrt();
    let r1 = 0.5 * (-z + s);
    let r2 = 0.5 * (-z - s);
    if r1.im >= r2.im {
        r1
    } else {
        r2
    }
}

/// Cumulative semicircle mass on `(-inf, x]`.
pub fn semicircle_cdf(x: f64) -> f64 {
    if x <= -2.0 {
        0.0
    } else if x >= 2.0 {
        1.0
    } else {
        0.5 + (x * (4.0 - x * x).sqrt() / 4.0 + 2.0 * (x / 2.0).asin()) / (2.0 * PI)
    }
}
