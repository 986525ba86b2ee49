//! Diagonal resolvent entries `G_z(j,j)` and their averaged second moment.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg;
use crate::matrix::HermitianMatrix;
use crate::spectral::{GridSpec, SpectralData};

/// Minimal distance between a real energy and the spectrum when `eta = 0`.
pub const POLE_TOLERANCE: f64 = 1e-12;

/// Shift applied to grid energies that land on an eigenvalue.
pub const GRID_JITTER: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct ResolventDiag {
    pub z: Complex64,
    pub values: Vec<Complex64>,
}

impl ResolventDiag {
    pub fn mean(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() / self.values.len() as f64
    }

    /// `(1/N) sum_j |G(j,j)|^2`.
    pub fn second_moment(&self) -> f64 {
        self.values.iter().map(|g| g.norm_sqr()).sum::<f64>() / self.values.len() as f64
    }
}

fn check_energy(spec: &SpectralData, e: f64, eta: f64) -> Result<()> {
    if !(eta >= 0.0 && eta.is_finite() && e.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "resolvent needs finite E and eta >= 0, got ({e}, {eta})"
        )));
    }
    if eta == 0.0 {
        if let Some(&mu) = nearest(spec.eigenvalues(), e).filter(|&&mu| (mu - e).abs() < POLE_TOLERANCE) {
            return Err(Error::Pole {
                energy: e,
                eigenvalue: mu,
            });
        }
    }
    Ok(())
}

fn nearest(sorted: &[f64], e: f64) -> Option<&f64> {
    let i = sorted.partition_point(|&m| m < e);
    [i.checked_sub(1), Some(i)]
        .into_iter()
        .flatten()
        .filter_map(|k| sorted.get(k))
        .min_by(|a, b| (*a - e).abs().total_cmp(&(*b - e).abs()))
}

/// `G(j,j) = sum_alpha |v_alpha(j)|^2 / (mu_alpha - z)`; `eta = 0` is
/// allowed away from the spectrum.
pub fn resolvent_diag(spec: &SpectralData, e: f64, eta: f64) -> Result<ResolventDiag> {
    check_energy(spec, e, eta)?;
    let z = Complex64::new(e, eta);
    let n = spec.n();
    let mut values = vec![Complex64::new(0.0, 0.0); n];
    for (v, &mu) in spec.eigenvectors().zip(spec.eigenvalues()) {
        let r = 1.0 / (mu - z);
        for (g, c) in values.iter_mut().zip(v) {
            *g += r * c.norm_sqr();
        }
    }
    Ok(ResolventDiag { z, values })
}

pub fn second_moment(spec: &SpectralData, e: f64, eta: f64) -> Result<f64> {
    Ok(resolvent_diag(spec, e, eta)?.second_moment())
}

/// Diagonal of `(H - z)^{-1}` by a dense LU solve against the identity.
pub fn dense_resolvent_diag(h: &HermitianMatrix, z: Complex64) -> Result<Vec<Complex64>> {
    let n = h.n();
    let mut a = h.to_vec();
    for j in 0..n {
        a[j * n + j] -= z;
    }
    let mut b = vec![Complex64::new(0.0, 0.0); n * n];
    for j in 0..n {
        b[j * n + j] = Complex64::new(1.0, 0.0);
    }
    linalg::gesv(n, &mut a, &mut b).map_err(Error::SingularSystem)?;
    Ok((0..n).map(|j| b[j * n + j]).collect())
}

/// Squared eigenvector moduli `W[j, alpha] = |v_alpha(j)|^2`, for evaluating
/// many energies at once with a matrix product.
#[derive(Debug, Clone)]
pub struct ResolventWeights {
    n: usize,
    mu: Vec<f64>,
    weights: Vec<f64>,
}

impl ResolventWeights {
    pub fn new(spec: &SpectralData) -> Self {
        Self {
            n: spec.n(),
            mu: spec.eigenvalues().to_vec(),
            weights: spec
                .eigenvectors()
                .flat_map(|v| v.iter().map(|c| c.norm_sqr()))
                .collect(),
        }
    }

    /// Second moments at each energy for a common `eta`. Energies must
    /// already avoid the spectrum when `eta = 0`.
    pub fn second_moments(&self, energies: &[f64], eta: f64) -> Vec<f64> {
        const CHUNK: usize = 512;
        let n = self.n;
        let mut out = Vec::with_capacity(energies.len());
        for chunk in energies.chunks(CHUNK) {
            let m = chunk.len();
            let mut re = vec![0.0; n * m];
            let mut im = vec![0.0; n * m];
            for (c, &e) in chunk.iter().enumerate() {
                let z = Complex64::new(e, eta);
                for (a, &mu) in self.mu.iter().enumerate() {
                    let r = 1.0 / (mu - z);
                    re[c * n + a] = r.re;
                    im[c * n + a] = r.im;
                }
            }
            let g_re = linalg::dgemm(n, m, n, &self.weights, &re);
            let g_im = linalg::dgemm(n, m, n, &self.weights, &im);
            for c in 0..m {
                let col = c * n..(c + 1) * n;
                let s: f64 = g_re[col.clone()]
                    .iter()
                    .zip(&g_im[col])
                    .map(|(x, y)| x * x + y * y)
                    .sum();
                out.push(s / n as f64);
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SecondMomentProfile {
    pub eta: f64,
    pub energies: Vec<f64>,
    pub moments: Vec<f64>,
    pub threshold: f64,
    /// Fraction of grid energies whose moment is at or above `threshold`.
    pub bad_fraction: f64,
    /// Number of grid energies moved off an eigenvalue.
    pub jittered: usize,
}

/// Moves energies that sit on an eigenvalue by multiples of [`GRID_JITTER`].
pub fn avoid_poles(spectrum: &[f64], energies: &mut [f64]) -> usize {
    let mut moved = 0;
    for e in energies.iter_mut() {
        let mut shifted = false;
        while nearest(spectrum, *e).is_some_and(|&mu| (mu - *e).abs() < POLE_TOLERANCE) {
            *e += GRID_JITTER;
            shifted = true;
        }
        moved += shifted as usize;
    }
    moved
}

pub fn bad_energy_profile(
    spec: &SpectralData,
    grid: &GridSpec,
    eta: f64,
    threshold: f64,
) -> Result<SecondMomentProfile> {
    grid.validate()?;
    if !(eta >= 0.0) {
        return Err(Error::InvalidParameter(format!("eta = {eta} must be non-negative")));
    }
    let mut energies = grid.energies();
    let jittered = if eta == 0.0 {
        avoid_poles(spec.eigenvalues(), &mut energies)
    } else {
        0
    };
    let moments = ResolventWeights::new(spec).second_moments(&energies, eta);
    let bad = moments.iter().filter(|&&m| m >= threshold).count();
    Ok(SecondMomentProfile {
        eta,
        bad_fraction: bad as f64 / energies.len() as f64,
        energies,
        moments,
        threshold,
        jittered,
    })
}
