//! Eigenvector (de)localization observables.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, HermitianMatrix};
use crate::spectral::{eigvalsh, SpectralData, Spectrum};

const NORM_TOLERANCE: f64 = 1e-8;

fn check_unit(v: &[Complex64]) -> Result<()> {
    if v.is_empty() {
        return Err(Error::InvalidDimension(0));
    }
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::InvalidInput(format!("expected a unit vector, got norm {norm}")));
    }
    Ok(())
}

/// `(sum |v_j|^p)^{1/p}`, or `max |v_j|` for `p = inf`.
pub fn lp_norm(v: &[Complex64], p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidParameter(format!("p = {p} must be at least 1")));
    }
    check_unit(v)?;
    Ok(lp_unchecked(v, p))
}

fn lp_unchecked(v: &[Complex64], p: f64) -> f64 {
    if p.is_infinite() {
        v.iter().map(|z| z.norm()).fold(0.0, f64::max)
    } else {
        v.iter().map(|z| z.norm().powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

/// Parameters of the gap set `O_q`: the window half-width `theta` and `q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapSetParams {
    pub theta: usize,
    pub q: f64,
}

impl GapSetParams {
    /// `theta = floor((ln N)^2)`, at least 1.
    pub fn new(n: usize, q: f64) -> Result<Self> {
        if !(q > 0.0) {
            return Err(Error::InvalidParameter(format!("q = {q} must be positive")));
        }
        Ok(Self {
            theta: default_theta(n),
            q,
        })
    }
}

pub fn default_theta(n: usize) -> usize {
    ((n as f64).ln().powi(2).floor() as usize).max(1)
}

/// `|mu_{alpha - theta} - mu_{alpha + theta}|` with indices clamped to the
/// ends of the spectrum.
fn window_gaps(spec: &Spectrum, theta: usize) -> Vec<f64> {
    let mu = spec.values();
    let n = mu.len();
    (0..n)
        .map(|a| mu[(a + theta).min(n - 1)] - mu[a.saturating_sub(theta)])
        .collect()
}

/// Membership in `O_q`: `|mu_{alpha-theta} - mu_{alpha+theta}| <= q theta / N`.
pub fn o_q_set(spec: &Spectrum, params: GapSetParams) -> Vec<bool> {
    let bound = params.q * params.theta as f64 / spec.n() as f64;
    window_gaps(spec, params.theta)
        .into_iter()
        .map(|g| g <= bound)
        .collect()
}

/// Dyadic class of a window gap: `k` with `2^k/N < gap <= 2^{k+1}/N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GapClass {
    Class(i32),
    /// Zero gap (exactly degenerate window).
    Degenerate,
}

impl GapClass {
    pub fn is_negative(&self) -> bool {
        matches!(self, GapClass::Class(k) if *k < 0)
    }
}

pub fn dyadic_gap_classes(spec: &Spectrum, theta: usize) -> Vec<GapClass> {
    let n = spec.n() as f64;
    window_gaps(spec, theta)
        .into_iter()
        .map(|g| {
            let x = g * n;
            if !(x > 0.0) {
                return GapClass::Degenerate;
            }
            let mut k = x.log2().ceil() as i32 - 1;
            // repair rounding in log2 so that 2^k < x <= 2^{k+1} holds exactly
            while x <= 2f64.powi(k) {
                k -= 1;
            }
            while x > 2f64.powi(k + 1) {
                k += 1;
            }
            GapClass::Class(k)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct DelocRecord {
    pub index: usize,
    pub sup_norm_sq: f64,
    pub localization_length: f64,
    /// `(p, |v|_p)` pairs in the requested order.
    pub lp_norms: Vec<(f64, f64)>,
    /// Membership in `O_q` for each requested `q`.
    pub in_o_q: Vec<(f64, bool)>,
}

pub fn deloc_report(spec: &SpectralData, p_list: &[f64], q_list: &[f64]) -> Result<Vec<DelocRecord>> {
    if let Some(p) = p_list.iter().find(|&&p| !(p >= 1.0)) {
        return Err(Error::InvalidParameter(format!("p = {p} must be at least 1")));
    }
    let n = spec.n();
    let sets = q_list
        .iter()
        .map(|&q| Ok((q, o_q_set(spec.spectrum(), GapSetParams::new(n, q)?))))
        .collect::<Result<Vec<_>>>()?;
    spec.eigenvectors()
        .enumerate()
        .map(|(index, v)| {
            check_unit(v)?;
            let sup = lp_unchecked(v, f64::INFINITY);
            Ok(DelocRecord {
                index,
                sup_norm_sq: sup * sup,
                localization_length: 1.0 / (sup * sup),
                lp_norms: p_list.iter().map(|&p| (p, lp_unchecked(v, p))).collect(),
                in_o_q: sets.iter().map(|(q, s)| (*q, s[index])).collect(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Localization {
    pub localized: bool,
    /// Mass outside the `L` largest coordinates.
    pub tail_mass: f64,
    /// The `L` largest coordinates, present when `localized`.
    pub witness: Option<Vec<usize>>,
}

/// `(L, eta)`-localization: some `L` coordinates carry all but `eta` of the
/// mass. Taking the `L` largest coordinates minimizes the leftover mass, so
/// one check decides existence.
pub fn detect_localization(v: &[Complex64], l: usize, eta: f64) -> Result<Localization> {
    let n = v.len();
    if l == 0 || l > n {
        return Err(Error::InvalidParameter(format!("L = {l} must lie in [1, {n}]")));
    }
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::InvalidParameter(format!("eta = {eta} must lie in [0, 1]")));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| v[j].norm_sqr().total_cmp(&v[i].norm_sqr()).then(i.cmp(&j)));
    let tail_mass: f64 = order[l..].iter().map(|&j| v[j].norm_sqr()).sum();
    let localized = tail_mass <= eta;
    let witness = localized.then(|| {
        let mut w = order[..l].to_vec();
        w.sort_unstable();
        w
    });
    Ok(Localization {
        localized,
        tail_mass,
        witness,
    })
}

/// Off-diagonal blocks of `H` after the split `{0..L} | {L..N}`, rescaled
/// by `sqrt(N/(N-L))`, with the extreme eigenvalues of their Gram matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockCovariance {
    pub l: usize,
    /// `(N-L) x L`: rows `L..N` of the first `L` columns.
    pub x1: ComplexMatrix,
    /// `(N-L) x (N-L)`: the trailing principal block.
    pub x2: ComplexMatrix,
    pub lambda_min_x1: f64,
    pub lambda_max_x2: f64,
}

pub fn block_covariance(h: &HermitianMatrix, l: usize) -> Result<BlockCovariance> {
    let n = h.n();
    if l == 0 || l >= n {
        return Err(Error::InvalidSplit { l, n });
    }
    let scale = (n as f64 / (n - l) as f64).sqrt();
    let mut x1 = h.block(l..n, 0..l);
    x1.scale(scale);
    let mut x2 = h.block(l..n, l..n);
    x2.scale(scale);
    let lambda_min_x1 = gram_extremes(&x1)?.0;
    let lambda_max_x2 = gram_extremes(&x2)?.1;
    Ok(BlockCovariance {
        l,
        x1,
        x2,
        lambda_min_x1,
        lambda_max_x2,
    })
}

/// Smallest and largest eigenvalue of `X* X`.
pub fn gram_extremes(x: &ComplexMatrix) -> Result<(f64, f64)> {
    let s = eigvalsh(&x.gram())?;
    Ok((s.min(), s.max()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(v: &[f64]) -> Vec<Complex64> {
        v.iter().map(|&x| Complex64::new(x, 0.0)).collect()
    }

    #[test]
    fn flat_and_basis_norms() {
        let flat = real(&[0.25; 16]);
        assert!((lp_norm(&flat, 4.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((lp_norm(&flat, 2.0).unwrap() - 1.0).abs() < 1e-15);
        let mut e = real(&[0.0; 5]);
        e[3] = Complex64::new(0.0, 1.0);
        for p in [1.0, 1.5, 3.0, f64::INFINITY] {
            assert_eq!(lp_norm(&e, p).unwrap(), 1.0);
        }
        assert!(lp_norm(&flat, 0.5).is_err());
        assert!(lp_norm(&real(&[1.0, 1.0]), 2.0).is_err());
    }

    #[test]
    fn theta_is_floor_of_log_squared() {
        assert_eq!(default_theta(1000), 47);
        assert_eq!(default_theta(2), 1);
    }

    #[test]
    fn gap_sets_on_equal_spacing() {
        let n = 200;
        let g = 0.01;
        let spec = Spectrum::new((0..n).map(|a| a as f64 * g).collect()).unwrap();
        let theta = 5;
        // interior gap 2 theta g = 0.1; bound q theta / N
        let inside = o_q_set(
            &spec,
            GapSetParams {
                theta,
                q: 2.01 * g * n as f64,
            },
        );
        assert!(inside[theta..n - theta].iter().all(|&b| b));
        let outside = o_q_set(
            &spec,
            GapSetParams {
                theta,
                q: 1.99 * g * n as f64,
            },
        );
        assert!(outside[theta..n - theta].iter().all(|&b| !b));
        // interior class: 2^k < 2 theta g N = 20 <= 2^{k+1} gives k = 4
        let classes = dyadic_gap_classes(&spec, theta);
        assert!(classes[theta..n - theta].iter().all(|&c| c == GapClass::Class(4)));
        let flat = Spectrum::new(vec![1.0; 4]).unwrap();
        assert!(dyadic_gap_classes(&flat, 1).iter().all(|&c| c == GapClass::Degenerate));
    }

    #[test]
    fn dyadic_boundary_is_half_open() {
        // gap * N = 8 exactly sits in (4, 8], class 2
        let spec = Spectrum::new(vec![0.0, 4.0]).unwrap();
        assert_eq!(dyadic_gap_classes(&spec, 1), vec![GapClass::Class(2); 2]);
    }

    #[test]
    fn localization_examples() {
        let mut e = real(&[0.0; 6]);
        e[2] = Complex64::new(1.0, 0.0);
        let hit = detect_localization(&e, 1, 0.0).unwrap();
        assert!(hit.localized);
        assert_eq!(hit.witness, Some(vec![2]));
        let flat = real(&[0.1; 100]);
        let miss = detect_localization(&flat, 50, 0.4).unwrap();
        assert!(!miss.localized);
        assert!((miss.tail_mass - 0.5).abs() < 1e-12);
        assert!(detect_localization(&flat, 0, 0.1).is_err());
    }

    #[test]
    fn invalid_split() {
        let h = HermitianMatrix::diagonal(&[1.0, 2.0]).unwrap();
        assert_eq!(block_covariance(&h, 2), Err(Error::InvalidSplit { l: 2, n: 2 }));
    }
}
