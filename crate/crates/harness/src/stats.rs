//! Order-independent estimators over finished records.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub statistic: String,
    pub n: usize,
    pub coord1: Option<f64>,
    pub coord2: Option<f64>,
    pub count: usize,
    #[serde(with = "crate::dataset::float")]
    pub mean: f64,
    #[serde(with = "crate::dataset::float")]
    pub variance: f64,
    #[serde(with = "crate::dataset::float")]
    pub std_err: f64,
    #[serde(with = "crate::dataset::float")]
    pub min: f64,
    #[serde(with = "crate::dataset::float")]
    pub max: f64,
    #[serde(with = "crate::dataset::float")]
    pub q05: f64,
    #[serde(with = "crate::dataset::float")]
    pub q50: f64,
    #[serde(with = "crate::dataset::float")]
    pub q95: f64,
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance; zero for fewer than two values.
pub fn variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64
}

pub fn std_err(xs: &[f64]) -> f64 {
    (variance(xs) / xs.len() as f64).sqrt()
}

/// Linear-interpolation quantile of already sorted data.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    quantile_sorted(&v, 0.5)
}

/// Fraction of values at or above `threshold`.
pub fn tail_fraction(xs: &[f64], threshold: f64) -> f64 {
    xs.iter().filter(|&&x| x >= threshold).count() as f64 / xs.len() as f64
}

pub fn aggregate(statistic: &str, n: usize, coord1: Option<f64>, coord2: Option<f64>, values: &[f64]) -> Aggregate {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    Aggregate {
        statistic: statistic.to_string(),
        n,
        coord1,
        coord2,
        count: values.len(),
        mean: mean(values),
        variance: variance(values),
        std_err: std_err(values),
        min: sorted.first().copied().unwrap_or(f64::NAN),
        max: sorted.last().copied().unwrap_or(f64::NAN),
        q05: quantile_sorted(&sorted, 0.05),
        q50: quantile_sorted(&sorted, 0.5),
        q95: quantile_sorted(&sorted, 0.95),
    }
}
