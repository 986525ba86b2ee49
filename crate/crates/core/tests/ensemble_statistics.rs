mod common;

use common::mean_and_se;
use statrs::distribution::{ContinuousCDF, Normal};
use wigner_core::quad::integrate;
use wigner_core::{builtin_law, builtin_laws, sample_complex_vector, sample_real, sample_wigner, SeedSpec};

/// `int x^p exp(-g) / int exp(-g)` by quadrature.
fn law_moment(name: &str, p: i32) -> f64 {
    let law = builtin_law(name).unwrap();
    let z = integrate(|x| (-law.g(x)).exp(), -20.0, 20.0, 1e-13);
    integrate(|x| x.powi(p) * (-law.g(x)).exp(), -20.0, 20.0, 1e-13) / z
}

#[test]
fn declared_variance_and_centering_at_a_million_samples() {
    for law in builtin_laws() {
        let xs = sample_real(&law, SeedSpec::new(41, 0), 1_000_000).unwrap();
        let (mean, se) = mean_and_se(&xs);
        assert!(mean.abs() <= 3.0 * se, "{}: mean {mean}", law.name);
        let sq: Vec<f64> = xs.iter().map(|x| x * x).collect();
        let (var, se2) = mean_and_se(&sq);
        assert!(
            (var - law.variance).abs() <= 3.0 * se2,
            "{}: var {var} vs {}",
            law.name,
            law.variance
        );
    }
}

#[test]
fn quartic_variance_and_fourth_moment_by_quadrature() {
    let v = law_moment("quartic", 2);
    assert!((0.4999..=0.5001).contains(&v), "{v}");
    let m4 = law_moment("quartic", 4);
    let xs = sample_real(&builtin_law("quartic").unwrap(), SeedSpec::new(42, 0), 1_000_000).unwrap();
    let x4: Vec<f64> = xs.iter().map(|x| x.powi(4)).collect();
    let (mean, se) = mean_and_se(&x4);
    assert!((mean - m4).abs() <= 3.0 * se, "{mean} vs {m4}");
}

#[test]
fn sampling_is_deterministic() {
    let law = builtin_law("quartic").unwrap();
    let a = sample_real(&law, SeedSpec::new(43, 5), 1000).unwrap();
    let b = sample_real(&law, SeedSpec::new(43, 5), 1000).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, sample_real(&law, SeedSpec::new(43, 6), 1000).unwrap());
    assert!(sample_real(&law, SeedSpec::new(43, 5), 0).is_err());
    let off = builtin_law("gauss_half").unwrap();
    let diag = builtin_law("gauss_one").unwrap();
    let h1 = sample_wigner(30, &off, &diag, SeedSpec::new(43, 1)).unwrap();
    let h2 = sample_wigner(30, &off, &diag, SeedSpec::new(43, 1)).unwrap();
    assert_eq!(h1.as_slice(), h2.as_slice());
    assert_eq!(h1.hermiticity_defect(), 0.0);
}

#[test]
fn off_diagonal_second_moment_and_ks() {
    let off = builtin_law("gauss_half").unwrap();
    let diag = builtin_law("gauss_one").unwrap();
    let mut sq = Vec::new();
    for trial in 0..10_000 {
        let h = sample_wigner(100, &off, &diag, SeedSpec::new(44, trial)).unwrap();
        sq.push(h.get(0, 1).norm_sqr());
    }
    let (mean, se) = mean_and_se(&sq);
    assert!((mean - 0.01).abs() <= 3.0 * se, "{mean}");

    let mut re: Vec<f64> = (0..100_000)
        .map(|t| {
            let h = sample_wigner(2, &off, &diag, SeedSpec::new(45, t)).unwrap();
            2f64.sqrt() * h.get(0, 1).re
        })
        .collect();
    re.sort_by(f64::total_cmp);
    let normal = Normal::new(0.0, 0.5f64.sqrt()).unwrap();
    let n = re.len() as f64;
    let d = re
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = normal.cdf(x);
            (f - i as f64 / n).abs().max((i as f64 + 1.0) / n - f)
        })
        .fold(0.0, f64::max);
    // asymptotic Kolmogorov critical value at significance 1e-3
    let critical = (-(0.5e-3f64).ln() / 2.0).sqrt() / n.sqrt();
    assert!(d < critical, "KS statistic {d} >= {critical}");
}

#[test]
fn complex_vectors() {
    let g = builtin_law("gauss_half").unwrap();
    let z = sample_complex_vector(100_000, &g, SeedSpec::new(46, 0)).unwrap();
    let sq: Vec<f64> = z.iter().map(|c| c.norm_sqr()).collect();
    let (mean, se) = mean_and_se(&sq);
    assert!((mean - 1.0).abs() <= 3.0 * se);
    assert_eq!(z, sample_complex_vector(100_000, &g, SeedSpec::new(46, 0)).unwrap());

    // c4 = E|b|^4 = 2 E x^4 + 2 (E x^2)^2 for independent real and imaginary parts
    let q = builtin_law("quartic").unwrap();
    let c4 = 2.0 * law_moment("quartic", 4) + 2.0 * law_moment("quartic", 2).powi(2);
    let z = sample_complex_vector(100_000, &q, SeedSpec::new(47, 0)).unwrap();
    let fourth: Vec<f64> = z.iter().map(|c| c.norm_sqr().powi(2)).collect();
    let (mean, se) = mean_and_se(&fourth);
    assert!((mean - c4).abs() <= 3.0 * se, "{mean} vs {c4}");
}
