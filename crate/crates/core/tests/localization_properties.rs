mod common;

use common::gue;
use proptest::prelude::*;
use rand::Rng;
use wigner_core::localization::{
    block_covariance, deloc_report, detect_localization, dyadic_gap_classes, gram_extremes, lp_norm, o_q_set, GapClass,
    GapSetParams,
};
use wigner_core::{eigh, eigvalsh, Complex64, ComplexMatrix, HermitianMatrix, SeedSpec, Spectrum};

fn random_unit(n: usize, rng: &mut impl Rng, spiky: bool) -> Vec<Complex64> {
    let mut v: Vec<Complex64> = (0..n)
        .map(|_| {
            let w = if spiky { rng.random::<f64>().powi(6) } else { 1.0 };
            Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5) * w
        })
        .collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|z| *z /= norm);
    v
}

fn exhaustive_min_tail(v: &[Complex64], l: usize) -> f64 {
    let n = v.len();
    let total: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    let mut best = f64::INFINITY;
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != l {
            continue;
        }
        let inside: f64 = (0..n).filter(|j| mask >> j & 1 == 1).map(|j| v[j].norm_sqr()).sum();
        best = best.min(total - inside);
    }
    best
}

#[test]
fn greedy_detector_equals_exhaustive_search() {
    let mut rng = SeedSpec::new(51, 0).rng();
    for case in 0..400 {
        let n = 2 + case % 11;
        let v = random_unit(n, &mut rng, case % 2 == 0);
        for l in 1..=4.min(n) {
            let best = exhaustive_min_tail(&v, l);
            for eta in [0.01, 0.1, 0.3, 0.6] {
                // skip knife-edge cases where the two sums round differently
                if (best - eta).abs() < 1e-12 {
                    continue;
                }
                let greedy = detect_localization(&v, l, eta).unwrap();
                assert_eq!(greedy.localized, best <= eta, "n={n} l={l} eta={eta}");
            }
        }
    }
}

proptest! {
    #[test]
    fn o_q_monotone_in_q(values in prop::collection::vec(-2.0f64..2.0, 2..60), q in 0.1f64..5.0, dq in 0.0f64..5.0) {
        let s = Spectrum::from_unsorted(values).unwrap();
        let a = o_q_set(&s, GapSetParams::new(s.n(), q).unwrap());
        let b = o_q_set(&s, GapSetParams::new(s.n(), q + dq).unwrap());
        prop_assert!(a.iter().zip(&b).all(|(x, y)| !x || *y));
    }

    #[test]
    fn dyadic_classes_shift_under_dilation(values in prop::collection::vec(-2.0f64..2.0, 2..60), theta in 1usize..5) {
        let s = Spectrum::from_unsorted(values.clone()).unwrap();
        let doubled = Spectrum::from_unsorted(values.iter().map(|x| 2.0 * x).collect()).unwrap();
        let a = dyadic_gap_classes(&s, theta);
        let b = dyadic_gap_classes(&doubled, theta);
        prop_assert_eq!(a.len(), s.n());
        for (x, y) in a.iter().zip(&b) {
            match (x, y) {
                (GapClass::Class(k), GapClass::Class(k2)) => prop_assert_eq!(k + 1, *k2),
                (GapClass::Degenerate, GapClass::Degenerate) => {}
                _ => prop_assert!(false, "class kinds differ"),
            }
        }
    }
}

#[test]
fn o_q_large_q_and_small_n() {
    let s = Spectrum::new(vec![-1.0, -0.2, 0.4, 1.0]).unwrap();
    let all = o_q_set(&s, GapSetParams { theta: 1, q: 100.0 });
    assert!(all.iter().all(|&b| b));
    // N <= 2 theta: every window clamps to the full range, whose width is 2
    let wide = o_q_set(&s, GapSetParams { theta: 4, q: 2.0 });
    assert!(wide.iter().all(|&b| b));
    let narrow = o_q_set(&s, GapSetParams { theta: 4, q: 1.99 });
    assert!(narrow.iter().all(|&b| !b));
}

#[test]
fn gue_gap_classes_are_never_negative() {
    for trial in 0..20 {
        let s = eigvalsh(&gue(1000, 52, trial)).unwrap();
        let theta = wigner_core::localization::default_theta(1000);
        assert!(dyadic_gap_classes(&s, theta)
            .iter()
            .all(|c| !c.is_negative() && *c != GapClass::Degenerate));
    }
}

#[test]
fn eigenvector_norm_inequalities() {
    let h = gue(200, 53, 0);
    let spec = eigh(&h).unwrap();
    let report = deloc_report(&spec, &[1.0, 1.5, 2.0, 4.0], &[1.0, 4.0]).unwrap();
    for (rec, v) in report.iter().zip(spec.eigenvectors()) {
        assert!((lp_norm(v, 2.0).unwrap() - 1.0).abs() < 1e-10);
        assert!(rec.localization_length >= 1.0 && rec.localization_length <= 200.0);
        for &(p, norm) in rec.lp_norms.iter().filter(|(p, _)| *p <= 2.0) {
            // |v|_2^2 <= |v|_inf^{2-p} |v|_p^p
            let rhs = rec.sup_norm_sq.sqrt().powf(2.0 - p) * norm.powf(p);
            assert!(1.0 <= rhs + 1e-10, "p={p}");
        }
    }
}

#[test]
fn block_covariance_on_gue_and_synthetic_input() {
    let q = ComplexMatrix::from_fn(4, 2, |i, j| {
        if i == j {
            Complex64::new(0.0, 1.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let (lo, hi) = gram_extremes(&q).unwrap();
    assert!((lo - 1.0).abs() < 1e-14 && (hi - 1.0).abs() < 1e-14);

    let mut mins = Vec::new();
    for trial in 0..100 {
        let bc = block_covariance(&gue(400, 54, trial), 40).unwrap();
        assert_eq!((bc.x1.rows(), bc.x1.cols()), (360, 40));
        assert!(bc.lambda_max_x2 <= 6.0);
        mins.push(bc.lambda_min_x1);
    }
    mins.sort_by(f64::total_cmp);
    let median = 0.5 * (mins[49] + mins[50]);
    let edge = (1.0 - 0.1f64.sqrt()).powi(2);
    assert!((median - edge).abs() <= 0.08, "median {median}");
}

#[test]
fn diagonal_matrix_is_fully_localized() {
    let h = HermitianMatrix::diagonal(&[0.3, -1.0, 2.0, 0.1]).unwrap();
    let spec = eigh(&h).unwrap();
    for v in spec.eigenvectors() {
        assert!(detect_localization(v, 1, 0.0).unwrap().localized);
    }
}
