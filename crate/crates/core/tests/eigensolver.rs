mod common;

use common::{gue, householder_tridiagonal, sturm_eigenvalues};
use wigner_core::minor::{decompose, LeadingMinorProbe};
use wigner_core::{eigh, eigvalsh, SpectralPoint};

#[test]
fn gue_50_matches_sturm_bisection() {
    for trial in 0..5 {
        let h = gue(50, 11, trial);
        let data = eigh(&h).unwrap();
        assert!(data.residual <= 1e-10, "residual {}", data.residual);
        assert!(data.orthonormality_defect() <= 1e-10);
        let (d, e) = householder_tridiagonal(&h);
        let oracle = sturm_eigenvalues(&d, &e);
        for (a, b) in data.eigenvalues().iter().zip(&oracle) {
            assert!((a - b).abs() <= 1e-9, "{a} vs {b}");
        }
    }
}

#[test]
fn trace_identities() {
    for n in [1, 2, 20, 100] {
        let h = gue(n, 12, n as u64);
        let mu = eigvalsh(&h).unwrap();
        let s1: f64 = mu.values().iter().sum();
        let s2: f64 = mu.values().iter().map(|m| m * m).sum();
        let tr = h.trace();
        assert!((s1 - tr).abs() <= 1e-9 * tr.abs().max(1.0), "n={n}");
        assert!((s2 - h.frobenius_sq()).abs() <= 1e-9 * h.frobenius_sq());
    }
}

#[test]
fn values_only_path_agrees_with_full_decomposition() {
    let h = gue(80, 13, 0);
    let full = eigh(&h).unwrap();
    let vals = eigvalsh(&h).unwrap();
    for (a, b) in full.eigenvalues().iter().zip(vals.values()) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn eigenvector_free_minor_probe_agrees_with_decomposition() {
    for n in [2, 3, 30, 120] {
        let h = gue(n, 14, n as u64);
        let md = decompose(&h, 0).unwrap();
        let probe = LeadingMinorProbe::new(&h).unwrap();
        for (a, b) in probe.minor_spectrum().values().iter().zip(md.lambda()) {
            assert!((a - b).abs() < 1e-12);
        }
        for (e, eta) in [(0.0, 0.05), (1.3, 0.3), (-2.5, 1.0)] {
            let pt = SpectralPoint::new(e, eta).unwrap();
            let fast = probe.xk(pt).value;
            let slow = md.xk(pt).value;
            assert!(
                (fast - slow).norm() <= 1e-10 * (1.0 + slow.norm()),
                "n={n} {fast} {slow}"
            );
            let g1 = probe.green_diag(pt);
            let g2 = md.green_diag(pt);
            assert!((g1 - g2).norm() <= 1e-10 * g2.norm());
        }
    }
}
