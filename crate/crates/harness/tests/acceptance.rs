//! The acceptance run: one line per criterion, then a nonzero exit if any
//! criterion failed. Runs without the libtest harness so the lines are
//! always shown.

mod common;

use std::fs;
use std::process::Command;
use std::time::{Duration, Instant};

use common::{acceptance, small_config};
use wigner_harness::dataset::{csv_body, parse_csv, Verdict};
use wigner_harness::{load, persist, run, ExperimentConfig, HarnessError, Summary};

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn from_verdicts<'a>(verdicts: impl IntoIterator<Item = &'a Verdict>) -> Self {
        let vs: Vec<&Verdict> = verdicts.into_iter().collect();
        let failed: Vec<String> = vs
            .iter()
            .filter(|v| !v.passed)
            .map(|v| format!("{} ({:.4e} vs {:.4e})", v.name, v.observed, v.bound))
            .collect();
        Outcome {
            passed: !vs.is_empty() && failed.is_empty(),
            detail: if vs.is_empty() {
                "no verdicts".into()
            } else if failed.is_empty() {
                format!("{} checks", vs.len())
            } else {
                format!("failed: {}", failed.join(", "))
            },
        }
    }

    fn with_runtime(mut self, took: Duration, limit: Duration) -> Self {
        let ok = took <= limit;
        self.passed &= ok;
        self.detail = format!(
            "{}; runtime {:.1}s (limit {}s)",
            self.detail,
            took.as_secs_f64(),
            limit.as_secs()
        );
        self
    }
}

fn timed(config: &ExperimentConfig) -> (Summary, Duration) {
    let start = Instant::now();
    let ds = run(config).expect("experiment runs");
    (ds.summary, start.elapsed())
}

fn select<'a>(s: &'a Summary, prefixes: &[&str]) -> Vec<&'a Verdict> {
    s.verdicts
        .iter()
        .filter(|v| prefixes.iter().any(|p| v.name.starts_with(p)) || v.name == "failure_rate")
        .collect()
}

const IDENTITY_CHECKS: &[&str] = &[
    "eigh_residual",
    "orthonormality_defect",
    "interlacing_violations",
    "interlacing_count_gap",
    "eigen_equation_residual",
    "green_minor_rel_err",
    "green_eta_bound_ratio",
    "first_component_residual",
    "parseval_rel_defect",
    "gradient_abs_err",
];

const INVARIANT_CHECKS: &[&str] = &[
    "herglotz_min_im",
    "resolvent_bound_ratio",
    "pi_rho_rel_err",
    "density_mass_err",
    "trace_rel_err",
    "frobenius_rel_err",
    "halving_min_ratio",
    "count_bound_ratio",
];

fn plumbing() -> Outcome {
    let mut notes = Vec::new();
    let mut check = |name: &str, ok: bool| {
        if !ok {
            notes.push(name.to_string());
        }
    };

    let c = small_config(1);
    check(
        "config round-trip",
        ExperimentConfig::from_json(&c.to_json()).ok().as_ref() == Some(&c),
    );

    let serial = run(&c).unwrap();
    let again = run(&c).unwrap();
    check(
        "seed determinism",
        csv_body(&serial.records) == csv_body(&again.records),
    );
    let parallel = run(&small_config(4)).unwrap();
    check(
        "parallel vs serial",
        serial.summary.aggregates == parallel.summary.aggregates
            && serial.summary.verdicts == parallel.summary.verdicts,
    );

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.csv");
    persist(&serial, &path).unwrap();
    let back = load(&path).unwrap();
    check(
        "persist/load identity",
        back.records == serial.records && back.summary == serial.summary,
    );
    let body = fs::read_to_string(&path).unwrap();
    check(
        "truncated file",
        matches!(parse_csv(&body[..body.len() - 3]), Err(HarnessError::Parse { .. })),
    );

    let exe = env!("CARGO_BIN_EXE_rmtlab");
    let code = |cfg: &ExperimentConfig, file: &str| {
        let p = dir.path().join(file);
        fs::write(&p, cfg.to_json()).unwrap();
        let out = Command::new(exe)
            .arg("--out")
            .arg(dir.path())
            .arg("run")
            .arg(&p)
            .output()
            .unwrap();
        out.status.code()
    };
    let mut failing = c.clone();
    failing.caps.get_mut("spectral_radius").unwrap().value = 0.5;
    let broken = Command::new(exe)
        .args(["run", "/nonexistent.json"])
        .output()
        .unwrap()
        .status
        .code();
    check(
        "CLI exit codes",
        code(&c, "ok.json") == Some(0) && code(&failing, "bad.json") == Some(1) && broken == Some(2),
    );

    Outcome {
        passed: notes.is_empty(),
        detail: if notes.is_empty() {
            "round-trip, persist/load, determinism, parallel==serial, truncation, CLI 0/1/2".into()
        } else {
            format!("failed: {}", notes.join(", "))
        },
    }
}

fn main() {
    let mut results: Vec<(u32, Outcome)> = Vec::new();

    let (identity, took) = timed(&acceptance("identity"));
    results.push((
        1,
        Outcome::from_verdicts(select(&identity, IDENTITY_CHECKS)).with_runtime(took, Duration::from_secs(120)),
    ));
    results.push((2, Outcome::from_verdicts(select(&identity, INVARIANT_CHECKS))));

    let mut semicircle = acceptance("semicircle");
    semicircle.threads = Some(4);
    let (s, took) = timed(&semicircle);
    results.push((
        3,
        Outcome::from_verdicts(&s.verdicts).with_runtime(took, Duration::from_secs(900)),
    ));

    let (s, _) = timed(&acceptance("variance_scaling"));
    results.push((
        4,
        Outcome::from_verdicts(select(&s, &["variance_norm", "concentration_tail"])),
    ));
    results.push((5, Outcome::from_verdicts(select(&s, &["x2_norm", "x4_norm"]))));

    let (s, _) = timed(&acceptance("density_upper_bound"));
    results.push((6, Outcome::from_verdicts(&s.verdicts)));

    let (s, _) = timed(&acceptance("deloc"));
    results.push((7, Outcome::from_verdicts(&s.verdicts)));

    let (s, _) = timed(&acceptance("localization"));
    results.push((8, Outcome::from_verdicts(&s.verdicts)));

    let (s, _) = timed(&acceptance("lemma23"));
    results.push((9, Outcome::from_verdicts(&s.verdicts)));

    let (radius, _) = timed(&acceptance("spectral_radius"));
    let (cov, _) = timed(&acceptance("covariance_tails"));
    results.push((10, Outcome::from_verdicts(radius.verdicts.iter().chain(&cov.verdicts))));

    let (s, _) = timed(&acceptance("greens"));
    results.push((11, Outcome::from_verdicts(&s.verdicts)));

    results.push((12, plumbing()));

    for (k, o) in &results {
        println!(
            "criterion {k}: {} — {}",
            if o.passed { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    let failed: Vec<u32> = results.iter().filter(|r| !r.1.passed).map(|r| r.0).collect();
    if !failed.is_empty() {
        eprintln!("failing criteria: {failed:?}");
        std::process::exit(1);
    }
}
