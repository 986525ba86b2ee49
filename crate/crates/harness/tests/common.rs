#![allow(dead_code)]

use std::path::PathBuf;

use wigner_harness::ExperimentConfig;

pub fn config_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

pub fn acceptance(name: &str) -> ExperimentConfig {
    ExperimentConfig::from_path(&config_dir().join("acceptance").join(format!("{name}.json"))).unwrap()
}

/// A quick spectral-radius run used by the plumbing checks.
pub fn small_config(threads: usize) -> ExperimentConfig {
    let mut c = acceptance("spectral_radius");
    c.n_list = vec![150, 200];
    c.trials = 4;
    c.threads = Some(threads);
    c
}
