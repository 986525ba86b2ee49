//! Seeded Monte Carlo experiments over Wigner matrices: configuration,
//! parallel trial scheduling, verdicts against calibrated caps, and CSV/JSON
//! datasets.

pub mod config;
pub mod dataset;
pub mod error;
pub mod experiments;
pub mod run;
pub mod stats;

pub use config::ExperimentConfig;
pub use dataset::{load, persist, Summary, TrialDataset};
pub use error::{HarnessError, Result};
pub use run::{report, run};
