//! Declarative experiment runner: configuration, seeded ensembles, and
//! hashed output artifacts.

mod artifacts;
mod config;
mod noise;
mod run;
mod studies;

use serde::Serialize;
use thiserror::Error;

use crate::error::LabError;

pub use artifacts::{ArtifactSink, Manifest, ManifestEntry, SCHEMA_VERSION};
pub use config::{
    load_config, parse_config, Coefficients, Discretization, Ensemble, ExperimentConfig, Format,
    Geometry, InitialData, InitialProfile, Output, Physics, Protocol, Sweep,
};
pub use noise::{derive_seed, noise_inject, rms, rng_for};
pub use run::{run, Command};
pub use studies::{
    harnack_study, reconstruction_study, stability_ensemble, t_snap_sweep, HarnackStudy,
    ReconstructionStudy, Setup, SweepPoint,
};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("configuration invalid: {}", .0.join("; "))]
    Config(Vec<String>),
    #[error(transparent)]
    Numerical(#[from] LabError),
    #[error("i/o failure: {0}")]
    Io(String),
}

impl From<std::io::Error> for ExperimentError {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e.to_string())
    }
}

/// Machine-readable failure description.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorReport {
    pub schema_version: u32,
    pub kind: &'static str,
    pub exit_code: i32,
    pub messages: Vec<String>,
}

impl ExperimentError {
    /// 2 for configuration errors, 3 for numerical failures, 4 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Numerical(_) => 3,
            Self::Io(_) => 4,
        }
    }

    pub fn report(&self) -> ErrorReport {
        let (kind, messages) = match self {
            Self::Config(v) => ("config", v.clone()),
            Self::Numerical(e) => ("numerical", vec![e.to_string()]),
            Self::Io(e) => ("io", vec![e.clone()]),
        };
        ErrorReport {
            schema_version: SCHEMA_VERSION,
            kind,
            exit_code: self.exit_code(),
            messages,
        }
    }
}
