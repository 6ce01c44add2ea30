//! Shot-based noisy simulation and the exact statevector reference.

pub mod gates;
mod noise;
mod records;
mod run;
mod statevector;
mod tableau;

use std::collections::BTreeMap;

use thiserror::Error;

pub use noise::{AlphaScope, IdleMode, NoiseModel, CHANNELS, DEFAULT_ALPHA_SUBSET};
pub use records::{circuit_hash, parse_records, write_records, RecordHeader, RecordSet, ShotRecord, LOSS_MARK};
pub use run::{
    run_shots, run_shots_with, tableau_distribution, InjectEvent, Injection, Occupancy, RunOptions, RunOutput,
    MAX_EXACT_BRANCHES,
};
pub use statevector::{statevector_oracle, ORACLE_MAX_QUBITS};
pub use tableau::{Tableau, MAX_TABLEAU_QUBITS};

/// Outcome string to probability.
pub type Distribution = BTreeMap<String, f64>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("capacity error: {0}")]
    Capacity(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("noise model: {0}")]
    Noise(String),
    #[error("circuit: {0}")]
    Circuit(String),
    #[error("parse error: {0}")]
    Parse(String),
}
