//! Stabilizer codes: the [[4,2,2]] code, its self-concatenation into the level-2
//! many-hypercube code, codeword tables and brute-force distance checks.

mod distance;
mod pauli;
mod stabilizer;
mod table;
mod text;

pub use distance::{oracle_distance, verify_distance, verify_distance_xz, Distance, DEFAULT_MAX_N};
pub use pauli::{PauliString, MAX_QUBITS};
pub use stabilizer::{c4_code, c4_code_listing, concatenate_self, hypercube_code, StabilizerCode};
pub use table::{codeword_table, CodewordTable};
pub use text::{parse_code, write_code};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodeError {
    #[error("structural error: {0}")]
    Structure(String),
    #[error("capacity error: {0}")]
    Capacity(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("parse error: {0}")]
    Parse(String),
}
