//! Encoded-circuit construction, neutral-atom compilation, loss/leakage-aware simulation and
//! post-processing for small [[4,2,2]] and [[16,4,4]] logical-qubit experiments.

pub mod analysis;
pub mod builders;
pub mod circuit;
pub mod codes;
pub mod compiler;
pub mod costmodel;
pub mod sim;
