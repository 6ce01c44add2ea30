//! Experiment circuits: Shor embeddings, CNOT ladders and many-hypercube state preparation.
//!
//! Builders emit logical-tier circuits already laid out on the trap grid. Each experiment also
//! carries a bare reference circuit and the ideal distribution of its output words.

mod ladder;
mod layout;
mod mhc;
mod shor;

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub use ladder::{
    build_constant_depth, build_outside_in, data_positions, is_ancilla_row, outside_in_bits, row_pattern,
};
pub use layout::{insert_ldus, Patch};
pub use mhc::{build_mhc_prep, build_mhc_unencoded, parse_bits, MHC_BITSTRINGS};
pub use shor::{build_shor, ShorVariant};

use crate::circuit::{Circuit, GateKind};
use crate::sim::{statevector_oracle, Distribution};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BuildError {
    #[error("bad experiment spec: {0}")]
    Spec(String),
    #[error("no free site next to atom {0} for an LDU flag")]
    NoFreeSite(u32),
    #[error("capacity error: {0}")]
    Capacity(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    ShorUnencoded,
    ShorTwoRow,
    ShorThreeRow,
    ShorTwoRowLdu,
    LadderOutsideIn,
    LadderConstantDepth,
    MhcStatePrep,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::ShorUnencoded,
        Family::ShorTwoRow,
        Family::ShorThreeRow,
        Family::ShorTwoRowLdu,
        Family::LadderOutsideIn,
        Family::LadderConstantDepth,
        Family::MhcStatePrep,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::ShorUnencoded => "shor_unencoded",
            Family::ShorTwoRow => "shor_two_row",
            Family::ShorThreeRow => "shor_three_row",
            Family::ShorTwoRowLdu => "shor_two_row_ldu",
            Family::LadderOutsideIn => "ladder_outside_in",
            Family::LadderConstantDepth => "ladder_constant_depth",
            Family::MhcStatePrep => "mhc_prep",
        }
    }

    pub fn parse(s: &str) -> Result<Family, BuildError> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| BuildError::Spec(format!("unknown experiment family {s:?}")))
    }

    pub fn is_shor(self) -> bool {
        matches!(self, Family::ShorUnencoded | Family::ShorTwoRow | Family::ShorThreeRow | Family::ShorTwoRowLdu)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExperimentSpec {
    pub family: Family,
    /// Qubit count for ladders, ancillas included.
    pub n_logical: usize,
    /// Ladders and MHC prep only; Shor variants fix this by family.
    pub encoded: bool,
    pub initial_bits: Vec<u8>,
    pub seed: u64,
}

impl ExperimentSpec {
    pub fn shor(family: Family) -> Self {
        ExperimentSpec { family, n_logical: 3, encoded: family != Family::ShorUnencoded, initial_bits: vec![], seed: 0 }
    }

    pub fn ladder(family: Family, n_logical: usize, encoded: bool, bits: Vec<u8>) -> Self {
        ExperimentSpec { family, n_logical, encoded, initial_bits: bits, seed: 0 }
    }

    pub fn mhc(encoded: bool, bits: Vec<u8>) -> Self {
        ExperimentSpec { family: Family::MhcStatePrep, n_logical: 4, encoded, initial_bits: bits, seed: 0 }
    }

    pub fn label(&self) -> String {
        let bits: String = self.initial_bits.iter().map(|b| char::from(b'0' + b)).collect();
        let enc = if self.encoded { "enc" } else { "unenc" };
        match self.family {
            f if f.is_shor() => f.name().to_string(),
            Family::MhcStatePrep => format!("mhc_{enc}_{bits}"),
            f => format!("{}_{}_{enc}_{bits}", f.name(), self.n_logical),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Experiment {
    pub spec: ExperimentSpec,
    /// Logical-tier circuit laid out on the grid, ready for lowering.
    pub circuit: Circuit,
    /// Bare circuit computing the same output words.
    pub reference: Circuit,
    /// Ideal distribution over output words.
    pub expected: Distribution,
}

/// Random ladder inputs: data positions uniform, ancilla positions 0.
pub fn random_ladder_inputs(n_logical: usize, count: usize, seed: u64) -> Vec<Vec<u8>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pattern = row_pattern(n_logical);
    (0..count)
        .map(|_| {
            (0..n_logical)
                .map(|i| if pattern.get(i / 2) == Some(&true) { 0 } else { rng.random_range(0..=1u8) })
                .collect()
        })
        .collect()
}

/// Outcome of a reference made only of basis-state permutations, evaluated bit by bit.
fn classical_outcome(reference: &Circuit) -> Option<String> {
    let mut bit: HashMap<u32, u8> = HashMap::new();
    for g in &reference.gates {
        let o = &g.operands;
        match g.kind {
            GateKind::Prep => {
                bit.insert(o[0], 0);
            }
            GateKind::X => *bit.entry(o[0]).or_insert(0) ^= 1,
            GateKind::CX => {
                let c = bit.get(&o[0]).copied().unwrap_or(0);
                *bit.entry(o[1]).or_insert(0) ^= c;
            }
            GateKind::SWAP => {
                let (a, b) = (bit.get(&o[0]).copied().unwrap_or(0), bit.get(&o[1]).copied().unwrap_or(0));
                bit.insert(o[0], b);
                bit.insert(o[1], a);
            }
            GateKind::Measure | GateKind::Move { .. } => {}
            _ => return None,
        }
    }
    Some(reference.measured_atoms().iter().map(|a| char::from(b'0' + bit.get(a).copied().unwrap_or(0))).collect())
}

/// Word distribution of a bare circuit without corrections: one bit per block, by sample.
fn reference_distribution(reference: &Circuit) -> Result<Distribution, BuildError> {
    let raw = match classical_outcome(reference) {
        Some(s) => Distribution::from([(s, 1.0)]),
        None => statevector_oracle(reference).map_err(|e| BuildError::Capacity(e.to_string()))?,
    };
    let measured = reference.measured_atoms();
    let col = |a: u32| measured.iter().position(|&m| m == a).expect("block atom measured");
    let mut out = Distribution::new();
    for (outcome, p) in raw {
        let bytes = outcome.as_bytes();
        for sample in &reference.samples {
            let word: String =
                sample.iter().map(|&l| bytes[col(reference.blocks[l as usize].atoms[0])] as char).collect();
            *out.entry(word).or_insert(0.0) += p / reference.samples.len() as f64;
        }
    }
    Ok(out)
}

pub fn build(spec: &ExperimentSpec) -> Result<Experiment, BuildError> {
    let (circuit, reference) = match spec.family {
        Family::ShorUnencoded | Family::ShorTwoRow | Family::ShorThreeRow | Family::ShorTwoRowLdu => {
            let v = match spec.family {
                Family::ShorUnencoded => ShorVariant::Unencoded,
                Family::ShorTwoRow => ShorVariant::TwoRow,
                Family::ShorThreeRow => ShorVariant::ThreeRow,
                _ => ShorVariant::TwoRowLdu,
            };
            (build_shor(v), build_shor(ShorVariant::Unencoded))
        }
        Family::LadderOutsideIn => {
            let c = build_outside_in(spec.n_logical, &spec.initial_bits, spec.encoded)?;
            let r = build_outside_in(spec.n_logical, &spec.initial_bits, false)?;
            (c, r)
        }
        Family::LadderConstantDepth => {
            let c = build_constant_depth(spec.n_logical, &spec.initial_bits, spec.encoded)?;
            let data = data_positions(spec.n_logical);
            let bits: Vec<u8> = data.iter().map(|&i| spec.initial_bits[i]).collect();
            (c, build_outside_in(data.len(), &bits, false)?)
        }
        Family::MhcStatePrep => {
            let c = if spec.encoded {
                build_mhc_prep(&spec.initial_bits)?
            } else {
                build_mhc_unencoded(&spec.initial_bits)?
            };
            (c, build_mhc_unencoded(&spec.initial_bits)?)
        }
    };
    let expected = reference_distribution(&reference)?;
    Ok(Experiment { spec: spec.clone(), circuit, reference, expected })
}
