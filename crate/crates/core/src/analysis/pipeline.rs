//! Record post-processing: LDU flags, loss handling, flag and codespace checks, decoding and
//! classical corrections.

use std::collections::{BTreeMap, HashMap};

use super::decode::decoder_for;
use super::{AnalysisError, DecodedSample, DiscardReason, LossPolicy, PostProcessConfig};
use crate::circuit::{AtomId, Circuit, Encoding, GateKind, Role};
use crate::sim::{Distribution, RecordSet, LOSS_MARK};

#[derive(Clone, Debug)]
struct BlockPlan {
    encoding: Encoding,
    cols: Vec<usize>,
    /// Every atom carries a prep-flag role: the block must decode to all zeros.
    is_flag: bool,
    first_bit: usize,
}

/// Post-processor bound to one circuit's readout layout.
#[derive(Clone, Debug)]
pub struct Decoder {
    config: PostProcessConfig,
    n_cols: usize,
    blocks: Vec<BlockPlan>,
    /// Column of each measured atom that is not part of a block.
    prep_flags: Vec<usize>,
    ldu: Vec<(usize, usize)>,
    n_bits: usize,
    corrections: Vec<(usize, Vec<usize>)>,
    samples: Vec<Vec<usize>>,
    block_of_col: HashMap<usize, usize>,
}

impl Decoder {
    pub fn new(circuit: &Circuit, config: &PostProcessConfig) -> Result<Decoder, AnalysisError> {
        let measured = circuit.measured_atoms();
        let col: HashMap<AtomId, usize> = measured.iter().enumerate().map(|(i, &a)| (a, i)).collect();
        let lookup = |a: &AtomId| {
            col.get(a).copied().ok_or_else(|| AnalysisError::Layout(format!("block atom {a} is never measured")))
        };
        let mut blocks = Vec::new();
        let mut in_block = HashMap::new();
        let mut first_bit = 0;
        for (bi, b) in circuit.blocks.iter().enumerate() {
            let cols: Vec<usize> = b.atoms.iter().map(lookup).collect::<Result<_, _>>()?;
            for &c in &cols {
                in_block.insert(c, bi);
            }
            let is_flag = b.atoms.iter().all(|&a| circuit.role(a) == Role::PrepFlag);
            blocks.push(BlockPlan { encoding: b.encoding, cols, is_flag, first_bit });
            first_bit += b.encoding.k();
        }
        if config.loss_policy == LossPolicy::Correct && blocks.iter().all(|b| b.encoding == Encoding::Bare) {
            return Err(AnalysisError::Config("loss correction needs an encoded circuit".into()));
        }
        let mut prep_flags = Vec::new();
        let mut ldu = Vec::new();
        for (i, &a) in measured.iter().enumerate() {
            match circuit.role(a) {
                Role::PrepFlag if !in_block.contains_key(&i) => prep_flags.push(i),
                Role::LduFlag(t) => ldu.push((i, lookup(&t)?)),
                _ => {}
            }
        }
        let corrections = circuit
            .gates
            .iter()
            .filter(|g| g.kind == GateKind::ClassicalCorrection)
            .map(|g| (g.operands[0] as usize, g.operands[1..].iter().map(|&x| x as usize).collect()))
            .collect();
        let samples = circuit.samples.iter().map(|s| s.iter().map(|&x| x as usize).collect()).collect();
        Ok(Decoder {
            config: config.clone(),
            n_cols: measured.len(),
            blocks,
            prep_flags,
            ldu,
            n_bits: first_bit,
            corrections,
            samples,
            block_of_col: in_block,
        })
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    /// Processes one shot's outcomes (0, 1 or [`LOSS_MARK`] per measured atom).
    pub fn decode(&self, outcomes: &[u8]) -> DecodedSample {
        let reject = |r| DecodedSample { words: Vec::new(), discard_reason: Some(r) };
        let mut out = outcomes.to_vec();
        let mut ldu_marked = vec![false; out.len()];

        // (1) LDU flags mark their targets as lost.
        if self.config.use_ldu_flags {
            for &(f, t) in &self.ldu {
                match out[f] {
                    LOSS_MARK => return reject(DiscardReason::Loss),
                    1 => {
                        out[t] = LOSS_MARK;
                        ldu_marked[t] = true;
                    }
                    _ => {}
                }
            }
        }

        // (2) Loss handling.
        let mut per_block: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (c, &v) in out.iter().enumerate() {
            if v != LOSS_MARK {
                continue;
            }
            match self.block_of_col.get(&c) {
                Some(&b) => per_block.entry(b).or_default().push(c),
                None if self.is_ldu_col(c) && !self.config.use_ldu_flags => {}
                None => return reject(DiscardReason::Loss),
            }
        }
        for (b, lost) in per_block {
            let plan = &self.blocks[b];
            let reason = if lost.iter().any(|&c| ldu_marked[c]) { DiscardReason::LduFlag } else { DiscardReason::Loss };
            let correctable = self.config.loss_policy == LossPolicy::Correct
                && plan.encoding != Encoding::Bare
                && !plan.is_flag
                && lost.len() == 1;
            if !correctable {
                return reject(reason);
            }
            // Complete the lost bit from the even parity of its 4-atom patch.
            let lost_col = lost[0];
            let pos = plan.cols.iter().position(|&c| c == lost_col).unwrap();
            let patch = pos / 4 * 4;
            let fill = (patch..patch + 4).filter(|&i| i != pos).fold(0u8, |acc, i| acc ^ out[plan.cols[i]]);
            out[lost_col] = fill;
        }

        // (3) Preparation flags.
        if self.prep_flags.iter().any(|&c| out[c] != 0) {
            return reject(DiscardReason::PrepFlag);
        }

        // (4) + (5) Codespace check and decoding.
        let mut bits = vec![0u8; self.n_bits];
        for plan in &self.blocks {
            let raw = plan.cols.iter().enumerate().fold(0u64, |acc, (i, &c)| acc | u64::from(out[c]) << i);
            let logical = match decoder_for(plan.encoding) {
                None => Some(raw),
                Some(dec) => dec.decode(raw),
            };
            let Some(logical) = logical else {
                return reject(if plan.is_flag { DiscardReason::PrepFlag } else { DiscardReason::OutOfCodespace });
            };
            if plan.is_flag {
                if logical != 0 {
                    return reject(DiscardReason::PrepFlag);
                }
                continue;
            }
            for j in 0..plan.encoding.k() {
                bits[plan.first_bit + j] = (logical >> j & 1) as u8;
            }
        }

        // (6) Classical Pauli corrections.
        if self.config.apply_pauli_correction {
            for (t, srcs) in &self.corrections {
                let p = srcs.iter().fold(0u8, |acc, &s| acc ^ bits[s]);
                bits[*t] ^= p;
            }
        }
        let words = self.samples.iter().map(|s| s.iter().map(|&l| char::from(b'0' + bits[l])).collect()).collect();
        DecodedSample { words, discard_reason: None }
    }

    fn is_ldu_col(&self, c: usize) -> bool {
        self.ldu.iter().any(|&(f, _)| f == c)
    }
}

/// Decodes every shot of a record set produced from `circuit`.
pub fn postprocess(
    records: &RecordSet,
    circuit: &Circuit,
    config: &PostProcessConfig,
) -> Result<Vec<DecodedSample>, AnalysisError> {
    let expected: Vec<(AtomId, Role)> = circuit.measured_atoms().into_iter().map(|a| (a, circuit.role(a))).collect();
    if records.header.atoms != expected {
        return Err(AnalysisError::Layout("record columns do not match the circuit's measured atoms".into()));
    }
    let dec = Decoder::new(circuit, config)?;
    Ok(records.shots.iter().map(|r| dec.decode(&r.outcomes)).collect())
}

/// Accepted word distribution and discard mass for an exact outcome distribution.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DecodedDistribution {
    /// Over accepted words, normalised to 1 when anything is accepted.
    pub words: Distribution,
    pub accepted: f64,
    pub discarded: BTreeMap<DiscardReason, f64>,
}

pub fn decode_distribution(
    dist: &Distribution,
    circuit: &Circuit,
    config: &PostProcessConfig,
) -> Result<DecodedDistribution, AnalysisError> {
    let dec = Decoder::new(circuit, config)?;
    let mut out = DecodedDistribution::default();
    for (outcome, &p) in dist {
        if outcome.len() != dec.n_cols() {
            return Err(AnalysisError::Layout(format!("outcome {outcome:?} has the wrong length")));
        }
        let bits: Vec<u8> = outcome.bytes().map(|b| b - b'0').collect();
        let s = dec.decode(&bits);
        match s.discard_reason {
            Some(r) => *out.discarded.entry(r).or_insert(0.0) += p,
            None => {
                out.accepted += p;
                for w in &s.words {
                    *out.words.entry(w.clone()).or_insert(0.0) += p / s.words.len() as f64;
                }
            }
        }
    }
    if out.accepted > 0.0 {
        for v in out.words.values_mut() {
            *v /= out.accepted;
        }
    }
    Ok(out)
}
