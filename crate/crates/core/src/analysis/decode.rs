//! Z-basis block decoders built from a CSS code's Z stabilizers and logical Z operators.

use std::sync::OnceLock;

use crate::circuit::Encoding;
use crate::codes::{c4_code, hypercube_code, StabilizerCode};

#[derive(Clone, Debug)]
pub struct BlockDecoder {
    n: usize,
    z_stabs: Vec<u64>,
    logical_z: Vec<u64>,
    /// Per syndrome: logical flip of the minimum-weight correction, or `None` when the
    /// minimum-weight corrections disagree. Empty for detection-only decoding.
    leaders: Vec<Option<u64>>,
}

fn parity(x: u64) -> u64 {
    u64::from(x.count_ones() % 2 == 1)
}

impl BlockDecoder {
    fn masks(code: &StabilizerCode) -> (Vec<u64>, Vec<u64>) {
        let z_stabs = code.z_stabilizers().map(|p| p.z_bits()).collect();
        let logical_z = code.logical_z.iter().map(|p| p.z_bits()).collect();
        (z_stabs, logical_z)
    }

    /// Accepts only strings in the Z codespace.
    pub fn detecting(code: &StabilizerCode) -> Self {
        let (z_stabs, logical_z) = BlockDecoder::masks(code);
        BlockDecoder { n: code.n, z_stabs, logical_z, leaders: Vec::new() }
    }

    /// Nearest-codeword decoding in Z-syndrome space; ties between logical classes are rejected.
    pub fn correcting(code: &StabilizerCode) -> Self {
        let (z_stabs, logical_z) = BlockDecoder::masks(code);
        assert!(code.n <= 20 && z_stabs.len() <= 16, "coset table too large");
        let mut dec = BlockDecoder { n: code.n, z_stabs, logical_z, leaders: Vec::new() };
        let n_syn = 1usize << dec.z_stabs.len();
        let mut best: Vec<(u32, Option<u64>)> = vec![(u32::MAX, None); n_syn];
        for e in 0u64..(1 << code.n) {
            let s = dec.syndrome(e) as usize;
            let w = e.count_ones();
            let flip = dec.logical(e);
            let slot = &mut best[s];
            if w < slot.0 {
                *slot = (w, Some(flip));
            } else if w == slot.0 && slot.1.is_some_and(|f| f != flip) {
                slot.1 = None;
            }
        }
        dec.leaders = best.into_iter().map(|(_, f)| f).collect();
        dec
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.logical_z.len()
    }

    pub fn syndrome(&self, bits: u64) -> u64 {
        self.z_stabs.iter().enumerate().fold(0, |s, (i, &m)| s | parity(bits & m) << i)
    }

    /// Raw logical readout, bit `j` for logical qubit `j`.
    pub fn logical(&self, bits: u64) -> u64 {
        self.logical_z.iter().enumerate().fold(0, |s, (j, &m)| s | parity(bits & m) << j)
    }

    /// Logical bits of a measured string, or `None` if it is rejected.
    pub fn decode(&self, bits: u64) -> Option<u64> {
        let s = self.syndrome(bits);
        if s == 0 {
            return Some(self.logical(bits));
        }
        if self.leaders.is_empty() {
            return None;
        }
        self.leaders[s as usize].map(|flip| self.logical(bits) ^ flip)
    }
}

/// Decoder used for each readout encoding.
pub fn decoder_for(encoding: Encoding) -> Option<&'static BlockDecoder> {
    static C4: OnceLock<BlockDecoder> = OnceLock::new();
    static HC: OnceLock<BlockDecoder> = OnceLock::new();
    match encoding {
        Encoding::Bare => None,
        Encoding::C4 => Some(C4.get_or_init(|| BlockDecoder::detecting(&c4_code()))),
        Encoding::Hypercube => Some(HC.get_or_init(|| BlockDecoder::correcting(&hypercube_code()))),
    }
}

pub fn bits_from_str(s: &str) -> u64 {
    s.bytes().enumerate().fold(0, |acc, (i, b)| acc | u64::from(b == b'1') << i)
}
