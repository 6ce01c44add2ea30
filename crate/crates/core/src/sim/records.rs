//! Shot-record text format.
//!
//! ```text
//! records v1
//! experiment two_row
//! circuit <sha256 of the circuit text>
//! seed 7
//! alpha 1
//! shots 2
//! noise cz_pauli=0.0045 ...
//! atoms 0:data 1:data 4:prep_flag
//! end
//! 0 010
//! 1 112
//! ```
//! Outcome columns follow the `atoms` line; `2` marks a lost atom.

use std::fmt::Write as _;

use sha2::{Digest, Sha256};

use super::noise::NoiseModel;
use super::SimError;
use crate::circuit::{parse_role, role_name, write_circuit, AtomId, Circuit, Role};

pub const LOSS_MARK: u8 = 2;

#[derive(Clone, Debug, PartialEq)]
pub struct RecordHeader {
    pub experiment: String,
    pub circuit_hash: String,
    pub seed: u64,
    pub alpha: f64,
    pub shots: u64,
    pub noise: NoiseModel,
    /// Measured atoms in outcome-column order, with their roles.
    pub atoms: Vec<(AtomId, Role)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShotRecord {
    pub shot: u64,
    /// One entry per measured atom: 0, 1 or [`LOSS_MARK`].
    pub outcomes: Vec<u8>,
}

impl ShotRecord {
    pub fn bits(&self) -> String {
        self.outcomes.iter().map(|&b| char::from(b'0' + b)).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RecordSet {
    pub header: RecordHeader,
    pub shots: Vec<ShotRecord>,
}

/// Hex SHA-256 of the circuit's text serialization.
pub fn circuit_hash(c: &Circuit) -> String {
    let digest = Sha256::digest(write_circuit(c).as_bytes());
    digest.iter().fold(String::with_capacity(64), |mut s, b| {
        write!(s, "{b:02x}").unwrap();
        s
    })
}

pub fn write_records(set: &RecordSet) -> String {
    let h = &set.header;
    let mut s = String::new();
    s.push_str("records v1\n");
    writeln!(s, "experiment {}", h.experiment).unwrap();
    writeln!(s, "circuit {}", h.circuit_hash).unwrap();
    writeln!(s, "seed {}", h.seed).unwrap();
    writeln!(s, "alpha {}", h.alpha).unwrap();
    writeln!(s, "shots {}", h.shots).unwrap();
    writeln!(s, "noise {}", h.noise.to_text()).unwrap();
    let atoms: Vec<String> = h.atoms.iter().map(|&(a, r)| format!("{a}:{}", role_name(r))).collect();
    writeln!(s, "atoms {}", atoms.join(" ")).unwrap();
    s.push_str("end\n");
    for r in &set.shots {
        writeln!(s, "{} {}", r.shot, r.bits()).unwrap();
    }
    s
}

fn perr(line: usize, msg: impl std::fmt::Display) -> SimError {
    SimError::Parse(format!("line {line}: {msg}"))
}

pub fn parse_records(text: &str) -> Result<RecordSet, SimError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let mut field = |key: &str| -> Result<(usize, String), SimError> {
        let (ln, l) = lines.next().ok_or_else(|| SimError::Parse(format!("missing {key} line")))?;
        let rest = l.strip_prefix(key).ok_or_else(|| perr(ln, format!("expected {key:?}")))?;
        let rest = if rest.is_empty() {
            rest
        } else {
            rest.strip_prefix(' ').ok_or_else(|| perr(ln, format!("expected {key:?}")))?
        };
        Ok((ln, rest.to_string()))
    };
    let (ln, v) = field("records")?;
    if v != "v1" {
        return Err(perr(ln, format!("unsupported version {v:?}")));
    }
    let (ln, experiment) = field("experiment")?;
    if experiment.is_empty() || experiment.contains(char::is_whitespace) {
        return Err(perr(ln, "experiment id must be one non-empty token"));
    }
    let (ln, circuit_hash) = field("circuit")?;
    if circuit_hash.contains(char::is_whitespace) {
        return Err(perr(ln, "circuit hash must be one token"));
    }
    let (ln, v) = field("seed")?;
    let seed: u64 = v.parse().map_err(|_| perr(ln, "bad seed"))?;
    let (ln, v) = field("alpha")?;
    let alpha: f64 = v.parse().map_err(|_| perr(ln, "bad alpha"))?;
    let (ln, v) = field("shots")?;
    let shots: u64 = v.parse().map_err(|_| perr(ln, "bad shot count"))?;
    let (ln, v) = field("noise")?;
    let noise = NoiseModel::from_text(&v).map_err(|e| perr(ln, e))?;
    let (ln, v) = field("atoms")?;
    let mut atoms = Vec::new();
    for tok in v.split(' ').filter(|t| !t.is_empty()) {
        let (a, r) = tok.split_once(':').ok_or_else(|| perr(ln, format!("bad atom entry {tok:?}")))?;
        let a: AtomId = a.parse().map_err(|_| perr(ln, format!("bad atom id {a:?}")))?;
        let r = parse_role(r, ln).map_err(|e| perr(ln, e))?;
        atoms.push((a, r));
    }
    let (ln, v) = field("end")?;
    if !v.is_empty() {
        return Err(perr(ln, "trailing text after end"));
    }
    let header = RecordHeader { experiment, circuit_hash, seed, alpha, shots, noise, atoms };

    let mut out = Vec::new();
    for (ln, l) in lines {
        let (idx, bits) = l.split_once(' ').ok_or_else(|| perr(ln, "expected '<shot> <bits>'"))?;
        let shot: u64 = idx.parse().map_err(|_| perr(ln, "bad shot index"))?;
        if shot != out.len() as u64 {
            return Err(perr(ln, format!("shot index {shot} out of sequence")));
        }
        let outcomes: Vec<u8> = bits
            .bytes()
            .map(|b| match b {
                b'0'..=b'2' => Ok(b - b'0'),
                _ => Err(perr(ln, format!("bad outcome character {:?}", b as char))),
            })
            .collect::<Result<_, _>>()?;
        if outcomes.len() != header.atoms.len() {
            return Err(perr(ln, format!("{} outcomes for {} atoms", outcomes.len(), header.atoms.len())));
        }
        out.push(ShotRecord { shot, outcomes });
    }
    if out.len() as u64 != header.shots {
        return Err(SimError::Parse(format!("header declares {} shots, found {}", header.shots, out.len())));
    }
    Ok(RecordSet { header, shots: out })
}
