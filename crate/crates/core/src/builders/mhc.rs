//! [[16,4,4]] state preparation: the flagged [[4,2,2]] prep run at both levels.

use super::layout::{flagged_prep_many, transversal_cx, transversal_h, Builder, Patch};
use super::BuildError;
use crate::circuit::{Circuit, Encoding, Gate, Role};
use crate::codes::hypercube_code;

pub const MHC_BITSTRINGS: [&str; 4] = ["1110", "0000", "0111", "1111"];

pub fn parse_bits(s: &str) -> Result<Vec<u8>, BuildError> {
    s.chars()
        .map(|ch| match ch {
            '0' => Ok(0),
            '1' => Ok(1),
            _ => Err(BuildError::Spec(format!("bad bit {ch:?} in {s:?}"))),
        })
        .collect()
}

fn check(bits: &[u8]) -> Result<(), BuildError> {
    if bits.len() != 4 || bits.iter().any(|&b| b > 1) {
        return Err(BuildError::Spec(format!("MHC prep takes 4 bits, got {bits:?}")));
    }
    Ok(())
}

/// Five flagged patches; patches 0..4 form the code block and patch 4 is the logical flag.
pub fn build_mhc_prep(bits: &[u8]) -> Result<Circuit, BuildError> {
    check(bits)?;
    let mut b = Builder::new();
    let patches: Vec<Patch> =
        (0..5).map(|i| b.patch(1 + i, true, if i < 4 { Role::Data } else { Role::PrepFlag })).collect();
    let atoms: Vec<u32> = patches[..4].iter().flat_map(|p| p.data).collect();
    b.block(Encoding::Hypercube, atoms.clone());
    b.c4_block(&patches[4]);
    b.circuit.samples.push(vec![0, 1, 2, 3]);
    b.prep_all();
    flagged_prep_many(&mut b, &patches);

    // Same circuit one level up, every gate transversal across patches.
    let [p0, p1, p2, p3, f] = [0, 1, 2, 3, 4].map(|i| patches[i].clone());
    b.extend(transversal_h(&p1));
    b.extend(transversal_cx(&p1, &p2));
    b.extend(transversal_cx(&p1, &p0));
    b.extend(transversal_cx(&p2, &p3));
    b.extend(transversal_cx(&p3, &f));
    // Logical flag row (with its parked level-1 flag) goes from below patch 3 to above patch 0.
    let mut row: Vec<u32> = f.data.to_vec();
    row.push(f.flag.unwrap());
    b.push(Gate::mv(&row, p0.row - 1 - f.row, 0));
    b.extend(transversal_cx(&p0, &f));

    let code = hypercube_code();
    for (i, &bit) in bits.iter().enumerate() {
        if bit == 1 {
            b.extend(code.logical_x[i].support().into_iter().map(|q| Gate::x(atoms[q])));
        }
    }
    b.measure_all();
    Ok(b.finish())
}

/// Bare reference: four qubits flipped to the target bits.
pub fn build_mhc_unencoded(bits: &[u8]) -> Result<Circuit, BuildError> {
    check(bits)?;
    let mut b = Builder::new();
    let q: Vec<u32> = (0..4).map(|i| b.atom(1, 1 + i, Role::Data)).collect();
    for &a in &q {
        b.block(Encoding::Bare, vec![a]);
    }
    b.circuit.samples.push(vec![0, 1, 2, 3]);
    b.prep_all();
    for (i, &bit) in bits.iter().enumerate() {
        if bit == 1 {
            b.push(Gate::x(q[i]));
        }
    }
    b.measure_all();
    Ok(b.finish())
}
