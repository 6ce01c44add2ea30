//! CNOT ladders: the sequential outside-in arrangement and the constant-depth version.
//!
//! Qubits sit on an R x 2 grid in row-major order. In the constant-depth circuit row `i` holds
//! ancillas when `i` is odd and not the last row; every other row holds data.

use super::layout::{flagged_prep_many, logical_x, transversal_cx, transversal_h, Builder, Patch};
use super::BuildError;
use crate::circuit::{AtomId, Circuit, Encoding, Gate, Role};

pub fn is_ancilla_row(row: usize, rows: usize) -> bool {
    row % 2 == 1 && row + 1 != rows
}

/// Row kinds for `n_logical` qubits (two per row).
pub fn row_pattern(n_logical: usize) -> Vec<bool> {
    let rows = n_logical / 2;
    (0..rows).map(|r| is_ancilla_row(r, rows)).collect()
}

/// Indices (row-major) of the data qubits of a constant-depth ladder.
pub fn data_positions(n_logical: usize) -> Vec<usize> {
    let pattern = row_pattern(n_logical);
    (0..n_logical).filter(|&i| !pattern[i / 2]).collect()
}

/// Classical reference: column ladders down the rows, then the last row's col 0 into col 1.
pub fn outside_in_bits(bits: &[u8]) -> Vec<u8> {
    let mut b = bits.to_vec();
    let rows = b.len() / 2;
    for r in 1..rows {
        b[2 * r] ^= b[2 * (r - 1)];
        b[2 * r + 1] ^= b[2 * (r - 1) + 1];
    }
    if rows > 0 {
        b[2 * rows - 1] ^= b[2 * rows - 2];
    }
    b
}

fn check(n_logical: usize, bits: &[u8], constant_depth: bool) -> Result<(), BuildError> {
    if n_logical < 2 || n_logical % 2 == 1 {
        return Err(BuildError::Spec(format!("ladder needs an even qubit count, got {n_logical}")));
    }
    if constant_depth && n_logical < 4 {
        return Err(BuildError::Spec("constant-depth ladder needs at least 4 qubits".into()));
    }
    if bits.len() != n_logical {
        return Err(BuildError::Spec(format!("{} initial bits for {n_logical} qubits", bits.len())));
    }
    if let Some(b) = bits.iter().find(|&&b| b > 1) {
        return Err(BuildError::Spec(format!("initial bit {b} is not 0 or 1")));
    }
    if constant_depth {
        let pattern = row_pattern(n_logical);
        if (0..n_logical).any(|i| pattern[i / 2] && bits[i] == 1) {
            return Err(BuildError::Spec("ancilla positions of the initial bits must be 0".into()));
        }
    }
    Ok(())
}

/// Gate-level operations on "logical qubit" handles, shared by both tiers.
trait Qubits {
    fn x(&self, q: usize) -> Vec<Gate>;
    fn h_row(&self, row: usize) -> Vec<Gate>;
    fn cx_rows(&self, c: usize, t: usize) -> Vec<Gate>;
    fn final_cx(&self, row: usize) -> Vec<Gate>;
}

struct Bare(Vec<AtomId>);

impl Qubits for Bare {
    fn x(&self, q: usize) -> Vec<Gate> {
        vec![Gate::x(self.0[q])]
    }
    fn h_row(&self, row: usize) -> Vec<Gate> {
        vec![Gate::h(self.0[2 * row]), Gate::h(self.0[2 * row + 1])]
    }
    fn cx_rows(&self, c: usize, t: usize) -> Vec<Gate> {
        (0..2).map(|k| Gate::cx(self.0[2 * c + k], self.0[2 * t + k])).collect()
    }
    fn final_cx(&self, row: usize) -> Vec<Gate> {
        vec![Gate::cx(self.0[2 * row], self.0[2 * row + 1])]
    }
}

struct Encoded(Vec<Patch>);

impl Qubits for Encoded {
    fn x(&self, q: usize) -> Vec<Gate> {
        logical_x(&self.0[q / 2], q % 2)
    }
    fn h_row(&self, row: usize) -> Vec<Gate> {
        // Transversal H also swaps the pair; harmless on |00>_L.
        transversal_h(&self.0[row])
    }
    fn cx_rows(&self, c: usize, t: usize) -> Vec<Gate> {
        transversal_cx(&self.0[c], &self.0[t])
    }
    fn final_cx(&self, row: usize) -> Vec<Gate> {
        // Logical CX(1 -> 2) in one patch is the relabelling of atoms 2 and 3.
        let d = self.0[row].data;
        vec![Gate::swap(d[2], d[3])]
    }
}

fn setup(n_logical: usize, encoded: bool, ancilla: &[bool]) -> (Builder, Box<dyn Qubits>) {
    let rows = n_logical / 2;
    let mut b = Builder::new();
    let q: Box<dyn Qubits> = if encoded {
        let patches: Vec<Patch> = (0..rows)
            .map(|r| b.patch(1 + r as i32, true, if ancilla[r] { Role::Ancilla } else { Role::Data }))
            .collect();
        for p in &patches {
            b.c4_block(p);
        }
        b.prep_all();
        flagged_prep_many(&mut b, &patches);
        Box::new(Encoded(patches))
    } else {
        let mut atoms = Vec::new();
        for r in 0..rows {
            for c in 0..2 {
                let role = if ancilla[r] { Role::Ancilla } else { Role::Data };
                atoms.push(b.atom(1 + r as i32, 1 + c, role));
            }
        }
        for &a in &atoms {
            b.block(Encoding::Bare, vec![a]);
        }
        b.prep_all();
        Box::new(Bare(atoms))
    };
    (b, q)
}

/// Sequential ladder: every row's pair adds into the next row, then the final in-row CNOT.
pub fn build_outside_in(n_logical: usize, bits: &[u8], encoded: bool) -> Result<Circuit, BuildError> {
    check(n_logical, bits, false)?;
    let rows = n_logical / 2;
    let (mut b, q) = setup(n_logical, encoded, &vec![false; rows]);
    b.circuit.samples.push((0..n_logical as u32).collect());
    for (i, &bit) in bits.iter().enumerate() {
        if bit == 1 {
            b.extend(q.x(i));
        }
    }
    for r in 1..rows {
        b.extend(q.cx_rows(r - 1, r));
    }
    b.extend(q.final_cx(rows - 1));
    b.measure_all();
    Ok(b.finish())
}

/// Constant-depth ladder with Bell-paired ancilla rows and classical corrections.
pub fn build_constant_depth(n_logical: usize, bits: &[u8], encoded: bool) -> Result<Circuit, BuildError> {
    check(n_logical, bits, true)?;
    let rows = n_logical / 2;
    let ancilla = row_pattern(n_logical);
    let (mut b, q) = setup(n_logical, encoded, &ancilla);
    let data = data_positions(n_logical);
    b.circuit.samples.push(data.iter().map(|&i| i as u32).collect());
    for (i, &bit) in bits.iter().enumerate() {
        if bit == 1 {
            b.extend(q.x(i));
        }
    }
    // Bell pairs between each ancilla row and the data row below it.
    for r in (0..rows).filter(|&r| ancilla[r]) {
        b.extend(q.h_row(r));
        b.extend(q.cx_rows(r, r + 1));
    }
    // One parallel layer: data rows feed the ancilla below, the last two data rows pair up.
    for r in (0..rows - 1).filter(|&r| !ancilla[r]) {
        b.extend(q.cx_rows(r, r + 1));
    }
    b.extend(q.final_cx(rows - 1));
    b.measure_all();
    // Flip a data bit by the parity of the ancilla bits above it in its column; the last qubit
    // collects both columns through the final CNOT.
    for &i in &data {
        let (r, c) = (i / 2, i % 2);
        let last = i == n_logical - 1;
        let sources: Vec<u32> = (0..r)
            .filter(|&a| ancilla[a])
            .flat_map(|a| if last { vec![2 * a, 2 * a + 1] } else { vec![2 * a + c] })
            .map(|x| x as u32)
            .collect();
        if !sources.is_empty() {
            b.push(Gate::correction(i as u32, &sources));
        }
    }
    Ok(b.finish())
}
