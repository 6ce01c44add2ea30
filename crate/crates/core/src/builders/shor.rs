//! Pre-compiled three-qubit Shor (Hadamard test) and its [[4,2,2]] embeddings.

use super::layout::{
    flagged_prep, flagged_prep_many, insert_ldus, logical_cz, transversal_cx, transversal_h, Builder, FLAG_SHIFT,
};
use super::BuildError;
use crate::circuit::{Circuit, Encoding, Gate, Role};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ShorVariant {
    Unencoded,
    TwoRow,
    ThreeRow,
    TwoRowLdu,
}

impl ShorVariant {
    pub fn name(self) -> &'static str {
        match self {
            ShorVariant::Unencoded => "unencoded",
            ShorVariant::TwoRow => "two_row",
            ShorVariant::ThreeRow => "three_row",
            ShorVariant::TwoRowLdu => "two_row_ldu",
        }
    }

    pub fn parse(s: &str) -> Result<Self, BuildError> {
        Ok(match s {
            "unencoded" => ShorVariant::Unencoded,
            "two_row" => ShorVariant::TwoRow,
            "three_row" => ShorVariant::ThreeRow,
            "two_row_ldu" => ShorVariant::TwoRowLdu,
            _ => return Err(BuildError::Spec(format!("unknown Shor variant {s:?}"))),
        })
    }
}

pub fn build_shor(variant: ShorVariant) -> Circuit {
    match variant {
        ShorVariant::Unencoded => unencoded(),
        ShorVariant::TwoRow => two_row().0,
        ShorVariant::ThreeRow => three_row(),
        ShorVariant::TwoRowLdu => {
            let (c, targets, position) = two_row();
            insert_ldus(&c, &targets, position).expect("LDU rows are free in the two-row layout")
        }
    }
}

/// H(0); CX(0,1); CX(0,2); H(0) on a line with qubit 0 in the middle.
fn unencoded() -> Circuit {
    let mut b = Builder::new();
    let q1 = b.atom(1, 1, Role::Data);
    let q0 = b.atom(1, 2, Role::Data);
    let q2 = b.atom(1, 3, Role::Data);
    for q in [q0, q1, q2] {
        b.block(Encoding::Bare, vec![q]);
    }
    // Blocks were added in (q0, q1, q2) order.
    b.circuit.samples.push(vec![0, 1, 2]);
    b.prep_all();
    b.extend([Gate::h(q0), Gate::cx(q0, q1), Gate::cx(q0, q2), Gate::h(q0)]);
    for q in [q0, q1, q2] {
        b.push(Gate::measure(q));
    }
    b.finish()
}

/// Returns the circuit, the eight data atoms and the index of the first final Hadamard.
fn two_row() -> (Circuit, Vec<u32>, usize) {
    let mut b = Builder::new();
    let up = b.patch(1, true, Role::Data);
    let low = b.patch(2, false, Role::Data);
    let u = b.c4_block(&up);
    let l = b.c4_block(&low);
    // q0 lands on upper logical 2 after the final transversal H swaps the pair.
    b.circuit.samples.push(vec![u + 1, u, l]);
    b.prep_all();
    let (pre, post) = flagged_prep(&up);
    b.extend(pre);
    b.push(Gate::mv(&[up.flag.unwrap()], 0, FLAG_SHIFT));
    b.extend(post);
    // |0+>_L as two Bell pairs.
    let [l0, l1, l2, l3] = low.data;
    b.extend([Gate::h(l0), Gate::cx(l0, l1), Gate::h(l2), Gate::cx(l2, l3)]);
    b.extend(transversal_h(&up));
    b.extend(logical_cz(&up));
    b.extend(transversal_cx(&up, &low));
    let position = b.circuit.gates.len();
    b.extend(transversal_h(&up));
    b.measure_all();
    let mut targets = up.data.to_vec();
    targets.extend(low.data);
    (b.finish(), targets, position)
}

/// Three flagged |00>_L patches; the middle one drives both outer patches, giving two samples.
fn three_row() -> Circuit {
    let mut b = Builder::new();
    let top = b.patch(1, true, Role::Data);
    let mid = b.patch(2, true, Role::Data);
    let bot = b.patch(3, true, Role::Data);
    let t = b.c4_block(&top);
    let m = b.c4_block(&mid);
    let w = b.c4_block(&bot);
    b.circuit.samples.push(vec![m + 1, t, w]);
    b.circuit.samples.push(vec![m, t + 1, w + 1]);
    b.prep_all();
    flagged_prep_many(&mut b, &[top.clone(), mid.clone(), bot.clone()]);
    b.extend(transversal_h(&mid));
    b.extend(transversal_cx(&mid, &top));
    b.extend(transversal_cx(&mid, &bot));
    b.extend(transversal_h(&mid));
    b.measure_all();
    b.finish()
}
