//! Patch placement, flagged preparation and LDU insertion.

use std::collections::BTreeSet;

use super::BuildError;
use crate::circuit::{AtomId, Block, Circuit, Encoding, Gate, Role, Site, SiteGrid, Tier};
use crate::codes::c4_code;

/// Data atoms occupy columns 1..=4; the flag starts in column 5 and is moved to column 0.
pub const DATA_COL0: i32 = 1;
pub const FLAG_COL: i32 = 5;
pub const FLAG_SHIFT: i32 = -5;

#[derive(Clone, Debug)]
pub struct Patch {
    pub row: i32,
    pub data: [AtomId; 4],
    pub flag: Option<AtomId>,
}

/// Hands out atom ids and places them on the grid.
pub struct Builder {
    pub circuit: Circuit,
    next: AtomId,
}

impl Builder {
    pub fn new() -> Self {
        Builder { circuit: Circuit::new(Tier::Logical, SiteGrid::default_array()), next: 0 }
    }

    pub fn atom(&mut self, row: i32, col: i32, role: Role) -> AtomId {
        let a = self.next;
        self.next += 1;
        self.circuit.grid.place(a, Site::new(row, col));
        self.circuit.roles.insert(a, role);
        a
    }

    /// A [[4,2,2]] patch on `row`, optionally with a preparation flag.
    pub fn patch(&mut self, row: i32, flagged: bool, role: Role) -> Patch {
        let data = [0, 1, 2, 3].map(|i| self.atom(row, DATA_COL0 + i, role));
        let flag = flagged.then(|| self.atom(row, FLAG_COL, Role::PrepFlag));
        Patch { row, data, flag }
    }

    pub fn c4_block(&mut self, p: &Patch) -> u32 {
        self.block(Encoding::C4, p.data.to_vec())
    }

    /// Adds a readout block and returns the id of its first logical bit.
    pub fn block(&mut self, encoding: Encoding, atoms: Vec<AtomId>) -> u32 {
        let first = self.circuit.n_logical_bits() as u32;
        self.circuit.blocks.push(Block { encoding, atoms });
        first
    }

    pub fn push(&mut self, g: Gate) {
        self.circuit.push(g);
    }

    pub fn extend(&mut self, gs: impl IntoIterator<Item = Gate>) {
        self.circuit.extend(gs);
    }

    pub fn prep_all(&mut self) {
        let atoms = self.circuit.atoms();
        self.extend(atoms.into_iter().map(Gate::prep));
    }

    pub fn measure_all(&mut self) {
        let atoms = self.circuit.atoms();
        self.extend(atoms.into_iter().map(Gate::measure));
    }

    pub fn finish(self) -> Circuit {
        self.circuit
    }
}

/// Flagged |00>_L preparation split around the flag move.
pub fn flagged_prep(p: &Patch) -> (Vec<Gate>, Vec<Gate>) {
    let [d0, d1, d2, d3] = p.data;
    let f = p.flag.expect("flagged patch");
    (vec![Gate::h(d1), Gate::cx(d1, d2), Gate::cx(d1, d0), Gate::cx(d2, d3), Gate::cx(d3, f)], vec![Gate::cx(d0, f)])
}

/// Prepares every patch with its flag, moving the whole flag column at once.
pub fn flagged_prep_many(b: &mut Builder, patches: &[Patch]) {
    let mut flags = Vec::new();
    let mut post = Vec::new();
    for p in patches {
        let (pre, after) = flagged_prep(p);
        b.extend(pre);
        post.extend(after);
        flags.push(p.flag.expect("flagged patch"));
    }
    b.push(Gate::mv(&flags, 0, FLAG_SHIFT));
    b.extend(post);
}

pub fn transversal_h(p: &Patch) -> Vec<Gate> {
    p.data.iter().map(|&a| Gate::h(a)).collect()
}

pub fn transversal_cx(c: &Patch, t: &Patch) -> Vec<Gate> {
    c.data.iter().zip(t.data.iter()).map(|(&a, &b)| Gate::cx(a, b)).collect()
}

/// Physical X gates realising logical X on qubit `j` of a patch.
pub fn logical_x(p: &Patch, j: usize) -> Vec<Gate> {
    let op = &c4_code().logical_x[j];
    op.support().into_iter().map(|q| Gate::x(p.data[q])).collect()
}

/// Logical CZ between the two qubits of one patch, as per-atom phases.
pub fn logical_cz(p: &Patch) -> Vec<Gate> {
    use std::f64::consts::FRAC_PI_2;
    let [d0, d1, d2, d3] = p.data;
    vec![Gate::rz(FRAC_PI_2, d0), Gate::rz(-FRAC_PI_2, d1), Gate::rz(-FRAC_PI_2, d2), Gate::rz(FRAC_PI_2, d3)]
}

/// Adds one leakage detection unit per target before gate index `position`.
///
/// Each flag sits directly above or below its target and starts in |1>: X on the flag, then
/// CX(t, f), X(t), CX(t, f), X(t). The flag reads 0 exactly when the target stayed in the qubit
/// subspace. Flag preparation goes to the front of the circuit and its measurement to the end.
pub fn insert_ldus(circuit: &Circuit, targets: &[AtomId], position: usize) -> Result<Circuit, BuildError> {
    if position > circuit.gates.len() {
        return Err(BuildError::Spec(format!("insertion point {position} beyond the circuit")));
    }
    let mut c = circuit.clone();
    c.moments.clear();
    let mut taken: BTreeSet<Site> = c.grid.occupancy.values().copied().collect();
    // Sites visited by moved atoms are also off limits.
    for g in &c.gates {
        if let crate::circuit::GateKind::Move { drow, dcol } = g.kind {
            for a in &g.operands {
                let s = c.grid.occupancy[a];
                taken.insert(Site::new(s.row + drow, s.col + dcol));
            }
        }
    }
    let mut next = c.grid.occupancy.keys().max().map_or(0, |m| m + 1);
    let mut preps = Vec::new();
    let mut body = Vec::new();
    let mut meas = Vec::new();
    for &t in targets {
        if c.role(t) != Role::Data {
            return Err(BuildError::Spec(format!("LDU target {t} is not a data atom")));
        }
        let s = c.grid.occupancy[&t];
        let site = [Site::new(s.row - 1, s.col), Site::new(s.row + 1, s.col)]
            .into_iter()
            .find(|x| c.grid.contains(*x) && !taken.contains(x))
            .ok_or(BuildError::NoFreeSite(t))?;
        taken.insert(site);
        let f = next;
        next += 1;
        c.grid.place(f, site);
        c.roles.insert(f, Role::LduFlag(t));
        preps.push(Gate::prep(f));
        body.extend([Gate::x(f), Gate::cx(t, f), Gate::x(t), Gate::cx(t, f), Gate::x(t)]);
        meas.push(Gate::measure(f));
    }
    let mut gates = preps;
    gates.extend_from_slice(&c.gates[..position]);
    gates.extend(body);
    gates.extend_from_slice(&c.gates[position..]);
    gates.extend(meas);
    c.gates = gates;
    Ok(c)
}
