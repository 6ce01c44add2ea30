//! Exact statevector reference simulator for small noiseless circuits.

use std::collections::{BTreeMap, HashMap, HashSet};

use num_complex::Complex64 as C;

use super::gates::{hadamard, pauli_x, unitary, Mat2};
use super::{Distribution, SimError};
use crate::circuit::{AtomId, Circuit, GateKind};

pub const ORACLE_MAX_QUBITS: usize = 20;

struct State {
    amp: Vec<C>,
}

impl State {
    fn new(n: usize) -> Self {
        let mut amp = vec![C::new(0.0, 0.0); 1 << n];
        amp[0] = C::new(1.0, 0.0);
        State { amp }
    }

    fn apply1(&mut self, q: usize, m: &Mat2) {
        let b = 1usize << q;
        for i in 0..self.amp.len() {
            if i & b == 0 {
                let (a0, a1) = (self.amp[i], self.amp[i | b]);
                self.amp[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amp[i | b] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    fn cz(&mut self, a: usize, b: usize) {
        let mask = (1usize << a) | (1usize << b);
        for (i, x) in self.amp.iter_mut().enumerate() {
            if i & mask == mask {
                *x = -*x;
            }
        }
    }

    fn cx(&mut self, c: usize, t: usize) {
        let (bc, bt) = (1usize << c, 1usize << t);
        for i in 0..self.amp.len() {
            if i & bc != 0 && i & bt == 0 {
                self.amp.swap(i, i | bt);
            }
        }
    }

    fn swap(&mut self, a: usize, b: usize) {
        let (ba, bb) = (1usize << a, 1usize << b);
        for i in 0..self.amp.len() {
            if i & ba != 0 && i & bb == 0 {
                self.amp.swap(i, (i & !ba) | bb);
            }
        }
    }
}

/// Gate indices in execution order: by moment when scheduled, else list order.
pub(crate) fn execution_order(c: &Circuit) -> Vec<usize> {
    if c.moments.is_empty() {
        (0..c.gates.len()).collect()
    } else {
        c.moments.iter().flat_map(|m| m.iter().copied()).collect()
    }
}

/// Exact outcome distribution over `circuit.measured_atoms()` (in that order).
///
/// Measurements must be terminal for the atoms they read. Classical corrections are ignored here;
/// they act on decoded bits during post-processing.
pub fn statevector_oracle(circuit: &Circuit) -> Result<Distribution, SimError> {
    let atoms = circuit.atoms();
    if atoms.len() > ORACLE_MAX_QUBITS {
        return Err(SimError::Capacity(format!(
            "statevector oracle holds at most {ORACLE_MAX_QUBITS} qubits, circuit has {}",
            atoms.len()
        )));
    }
    let index: HashMap<AtomId, usize> = atoms.iter().enumerate().map(|(i, &a)| (a, i)).collect();
    let mut st = State::new(atoms.len());
    let mut touched: HashSet<AtomId> = HashSet::new();
    let mut measured: HashSet<AtomId> = HashSet::new();

    for gi in execution_order(circuit) {
        let g = &circuit.gates[gi];
        let q = |k: usize| index[&g.operands[k]];
        if !matches!(g.kind, GateKind::GR { .. } | GateKind::ClassicalCorrection | GateKind::Move { .. }) {
            if let Some(a) = g.operands.iter().find(|a| measured.contains(a)) {
                return Err(SimError::Unsupported(format!("gate {gi} acts on atom {a} after its measurement")));
            }
        }
        match g.kind {
            GateKind::Prep => {
                if touched.contains(&g.operands[0]) {
                    return Err(SimError::Unsupported(format!("mid-circuit reset at gate {gi}")));
                }
            }
            GateKind::Measure => {
                measured.insert(g.operands[0]);
            }
            GateKind::Move { .. } | GateKind::ClassicalCorrection => {}
            GateKind::CZ => st.cz(q(0), q(1)),
            GateKind::CX => st.cx(q(0), q(1)),
            GateKind::SWAP => st.swap(q(0), q(1)),
            GateKind::H => st.apply1(q(0), &hadamard()),
            GateKind::X => st.apply1(q(0), &pauli_x()),
            GateKind::Rz { .. } => st.apply1(q(0), &unitary(&g.kind).unwrap()),
            GateKind::GR { .. } => {
                let m = unitary(&g.kind).unwrap();
                for &a in &atoms {
                    if !measured.contains(&a) {
                        st.apply1(index[&a], &m);
                    }
                }
            }
        }
        if g.kind != GateKind::ClassicalCorrection {
            touched.extend(g.operands.iter().copied());
        }
    }

    let order: Vec<usize> = circuit.measured_atoms().iter().map(|a| index[a]).collect();
    let mut dist: BTreeMap<String, f64> = BTreeMap::new();
    for (i, a) in st.amp.iter().enumerate() {
        let p = a.norm_sqr();
        if p < 1e-300 {
            continue;
        }
        let key: String = order.iter().map(|&q| if i >> q & 1 == 1 { '1' } else { '0' }).collect();
        *dist.entry(key).or_insert(0.0) += p;
    }
    Ok(dist)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{Gate, Role, Site, SiteGrid, Tier};

    fn line(n: u32) -> Circuit {
        let mut g = SiteGrid::new(1, n as i32);
        for a in 0..n {
            g.place(a, Site::new(0, a as i32));
        }
        let mut c = Circuit::new(Tier::Logical, g);
        for a in 0..n {
            c.roles.insert(a, Role::Data);
        }
        c
    }

    #[test]
    fn bell_pair() {
        let mut c = line(2);
        c.extend([Gate::h(0), Gate::cx(0, 1), Gate::measure(0), Gate::measure(1)]);
        let d = statevector_oracle(&c).unwrap();
        assert_eq!(d.len(), 2);
        assert!((d["00"] - 0.5).abs() < 1e-12 && (d["11"] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn ghz4() {
        let mut c = line(4);
        c.extend([Gate::h(0), Gate::cx(0, 1), Gate::cx(1, 2), Gate::cx(2, 3)]);
        c.extend((0..4).map(Gate::measure));
        let d = statevector_oracle(&c).unwrap();
        assert!((d["0000"] - 0.5).abs() < 1e-12 && (d["1111"] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn three_qubit_shor_by_hand() {
        // H; CX(0,1); CX(0,2); H: (|000> + |011>)/sqrt2 then H on 0 gives four equal terms.
        let mut c = line(3);
        c.extend([Gate::h(0), Gate::cx(0, 1), Gate::cx(0, 2), Gate::h(0)]);
        c.extend((0..3).map(Gate::measure));
        let d = statevector_oracle(&c).unwrap();
        let keys: Vec<&str> = d.keys().map(|s| s.as_str()).collect();
        assert_eq!(keys, ["000", "011", "100", "111"]);
        assert!(d.values().all(|p| (p - 0.25).abs() < 1e-12));
    }

    #[test]
    fn cap_enforced() {
        let c = line(21);
        assert!(matches!(statevector_oracle(&c), Err(SimError::Capacity(_))));
    }
}
