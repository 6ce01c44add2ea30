//! Lowering of logical-tier circuits to the native neutral-atom gate set.
//!
//! CX becomes `H_t CZ H_t`. All single-qubit work is then folded into per-atom windows between
//! CZs and re-synthesised from global `GR(pi/2, 0)` pulses plus per-site Rz, with the number of
//! pulses per slot chosen to minimise the total. SWAPs are absorbed by relabelling atoms.

mod pulses;
mod schedule;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::analysis::{decode_distribution, AnalysisError, PostProcessConfig};
use crate::circuit::{
    gate_line, schedule_moments, validate, AtomId, Circuit, CircuitError, Gate, GateKind, Role, Site, Tier,
};
use crate::sim::gates::{self, Mat2};
use crate::sim::{statevector_oracle, SimError, ORACLE_MAX_QUBITS};

pub use pulses::{classify, feasible, plan_pulses, synthesize, SlotWindow, WindowClass, PULSE_PHI, PULSE_THETA};
use schedule::{Event, Layer};

/// Largest per-probability deviation accepted by [`verify_equivalence`].
pub const EQUIVALENCE_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum CompileError {
    #[error("tier error: {0}")]
    Tier(String),
    #[error("invalid input circuit: {0}")]
    Invalid(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("routing error: {0}")]
    Routing(String),
    #[error("capacity error: {0}")]
    Capacity(String),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
}

/// Flat op stream after SWAP relabelling, over physical atoms.
enum Op {
    One(AtomId, Mat2),
    Two(Event),
}

struct Stream {
    ops: Vec<Op>,
    preps: Vec<AtomId>,
    measures: Vec<AtomId>,
    corrections: Vec<Gate>,
    /// Physical atom holding each original atom at the end.
    label: BTreeMap<AtomId, AtomId>,
}

fn flatten(c: &Circuit) -> Result<Stream, CompileError> {
    let mut label: BTreeMap<AtomId, AtomId> = c.atoms().into_iter().map(|a| (a, a)).collect();
    let mut s = Stream {
        ops: Vec::new(),
        preps: Vec::new(),
        measures: Vec::new(),
        corrections: Vec::new(),
        label: BTreeMap::new(),
    };
    let mut started = BTreeSet::new();
    let mut done = BTreeSet::new();
    for (i, g) in c.gates.iter().enumerate() {
        let phys: Vec<AtomId> = g.operands.iter().map(|a| label.get(a).copied().unwrap_or(*a)).collect();
        if g.kind != GateKind::ClassicalCorrection {
            if let Some(a) = phys.iter().find(|a| done.contains(*a)) {
                return Err(CompileError::Unsupported(format!("gate {i} acts on atom {a} after its measurement")));
            }
        }
        match g.kind {
            GateKind::Prep => {
                if started.contains(&phys[0]) {
                    return Err(CompileError::Unsupported(format!("gate {i}: mid-circuit Prep on atom {}", phys[0])));
                }
                s.preps.push(phys[0]);
            }
            GateKind::Measure => {
                done.insert(phys[0]);
                s.measures.push(phys[0]);
            }
            GateKind::ClassicalCorrection => s.corrections.push(g.clone()),
            GateKind::SWAP => label_swap(&mut label, g.operands[0], g.operands[1]),
            GateKind::CX => {
                let (ctl, tgt) = (phys[0], phys[1]);
                s.ops.push(Op::One(tgt, gates::hadamard()));
                s.ops.push(Op::Two(Event::Cz(ctl, tgt)));
                s.ops.push(Op::One(tgt, gates::hadamard()));
            }
            GateKind::Move { drow, dcol } => s.ops.push(Op::Two(Event::Move(Gate::mv(&phys, drow, dcol)))),
            ref k => {
                let u = gates::unitary(k)
                    .ok_or_else(|| CompileError::Tier(format!("gate {i}: {} on the logical tier", k.tag())))?;
                s.ops.push(Op::One(phys[0], u));
            }
        }
        started.extend(phys);
    }
    s.label = label;
    Ok(s)
}

fn label_swap(label: &mut BTreeMap<AtomId, AtomId>, a: AtomId, b: AtomId) {
    let pa = label[&a];
    let pb = label[&b];
    label.insert(a, pb);
    label.insert(b, pa);
}

/// Per-atom window: slots `start..=end`, accumulated unitary, and pulses assigned later.
struct Window {
    atom: AtomId,
    start: usize,
    end: usize,
    u: Mat2,
}

fn windows(ops: &[Op], layer_of: &[usize], n_layers: usize) -> Vec<Window> {
    let mut open: BTreeMap<AtomId, (usize, Mat2)> = BTreeMap::new();
    let mut out = Vec::new();
    let mut ev = 0;
    for op in ops {
        match op {
            Op::One(a, m) => {
                let w = open.entry(*a).or_insert((0, gates::identity()));
                w.1 = gates::mat_mul(m, &w.1);
            }
            Op::Two(e) => {
                let l = layer_of[ev];
                ev += 1;
                match e {
                    Event::Cz(a, b) => {
                        for x in [*a, *b] {
                            let (start, u) = open.remove(&x).unwrap_or((0, gates::identity()));
                            out.push(Window { atom: x, start, end: l, u });
                            open.insert(x, (l + 1, gates::identity()));
                        }
                    }
                    Event::Move(g) => {
                        for &x in &g.operands {
                            open.entry(x).or_insert((0, gates::identity()));
                        }
                    }
                }
            }
        }
    }
    for (atom, (start, u)) in open {
        out.push(Window { atom, start, end: n_layers, u });
    }
    out
}

/// Class of every window of every atom, independent of layering.
fn window_classes(ops: &[Op]) -> BTreeMap<AtomId, Vec<WindowClass>> {
    let mut acc: BTreeMap<AtomId, (Vec<WindowClass>, Mat2)> = BTreeMap::new();
    for op in ops {
        match op {
            Op::One(a, m) => {
                let e = acc.entry(*a).or_insert((Vec::new(), gates::identity()));
                e.1 = gates::mat_mul(m, &e.1);
            }
            Op::Two(Event::Cz(a, b)) => {
                for x in [*a, *b] {
                    let e = acc.entry(x).or_insert((Vec::new(), gates::identity()));
                    e.0.push(classify(&e.1));
                    e.1 = gates::identity();
                }
            }
            Op::Two(Event::Move(_)) => {}
        }
    }
    acc.into_iter()
        .map(|(a, (mut v, u))| {
            v.push(classify(&u));
            (a, v)
        })
        .collect()
}

struct Plan {
    layers: Vec<Layer>,
    windows: Vec<Window>,
    pulses: Vec<usize>,
}

fn plan(ops: &[Op], events: &[Event], layers: Vec<Layer>, extra: &BTreeSet<AtomId>) -> Result<Plan, CompileError> {
    let mut layer_of = vec![0; events.len()];
    for (j, l) in layers.iter().enumerate() {
        for &e in &l.events {
            layer_of[e] = j;
        }
    }
    let mut ws = windows(ops, &layer_of, layers.len());
    // Atoms that are only prepared or measured still see every pulse.
    let seen: BTreeSet<AtomId> = ws.iter().map(|w| w.atom).collect();
    for &a in extra.difference(&seen) {
        ws.push(Window { atom: a, start: 0, end: layers.len(), u: gates::identity() });
    }
    let slots: Vec<SlotWindow> =
        ws.iter().map(|w| SlotWindow { start: w.start, end: w.end, class: classify(&w.u) }).collect();
    let pulses = plan_pulses(layers.len() + 1, &slots)
        .ok_or_else(|| CompileError::Unsupported("no feasible pulse plan".into()))?;
    Ok(Plan { layers, windows: ws, pulses })
}

fn check_routing(c: &Circuit, events: &[Event], layers: &[Layer]) -> Result<(), CompileError> {
    let mut pos: BTreeMap<AtomId, Site> = c.grid.occupancy.clone();
    for (j, l) in layers.iter().enumerate() {
        for &e in &l.events {
            match &events[e] {
                Event::Cz(a, b) => {
                    let (sa, sb) = (pos[a], pos[b]);
                    if (sa.row - sb.row).abs() + (sa.col - sb.col).abs() != 1 {
                        return Err(CompileError::Routing(format!(
                            "layer {j}: CZ on atoms {a} at ({}, {}) and {b} at ({}, {}) which are not neighbours",
                            sa.row, sa.col, sb.row, sb.col
                        )));
                    }
                }
                Event::Move(g) => {
                    if let GateKind::Move { drow, dcol } = g.kind {
                        for a in &g.operands {
                            let s = pos[a];
                            pos.insert(*a, Site::new(s.row + drow, s.col + dcol));
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

/// Lowers a logical-tier circuit to the native gate set.
///
/// The output is scheduled into moments: preparations, then per slot the pulse train with its Rz
/// layers, then the slot's CZ or Move layer, and finally the measurements and corrections.
pub fn lower(c: &Circuit) -> Result<Circuit, CompileError> {
    if c.tier != Tier::Logical {
        return Err(CompileError::Tier("lower expects a logical-tier circuit".into()));
    }
    let bad = validate(c);
    if !bad.is_empty() {
        return Err(CompileError::Invalid(bad.join("; ")));
    }
    let s = flatten(c)?;
    let events: Vec<Event> = s
        .ops
        .iter()
        .filter_map(|o| match o {
            Op::Two(e) => Some(e.clone()),
            Op::One(..) => None,
        })
        .collect();
    let extra: BTreeSet<AtomId> = s.preps.iter().chain(&s.measures).copied().collect();
    // Try several layerings and keep whichever needs the fewest pulses.
    let classes = window_classes(&s.ops);
    let mut best: Option<Plan> = None;
    for layers in [schedule::greedy(&events, &classes), schedule::asap(&events), schedule::alap(&events)] {
        let p = plan(&s.ops, &events, layers, &extra)?;
        let total: usize = p.pulses.iter().sum();
        if best.as_ref().is_none_or(|b| total < b.pulses.iter().sum()) {
            best = Some(p);
        }
    }
    let p = best.expect("two candidate plans");
    check_routing(c, &events, &p.layers)?;
    emit(c, &s, &events, &p)
}

fn emit(c: &Circuit, s: &Stream, events: &[Event], p: &Plan) -> Result<Circuit, CompileError> {
    let n_slots = p.layers.len() + 1;
    // (slot, pulse within slot) -> Rz before that pulse; slot -> closing Rz.
    let mut before: BTreeMap<(usize, usize), Vec<(AtomId, f64)>> = BTreeMap::new();
    let mut closing: Vec<Vec<(AtomId, f64)>> = vec![Vec::new(); n_slots];
    for w in &p.windows {
        let fired: Vec<(usize, usize)> =
            (w.start..=w.end).flat_map(|sl| (0..p.pulses[sl]).map(move |k| (sl, k))).collect();
        let angles = synthesize(&w.u, fired.len()).ok_or_else(|| {
            CompileError::Unsupported(format!("atom {}: single-qubit window is not Clifford", w.atom))
        })?;
        for (k, at) in fired.iter().enumerate() {
            before.entry(*at).or_default().push((w.atom, angles[k]));
        }
        closing[w.end].push((w.atom, angles[fired.len()]));
    }

    let mut out = Circuit::new(Tier::Physical, c.grid.clone());
    for (&v, &r) in &c.roles {
        let r = match r {
            Role::LduFlag(t) => Role::LduFlag(s.label.get(&t).copied().unwrap_or(t)),
            r => r,
        };
        out.roles.insert(s.label.get(&v).copied().unwrap_or(v), r);
    }
    out.blocks = c.blocks.clone();
    for b in &mut out.blocks {
        for a in &mut b.atoms {
            *a = s.label.get(a).copied().unwrap_or(*a);
        }
    }
    out.samples = c.samples.clone();

    let moment = |out: &mut Circuit, gs: Vec<Gate>| {
        if gs.is_empty() {
            return;
        }
        let start = out.gates.len();
        out.gates.extend(gs);
        out.moments.push((start..out.gates.len()).collect());
    };
    let rz_layer = |mut v: Vec<(AtomId, f64)>| -> Vec<Gate> {
        v.sort_by_key(|x| x.0);
        v.into_iter()
            .map(|(a, t)| (a, gates::wrap_angle(t)))
            .filter(|(_, t)| t.abs() > gates::ANGLE_EPS)
            .map(|(a, t)| Gate::rz(t, a))
            .collect()
    };

    moment(&mut out, s.preps.iter().map(|&a| Gate::prep(a)).collect());
    for sl in 0..n_slots {
        for k in 0..p.pulses[sl] {
            let rz = before.remove(&(sl, k)).unwrap_or_default();
            moment(&mut out, rz_layer(rz));
            moment(&mut out, vec![Gate::gr(PULSE_THETA, PULSE_PHI)]);
        }
        moment(&mut out, rz_layer(std::mem::take(&mut closing[sl])));
        if let Some(l) = p.layers.get(sl) {
            let gs = l
                .events
                .iter()
                .map(|&e| match &events[e] {
                    Event::Cz(a, b) => Gate::cz(*a, *b),
                    Event::Move(g) => g.clone(),
                })
                .collect();
            moment(&mut out, gs);
        }
    }
    moment(&mut out, s.measures.iter().map(|&a| Gate::measure(a)).collect());
    for g in &s.corrections {
        moment(&mut out, vec![g.clone()]);
    }
    let bad = validate(&out);
    if !bad.is_empty() {
        return Err(CompileError::Routing(bad.join("; ")));
    }
    Ok(out)
}

/// Noiselessly compares a lowered circuit against a logical one after decoding.
///
/// Both circuits are simulated exactly, flag-conditioned and decoded with the default
/// post-processing; the decoded word distributions must agree to [`EQUIVALENCE_TOL`].
pub fn verify_equivalence(logical: &Circuit, physical: &Circuit) -> Result<bool, CompileError> {
    for c in [logical, physical] {
        if c.n_atoms() > ORACLE_MAX_QUBITS {
            return Err(CompileError::Capacity(format!(
                "{} atoms exceed the {ORACLE_MAX_QUBITS}-qubit oracle cap",
                c.n_atoms()
            )));
        }
    }
    let cfg = PostProcessConfig::default();
    let want = decode_distribution(&statevector_oracle(logical)?, logical, &cfg)?;
    let got = decode_distribution(&statevector_oracle(physical)?, physical, &cfg)?;
    if got.accepted <= EQUIVALENCE_TOL || want.accepted <= EQUIVALENCE_TOL {
        return Ok(false);
    }
    let keys: BTreeSet<&String> = want.words.keys().chain(got.words.keys()).collect();
    let same = keys.into_iter().all(|k| {
        let a = want.words.get(k).copied().unwrap_or(0.0);
        let b = got.words.get(k).copied().unwrap_or(0.0);
        (a - b).abs() <= EQUIVALENCE_TOL
    });
    Ok(same)
}

/// Human-readable schedule, one moment per line.
pub fn timeline(c: &Circuit) -> Result<String, CompileError> {
    let scheduled;
    let c = if c.moments.is_empty() {
        scheduled = schedule_moments(c)?;
        &scheduled
    } else {
        c
    };
    let width = c.moments.len().saturating_sub(1).to_string().len();
    let mut out = String::new();
    for (m, layer) in c.moments.iter().enumerate() {
        let gs: Vec<String> = layer.iter().map(|&g| gate_line(&c.gates[g])).collect();
        out.push_str(&format!("{m:>width$}  {}\n", gs.join(" | ")));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{count_gates, KindTag, SiteGrid};

    fn pair() -> Circuit {
        let mut g = SiteGrid::new(2, 3);
        g.place(0, Site::new(0, 0));
        g.place(1, Site::new(0, 1));
        g.place(2, Site::new(1, 2));
        let mut c = Circuit::new(Tier::Logical, g);
        for a in 0..3 {
            c.roles.insert(a, Role::Data);
        }
        c.blocks = (0..2)
            .map(|a| crate::circuit::Block { encoding: crate::circuit::Encoding::Bare, atoms: vec![a] })
            .collect();
        c.samples = vec![vec![0, 1]];
        c
    }

    #[test]
    fn bell_pair_lowers_to_one_cz() {
        let mut c = pair();
        c.extend([Gate::prep(0), Gate::prep(1), Gate::h(0), Gate::cx(0, 1), Gate::measure(0), Gate::measure(1)]);
        let p = lower(&c).unwrap();
        let n = count_gates(&p).unwrap();
        assert_eq!(n[&KindTag::CZ], 1);
        // The control idles after the CZ, so that slot cannot fire a single pulse.
        assert_eq!(n[&KindTag::GR], 3);
        assert!(verify_equivalence(&c, &p).unwrap());
    }

    #[test]
    fn identity_circuit_needs_no_pulses() {
        let mut c = pair();
        c.extend([Gate::prep(0), Gate::prep(1), Gate::measure(0), Gate::measure(1)]);
        let p = lower(&c).unwrap();
        let n = count_gates(&p).unwrap();
        assert!(!n.contains_key(&KindTag::GR) && !n.contains_key(&KindTag::CZ));
    }

    #[test]
    fn swap_is_a_relabelling() {
        let mut c = pair();
        c.extend([Gate::prep(0), Gate::prep(1), Gate::x(0), Gate::swap(0, 1), Gate::measure(0), Gate::measure(1)]);
        let p = lower(&c).unwrap();
        assert!(!p.gates.iter().any(|g| g.kind == GateKind::CZ));
        assert_eq!(p.blocks[0].atoms, vec![1]);
        assert!(verify_equivalence(&c, &p).unwrap());
    }

    #[test]
    fn distant_cz_is_a_routing_error() {
        let mut c = pair();
        c.extend([Gate::cx(0, 2), Gate::measure(0), Gate::measure(1)]);
        assert!(matches!(lower(&c), Err(CompileError::Routing(_))));
    }

    #[test]
    fn physical_input_is_rejected() {
        let mut c = pair();
        c.tier = Tier::Physical;
        assert!(matches!(lower(&c), Err(CompileError::Tier(_))));
    }

    #[test]
    fn timeline_has_one_line_per_moment() {
        let mut c = pair();
        c.extend([Gate::prep(0), Gate::prep(1), Gate::h(0), Gate::cx(0, 1), Gate::measure(0), Gate::measure(1)]);
        let p = lower(&c).unwrap();
        let t = timeline(&p).unwrap();
        assert_eq!(t.lines().count(), p.moments.len());
        assert!(t.contains("CZ @0 1"));
    }
}
