//! Shot loop: tableau evolution with sampled noise, leakage and loss.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::gates::{clifford_word, is_clifford_angle, twirl_rz, unitary, Elem};
use super::noise::{IdleMode, NoiseModel};
use super::records::{circuit_hash, RecordHeader, RecordSet, ShotRecord, LOSS_MARK};
use super::tableau::{Tableau, MAX_TABLEAU_QUBITS};
use super::{Distribution, SimError};
use crate::circuit::{schedule_moments, AtomId, Circuit, GateKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Occupancy {
    InSubspace,
    LeakedA,
    LeakedB,
    Lost,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InjectEvent {
    LeakA,
    LeakB,
    Loss,
    /// Pauli letter 1=X, 2=Z, 3=Y.
    Pauli(u8),
}

/// Forced event applied to `atom` at the start of `moment` with per-shot probability `prob`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Injection {
    pub moment: usize,
    pub atom: AtomId,
    pub event: InjectEvent,
    pub prob: f64,
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub experiment: String,
    /// Worker threads; 0 uses the rayon default.
    pub threads: usize,
    pub injections: Vec<Injection>,
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub records: RecordSet,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug)]
enum Op {
    Prep(usize),
    Two(TwoKind, usize, usize),
    /// Word, targets, noise probability, and whether the noise is dephasing rather than a random Pauli.
    Clifford(Vec<Elem>, Vec<usize>, f64, bool),
    TwirlRz(usize, f64),
    Move(Vec<usize>),
    Measure(usize, usize),
}

#[derive(Clone, Copy, Debug)]
enum TwoKind {
    CZ,
    CX,
    Swap,
}

struct Program {
    n: usize,
    n_meas: usize,
    moments: Vec<Vec<Op>>,
    idle: Vec<(Vec<usize>, f64)>,
    injections: HashMap<usize, Vec<(usize, InjectEvent, f64)>>,
}

fn duration(kind: &GateKind) -> f64 {
    // In CZ-gate time units.
    match kind {
        GateKind::Move { .. } | GateKind::Measure => 5.0,
        _ => 1.0,
    }
}

fn compile(c: &Circuit, noise: &NoiseModel, opts: &RunOptions) -> Result<Program, SimError> {
    let atoms = c.atoms();
    if atoms.len() > MAX_TABLEAU_QUBITS {
        return Err(SimError::Capacity(format!("tableau holds at most {MAX_TABLEAU_QUBITS} atoms")));
    }
    let scheduled;
    let c = if c.moments.is_empty() {
        scheduled = schedule_moments(c).map_err(|e| SimError::Circuit(e.to_string()))?;
        &scheduled
    } else {
        c
    };
    let index: HashMap<AtomId, usize> = atoms.iter().enumerate().map(|(i, &a)| (a, i)).collect();
    let measured = c.measured_atoms();
    let col: HashMap<AtomId, usize> = measured.iter().enumerate().map(|(i, &a)| (a, i)).collect();
    let all: Vec<usize> = (0..atoms.len()).collect();

    let mut first: Vec<Option<usize>> = vec![None; atoms.len()];
    let mut last_meas: Vec<Option<usize>> = vec![None; atoms.len()];
    let mut moments = Vec::with_capacity(c.moments.len());
    let mut touched_per_moment = Vec::with_capacity(c.moments.len());
    let mut durations = Vec::with_capacity(c.moments.len());
    for (mi, m) in c.moments.iter().enumerate() {
        let mut ops = Vec::new();
        let mut touched = vec![false; atoms.len()];
        let mut dur: f64 = 0.0;
        for &gi in m {
            let g = &c.gates[gi];
            dur = dur.max(duration(&g.kind));
            let q: Vec<usize> = if g.kind == GateKind::ClassicalCorrection {
                Vec::new()
            } else {
                g.operands.iter().map(|a| index[a]).collect()
            };
            let op = match g.kind {
                GateKind::Prep => Some(Op::Prep(q[0])),
                GateKind::CZ => Some(Op::Two(TwoKind::CZ, q[0], q[1])),
                GateKind::CX => Some(Op::Two(TwoKind::CX, q[0], q[1])),
                GateKind::SWAP => Some(Op::Two(TwoKind::Swap, q[0], q[1])),
                GateKind::Measure => Some(Op::Measure(q[0], col[&g.operands[0]])),
                GateKind::Move { .. } => Some(Op::Move(q.clone())),
                GateKind::ClassicalCorrection => None,
                GateKind::Rz { theta } if !is_clifford_angle(theta) => {
                    if !noise.twirl {
                        return Err(SimError::Unsupported(format!("non-Clifford Rz({theta}) with twirling disabled")));
                    }
                    Some(Op::TwirlRz(q[0], theta))
                }
                GateKind::H | GateKind::X | GateKind::Rz { .. } | GateKind::GR { .. } => {
                    let u = unitary(&g.kind).unwrap();
                    let word = clifford_word(&u)
                        .ok_or_else(|| SimError::Unsupported(format!("non-Clifford gate {:?}", g.kind)))?;
                    Some(match g.kind {
                        GateKind::GR { .. } => Op::Clifford(word, all.clone(), noise.gr_pauli, false),
                        GateKind::Rz { .. } => Op::Clifford(word, q.clone(), noise.rz_dephase, true),
                        _ => Op::Clifford(word, q.clone(), noise.gr_pauli, false),
                    })
                }
            };
            let hit: Vec<usize> = if matches!(g.kind, GateKind::GR { .. }) { all.clone() } else { q };
            for &a in &hit {
                touched[a] = true;
                first[a].get_or_insert(mi);
            }
            if g.kind == GateKind::Measure {
                last_meas[hit[0]] = Some(mi);
            }
            ops.extend(op);
        }
        moments.push(ops);
        touched_per_moment.push(touched);
        durations.push(dur);
    }

    let idle = touched_per_moment
        .iter()
        .enumerate()
        .map(|(mi, touched)| {
            let atoms: Vec<usize> = (0..touched.len())
                .filter(|&a| !touched[a] && first[a].is_some_and(|f| f < mi) && last_meas[a].is_none_or(|l| l > mi))
                .collect();
            let weight = match noise.idle_mode {
                IdleMode::PerMoment => 1.0,
                IdleMode::Duration => durations[mi],
            };
            (atoms, (noise.idle_dephase * weight).min(1.0))
        })
        .collect();

    let mut injections: HashMap<usize, Vec<(usize, InjectEvent, f64)>> = HashMap::new();
    for inj in &opts.injections {
        let q = *index
            .get(&inj.atom)
            .ok_or_else(|| SimError::Circuit(format!("injection on unknown atom {}", inj.atom)))?;
        if inj.moment >= moments.len() {
            return Err(SimError::Circuit(format!("injection at moment {} beyond the circuit", inj.moment)));
        }
        injections.entry(inj.moment).or_default().push((q, inj.event, inj.prob));
    }
    Ok(Program { n: atoms.len(), n_meas: measured.len(), moments, idle, injections })
}

struct Shot<'a> {
    t: Tableau,
    occ: Vec<Occupancy>,
    out: Vec<u8>,
    noise: &'a NoiseModel,
    rng: ChaCha8Rng,
}

impl Shot<'_> {
    fn chance(&mut self, p: f64) -> bool {
        p > 0.0 && self.rng.random::<f64>() < p
    }

    fn leave_subspace(&mut self, q: usize, to: Occupancy) {
        if self.occ[q] == Occupancy::InSubspace {
            // Tracing the atom out of the register: measure and forget.
            self.t.measure(q, &mut self.rng);
        }
        if self.occ[q] != Occupancy::Lost {
            self.occ[q] = to;
        }
    }

    fn inject(&mut self, q: usize, ev: InjectEvent) {
        match ev {
            InjectEvent::LeakA => self.leave_subspace(q, Occupancy::LeakedA),
            InjectEvent::LeakB => self.leave_subspace(q, Occupancy::LeakedB),
            InjectEvent::Loss => self.leave_subspace(q, Occupancy::Lost),
            InjectEvent::Pauli(l) => {
                if self.occ[q] == Occupancy::InSubspace {
                    self.t.pauli(q, l)
                }
            }
        }
    }

    fn dephase(&mut self, q: usize, p: f64) {
        if self.occ[q] == Occupancy::InSubspace && self.chance(p) {
            self.t.z_gate(q);
        }
    }

    fn random_pauli(&mut self, q: usize, p: f64) {
        if self.occ[q] == Occupancy::InSubspace && self.chance(p) {
            let l = self.rng.random_range(1..=3u8);
            self.t.pauli(q, l);
        }
    }

    fn two_qubit_noise(&mut self, a: usize, b: usize) {
        let n = self.noise;
        let total = n.cz_pauli + n.cz_leak + n.cz_loss;
        if total <= 0.0 {
            return;
        }
        let u: f64 = self.rng.random();
        if u < n.cz_pauli {
            let wsum: f64 = n.cz_pauli_weights.iter().sum();
            let mut x = self.rng.random::<f64>() * wsum;
            let mut idx = 14;
            for (i, w) in n.cz_pauli_weights.iter().enumerate() {
                if x < *w {
                    idx = i;
                    break;
                }
                x -= w;
            }
            let code = idx as u8 + 1;
            self.t.pauli(a, code >> 2);
            self.t.pauli(b, code & 3);
        } else if u < n.cz_pauli + n.cz_leak {
            let q = if self.rng.random::<bool>() { a } else { b };
            let lvl = if self.rng.random::<bool>() { Occupancy::LeakedA } else { Occupancy::LeakedB };
            self.leave_subspace(q, lvl);
        } else if u < total {
            let q = if self.rng.random::<bool>() { a } else { b };
            self.leave_subspace(q, Occupancy::Lost);
        }
    }

    fn apply(&mut self, op: &Op) {
        let n = self.noise;
        match op {
            Op::Prep(q) => {
                let q = *q;
                if self.occ[q] == Occupancy::InSubspace {
                    if self.t.measure(q, &mut self.rng) {
                        self.t.x_gate(q);
                    }
                    if self.chance(n.prep_flip) {
                        self.t.x_gate(q);
                    }
                }
            }
            &Op::Two(kind, a, b) => {
                if self.occ[a] != Occupancy::InSubspace || self.occ[b] != Occupancy::InSubspace {
                    return;
                }
                match kind {
                    TwoKind::CZ => self.t.cz(a, b),
                    TwoKind::CX => self.t.cx(a, b),
                    TwoKind::Swap => self.t.swap(a, b),
                }
                self.two_qubit_noise(a, b);
            }
            Op::Clifford(word, targets, p, dephasing) => {
                for &q in targets {
                    if self.occ[q] != Occupancy::InSubspace {
                        continue;
                    }
                    for e in word {
                        match e {
                            Elem::H => self.t.h(q),
                            Elem::S => self.t.s(q),
                        }
                    }
                    if *dephasing {
                        self.dephase(q, *p);
                    } else {
                        self.random_pauli(q, *p);
                    }
                }
            }
            &Op::TwirlRz(q, theta) => {
                if self.occ[q] == Occupancy::InSubspace {
                    let (_, pz) = twirl_rz(theta);
                    if self.chance(pz) {
                        self.t.z_gate(q);
                    }
                    self.dephase(q, n.rz_dephase);
                }
            }
            Op::Move(qs) => {
                for &q in qs {
                    self.dephase(q, n.move_phase);
                }
            }
            &Op::Measure(q, col) => {
                let bit = match self.occ[q] {
                    Occupancy::Lost => LOSS_MARK,
                    Occupancy::LeakedA => n.leak_readout[0],
                    Occupancy::LeakedB => n.leak_readout[1],
                    Occupancy::InSubspace => {
                        if self.chance(n.meas_loss) {
                            self.leave_subspace(q, Occupancy::Lost);
                            LOSS_MARK
                        } else {
                            u8::from(self.t.measure(q, &mut self.rng))
                        }
                    }
                };
                self.out[col] = if bit != LOSS_MARK && self.chance(n.meas_flip) { bit ^ 1 } else { bit };
            }
        }
    }
}

fn run_one(prog: &Program, noise: &NoiseModel, seed: u64, shot: u64) -> ShotRecord {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shot);
    let mut s = Shot {
        t: Tableau::new(prog.n),
        occ: vec![Occupancy::InSubspace; prog.n],
        out: vec![0; prog.n_meas],
        noise,
        rng,
    };
    for (mi, ops) in prog.moments.iter().enumerate() {
        if let Some(list) = prog.injections.get(&mi) {
            for &(q, ev, p) in list {
                if p >= 1.0 || s.chance(p) {
                    s.inject(q, ev);
                }
            }
        }
        for op in ops {
            s.apply(op);
        }
        let (idle, p) = &prog.idle[mi];
        for &q in idle {
            s.dephase(q, *p);
        }
    }
    ShotRecord { shot, outcomes: s.out }
}

/// Runs `n_shots` noisy shots. Output depends only on the arguments, not on scheduling.
pub fn run_shots(circuit: &Circuit, noise: &NoiseModel, n_shots: u64, seed: u64) -> Result<RecordSet, SimError> {
    run_shots_with(circuit, noise, n_shots, seed, &RunOptions::default()).map(|o| o.records)
}

pub fn run_shots_with(
    circuit: &Circuit,
    noise: &NoiseModel,
    n_shots: u64,
    seed: u64,
    opts: &RunOptions,
) -> Result<RunOutput, SimError> {
    let (eff, warnings) = noise.effective();
    let prog = compile(circuit, &eff, opts)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.threads)
        .build()
        .map_err(|e| SimError::Unsupported(format!("thread pool: {e}")))?;
    let shots: Vec<ShotRecord> =
        pool.install(|| (0..n_shots).into_par_iter().map(|i| run_one(&prog, &eff, seed, i)).collect());
    let atoms = circuit.measured_atoms().into_iter().map(|a| (a, circuit.role(a))).collect();
    let experiment = if opts.experiment.is_empty() { "run".to_string() } else { opts.experiment.clone() };
    let header = RecordHeader {
        experiment,
        circuit_hash: circuit_hash(circuit),
        seed,
        alpha: noise.alpha,
        shots: n_shots,
        noise: noise.clone(),
        atoms,
    };
    Ok(RunOutput { records: RecordSet { header, shots }, warnings })
}

/// Random branches allowed in [`tableau_distribution`].
pub const MAX_EXACT_BRANCHES: u32 = 24;

/// Exact noiseless outcome distribution, branching the tableau at every random measurement.
pub fn tableau_distribution(circuit: &Circuit) -> Result<Distribution, SimError> {
    let prog = compile(circuit, &NoiseModel::noiseless(), &RunOptions::default())?;
    let ops: Vec<&Op> = prog.moments.iter().flatten().collect();
    if ops.iter().any(|op| matches!(op, Op::TwirlRz(..))) {
        return Err(SimError::Unsupported("non-Clifford Rz has no exact tableau distribution".into()));
    }
    let mut dist = Distribution::new();
    let mut stack = vec![(Tableau::new(prog.n), 0usize, vec![b'0'; prog.n_meas], 0u32)];
    while let Some((mut t, start, mut out, k)) = stack.pop() {
        let mut k = k;
        for (i, op) in ops.iter().enumerate().skip(start) {
            let (q, col) = match **op {
                Op::Prep(q) => (q, None),
                Op::Measure(q, col) => (q, Some(col)),
                Op::Two(kind, a, b) => {
                    match kind {
                        TwoKind::CZ => t.cz(a, b),
                        TwoKind::CX => t.cx(a, b),
                        TwoKind::Swap => t.swap(a, b),
                    }
                    continue;
                }
                Op::Clifford(ref word, ref targets, _, _) => {
                    for &q in targets {
                        for e in word {
                            match e {
                                Elem::H => t.h(q),
                                Elem::S => t.s(q),
                            }
                        }
                    }
                    continue;
                }
                Op::Move(_) | Op::TwirlRz(..) => continue,
            };
            let bit = match t.peek_z(q) {
                Some(b) => b,
                None => {
                    k += 1;
                    if k > MAX_EXACT_BRANCHES {
                        return Err(SimError::Capacity(format!("more than {MAX_EXACT_BRANCHES} random measurements")));
                    }
                    let mut other = t.clone();
                    other.measure_forced(q, true);
                    let mut other_out = out.clone();
                    match col {
                        Some(c) => other_out[c] = b'1',
                        None => other.x_gate(q),
                    }
                    stack.push((other, i + 1, other_out, k));
                    t.measure_forced(q, false);
                    false
                }
            };
            match col {
                Some(c) => out[c] = if bit { b'1' } else { b'0' },
                None if bit => t.x_gate(q),
                None => {}
            }
        }
        let key = String::from_utf8(out).expect("ascii outcome");
        *dist.entry(key).or_insert(0.0) += 0.5f64.powi(k as i32);
    }
    Ok(dist)
}
