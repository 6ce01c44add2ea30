//! Two-tier circuit IR over a 2D site grid.
//!
//! Logical-tier circuits use CX/H/X/SWAP; physical-tier circuits use the native set
//! (Prep, CZ, GR, Rz, Move, Measure). Prep, Move, Measure and classical corrections appear in both.

mod text;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

pub(crate) use text::{gate_line, parse_role, role_name};
pub use text::{parse_circuit, write_circuit};

pub type AtomId = u32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CircuitError {
    #[error("tier error: {0}")]
    Tier(String),
    #[error("structural error: {0}")]
    Structure(String),
    #[error("parse error: {0}")]
    Parse(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Site {
    pub row: i32,
    pub col: i32,
}

impl Site {
    pub fn new(row: i32, col: i32) -> Self {
        Site { row, col }
    }
}

/// Trap array with the current atom placement.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SiteGrid {
    pub rows: i32,
    pub cols: i32,
    /// Atom placement at the start of the circuit.
    pub occupancy: BTreeMap<AtomId, Site>,
    /// Whether atoms may pass through interstitial lanes while moving.
    pub lanes: bool,
}

impl SiteGrid {
    pub fn new(rows: i32, cols: i32) -> Self {
        SiteGrid { rows, cols, occupancy: BTreeMap::new(), lanes: true }
    }

    /// The 14 x 16 trap array used by the experiments.
    pub fn default_array() -> Self {
        SiteGrid::new(14, 16)
    }

    pub fn contains(&self, s: Site) -> bool {
        (0..self.rows).contains(&s.row) && (0..self.cols).contains(&s.col)
    }

    pub fn place(&mut self, atom: AtomId, site: Site) {
        self.occupancy.insert(atom, site);
    }

    pub fn atoms(&self) -> impl Iterator<Item = AtomId> + '_ {
        self.occupancy.keys().copied()
    }

    pub fn site_map(&self) -> HashMap<Site, AtomId> {
        self.occupancy.iter().map(|(&a, &s)| (s, a)).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GateKind {
    /// Reset to |0>.
    Prep,
    CZ,
    /// Global rotation by `theta` about the equatorial axis at angle `phi`; acts on every atom.
    GR {
        theta: f64,
        phi: f64,
    },
    Rz {
        theta: f64,
    },
    /// Parallel displacement of all operand atoms.
    Move {
        drow: i32,
        dcol: i32,
    },
    Measure,
    CX,
    H,
    X,
    SWAP,
    /// Flip logical bit `operands[0]` by the parity of logical bits `operands[1..]`.
    ClassicalCorrection,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum KindTag {
    Prep,
    CZ,
    GR,
    Rz,
    Move,
    Measure,
    CX,
    H,
    X,
    SWAP,
    ClassicalCorrection,
}

impl KindTag {
    pub fn name(self) -> &'static str {
        match self {
            KindTag::Prep => "PREP",
            KindTag::CZ => "CZ",
            KindTag::GR => "GR",
            KindTag::Rz => "RZ",
            KindTag::Move => "MOVE",
            KindTag::Measure => "MEASURE",
            KindTag::CX => "CX",
            KindTag::H => "H",
            KindTag::X => "X",
            KindTag::SWAP => "SWAP",
            KindTag::ClassicalCorrection => "CC",
        }
    }
}

impl fmt::Display for KindTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl GateKind {
    pub fn tag(&self) -> KindTag {
        match self {
            GateKind::Prep => KindTag::Prep,
            GateKind::CZ => KindTag::CZ,
            GateKind::GR { .. } => KindTag::GR,
            GateKind::Rz { .. } => KindTag::Rz,
            GateKind::Move { .. } => KindTag::Move,
            GateKind::Measure => KindTag::Measure,
            GateKind::CX => KindTag::CX,
            GateKind::H => KindTag::H,
            GateKind::X => KindTag::X,
            GateKind::SWAP => KindTag::SWAP,
            GateKind::ClassicalCorrection => KindTag::ClassicalCorrection,
        }
    }

    /// Gate kinds that only exist on the logical tier.
    pub fn is_logical_only(&self) -> bool {
        matches!(self, GateKind::CX | GateKind::H | GateKind::X | GateKind::SWAP)
    }

    /// Gate kinds that only exist on the physical tier. Rz is shared: diagonal phases are how
    /// in-patch logical CZ is written before compilation.
    pub fn is_physical_only(&self) -> bool {
        matches!(self, GateKind::CZ | GateKind::GR { .. })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    pub operands: Vec<AtomId>,
}

impl Gate {
    pub fn new(kind: GateKind, operands: &[AtomId]) -> Self {
        Gate { kind, operands: operands.to_vec() }
    }
    pub fn prep(a: AtomId) -> Self {
        Gate::new(GateKind::Prep, &[a])
    }
    pub fn measure(a: AtomId) -> Self {
        Gate::new(GateKind::Measure, &[a])
    }
    pub fn cx(c: AtomId, t: AtomId) -> Self {
        Gate::new(GateKind::CX, &[c, t])
    }
    pub fn cz(a: AtomId, b: AtomId) -> Self {
        Gate::new(GateKind::CZ, &[a, b])
    }
    pub fn h(a: AtomId) -> Self {
        Gate::new(GateKind::H, &[a])
    }
    pub fn x(a: AtomId) -> Self {
        Gate::new(GateKind::X, &[a])
    }
    pub fn swap(a: AtomId, b: AtomId) -> Self {
        Gate::new(GateKind::SWAP, &[a, b])
    }
    pub fn rz(theta: f64, a: AtomId) -> Self {
        Gate::new(GateKind::Rz { theta }, &[a])
    }
    pub fn gr(theta: f64, phi: f64) -> Self {
        Gate::new(GateKind::GR { theta, phi }, &[])
    }
    pub fn mv(block: &[AtomId], drow: i32, dcol: i32) -> Self {
        Gate::new(GateKind::Move { drow, dcol }, block)
    }
    pub fn correction(target: u32, sources: &[u32]) -> Self {
        let mut ops = vec![target];
        ops.extend_from_slice(sources);
        Gate::new(GateKind::ClassicalCorrection, &ops)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Tier {
    Logical,
    Physical,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Role {
    Data,
    PrepFlag,
    /// LDU flag watching the given data atom.
    LduFlag(AtomId),
    Ancilla,
    Unused,
}

/// How a readout block maps measured bits to logical bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Encoding {
    /// One atom, one logical bit.
    Bare,
    /// [[4,2,2]] patch.
    C4,
    /// [[16,4,4]] level-2 many-hypercube block.
    Hypercube,
}

impl Encoding {
    pub fn n(self) -> usize {
        match self {
            Encoding::Bare => 1,
            Encoding::C4 => 4,
            Encoding::Hypercube => 16,
        }
    }
    pub fn k(self) -> usize {
        match self {
            Encoding::Bare => 1,
            Encoding::C4 => 2,
            Encoding::Hypercube => 4,
        }
    }
    pub fn name(self) -> &'static str {
        match self {
            Encoding::Bare => "bare",
            Encoding::C4 => "c4",
            Encoding::Hypercube => "hypercube",
        }
    }
}

/// Measured atoms that decode together. Atom order is the code's qubit order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub encoding: Encoding,
    pub atoms: Vec<AtomId>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    pub tier: Tier,
    pub grid: SiteGrid,
    pub roles: BTreeMap<AtomId, Role>,
    /// Readout blocks; logical bit ids number the blocks' logical qubits in order.
    pub blocks: Vec<Block>,
    /// Output words: each is an ordered list of logical bit ids.
    pub samples: Vec<Vec<u32>>,
    pub gates: Vec<Gate>,
    /// Partition of gate indices into parallel layers; empty when unscheduled.
    pub moments: Vec<Vec<usize>>,
}

impl Circuit {
    pub fn new(tier: Tier, grid: SiteGrid) -> Self {
        Circuit {
            tier,
            grid,
            roles: BTreeMap::new(),
            blocks: Vec::new(),
            samples: Vec::new(),
            gates: Vec::new(),
            moments: Vec::new(),
        }
    }

    pub fn push(&mut self, g: Gate) {
        self.gates.push(g);
    }

    pub fn extend(&mut self, gs: impl IntoIterator<Item = Gate>) {
        self.gates.extend(gs);
    }

    pub fn atoms(&self) -> Vec<AtomId> {
        self.grid.atoms().collect()
    }

    pub fn n_atoms(&self) -> usize {
        self.grid.occupancy.len()
    }

    /// Number of logical bits across all blocks.
    pub fn n_logical_bits(&self) -> usize {
        self.blocks.iter().map(|b| b.encoding.k()).sum()
    }

    /// (block index, index within block) for each logical bit id.
    pub fn logical_bit_map(&self) -> Vec<(usize, usize)> {
        self.blocks.iter().enumerate().flat_map(|(b, blk)| (0..blk.encoding.k()).map(move |j| (b, j))).collect()
    }

    /// Atoms measured somewhere in the circuit, in first-measurement order.
    pub fn measured_atoms(&self) -> Vec<AtomId> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for g in self.gates.iter().filter(|g| g.kind == GateKind::Measure) {
            if let Some(&a) = g.operands.first() {
                if seen.insert(a) {
                    out.push(a);
                }
            }
        }
        out
    }

    pub fn corrections(&self) -> impl Iterator<Item = &Gate> {
        self.gates.iter().filter(|g| g.kind == GateKind::ClassicalCorrection)
    }

    pub fn role(&self, a: AtomId) -> Role {
        self.roles.get(&a).copied().unwrap_or(Role::Unused)
    }

    /// Atoms a gate depends on for ordering purposes.
    fn touched(&self, g: &Gate, all: &[AtomId]) -> Vec<AtomId> {
        match g.kind {
            GateKind::GR { .. } => all.to_vec(),
            GateKind::ClassicalCorrection => {
                let map = self.logical_bit_map();
                let mut out = BTreeSet::new();
                for &l in &g.operands {
                    if let Some(&(b, _)) = map.get(l as usize) {
                        out.extend(self.blocks[b].atoms.iter().copied());
                    }
                }
                out.into_iter().collect()
            }
            _ => g.operands.clone(),
        }
    }
}

/// Lists every invariant violation; empty means the circuit is well formed.
pub fn validate(c: &Circuit) -> Vec<String> {
    let mut v = Vec::new();
    let all = c.atoms();
    let known: BTreeSet<AtomId> = all.iter().copied().collect();
    for (&a, s) in &c.grid.occupancy {
        if !c.grid.contains(*s) {
            v.push(format!("atom {a} placed outside the grid at ({}, {})", s.row, s.col));
        }
    }
    if c.grid.site_map().len() != c.grid.occupancy.len() {
        v.push("two atoms share an initial site".into());
    }
    let n_logical = c.n_logical_bits() as u32;
    for (i, g) in c.gates.iter().enumerate() {
        let ops = &g.operands;
        let arity_ok = match g.kind {
            GateKind::CZ | GateKind::CX | GateKind::SWAP => ops.len() == 2 && ops[0] != ops[1],
            GateKind::GR { .. } => ops.is_empty(),
            GateKind::Move { .. } => !ops.is_empty() && ops.iter().collect::<BTreeSet<_>>().len() == ops.len(),
            GateKind::ClassicalCorrection => ops.len() >= 2,
            _ => ops.len() == 1,
        };
        if !arity_ok {
            v.push(format!("gate {i} ({}): bad arity {:?}", g.kind.tag(), ops));
            continue;
        }
        if g.kind == GateKind::ClassicalCorrection {
            if let Some(bad) = ops.iter().find(|&&l| l >= n_logical) {
                v.push(format!("gate {i} (CC): unknown logical bit {bad}"));
            }
        } else if let Some(bad) = ops.iter().find(|a| !known.contains(a)) {
            v.push(format!("gate {i} ({}): unknown atom {bad}", g.kind.tag()));
        }
        match c.tier {
            Tier::Physical if g.kind.is_logical_only() => {
                v.push(format!("gate {i} ({}): logical-tier gate in physical circuit", g.kind.tag()))
            }
            Tier::Logical if g.kind.is_physical_only() => {
                v.push(format!("gate {i} ({}): physical-tier gate in logical circuit", g.kind.tag()))
            }
            _ => {}
        }
    }
    // Measurement and correction ordering.
    let mut measured = BTreeSet::new();
    let map = c.logical_bit_map();
    for (i, g) in c.gates.iter().enumerate() {
        match g.kind {
            GateKind::Measure => {
                let Some(&a) = g.operands.first() else { continue };
                if !c.roles.contains_key(&a) {
                    v.push(format!("gate {i}: measured atom {a} has no role"));
                }
                measured.insert(a);
            }
            GateKind::ClassicalCorrection => {
                for &l in &g.operands {
                    if let Some(&(b, _)) = map.get(l as usize) {
                        if c.blocks[b].atoms.iter().any(|a| !measured.contains(a)) {
                            v.push(format!("gate {i} (CC): logical bit {l} used before its block is measured"));
                        }
                    }
                }
            }
            _ => {
                if g.kind != GateKind::Prep && g.operands.iter().any(|a| measured.contains(a)) {
                    // Re-preparing after measurement is allowed; other gates on measured atoms are not.
                    v.push(format!("gate {i} ({}): acts on an already measured atom", g.kind.tag()));
                }
            }
        }
        if let (GateKind::Prep, Some(a)) = (&g.kind, g.operands.first()) {
            measured.remove(a);
        }
    }
    for blk in &c.blocks {
        if blk.atoms.len() != blk.encoding.n() {
            v.push(format!("{} block has {} atoms", blk.encoding.name(), blk.atoms.len()));
        }
        if let Some(a) = blk.atoms.iter().find(|a| !known.contains(a)) {
            v.push(format!("block references unknown atom {a}"));
        }
    }
    for s in &c.samples {
        if let Some(l) = s.iter().find(|&&l| l >= n_logical) {
            v.push(format!("sample references unknown logical bit {l}"));
        }
    }
    v.extend(check_moments(c, &all));
    v.extend(check_moves(c));
    v
}

fn check_moments(c: &Circuit, all: &[AtomId]) -> Vec<String> {
    let mut v = Vec::new();
    if c.moments.is_empty() {
        return v;
    }
    let mut seen = vec![false; c.gates.len()];
    let mut moment_of = vec![usize::MAX; c.gates.len()];
    for (m, layer) in c.moments.iter().enumerate() {
        let mut used = BTreeSet::new();
        let has_gr = layer.iter().any(|&g| matches!(c.gates.get(g).map(|x| x.kind), Some(GateKind::GR { .. })));
        let has_move = layer.iter().any(|&g| matches!(c.gates.get(g).map(|x| x.kind), Some(GateKind::Move { .. })));
        if has_gr && has_move {
            v.push(format!("moment {m}: GR and Move in the same moment"));
        }
        for &gi in layer {
            let Some(g) = c.gates.get(gi) else {
                v.push(format!("moment {m}: unknown gate index {gi}"));
                continue;
            };
            if seen[gi] {
                v.push(format!("gate {gi} scheduled twice"));
            }
            seen[gi] = true;
            moment_of[gi] = m;
            for a in c.touched(g, all) {
                if !used.insert(a) {
                    v.push(format!("moment {m}: two gates share atom {a}"));
                }
            }
        }
    }
    if seen.iter().any(|s| !s) {
        v.push("moments do not cover every gate".into());
        return v;
    }
    // Gates sharing an atom must keep list order.
    let mut last: HashMap<AtomId, usize> = HashMap::new();
    for (gi, g) in c.gates.iter().enumerate() {
        for a in c.touched(g, all) {
            if let Some(&prev) = last.get(&a) {
                if moment_of[prev] >= moment_of[gi] {
                    v.push(format!("gates {prev} and {gi} on atom {a} are out of order"));
                }
            }
            last.insert(a, gi);
        }
    }
    v
}

fn check_moves(c: &Circuit) -> Vec<String> {
    let mut v = Vec::new();
    let mut pos = c.grid.occupancy.clone();
    let layers: Vec<Vec<usize>> =
        if c.moments.is_empty() { (0..c.gates.len()).map(|i| vec![i]).collect() } else { c.moments.clone() };
    for (m, layer) in layers.iter().enumerate() {
        let mut moved = false;
        for &gi in layer {
            let Some(g) = c.gates.get(gi) else { continue };
            if let GateKind::Move { drow, dcol } = g.kind {
                moved = true;
                for a in &g.operands {
                    if let Some(s) = pos.get_mut(a) {
                        *s = Site::new(s.row + drow, s.col + dcol);
                        if !c.grid.contains(*s) {
                            v.push(format!("moment {m}: atom {a} moved off the grid"));
                        }
                    }
                }
            }
        }
        if moved {
            let mut occupied: HashMap<Site, AtomId> = HashMap::new();
            for (&a, &s) in &pos {
                if let Some(b) = occupied.insert(s, a) {
                    v.push(format!("moment {m}: atoms {b} and {a} collide at ({}, {})", s.row, s.col));
                }
            }
        }
    }
    v
}

/// Exact gate counts by kind. Only defined for physical-tier circuits.
pub fn count_gates(c: &Circuit) -> Result<BTreeMap<KindTag, usize>, CircuitError> {
    if c.tier != Tier::Physical || c.gates.iter().any(|g| g.kind.is_logical_only()) {
        return Err(CircuitError::Tier("gate counts are defined on physical-tier circuits".into()));
    }
    let mut out = BTreeMap::new();
    for g in &c.gates {
        *out.entry(g.kind.tag()).or_insert(0) += 1;
    }
    Ok(out)
}

/// Greedy as-soon-as-possible layering. Gate order along every atom is preserved.
pub fn schedule_moments(c: &Circuit) -> Result<Circuit, CircuitError> {
    let all = c.atoms();
    let mut ready: HashMap<AtomId, usize> = HashMap::new();
    let mut moments: Vec<Vec<usize>> = Vec::new();
    for (gi, g) in c.gates.iter().enumerate() {
        let touched = c.touched(g, &all);
        let m = touched.iter().map(|a| ready.get(a).copied().unwrap_or(0)).max().unwrap_or(0);
        // A GR with no atoms around still needs a layer of its own.
        let m = match g.kind {
            GateKind::GR { .. } if touched.is_empty() => moments.len(),
            _ => m,
        };
        if moments.len() <= m {
            moments.resize(m + 1, Vec::new());
        }
        moments[m].push(gi);
        for a in touched {
            ready.insert(a, m + 1);
        }
    }
    let mut out = c.clone();
    out.moments = moments;
    let bad: Vec<String> = check_moments(&out, &all);
    if !bad.is_empty() {
        return Err(CircuitError::Structure(bad.join("; ")));
    }
    Ok(out)
}

/// Number of moments that contain at least one two-qubit gate.
pub fn two_qubit_depth(c: &Circuit) -> usize {
    c.moments
        .iter()
        .filter(|m| m.iter().any(|&g| matches!(c.gates[g].kind, GateKind::CZ | GateKind::CX | GateKind::SWAP)))
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(n: u32) -> Circuit {
        let mut g = SiteGrid::new(1, n as i32 + 2);
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
    fn empty_is_valid() {
        assert!(validate(&line(0)).is_empty());
    }

    #[test]
    fn self_cz_is_arity_violation() {
        let mut c = line(2);
        c.tier = Tier::Physical;
        c.push(Gate::cz(1, 1));
        let v = validate(&c);
        assert!(v.iter().any(|s| s.contains("arity")), "{v:?}");
    }

    #[test]
    fn operandless_prep_is_reported() {
        let c = parse_circuit("circuit tier=logical grid=2x2 lanes=1\natom 0 site=0,0 role=data\nPREP @\n").unwrap();
        assert!(validate(&c).iter().any(|s| s.contains("arity")));
    }

    #[test]
    fn move_collision_detected() {
        let mut c = line(2);
        // Atom 0 moves right onto atom 1's site while atom 1 stays.
        c.push(Gate::mv(&[0], 0, 1));
        let v = validate(&c);
        assert!(v.iter().any(|s| s.contains("collide")), "{v:?}");
        let mut ok = line(2);
        ok.push(Gate::mv(&[0, 1], 0, 1));
        assert!(validate(&ok).is_empty());
    }

    #[test]
    fn gr_and_move_cannot_share_a_moment() {
        let mut c = line(2);
        c.tier = Tier::Physical;
        c.push(Gate::mv(&[0], 1, 0));
        c.push(Gate::gr(1.0, 0.0));
        c.moments = vec![vec![0, 1]];
        let v = validate(&c);
        assert!(v.iter().any(|s| s.contains("GR and Move")), "{v:?}");
    }

    #[test]
    fn outside_in_ladder_has_three_moments() {
        let mut c = line(6);
        for (a, b) in [(0, 1), (5, 4), (1, 2), (4, 3), (2, 3)] {
            c.push(Gate::cx(a, b));
        }
        let s = schedule_moments(&c).unwrap();
        assert_eq!(s.moments.len(), 3);
        assert_eq!(two_qubit_depth(&s), 3);
    }

    #[test]
    fn single_gate_single_moment() {
        let mut c = line(1);
        c.push(Gate::h(0));
        assert_eq!(schedule_moments(&c).unwrap().moments, vec![vec![0]]);
    }

    #[test]
    fn count_requires_physical_tier() {
        let mut c = line(2);
        c.push(Gate::cx(0, 1));
        assert!(count_gates(&c).is_err());
        let mut p = line(2);
        p.tier = Tier::Physical;
        p.extend([Gate::cz(0, 1), Gate::gr(1.0, 0.0), Gate::mv(&[0, 1], 1, 0)]);
        let counts = count_gates(&p).unwrap();
        assert_eq!(counts[&KindTag::CZ], 1);
        assert_eq!(counts[&KindTag::GR], 1);
        assert_eq!(counts[&KindTag::Move], 1);
    }

    #[test]
    fn correction_before_measurement_flagged() {
        let mut c = line(2);
        c.blocks = (0..2).map(|a| Block { encoding: Encoding::Bare, atoms: vec![a] }).collect();
        c.push(Gate::correction(1, &[0]));
        c.push(Gate::measure(0));
        c.push(Gate::measure(1));
        assert!(!validate(&c).is_empty());
        c.gates.rotate_left(1);
        assert!(validate(&c).is_empty(), "{:?}", validate(&c));
    }
}
