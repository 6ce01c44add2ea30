//! Global pulse budgeting and per-window Rz synthesis.
//!
//! Every atom sees every global pulse, so the single-qubit work an atom does between two of its
//! CZs has to be written as `Rz(a_m) P ... P Rz(a_0)` where `P = GR(pi/2, 0)` and `m` is the number
//! of pulses fired in that stretch of time.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

use crate::sim::gates::{self, Mat2};

pub const PULSE_THETA: f64 = FRAC_PI_2;
pub const PULSE_PHI: f64 = 0.0;

const EPS: f64 = 1e-9;
const QUARTERS: [f64; 4] = [0.0, FRAC_PI_2, PI, -FRAC_PI_2];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum WindowClass {
    /// Diagonal: zero pulses, or any count but one.
    Diagonal,
    /// `|U00| = 1/sqrt2`: at least one pulse.
    Balanced,
    /// Anything else: at least two pulses.
    Other,
}

pub fn classify(u: &Mat2) -> WindowClass {
    if u[0][1].norm() < EPS {
        WindowClass::Diagonal
    } else if (u[0][0].norm() - FRAC_1_SQRT_2).abs() < EPS {
        WindowClass::Balanced
    } else {
        WindowClass::Other
    }
}

/// Whether a window of the given class can be realised with exactly `m` pulses.
pub fn feasible(class: WindowClass, m: usize) -> bool {
    match class {
        WindowClass::Diagonal => m != 1,
        WindowClass::Balanced => m >= 1,
        WindowClass::Other => m >= 2,
    }
}

pub fn equal_up_to_phase(a: &Mat2, b: &Mat2) -> bool {
    let mut t = num_complex::Complex64::new(0.0, 0.0);
    for i in 0..2 {
        for j in 0..2 {
            t += a[i][j].conj() * b[i][j];
        }
    }
    (t.norm() - 2.0).abs() < EPS
}

pub fn pulse() -> Mat2 {
    gates::gr(PULSE_THETA, PULSE_PHI)
}

/// Product of the sequence `Rz(angles[0]), P, Rz(angles[1]), ..., P, Rz(angles[m])` in time order.
pub fn realise(angles: &[f64]) -> Mat2 {
    let p = pulse();
    let mut u = gates::identity();
    for (k, &a) in angles.iter().enumerate() {
        if k > 0 {
            u = gates::mat_mul(&p, &u);
        }
        u = gates::mat_mul(&gates::rz(a), &u);
    }
    u
}

/// Rz angles `a_0..=a_m` realising `u` with `m` pulses, or `None` when infeasible.
///
/// Angles are searched over multiples of pi/2, so beyond the zero-pulse case only Clifford windows
/// are supported. Pulses beyond the second are spent first with zero Rz between them.
pub fn synthesize(u: &Mat2, m: usize) -> Option<Vec<f64>> {
    if !feasible(classify(u), m) {
        return None;
    }
    if m == 0 {
        let a = (u[1][1] / u[0][0]).arg();
        return Some(vec![gates::wrap_angle(a)]);
    }
    let lead = m.saturating_sub(2);
    let p = pulse();
    let mut v = gates::identity();
    for _ in 0..lead {
        v = gates::mat_mul(&p, &v);
    }
    let w = gates::mat_mul(u, &gates::dagger(&v));
    let free = m - lead;
    for idx in 0..4usize.pow(free as u32 + 1) {
        let mut tail = Vec::with_capacity(free + 1);
        let mut x = idx;
        for _ in 0..=free {
            tail.push(QUARTERS[x % 4]);
            x /= 4;
        }
        if equal_up_to_phase(&realise(&tail), &w) {
            let mut out = vec![0.0; lead];
            out.extend(tail);
            return Some(out);
        }
    }
    None
}

/// A stretch of slots `start..=end` that one atom's window spans.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SlotWindow {
    pub start: usize,
    pub end: usize,
    pub class: WindowClass,
}

/// (last slot with a pulse, latest start whose window already holds two pulses)
type State = (Option<usize>, Option<usize>);

fn pulses_seen(state: State, start: usize) -> usize {
    match state {
        (None, _) => 0,
        (Some(l), _) if start > l => 0,
        (_, Some(t)) if start <= t => 2,
        _ => 1,
    }
}

/// Pulses per slot (each 0..=2) with the smallest total that makes every window feasible.
///
/// Exact dynamic program over slots; a window only cares whether it saw 0, 1 or at least 2
/// pulses, and that is determined by the last pulsed slot and the latest start with two.
pub fn plan_pulses(n_slots: usize, windows: &[SlotWindow]) -> Option<Vec<usize>> {
    let mut closing: Vec<Vec<SlotWindow>> = vec![Vec::new(); n_slots];
    for w in windows {
        closing.get_mut(w.end)?.push(*w);
    }
    // Per slot: state -> (cost, previous state, pulses at this slot).
    let mut layers: Vec<BTreeMap<State, (usize, State, usize)>> = Vec::with_capacity(n_slots);
    let mut frontier: BTreeMap<State, usize> = BTreeMap::from([((None, None), 0)]);
    for (s, ends) in closing.iter().enumerate() {
        let mut next: BTreeMap<State, (usize, State, usize)> = BTreeMap::new();
        for (&st, &cost) in &frontier {
            for p in 0..=2usize {
                let ns = match p {
                    0 => st,
                    1 => (Some(s), st.0),
                    _ => (Some(s), Some(s)),
                };
                if !ends.iter().all(|w| feasible(w.class, pulses_seen(ns, w.start))) {
                    continue;
                }
                let c = cost + p;
                match next.get(&ns) {
                    Some(&(old, _, _)) if old <= c => {}
                    _ => {
                        next.insert(ns, (c, st, p));
                    }
                }
            }
        }
        if next.is_empty() {
            return None;
        }
        frontier = next.iter().map(|(&k, &(c, _, _))| (k, c)).collect();
        layers.push(next);
    }
    let (mut st, _) = frontier.iter().min_by_key(|(_, &c)| c).map(|(&k, &c)| (k, c))?;
    let mut out = vec![0; n_slots];
    for s in (0..n_slots).rev() {
        let (_, prev, p) = layers[s][&st];
        out[s] = p;
        st = prev;
    }
    Some(out)
}
