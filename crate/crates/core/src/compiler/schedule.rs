//! Layering of two-body events (CZs and Moves).

use std::collections::{BTreeMap, HashMap, VecDeque};

use super::pulses::{feasible, WindowClass};
use crate::circuit::{AtomId, Gate};

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Event {
    Cz(AtomId, AtomId),
    Move(Gate),
}

impl Event {
    fn atoms(&self) -> Vec<AtomId> {
        match self {
            Event::Cz(a, b) => vec![*a, *b],
            Event::Move(g) => g.operands.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Layer {
    pub is_move: bool,
    /// Indices into the event list.
    pub events: Vec<usize>,
}

/// As-soon-as-possible layering. CZs share layers; every Move gets a layer of its own and Moves
/// keep their relative order.
pub(crate) fn asap(events: &[Event]) -> Vec<Layer> {
    let mut layers: Vec<Layer> = Vec::new();
    let mut ready: HashMap<AtomId, usize> = HashMap::new();
    let mut after_move = 0;
    for (i, e) in events.iter().enumerate() {
        let atoms = e.atoms();
        let l0 = atoms.iter().map(|a| ready.get(a).copied().unwrap_or(0)).max().unwrap_or(0);
        let at = match e {
            Event::Cz(..) => match (l0..layers.len()).find(|&j| !layers[j].is_move) {
                Some(j) => {
                    layers[j].events.push(i);
                    j
                }
                None => {
                    layers.push(Layer { is_move: false, events: vec![i] });
                    layers.len() - 1
                }
            },
            Event::Move(_) => {
                let p = l0.max(after_move);
                layers.insert(p, Layer { is_move: true, events: vec![i] });
                for r in ready.values_mut() {
                    if *r > p {
                        *r += 1;
                    }
                }
                after_move = p + 1;
                p
            }
        };
        for a in atoms {
            ready.insert(a, at + 1);
        }
    }
    layers
}

/// As-late-as-possible layering: ASAP on the reversed event list.
pub(crate) fn alap(events: &[Event]) -> Vec<Layer> {
    let n = events.len();
    let rev: Vec<Event> = events.iter().rev().cloned().collect();
    let mut layers = asap(&rev);
    layers.reverse();
    for l in &mut layers {
        for e in &mut l.events {
            *e = n - 1 - *e;
        }
        l.events.sort_unstable();
    }
    layers
}

/// Pulse-aware list scheduling.
///
/// Time advances by either a CZ layer holding every CZ whose operands' current windows are
/// already satisfied, or a single global pulse when no CZ can run. `classes` lists each atom's
/// window classes in order (one more than its CZ count).
pub(crate) fn greedy(events: &[Event], classes: &BTreeMap<AtomId, Vec<WindowClass>>) -> Vec<Layer> {
    let mut queue: BTreeMap<AtomId, VecDeque<usize>> = BTreeMap::new();
    for (i, e) in events.iter().enumerate() {
        for a in e.atoms() {
            queue.entry(a).or_default().push_back(i);
        }
    }
    let moves: Vec<usize> = (0..events.len()).filter(|&i| matches!(events[i], Event::Move(_))).collect();
    let mut next_move = 0;
    let mut window: BTreeMap<AtomId, usize> = BTreeMap::new();
    let mut seen: BTreeMap<AtomId, usize> = BTreeMap::new();
    let mut layers = Vec::new();
    let mut left = events.len();
    let class_of =
        |a: AtomId, w: usize| classes.get(&a).and_then(|v| v.get(w)).copied().unwrap_or(WindowClass::Diagonal);
    while left > 0 {
        let at_front = |i: usize, q: &BTreeMap<AtomId, VecDeque<usize>>| {
            events[i].atoms().iter().all(|a| q.get(a).and_then(|d| d.front()) == Some(&i))
        };
        if let Some(&m) = moves.get(next_move) {
            if at_front(m, &queue) {
                for a in events[m].atoms() {
                    queue.get_mut(&a).map(VecDeque::pop_front);
                }
                layers.push(Layer { is_move: true, events: vec![m] });
                next_move += 1;
                left -= 1;
                continue;
            }
        }
        let mut layer = Vec::new();
        for (&a, q) in &queue {
            let Some(&i) = q.front() else { continue };
            let Event::Cz(x, y) = events[i] else { continue };
            if a != x.min(y) || !at_front(i, &queue) {
                continue;
            }
            let ok = [x, y].iter().all(|&b| {
                feasible(class_of(b, window.get(&b).copied().unwrap_or(0)), seen.get(&b).copied().unwrap_or(0))
            });
            if ok {
                layer.push(i);
            }
        }
        if layer.is_empty() {
            for c in queue.keys() {
                let s = seen.entry(*c).or_insert(0);
                *s = (*s + 1).min(2);
            }
            continue;
        }
        for &i in &layer {
            for a in events[i].atoms() {
                queue.get_mut(&a).map(VecDeque::pop_front);
                *window.entry(a).or_insert(0) += 1;
                seen.insert(a, 0);
            }
        }
        layer.sort_unstable();
        left -= layer.len();
        layers.push(Layer { is_move: false, events: layer });
    }
    layers
}

#[cfg(test)]
mod tests {
    use super::*;

    fn layer_of(layers: &[Layer], n: usize) -> Vec<usize> {
        let mut out = vec![usize::MAX; n];
        for (j, l) in layers.iter().enumerate() {
            for &e in &l.events {
                out[e] = j;
            }
        }
        out
    }

    #[test]
    fn independent_czs_share_a_layer() {
        let ev = vec![Event::Cz(0, 1), Event::Cz(2, 3), Event::Cz(1, 2)];
        let l = asap(&ev);
        assert_eq!(layer_of(&l, 3), vec![0, 0, 1]);
    }

    #[test]
    fn move_splits_dependent_czs() {
        let ev = vec![Event::Cz(0, 1), Event::Move(Gate::mv(&[1], 0, 1)), Event::Cz(1, 2), Event::Cz(3, 4)];
        let l = asap(&ev);
        let at = layer_of(&l, 4);
        assert!(at[0] < at[1] && at[1] < at[2]);
        assert!(l[at[1]].is_move && l[at[1]].events.len() == 1);
        assert_eq!(at[3], 0);
    }

    #[test]
    fn alap_pushes_late() {
        let ev = vec![Event::Cz(0, 1), Event::Cz(1, 2), Event::Cz(2, 3), Event::Cz(4, 5)];
        let at = layer_of(&alap(&ev), 4);
        assert_eq!(at, vec![0, 1, 2, 2]);
        let at = layer_of(&asap(&ev), 4);
        assert_eq!(at, vec![0, 1, 2, 0]);
    }
}
