use rayon::prelude::*;

use super::{CodeError, PauliString, StabilizerCode};

/// Default cap on `n` for exhaustive searches.
pub const DEFAULT_MAX_N: usize = 24;

/// Result of a bounded distance search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Distance {
    Exact(usize),
    /// No logical operator of weight `<= max_weight` exists.
    Above(usize),
}

impl Distance {
    pub fn exact(self) -> Option<usize> {
        match self {
            Distance::Exact(d) => Some(d),
            Distance::Above(_) => None,
        }
    }
}

#[derive(Clone, Copy)]
enum Letters {
    All,
    XOnly,
    ZOnly,
}

/// Checks (commutes with every stabilizer) and (anticommutes with some logical).
struct Checker {
    stab_x: Vec<u64>,
    stab_z: Vec<u64>,
    log_x: Vec<u64>,
    log_z: Vec<u64>,
}

impl Checker {
    fn new(code: &StabilizerCode) -> Self {
        let logs: Vec<&PauliString> = code.logical_x.iter().chain(&code.logical_z).collect();
        Checker {
            stab_x: code.stabilizers.iter().map(|s| s.x_bits()).collect(),
            stab_z: code.stabilizers.iter().map(|s| s.z_bits()).collect(),
            log_x: logs.iter().map(|s| s.x_bits()).collect(),
            log_z: logs.iter().map(|s| s.z_bits()).collect(),
        }
    }

    fn is_logical(&self, x: u64, z: u64) -> bool {
        let anti = |sx: u64, sz: u64| ((x & sz).count_ones() + (z & sx).count_ones()) % 2 == 1;
        if self.stab_x.iter().zip(&self.stab_z).any(|(&sx, &sz)| anti(sx, sz)) {
            return false;
        }
        self.log_x.iter().zip(&self.log_z).any(|(&lx, &lz)| anti(lx, lz))
    }
}

/// Calls `f` on every `w`-subset of `0..n` whose smallest element is `first`.
fn subsets_from(n: usize, w: usize, first: usize, f: &mut impl FnMut(&[usize]) -> bool) -> bool {
    let mut idx = vec![first];
    fn rec(n: usize, w: usize, idx: &mut Vec<usize>, f: &mut impl FnMut(&[usize]) -> bool) -> bool {
        if idx.len() == w {
            return f(idx);
        }
        let start = idx.last().unwrap() + 1;
        for q in start..n {
            idx.push(q);
            if rec(n, w, idx, f) {
                return true;
            }
            idx.pop();
        }
        false
    }
    rec(n, w, &mut idx, f)
}

fn has_logical_of_weight(checker: &Checker, n: usize, w: usize, letters: Letters) -> bool {
    (0..n).into_par_iter().any(|first| {
        subsets_from(n, w, first, &mut |support: &[usize]| {
            let choices: u32 = match letters {
                Letters::All => 3,
                _ => 1,
            };
            let combos = choices.pow(w as u32);
            (0..combos).any(|mut c| {
                let (mut x, mut z) = (0u64, 0u64);
                for &q in support {
                    let letter = match letters {
                        Letters::All => {
                            let l = c % 3;
                            c /= 3;
                            l
                        }
                        Letters::XOnly => 0,
                        Letters::ZOnly => 1,
                    };
                    match letter {
                        0 => x |= 1 << q,
                        1 => z |= 1 << q,
                        _ => {
                            x |= 1 << q;
                            z |= 1 << q;
                        }
                    }
                }
                checker.is_logical(x, z)
            })
        })
    })
}

fn search(code: &StabilizerCode, max_weight: usize, max_n: usize, letters: Letters) -> Result<Distance, CodeError> {
    if code.n > max_n {
        return Err(CodeError::Capacity(format!(
            "exhaustive distance search capped at n = {max_n}, code has n = {}",
            code.n
        )));
    }
    code.validate()?;
    let checker = Checker::new(code);
    for w in 1..=max_weight.min(code.n) {
        if has_logical_of_weight(&checker, code.n, w, letters) {
            return Ok(Distance::Exact(w));
        }
    }
    Ok(Distance::Above(max_weight))
}

/// Minimum weight of a Pauli that commutes with all stabilizers but acts nontrivially on the
/// code space, searched up to `max_weight`.
pub fn verify_distance(code: &StabilizerCode, max_weight: usize) -> Result<Distance, CodeError> {
    search(code, max_weight, DEFAULT_MAX_N, Letters::All)
}

/// X-only and Z-only distances of a CSS code (in that order).
pub fn verify_distance_xz(code: &StabilizerCode, max_weight: usize) -> Result<(Distance, Distance), CodeError> {
    if !code.is_css() {
        return Err(CodeError::Unsupported("X/Z distances need a CSS code".into()));
    }
    Ok((
        search(code, max_weight, DEFAULT_MAX_N, Letters::XOnly)?,
        search(code, max_weight, DEFAULT_MAX_N, Letters::ZOnly)?,
    ))
}

/// Independent distance check: builds the full stabilizer group as a set and tests every Pauli up
/// to `max_weight` by direct membership. Exponential in `n - k`; meant for tests.
pub fn oracle_distance(code: &StabilizerCode, max_weight: usize) -> Option<usize> {
    use std::collections::HashSet;
    let gens: Vec<(u64, u64)> = code.stabilizers.iter().map(|s| (s.x_bits(), s.z_bits())).collect();
    let mut group: HashSet<(u64, u64)> = HashSet::new();
    for mask in 0u64..(1 << gens.len()) {
        let (mut x, mut z) = (0, 0);
        for (i, g) in gens.iter().enumerate() {
            if mask >> i & 1 == 1 {
                x ^= g.0;
                z ^= g.1;
            }
        }
        group.insert((x, z));
    }
    let n = code.n;
    let mut best: Option<usize> = None;
    // Walk all Paulis as base-4 numbers; prune by weight.
    let mut digits = vec![0u8; n];
    loop {
        let w = digits.iter().filter(|&&d| d != 0).count();
        if w > 0 && w <= max_weight && best.map_or(true, |b| w < b) {
            let (mut x, mut z) = (0u64, 0u64);
            for (q, &d) in digits.iter().enumerate() {
                if d & 1 == 1 {
                    x |= 1 << q;
                }
                if d & 2 == 2 {
                    z |= 1 << q;
                }
            }
            let commutes = gens.iter().all(|&(sx, sz)| ((x & sz).count_ones() + (z & sx).count_ones()) % 2 == 0);
            if commutes && !group.contains(&(x, z)) {
                best = Some(w);
            }
        }
        // Increment, skipping digit patterns that already exceed max_weight.
        let mut q = 0;
        loop {
            if q == n {
                return best;
            }
            digits[q] += 1;
            if digits[q] == 4 {
                digits[q] = 0;
                q += 1;
                continue;
            }
            if digits.iter().filter(|&&d| d != 0).count() > max_weight {
                digits[q] = 0;
                q += 1;
                continue;
            }
            break;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{c4_code, hypercube_code};

    #[test]
    fn c4_distance_two() {
        assert_eq!(verify_distance(&c4_code(), 4).unwrap(), Distance::Exact(2));
        assert_eq!(oracle_distance(&c4_code(), 4), Some(2));
    }

    #[test]
    fn c4_xz_distances() {
        let (dx, dz) = verify_distance_xz(&c4_code(), 4).unwrap();
        assert_eq!((dx, dz), (Distance::Exact(2), Distance::Exact(2)));
    }

    #[test]
    fn stabilizer_is_not_logical() {
        let c = c4_code();
        let checker = Checker::new(&c);
        for s in &c.stabilizers {
            assert!(!checker.is_logical(s.x_bits(), s.z_bits()));
        }
    }

    #[test]
    fn sentinel_when_bound_too_small() {
        assert_eq!(verify_distance(&hypercube_code(), 3).unwrap(), Distance::Above(3));
    }

    #[test]
    fn capacity_cap() {
        let big = StabilizerCode { n: 30, k: 0, d: None, stabilizers: vec![], logical_x: vec![], logical_z: vec![] };
        assert!(matches!(verify_distance(&big, 2), Err(CodeError::Capacity(_))));
    }
}
