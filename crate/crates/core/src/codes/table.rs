use std::collections::{BTreeMap, BTreeSet};

use super::{CodeError, StabilizerCode};

/// Z-basis support of each logical basis state.
///
/// Keys and values are bit strings written qubit 0 first, e.g. logical `"01"` for
/// logical qubit 1 in |0> and logical qubit 2 in |1>.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodewordTable {
    pub n: usize,
    pub k: usize,
    pub supports: BTreeMap<String, BTreeSet<String>>,
}

pub(crate) fn bits_to_string(bits: u64, n: usize) -> String {
    (0..n).map(|q| if bits >> q & 1 == 1 { '1' } else { '0' }).collect()
}

impl CodewordTable {
    /// Logical label of a physical string, or `None` if the string is outside the Z code space.
    pub fn decode(&self, physical: &str) -> Option<&str> {
        self.supports.iter().find(|(_, set)| set.contains(physical)).map(|(label, _)| label.as_str())
    }

    pub fn total_strings(&self) -> usize {
        self.supports.values().map(BTreeSet::len).sum()
    }
}

/// Enumerates the computational-basis support of every logical basis state of a CSS code.
pub fn codeword_table(code: &StabilizerCode) -> Result<CodewordTable, CodeError> {
    if !code.is_css() || !code.logical_z.iter().all(|z| z.is_z_type()) {
        return Err(CodeError::Unsupported("codeword tables need a CSS code with Z-type logical Z".into()));
    }
    if code.n > 24 {
        return Err(CodeError::Capacity(format!("codeword table enumerates 2^n strings; n = {}", code.n)));
    }
    let zs: Vec<u64> = code.z_stabilizers().map(|s| s.z_bits()).collect();
    let lz: Vec<u64> = code.logical_z.iter().map(|s| s.z_bits()).collect();
    let mut supports: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for s in 0u64..(1 << code.n) {
        if zs.iter().any(|m| (s & m).count_ones() % 2 == 1) {
            continue;
        }
        let label: String = lz.iter().map(|m| if (s & m).count_ones() % 2 == 1 { '1' } else { '0' }).collect();
        supports.entry(label).or_default().insert(bits_to_string(s, code.n));
    }
    Ok(CodewordTable { n: code.n, k: code.k, supports })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::c4_code;

    #[test]
    fn c4_table_rows() {
        let t = codeword_table(&c4_code()).unwrap();
        let row = |l: &str| t.supports[l].iter().cloned().collect::<Vec<_>>();
        assert_eq!(row("00"), ["0000", "1111"]);
        assert_eq!(row("11"), ["0110", "1001"]);
        assert_eq!(t.total_strings(), 8);
    }

    #[test]
    fn c4_decode_lookup() {
        let t = codeword_table(&c4_code()).unwrap();
        assert_eq!(t.decode("1100"), Some("01"));
        assert_eq!(t.decode("0001"), None);
    }

    #[test]
    fn non_css_rejected() {
        let mut c = c4_code();
        c.stabilizers = vec!["XXXX".parse().unwrap(), "YYYY".parse().unwrap()];
        assert!(matches!(codeword_table(&c), Err(CodeError::Unsupported(_))));
    }
}
