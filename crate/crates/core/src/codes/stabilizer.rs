use super::{CodeError, PauliString};

/// A stabilizer code given by generators and paired logical operators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizerCode {
    pub n: usize,
    pub k: usize,
    /// Distance, if known or claimed.
    pub d: Option<usize>,
    pub stabilizers: Vec<PauliString>,
    pub logical_x: Vec<PauliString>,
    pub logical_z: Vec<PauliString>,
}

fn paulis(list: &[&str]) -> Vec<PauliString> {
    list.iter().map(|s| s.parse().expect("static Pauli literal")).collect()
}

/// The [[4,2,2]] code with logical operators labelled so that the Z-basis
/// codewords are |00> = 0000+1111, |01> = 0011+1100, |10> = 0101+1010, |11> = 0110+1001.
pub fn c4_code() -> StabilizerCode {
    StabilizerCode {
        n: 4,
        k: 2,
        d: Some(2),
        stabilizers: paulis(&["XXXX", "ZZZZ"]),
        logical_x: paulis(&["IXIX", "IIXX"]),
        logical_z: paulis(&["ZZII", "ZIZI"]),
    }
}

/// The [[4,2,2]] code with the alternative logical basis X1=IXXI, Z1=ZIZI, X2=IXIX, Z2=ZIIZ.
///
/// It has the same stabilizer group and the same |00> state as [`c4_code`], but labels the other
/// three codewords differently.
pub fn c4_code_listing() -> StabilizerCode {
    StabilizerCode {
        n: 4,
        k: 2,
        d: Some(2),
        stabilizers: paulis(&["XXXX", "ZZZZ"]),
        logical_x: paulis(&["IXXI", "IXIX"]),
        logical_z: paulis(&["ZIZI", "ZIIZ"]),
    }
}

/// Level-2 many-hypercube code built from [`c4_code`].
pub fn hypercube_code() -> StabilizerCode {
    let mut code = concatenate_self(&c4_code()).expect("c4 concatenates");
    code.d = Some(4);
    code
}

/// GF(2) rank of a set of symplectic vectors.
pub(crate) fn symplectic_rank(ops: &[PauliString]) -> usize {
    let mut rows: Vec<u128> = ops.iter().map(|p| (p.x_bits() as u128) << 64 | p.z_bits() as u128).collect();
    let mut rank = 0;
    for bit in (0..128).rev() {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r] >> bit & 1 == 1) else {
            continue;
        };
        rows.swap(rank, pivot);
        let p = rows[rank];
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && *row >> bit & 1 == 1 {
                *row ^= p;
            }
        }
        rank += 1;
    }
    rank
}

impl StabilizerCode {
    /// Checks the defining commutation relations and the stabilizer rank.
    pub fn validate(&self) -> Result<(), CodeError> {
        let all = self.stabilizers.iter().chain(&self.logical_x).chain(&self.logical_z);
        if let Some(p) = all.clone().find(|p| p.n() != self.n) {
            return Err(CodeError::Structure(format!("operator {p} has wrong length for n={}", self.n)));
        }
        if self.logical_x.len() != self.k || self.logical_z.len() != self.k {
            return Err(CodeError::Structure(format!("expected {} logical pairs", self.k)));
        }
        for (i, a) in self.stabilizers.iter().enumerate() {
            for b in &self.stabilizers[i + 1..] {
                if !a.commutes_with(b) {
                    return Err(CodeError::Structure(format!("stabilizers {a} and {b} anticommute")));
                }
            }
            for l in self.logical_x.iter().chain(&self.logical_z) {
                if !a.commutes_with(l) {
                    return Err(CodeError::Structure(format!("logical {l} anticommutes with stabilizer {a}")));
                }
            }
        }
        for i in 0..self.k {
            for j in 0..self.k {
                let anti = !self.logical_x[i].commutes_with(&self.logical_z[j]);
                if anti != (i == j) {
                    return Err(CodeError::Structure(format!("bad logical pairing X{} / Z{}", i + 1, j + 1)));
                }
                if i < j
                    && (!self.logical_x[i].commutes_with(&self.logical_x[j])
                        || !self.logical_z[i].commutes_with(&self.logical_z[j]))
                {
                    return Err(CodeError::Structure("logical operators of one type must commute".into()));
                }
            }
        }
        let rank = symplectic_rank(&self.stabilizers);
        if rank + self.k != self.n {
            return Err(CodeError::Structure(format!(
                "stabilizer rank {rank} inconsistent with n={} k={}",
                self.n, self.k
            )));
        }
        Ok(())
    }

    pub fn is_css(&self) -> bool {
        self.stabilizers.iter().all(|s| s.is_x_type() || s.is_z_type())
    }

    pub fn x_stabilizers(&self) -> impl Iterator<Item = &PauliString> {
        self.stabilizers.iter().filter(|s| s.is_x_type() && !s.is_identity())
    }

    pub fn z_stabilizers(&self) -> impl Iterator<Item = &PauliString> {
        self.stabilizers.iter().filter(|s| s.is_z_type() && !s.is_identity())
    }

    /// True when `p` is, up to phase, an element of the stabilizer group.
    pub fn in_stabilizer_group(&self, p: &PauliString) -> bool {
        let mut ops = self.stabilizers.clone();
        let r = symplectic_rank(&ops);
        ops.push(*p);
        symplectic_rank(&ops) == r
    }
}

/// Replace letter `c` of an outer operator by the matching inner logical on inner logical `j`.
fn inner_logical(inner: &StabilizerCode, c: char, j: usize) -> PauliString {
    match c {
        'X' => inner.logical_x[j],
        'Z' => inner.logical_z[j],
        'Y' => inner.logical_x[j].mul(&inner.logical_z[j]).mul(&PauliString::identity(inner.n).with_phase(1)),
        _ => PauliString::identity(inner.n),
    }
}

/// Lift an outer-code operator onto inner logical layer `j` of `n` blocks.
fn lift(inner: &StabilizerCode, outer: &PauliString, j: usize) -> PauliString {
    let n = inner.n;
    let total = n * outer.n();
    let mut out = PauliString::identity(total).with_phase(outer.phase());
    for b in 0..outer.n() {
        let piece = inner_logical(inner, outer.letter(b), j).embed(total, b * n);
        out = out.mul(&piece);
    }
    out
}

/// Concatenate a two-logical-qubit code with itself.
///
/// The result has `n^2` qubits in `n` blocks of `n`. Its stabilizers are the inner
/// stabilizers on every block followed by each outer stabilizer lifted onto inner
/// logical 1 and then inner logical 2. Logical `2*j + a` (0-based) is outer logical
/// `a` lifted onto inner logical `j`.
pub fn concatenate_self(code: &StabilizerCode) -> Result<StabilizerCode, CodeError> {
    code.validate()?;
    if code.k != 2 {
        return Err(CodeError::Structure(format!("self-concatenation needs k = 2, got k = {}", code.k)));
    }
    let n = code.n;
    if n * n > super::MAX_QUBITS {
        return Err(CodeError::Capacity(format!("{} qubits exceed the Pauli width", n * n)));
    }
    let total = n * n;
    let mut stabilizers = Vec::new();
    // Keep the X-type rows together and the Z-type rows together, as in the block-matrix layout.
    let groups: Vec<Vec<&PauliString>> = if code.is_css() {
        vec![code.x_stabilizers().collect(), code.z_stabilizers().collect()]
    } else {
        vec![code.stabilizers.iter().collect()]
    };
    for group in groups {
        for s in &group {
            for b in 0..n {
                stabilizers.push(s.embed(total, b * n));
            }
        }
        for s in &group {
            for j in 0..2 {
                stabilizers.push(lift(code, s, j));
            }
        }
    }
    let mut logical_x = Vec::new();
    let mut logical_z = Vec::new();
    for j in 0..2 {
        for a in 0..2 {
            logical_x.push(lift(code, &code.logical_x[a], j));
            logical_z.push(lift(code, &code.logical_z[a], j));
        }
    }
    let out = StabilizerCode { n: total, k: 4, d: None, stabilizers, logical_x, logical_z };
    out.validate()?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c4_is_valid() {
        c4_code().validate().unwrap();
        c4_code_listing().validate().unwrap();
        let c = c4_code();
        assert_eq!((c.n, c.k), (4, 2));
        assert!(c.stabilizers[0].commutes_with(&c.stabilizers[1]));
    }

    #[test]
    fn c4_anticommutation_matrix_is_identity() {
        for code in [c4_code(), c4_code_listing()] {
            for i in 0..2 {
                for j in 0..2 {
                    assert_eq!(!code.logical_x[i].commutes_with(&code.logical_z[j]), i == j);
                }
            }
        }
    }

    #[test]
    fn both_bases_share_the_stabilizer_group() {
        let a = c4_code();
        let b = c4_code_listing();
        for s in &b.stabilizers {
            assert!(a.in_stabilizer_group(s));
        }
        // Each listed logical is a product of table-basis logicals and stabilizers.
        let mut ops = a.stabilizers.clone();
        ops.extend(a.logical_x.iter().chain(&a.logical_z));
        for l in b.logical_x.iter().chain(&b.logical_z) {
            let mut with = ops.clone();
            with.push(*l);
            assert_eq!(symplectic_rank(&with), symplectic_rank(&ops));
        }
    }

    #[test]
    fn concatenation_shape() {
        let h = concatenate_self(&c4_code()).unwrap();
        assert_eq!((h.n, h.k, h.stabilizers.len()), (16, 4, 12));
        assert_eq!(h.x_stabilizers().count(), 6);
        assert_eq!(h.z_stabilizers().count(), 6);
    }

    #[test]
    fn listing_row_five() {
        let h = concatenate_self(&c4_code_listing()).unwrap();
        assert_eq!(h.stabilizers[4].to_string(), "IXXIIXXIIXXIIXXI");
        assert_eq!(h.stabilizers[5].to_string(), "IXIXIXIXIXIXIXIX");
        assert_eq!(h.logical_x[0].to_string(), "IIIIIXXIIXXIIIII");
        assert_eq!(h.logical_z[0].to_string(), "ZIZIIIIIZIZIIIII");
        assert_eq!(h.logical_z[3].to_string(), "ZIIZIIIIIIIIZIIZ");
    }

    #[test]
    fn both_concatenations_share_the_stabilizer_group() {
        let a = concatenate_self(&c4_code()).unwrap();
        let b = concatenate_self(&c4_code_listing()).unwrap();
        for s in &b.stabilizers {
            assert!(a.in_stabilizer_group(s), "{s}");
        }
    }

    #[test]
    fn rejects_broken_code() {
        let mut c = c4_code();
        c.stabilizers[1] = "ZZZI".parse().unwrap();
        assert!(matches!(concatenate_self(&c), Err(CodeError::Structure(_))));
    }
}
