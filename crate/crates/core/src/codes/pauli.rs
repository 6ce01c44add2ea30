//! Pauli strings in symplectic form with an explicit `i^k` phase.

use std::fmt;
use std::str::FromStr;

use super::CodeError;

/// Largest qubit count a [`PauliString`] can hold (one `u64` per bit plane).
pub const MAX_QUBITS: usize = 64;

/// A Pauli operator `i^phase * P_0 ⊗ ... ⊗ P_{n-1}`.
///
/// Qubit `j` carries X if bit `j` of `x` is set, Z if bit `j` of `z` is set and Y if both are set.
/// The phase counts quarter turns, so `phase = 2` is a minus sign.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    n: usize,
    x: u64,
    z: u64,
    phase: u8,
}

fn mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        assert!(n <= MAX_QUBITS, "PauliString supports at most {MAX_QUBITS} qubits");
        Self { n, x: 0, z: 0, phase: 0 }
    }

    pub fn from_bits(n: usize, x: u64, z: u64, phase: u8) -> Self {
        assert!(n <= MAX_QUBITS, "PauliString supports at most {MAX_QUBITS} qubits");
        let m = mask(n);
        Self { n, x: x & m, z: z & m, phase: phase % 4 }
    }

    /// X on every qubit in `support`.
    pub fn x_on(n: usize, support: &[usize]) -> Self {
        Self::from_bits(n, support.iter().fold(0, |a, &q| a | 1 << q), 0, 0)
    }

    /// Z on every qubit in `support`.
    pub fn z_on(n: usize, support: &[usize]) -> Self {
        Self::from_bits(n, 0, support.iter().fold(0, |a, &q| a | 1 << q), 0)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x_bits(&self) -> u64 {
        self.x
    }

    pub fn z_bits(&self) -> u64 {
        self.z
    }

    pub fn phase(&self) -> u8 {
        self.phase
    }

    pub fn weight(&self) -> usize {
        (self.x | self.z).count_ones() as usize
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.n).filter(|&q| (self.x | self.z) >> q & 1 == 1).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    pub fn is_x_type(&self) -> bool {
        self.z == 0
    }

    pub fn is_z_type(&self) -> bool {
        self.x == 0
    }

    /// Letter on qubit `q`: one of `I`, `X`, `Y`, `Z`.
    pub fn letter(&self, q: usize) -> char {
        match (self.x >> q & 1, self.z >> q & 1) {
            (0, 0) => 'I',
            (1, 0) => 'X',
            (1, 1) => 'Y',
            _ => 'Z',
        }
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        debug_assert_eq!(self.n, other.n);
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()) % 2 == 0
    }

    /// Operator product `self * other` with the phase tracked exactly.
    pub fn mul(&self, other: &PauliString) -> PauliString {
        assert_eq!(self.n, other.n, "qubit count mismatch");
        // Letters are stored as X^x Z^z with Y = iXZ, so convert to that form, multiply, convert back.
        let ys_a = (self.x & self.z).count_ones();
        let ys_b = (other.x & other.z).count_ones();
        // (X^a Z^b)(X^c Z^d) = (-1)^{b.c} X^{a+c} Z^{b+d}
        let swap = (self.z & other.x).count_ones();
        let x = self.x ^ other.x;
        let z = self.z ^ other.z;
        let ys_out = (x & z).count_ones();
        let k = self.phase as i64 + other.phase as i64 + ys_a as i64 + ys_b as i64 + 2 * swap as i64 - ys_out as i64;
        PauliString { n: self.n, x, z, phase: k.rem_euclid(4) as u8 }
    }

    pub fn with_phase(mut self, phase: u8) -> Self {
        self.phase = phase % 4;
        self
    }

    /// Same letters on a wider register, placed starting at qubit `offset`.
    pub fn embed(&self, n: usize, offset: usize) -> PauliString {
        assert!(offset + self.n <= n);
        PauliString::from_bits(n, self.x << offset, self.z << offset, self.phase)
    }

    /// Conjugate by a Hadamard on `q`: X <-> Z, Y -> -Y.
    pub fn conj_h(&mut self, q: usize) {
        let (xb, zb) = (self.x >> q & 1, self.z >> q & 1);
        if xb == 1 && zb == 1 {
            self.phase = (self.phase + 2) % 4;
        }
        self.x = (self.x & !(1 << q)) | zb << q;
        self.z = (self.z & !(1 << q)) | xb << q;
    }

    /// Conjugate by S = diag(1, i) on `q`: X -> Y, Y -> -X.
    pub fn conj_s(&mut self, q: usize) {
        let (xb, zb) = (self.x >> q & 1, self.z >> q & 1);
        if xb == 1 && zb == 1 {
            self.phase = (self.phase + 2) % 4;
        }
        self.z ^= xb << q;
    }

    /// Conjugate by CX with control `c` and target `t`.
    pub fn conj_cx(&mut self, c: usize, t: usize) {
        let (xc, zc) = (self.x >> c & 1, self.z >> c & 1);
        let (xt, zt) = (self.x >> t & 1, self.z >> t & 1);
        // Sign flips for X_c Z_t ... patterns where both Y-ish terms interfere (CHP rule).
        if xc & zt & (xt ^ zc ^ 1) == 1 {
            self.phase = (self.phase + 2) % 4;
        }
        self.x ^= xc << t;
        self.z ^= zt << c;
    }

    /// Conjugate by CZ on `a`, `b`.
    pub fn conj_cz(&mut self, a: usize, b: usize) {
        self.conj_h(b);
        self.conj_cx(a, b);
        self.conj_h(b);
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = ["", "i", "-", "-i"][self.phase as usize];
        f.write_str(prefix)?;
        for q in 0..self.n {
            write!(f, "{}", self.letter(q))?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = CodeError;

    /// Parses `[+|-][i]LETTERS` where LETTERS are from `IXYZ` (`_` is accepted as `I`).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (mut phase, rest) = if let Some(r) = s.strip_prefix('-') {
            (2u8, r)
        } else if let Some(r) = s.strip_prefix('+') {
            (0, r)
        } else {
            (0, s)
        };
        let rest = if let Some(r) = rest.strip_prefix('i') {
            phase = (phase + 1) % 4;
            r
        } else {
            rest
        };
        let n = rest.chars().count();
        if n == 0 {
            return Err(CodeError::Parse(format!("empty Pauli string {s:?}")));
        }
        if n > MAX_QUBITS {
            return Err(CodeError::Capacity(format!("Pauli string longer than {MAX_QUBITS} qubits")));
        }
        let (mut x, mut z) = (0u64, 0u64);
        for (q, c) in rest.chars().enumerate() {
            match c {
                'I' | '_' => {}
                'X' => x |= 1 << q,
                'Z' => z |= 1 << q,
                'Y' => {
                    x |= 1 << q;
                    z |= 1 << q;
                }
                other => return Err(CodeError::Parse(format!("bad Pauli letter {other:?} in {s:?}"))),
            }
        }
        Ok(PauliString { n, x, z, phase })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn single_qubit_products() {
        assert_eq!(p("X").mul(&p("Z")), p("-iY"));
        assert_eq!(p("Z").mul(&p("X")), p("iY"));
        assert_eq!(p("X").mul(&p("Y")), p("iZ"));
        assert_eq!(p("Y").mul(&p("Y")), p("I"));
        assert_eq!(p("Y").mul(&p("Z")), p("iX"));
    }

    #[test]
    fn display_round_trip() {
        for s in ["XXXX", "-iZIYX", "iI", "-ZZ"] {
            assert_eq!(p(s).to_string(), s);
        }
    }

    #[test]
    fn commutation() {
        assert!(p("XXXX").commutes_with(&p("ZZZZ")));
        assert!(!p("IXIX").commutes_with(&p("ZZII")));
        assert!(p("IXIX").commutes_with(&p("ZIZI")));
    }

    #[test]
    fn conjugation_rules() {
        let mut a = p("XI");
        a.conj_cx(0, 1);
        assert_eq!(a, p("XX"));
        let mut b = p("IZ");
        b.conj_cx(0, 1);
        assert_eq!(b, p("ZZ"));
        let mut c = p("Y");
        c.conj_h(0);
        assert_eq!(c, p("-Y"));
        let mut d = p("X");
        d.conj_s(0);
        assert_eq!(d, p("Y"));
        let mut e = p("XI");
        e.conj_cz(0, 1);
        assert_eq!(e, p("XZ"));
        let mut f = p("YY");
        f.conj_cx(0, 1);
        assert_eq!(f, p("-XZ"));
    }

    #[test]
    fn rejects_garbage() {
        assert!("XQ".parse::<PauliString>().is_err());
        assert!("".parse::<PauliString>().is_err());
    }
}
