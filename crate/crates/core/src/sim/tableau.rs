//! Aaronson-Gottesman stabilizer tableau for up to 63 qubits, one `u64` word per row and plane.

use rand::Rng;

pub const MAX_TABLEAU_QUBITS: usize = 63;

#[derive(Clone, Debug)]
pub struct Tableau {
    n: usize,
    // Rows 0..n are destabilizers, n..2n stabilizers.
    x: Vec<u64>,
    z: Vec<u64>,
    r: Vec<bool>,
}

/// Exponent of i picked up when multiplying row (x1, z1) into row (x2, z2), summed over qubits.
fn phase_sum(x1: u64, z1: u64, x2: u64, z2: u64) -> i32 {
    let y1 = x1 & z1;
    let xo = x1 & !z1;
    let zo = !x1 & z1;
    let plus = (y1 & z2 & !x2) | (xo & z2 & x2) | (zo & x2 & !z2);
    let minus = (y1 & x2 & !z2) | (xo & z2 & !x2) | (zo & x2 & z2);
    plus.count_ones() as i32 - minus.count_ones() as i32
}

impl Tableau {
    /// |0...0> on `n` qubits.
    pub fn new(n: usize) -> Self {
        assert!(n <= MAX_TABLEAU_QUBITS, "tableau supports at most {MAX_TABLEAU_QUBITS} qubits");
        let mut x = vec![0u64; 2 * n];
        let mut z = vec![0u64; 2 * n];
        for q in 0..n {
            x[q] = 1 << q;
            z[n + q] = 1 << q;
        }
        Tableau { n, x, z, r: vec![false; 2 * n] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&mut self, q: usize) {
        let b = 1u64 << q;
        for i in 0..2 * self.n {
            let (xi, zi) = (self.x[i] & b, self.z[i] & b);
            if xi != 0 && zi != 0 {
                self.r[i] = !self.r[i];
            }
            self.x[i] = (self.x[i] & !b) | zi;
            self.z[i] = (self.z[i] & !b) | xi;
        }
    }

    pub fn s(&mut self, q: usize) {
        let b = 1u64 << q;
        for i in 0..2 * self.n {
            if self.x[i] & b != 0 {
                if self.z[i] & b != 0 {
                    self.r[i] = !self.r[i];
                }
                self.z[i] ^= b;
            }
        }
    }

    pub fn cx(&mut self, c: usize, t: usize) {
        let (bc, bt) = (1u64 << c, 1u64 << t);
        for i in 0..2 * self.n {
            let xc = self.x[i] & bc != 0;
            let zt = self.z[i] & bt != 0;
            let xt = self.x[i] & bt != 0;
            let zc = self.z[i] & bc != 0;
            if xc && zt && (xt == zc) {
                self.r[i] = !self.r[i];
            }
            if xc {
                self.x[i] ^= bt;
            }
            if zt {
                self.z[i] ^= bc;
            }
        }
    }

    pub fn cz(&mut self, a: usize, b: usize) {
        let (ba, bb) = (1u64 << a, 1u64 << b);
        for i in 0..2 * self.n {
            let xa = self.x[i] & ba != 0;
            let xb = self.x[i] & bb != 0;
            if xa && xb && ((self.z[i] & ba != 0) != (self.z[i] & bb != 0)) {
                self.r[i] = !self.r[i];
            }
            if xa {
                self.z[i] ^= bb;
            }
            if xb {
                self.z[i] ^= ba;
            }
        }
    }

    pub fn swap(&mut self, a: usize, b: usize) {
        self.cx(a, b);
        self.cx(b, a);
        self.cx(a, b);
    }

    pub fn x_gate(&mut self, q: usize) {
        let b = 1u64 << q;
        for i in 0..2 * self.n {
            if self.z[i] & b != 0 {
                self.r[i] = !self.r[i];
            }
        }
    }

    pub fn z_gate(&mut self, q: usize) {
        let b = 1u64 << q;
        for i in 0..2 * self.n {
            if self.x[i] & b != 0 {
                self.r[i] = !self.r[i];
            }
        }
    }

    pub fn y_gate(&mut self, q: usize) {
        let b = 1u64 << q;
        for i in 0..2 * self.n {
            if (self.x[i] ^ self.z[i]) & b != 0 {
                self.r[i] = !self.r[i];
            }
        }
    }

    /// Apply a Pauli given as letter 1=X, 2=Z, 3=Y.
    pub fn pauli(&mut self, q: usize, letter: u8) {
        match letter {
            1 => self.x_gate(q),
            2 => self.z_gate(q),
            3 => self.y_gate(q),
            _ => {}
        }
    }

    fn rowsum_into(&self, hx: &mut u64, hz: &mut u64, hr: &mut bool, i: usize) {
        let g = phase_sum(self.x[i], self.z[i], *hx, *hz);
        let total = 2 * (*hr as i32) + 2 * (self.r[i] as i32) + g;
        *hr = total.rem_euclid(4) == 2;
        *hx ^= self.x[i];
        *hz ^= self.z[i];
    }

    fn rowsum(&mut self, h: usize, i: usize) {
        let (mut hx, mut hz, mut hr) = (self.x[h], self.z[h], self.r[h]);
        self.rowsum_into(&mut hx, &mut hz, &mut hr, i);
        self.x[h] = hx;
        self.z[h] = hz;
        self.r[h] = hr;
    }

    /// Outcome of a Z measurement if it is deterministic.
    pub fn peek_z(&self, q: usize) -> Option<bool> {
        let b = 1u64 << q;
        let n = self.n;
        if (n..2 * n).any(|p| self.x[p] & b != 0) {
            return None;
        }
        let (mut sx, mut sz, mut sr) = (0u64, 0u64, false);
        for i in 0..n {
            if self.x[i] & b != 0 {
                self.rowsum_into(&mut sx, &mut sz, &mut sr, i + n);
            }
        }
        Some(sr)
    }

    /// Measure qubit `q` in Z, collapsing the state.
    pub fn measure<R: Rng + ?Sized>(&mut self, q: usize, rng: &mut R) -> bool {
        let b = 1u64 << q;
        let n = self.n;
        let Some(p) = (n..2 * n).find(|&p| self.x[p] & b != 0) else {
            return self.peek_z(q).expect("deterministic outcome");
        };
        for i in 0..2 * n {
            if i != p && self.x[i] & b != 0 {
                self.rowsum(i, p);
            }
        }
        self.x[p - n] = self.x[p];
        self.z[p - n] = self.z[p];
        self.r[p - n] = self.r[p];
        let outcome: bool = rng.random();
        self.x[p] = 0;
        self.z[p] = b;
        self.r[p] = outcome;
        outcome
    }

    /// Measure with a forced outcome for the random case; used by exhaustive enumeration.
    pub fn measure_forced(&mut self, q: usize, forced: bool) -> (bool, bool) {
        let b = 1u64 << q;
        let n = self.n;
        let Some(p) = (n..2 * n).find(|&p| self.x[p] & b != 0) else {
            return (self.peek_z(q).expect("deterministic outcome"), true);
        };
        for i in 0..2 * n {
            if i != p && self.x[i] & b != 0 {
                self.rowsum(i, p);
            }
        }
        self.x[p - n] = self.x[p];
        self.z[p - n] = self.z[p];
        self.r[p - n] = self.r[p];
        self.x[p] = 0;
        self.z[p] = b;
        self.r[p] = forced;
        (forced, false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn bell_pair_correlates() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let mut t = Tableau::new(2);
            t.h(0);
            t.cx(0, 1);
            let a = t.measure(0, &mut rng);
            assert_eq!(t.peek_z(1), Some(a));
        }
    }

    #[test]
    fn x_flips_and_cz_phases() {
        let mut t = Tableau::new(2);
        t.x_gate(1);
        assert_eq!(t.peek_z(1), Some(true));
        // H CZ H = CX.
        let mut u = Tableau::new(2);
        u.x_gate(0);
        u.h(1);
        u.cz(0, 1);
        u.h(1);
        assert_eq!(u.peek_z(1), Some(true));
    }

    #[test]
    fn s_squared_is_z() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut t = Tableau::new(1);
        t.h(0);
        t.s(0);
        t.s(0);
        t.h(0);
        assert_eq!(t.peek_z(0), Some(true));
        assert!(t.measure(0, &mut rng));
    }

    #[test]
    fn y_gate_flips() {
        let mut t = Tableau::new(1);
        t.y_gate(0);
        assert_eq!(t.peek_z(0), Some(true));
    }
}
