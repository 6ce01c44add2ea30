//! Single-qubit unitaries for the gate set, Clifford recognition and the Rz twirl.

use std::collections::{HashMap, VecDeque};
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};
use std::sync::OnceLock;

use num_complex::Complex64 as C;

use crate::circuit::GateKind;

pub type Mat2 = [[C; 2]; 2];

pub const ANGLE_EPS: f64 = 1e-12;

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[c(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn dagger(a: &Mat2) -> Mat2 {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

pub fn identity() -> Mat2 {
    [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]]
}

pub fn hadamard() -> Mat2 {
    let h = FRAC_1_SQRT_2;
    [[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]]
}

pub fn pauli_x() -> Mat2 {
    [[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]]
}

pub fn pauli_y() -> Mat2 {
    [[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]]
}

pub fn pauli_z() -> Mat2 {
    [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-1.0, 0.0)]]
}

pub fn s_gate() -> Mat2 {
    [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, 1.0)]]
}

/// `exp(-i theta Z / 2)`.
pub fn rz(theta: f64) -> Mat2 {
    [[C::from_polar(1.0, -theta / 2.0), c(0.0, 0.0)], [c(0.0, 0.0), C::from_polar(1.0, theta / 2.0)]]
}

/// `exp(-i theta (cos(phi) X + sin(phi) Y) / 2)`.
pub fn gr(theta: f64, phi: f64) -> Mat2 {
    let (s, co) = (theta / 2.0).sin_cos();
    [[c(co, 0.0), c(0.0, -s) * C::from_polar(1.0, -phi)], [c(0.0, -s) * C::from_polar(1.0, phi), c(co, 0.0)]]
}

/// Unitary of a single-qubit gate kind, if it is one.
pub fn unitary(kind: &GateKind) -> Option<Mat2> {
    Some(match *kind {
        GateKind::H => hadamard(),
        GateKind::X => pauli_x(),
        GateKind::Rz { theta } => rz(theta),
        GateKind::GR { theta, phi } => gr(theta, phi),
        _ => return None,
    })
}

/// True when `theta` is a multiple of pi/2 (within [`ANGLE_EPS`]).
pub fn is_clifford_angle(theta: f64) -> bool {
    let k = theta / FRAC_PI_2;
    (k - k.round()).abs() < ANGLE_EPS
}

/// Elementary tableau operations a single-qubit Clifford decomposes into.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Elem {
    H,
    S,
}

/// Images of X and Z under conjugation, encoded as (letter, sign) with letter 1=X, 2=Z, 3=Y.
pub type CliffordKey = ((u8, bool), (u8, bool));

fn pauli_of(m: &Mat2) -> Option<(u8, bool)> {
    for (letter, p) in [(1u8, pauli_x()), (2, pauli_z()), (3, pauli_y())] {
        // Coefficient tr(P m) / 2 must be +-1 for a Pauli image.
        let coef = (p[0][0] * m[0][0] + p[0][1] * m[1][0] + p[1][0] * m[0][1] + p[1][1] * m[1][1]) / 2.0;
        if (coef.re - 1.0).abs() < 1e-9 && coef.im.abs() < 1e-9 {
            return Some((letter, false));
        }
        if (coef.re + 1.0).abs() < 1e-9 && coef.im.abs() < 1e-9 {
            return Some((letter, true));
        }
    }
    None
}

/// Conjugation action of `u`, or `None` if `u` is not Clifford.
pub fn clifford_key(u: &Mat2) -> Option<CliffordKey> {
    let ud = dagger(u);
    let xi = pauli_of(&mat_mul(&mat_mul(u, &pauli_x()), &ud))?;
    let zi = pauli_of(&mat_mul(&mat_mul(u, &pauli_z()), &ud))?;
    Some((xi, zi))
}

fn word_table() -> &'static HashMap<CliffordKey, Vec<Elem>> {
    static TABLE: OnceLock<HashMap<CliffordKey, Vec<Elem>>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut table = HashMap::new();
        let mut queue = VecDeque::new();
        table.insert(clifford_key(&identity()).unwrap(), Vec::new());
        queue.push_back((identity(), Vec::new()));
        while let Some((u, word)) = queue.pop_front() {
            for (e, g) in [(Elem::H, hadamard()), (Elem::S, s_gate())] {
                // Applying e after u.
                let next = mat_mul(&g, &u);
                let key = clifford_key(&next).unwrap();
                if !table.contains_key(&key) {
                    let mut w: Vec<Elem> = word.clone();
                    w.push(e);
                    table.insert(key, w.clone());
                    queue.push_back((next, w));
                }
            }
        }
        assert_eq!(table.len(), 24);
        table
    })
}

/// Shortest H/S word (applied left to right in time) equal to `u` up to global phase.
pub fn clifford_word(u: &Mat2) -> Option<Vec<Elem>> {
    clifford_key(u).map(|k| word_table()[&k].clone())
}

/// Pauli-twirl of `Rz(theta)`: probabilities of applying I and Z.
pub fn twirl_rz(theta: f64) -> (f64, f64) {
    let (s, co) = (theta / 2.0).sin_cos();
    (co * co, s * s)
}

/// Twirled channel of a single-qubit gate as (probability, unitary) pairs.
///
/// Clifford gates pass through unchanged. Only `Rz` has a non-Clifford twirl here.
pub fn twirl(kind: &GateKind) -> Result<Vec<(f64, Mat2)>, String> {
    match *kind {
        GateKind::Rz { theta } if !is_clifford_angle(theta) => {
            let (pi, pz) = twirl_rz(theta);
            Ok(vec![(pi, identity()), (pz, pauli_z())])
        }
        GateKind::GR { theta, .. } if !is_clifford_angle(theta) => {
            Err(format!("GR({theta}) is not Clifford and has no twirl in this simulator"))
        }
        _ => match unitary(kind) {
            Some(u) if clifford_key(&u).is_some() => Ok(vec![(1.0, u)]),
            Some(_) => Err(format!("{:?} is not Clifford", kind)),
            None => Err(format!("{:?} is not a single-qubit gate", kind)),
        },
    }
}

/// Reduce an angle to (-pi, pi].
pub fn wrap_angle(theta: f64) -> f64 {
    let mut t = theta % (2.0 * PI);
    if t > PI {
        t -= 2.0 * PI;
    } else if t <= -PI {
        t += 2.0 * PI;
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &Mat2, b: &Mat2) -> bool {
        // Equal up to global phase.
        let mut phase = None;
        for i in 0..2 {
            for j in 0..2 {
                if b[i][j].norm() > 1e-9 {
                    phase.get_or_insert(a[i][j] / b[i][j]);
                }
            }
        }
        let p = phase.unwrap();
        (0..2).all(|i| (0..2).all(|j| (a[i][j] - p * b[i][j]).norm() < 1e-9))
    }

    #[test]
    fn all_24_cliffords_have_words() {
        assert_eq!(word_table().len(), 24);
    }

    #[test]
    fn words_reproduce_unitaries() {
        for u in [hadamard(), gr(FRAC_PI_2, 0.0), gr(FRAC_PI_2, FRAC_PI_2), rz(-FRAC_PI_2), gr(PI, 0.0)] {
            let w = clifford_word(&u).unwrap();
            let mut m = identity();
            for e in w {
                let g = match e {
                    Elem::H => hadamard(),
                    Elem::S => s_gate(),
                };
                m = mat_mul(&g, &m);
            }
            assert!(close(&m, &u));
        }
    }

    #[test]
    fn twirl_of_clifford_rz_is_exact() {
        let t = twirl(&GateKind::Rz { theta: FRAC_PI_2 }).unwrap();
        assert_eq!(t.len(), 1);
        assert!(close(&t[0].1, &s_gate()));
        let id = twirl(&GateKind::Rz { theta: 0.0 }).unwrap();
        assert!(close(&id[0].1, &identity()));
    }

    #[test]
    fn twirl_weights() {
        let t = twirl(&GateKind::Rz { theta: 0.3 }).unwrap();
        assert!((t[0].0 - (0.15f64).cos().powi(2)).abs() < 1e-15);
        assert!((t[1].0 - (0.15f64).sin().powi(2)).abs() < 1e-15);
        assert!(twirl(&GateKind::GR { theta: 0.3, phi: 0.0 }).is_err());
    }
}
