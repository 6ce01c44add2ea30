use atomqec::builders::{build, parse_bits, random_ladder_inputs, ExperimentSpec, Family, MHC_BITSTRINGS};
use atomqec::circuit::{Circuit, Gate, GateKind, Site, SiteGrid, Tier};
use atomqec::compiler::lower;
use atomqec::sim::{statevector_oracle, tableau_distribution, Distribution, SimError, ORACLE_MAX_QUBITS};
use proptest::prelude::*;

fn max_deviation(a: &Distribution, b: &Distribution) -> f64 {
    a.keys()
        .chain(b.keys())
        .map(|k| (a.get(k).copied().unwrap_or(0.0) - b.get(k).copied().unwrap_or(0.0)).abs())
        .fold(0.0, f64::max)
}

fn small_circuits() -> Vec<(String, Circuit)> {
    let mut specs: Vec<ExperimentSpec> =
        [Family::ShorUnencoded, Family::ShorTwoRow, Family::ShorThreeRow, Family::ShorTwoRowLdu]
            .into_iter()
            .map(ExperimentSpec::shor)
            .collect();
    for n in [4, 6, 8] {
        let bits = random_ladder_inputs(n, 1, 2).remove(0);
        specs.push(ExperimentSpec::ladder(Family::LadderConstantDepth, n, false, bits.clone()));
        specs.push(ExperimentSpec::ladder(Family::LadderConstantDepth, n, true, bits));
    }
    for s in MHC_BITSTRINGS {
        specs.push(ExperimentSpec::mhc(false, parse_bits(s).unwrap()));
    }
    let mut out = Vec::new();
    for spec in specs {
        let e = build(&spec).unwrap();
        let p = lower(&e.circuit).unwrap();
        for (tag, c) in [("logical", e.circuit), ("physical", p)] {
            if c.atoms().len() <= ORACLE_MAX_QUBITS {
                out.push((format!("{} {tag}", spec.label()), c));
            }
        }
    }
    out
}

#[test]
fn tableau_enumeration_matches_statevector() {
    let cs = small_circuits();
    assert!(cs.len() >= 10);
    for (name, c) in cs {
        let t = tableau_distribution(&c).unwrap();
        let s = statevector_oracle(&c).unwrap();
        let dev = max_deviation(&t, &s);
        assert!(dev <= 2e-12, "{name}: deviation {dev}");
        assert!((t.values().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn branch_cap_is_a_capacity_error() {
    let mut c = line(26);
    for a in 0..26 {
        c.push(Gate::new(GateKind::H, &[a]));
        c.push(Gate::new(GateKind::Measure, &[a]));
    }
    assert!(matches!(tableau_distribution(&c), Err(SimError::Capacity(_))));
}

fn line(n: u32) -> Circuit {
    let mut c = Circuit::new(Tier::Logical, SiteGrid::new(1, n as i32));
    for a in 0..n {
        c.grid.place(a, Site::new(0, a as i32));
    }
    c
}

fn random_clifford(n: u32, ops: &[(u8, u32, u32)]) -> Circuit {
    let mut c = line(n);
    for &(k, a, b) in ops {
        let (a, b) = (a % n, b % n);
        let g = match k % 5 {
            0 => Gate::new(GateKind::H, &[a]),
            1 => Gate::new(GateKind::Rz { theta: std::f64::consts::FRAC_PI_2 }, &[a]),
            2 => Gate::new(GateKind::X, &[a]),
            _ if a == b => Gate::new(GateKind::H, &[a]),
            3 => Gate::new(GateKind::CZ, &[a, b]),
            _ => Gate::new(GateKind::CX, &[a, b]),
        };
        c.push(g);
    }
    for a in 0..n {
        c.push(Gate::new(GateKind::Measure, &[a]));
    }
    c
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn random_cliffords_agree(n in 1u32..7, ops in prop::collection::vec((0u8..5, 0u32..7, 0u32..7), 0..40)) {
        let c = random_clifford(n, &ops);
        let dev = max_deviation(&tableau_distribution(&c).unwrap(), &statevector_oracle(&c).unwrap());
        prop_assert!(dev <= 1e-12, "deviation {}", dev);
    }
}
