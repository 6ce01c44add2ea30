use atomqec::analysis::{decode_distribution, tvd, PostProcessConfig};
use atomqec::builders::{
    build, build_constant_depth, build_outside_in, data_positions, outside_in_bits, parse_bits, random_ladder_inputs,
    ExperimentSpec, Family, MHC_BITSTRINGS,
};
use atomqec::circuit::{schedule_moments, two_qubit_depth, validate, Circuit};
use atomqec::sim::{statevector_oracle, Distribution, ORACLE_MAX_QUBITS};

fn all_specs() -> Vec<ExperimentSpec> {
    let mut v: Vec<ExperimentSpec> =
        [Family::ShorUnencoded, Family::ShorTwoRow, Family::ShorThreeRow, Family::ShorTwoRowLdu]
            .into_iter()
            .map(ExperimentSpec::shor)
            .collect();
    for n in [4, 6, 8, 12] {
        for enc in [false, true] {
            let bits = random_ladder_inputs(n, 1, 11).remove(0);
            v.push(ExperimentSpec::ladder(Family::LadderConstantDepth, n, enc, bits.clone()));
            let data: Vec<u8> = data_positions(n).iter().map(|&i| bits[i]).collect();
            if data.len() % 2 == 0 {
                v.push(ExperimentSpec::ladder(Family::LadderOutsideIn, data.len(), enc, data));
            }
        }
    }
    for s in MHC_BITSTRINGS {
        v.push(ExperimentSpec::mhc(true, parse_bits(s).unwrap()));
        v.push(ExperimentSpec::mhc(false, parse_bits(s).unwrap()));
    }
    v
}

fn oracle_words(c: &Circuit) -> (Distribution, f64) {
    let d = statevector_oracle(c).unwrap();
    let dec = decode_distribution(&d, c, &PostProcessConfig::default()).unwrap();
    (dec.words, dec.discarded.values().sum())
}

#[test]
fn every_builder_output_validates() {
    for spec in all_specs() {
        let e = build(&spec).unwrap();
        let v = validate(&e.circuit);
        assert!(v.is_empty(), "{}: {v:?}", spec.label());
        let s = schedule_moments(&e.circuit).unwrap();
        assert!(validate(&s).is_empty(), "{}", spec.label());
    }
}

#[test]
fn noiseless_logical_circuits_match_their_references() {
    for spec in all_specs() {
        let e = build(&spec).unwrap();
        if e.circuit.n_atoms() > ORACLE_MAX_QUBITS {
            continue;
        }
        let (words, discarded) = oracle_words(&e.circuit);
        assert!(discarded < 1e-12, "{}: discard mass {discarded}", spec.label());
        assert!(tvd(&words, &e.expected) < 1e-12, "{}: {words:?} vs {:?}", spec.label(), e.expected);
    }
}

#[test]
fn shor_reference_is_uniform_over_four_words() {
    let e = build(&ExperimentSpec::shor(Family::ShorUnencoded)).unwrap();
    let keys: Vec<&str> = e.expected.keys().map(String::as_str).collect();
    assert_eq!(keys, ["000", "011", "100", "111"]);
    assert!(e.expected.values().all(|p| (p - 0.25).abs() < 1e-12));
}

#[test]
fn shor_embeddings_use_expected_patches() {
    let two = build(&ExperimentSpec::shor(Family::ShorTwoRow)).unwrap().circuit;
    assert_eq!(two.blocks.len(), 2);
    let used: std::collections::BTreeSet<u32> = two.samples[0].iter().copied().collect();
    assert_eq!(used.len(), 3);
    let three = build(&ExperimentSpec::shor(Family::ShorThreeRow)).unwrap().circuit;
    assert_eq!(three.samples.len(), 2);
}

#[test]
fn constant_depth_matches_outside_in_exhaustively() {
    for n in [4usize, 6, 8] {
        let data = data_positions(n);
        for x in 0u32..(1 << data.len()) {
            let mut bits = vec![0u8; n];
            let mut dbits = Vec::new();
            for (k, &i) in data.iter().enumerate() {
                bits[i] = (x >> k & 1) as u8;
                dbits.push(bits[i]);
            }
            let want: String = outside_in_bits(&dbits).iter().map(|b| char::from(b'0' + b)).collect();
            let c = build_constant_depth(n, &bits, false).unwrap();
            let (words, discarded) = oracle_words(&c);
            assert_eq!(discarded, 0.0);
            assert_eq!(words.len(), 1, "n={n} x={x}: {words:?}");
            assert!((words[&want] - 1.0).abs() < 1e-12, "n={n} x={x}: {words:?} want {want}");
            // The sequential circuit agrees with its classical model.
            let r = build_outside_in(dbits.len(), &dbits, false).unwrap();
            let (rw, _) = oracle_words(&r);
            assert!((rw[&want] - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn six_qubit_outside_in_sums_to_zero_on_all_ones() {
    let out = outside_in_bits(&[1; 6]);
    assert_eq!(out[5], 0);
    let c = schedule_moments(&build_outside_in(6, &[1; 6], false).unwrap()).unwrap();
    assert_eq!(two_qubit_depth(&c), 3);
}

#[test]
fn constant_depth_entangling_depth_is_flat() {
    let depth = |n: usize| {
        let c = build_constant_depth(n, &vec![0; n], false).unwrap();
        two_qubit_depth(&schedule_moments(&c).unwrap())
    };
    let d8 = depth(8);
    assert!(d8 <= 4, "depth {d8}");
    for n in [12, 16, 20, 24] {
        assert_eq!(depth(n), d8, "n={n}");
    }
}

#[test]
fn bad_specs_are_rejected() {
    assert!(build_constant_depth(7, &[0; 7], false).is_err());
    assert!(build_constant_depth(8, &[0, 0, 1, 0, 0, 0, 0, 0], false).is_err());
    assert!(build(&ExperimentSpec::mhc(true, vec![1, 0])).is_err());
    assert!(Family::parse("nope").is_err());
}

#[test]
fn large_ladder_reference_is_classical() {
    let bits = random_ladder_inputs(24, 1, 5).remove(0);
    let e = build(&ExperimentSpec::ladder(Family::LadderOutsideIn, 24, false, bits.clone())).unwrap();
    assert!(e.reference.measured_atoms().len() > ORACLE_MAX_QUBITS);
    assert_eq!(e.expected.len(), 1);
    let word: String = outside_in_bits(&bits).iter().map(|&b| char::from(b'0' + b)).collect();
    assert_eq!(e.expected.get(&word), Some(&1.0));
}

#[test]
fn odd_ladder_sizes_are_rejected_not_panicked() {
    let bits = random_ladder_inputs(13, 1, 1).remove(0);
    assert_eq!(bits.len(), 13);
    assert!(build(&ExperimentSpec::ladder(Family::LadderConstantDepth, 13, false, bits)).is_err());
}
