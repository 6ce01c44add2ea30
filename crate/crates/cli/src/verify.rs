//! Oracle-equivalence suite over the builder circuits.

use std::fmt::Write as _;

use atomqec::analysis::{decode_distribution, tvd, PostProcessConfig};
use atomqec::builders::{build, parse_bits, random_ladder_inputs, ExperimentSpec, Family, MHC_BITSTRINGS};
use atomqec::circuit::Circuit;
use atomqec::compiler::{lower, verify_equivalence};
use atomqec::sim::{statevector_oracle, tableau_distribution, Distribution, ORACLE_MAX_QUBITS};

use crate::runner::CliError;
use crate::schema::VERIFY_HEADER;

/// Largest allowed per-outcome gap between tableau enumeration and the oracle.
pub const MAX_DEVIATION: f64 = 2e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyRow {
    pub circuit: String,
    pub atoms: usize,
    /// None when skipped for size.
    pub outcome: Option<VerifyOutcome>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyOutcome {
    pub max_deviation: f64,
    pub tvd: f64,
    pub discarded: f64,
    /// Only for lowered circuits.
    pub equivalent: Option<bool>,
}

impl VerifyOutcome {
    pub fn passed(&self) -> bool {
        self.max_deviation <= MAX_DEVIATION
            && self.tvd <= MAX_DEVIATION
            && self.discarded <= MAX_DEVIATION
            && self.equivalent != Some(false)
    }
}

impl VerifyRow {
    pub fn status(&self) -> &'static str {
        match &self.outcome {
            None => "skipped",
            Some(o) if o.passed() => "pass",
            Some(_) => "fail",
        }
    }
}

pub fn suite_specs() -> Vec<ExperimentSpec> {
    let mut v: Vec<ExperimentSpec> =
        [Family::ShorUnencoded, Family::ShorTwoRow, Family::ShorThreeRow, Family::ShorTwoRowLdu]
            .into_iter()
            .map(ExperimentSpec::shor)
            .collect();
    for n in [4, 6, 8, 12] {
        let bits = random_ladder_inputs(n, 1, 1).remove(0);
        for enc in [false, true] {
            v.push(ExperimentSpec::ladder(Family::LadderConstantDepth, n, enc, bits.clone()));
            v.push(ExperimentSpec::ladder(Family::LadderOutsideIn, n, enc, bits.clone()));
        }
    }
    for s in MHC_BITSTRINGS {
        for enc in [false, true] {
            v.push(ExperimentSpec::mhc(enc, parse_bits(s).expect("fixed bitstrings parse")));
        }
    }
    v
}

fn max_deviation(a: &Distribution, b: &Distribution) -> f64 {
    a.keys()
        .chain(b.keys())
        .map(|k| (a.get(k).copied().unwrap_or(0.0) - b.get(k).copied().unwrap_or(0.0)).abs())
        .fold(0.0, f64::max)
}

fn check(c: &Circuit, expected: &Distribution, logical: Option<&Circuit>) -> Result<VerifyOutcome, CliError> {
    let fail = |e: String| CliError::Verification(e);
    let oracle = statevector_oracle(c).map_err(|e| fail(e.to_string()))?;
    let tab = tableau_distribution(c).map_err(|e| fail(e.to_string()))?;
    let dec = decode_distribution(&oracle, c, &PostProcessConfig::default()).map_err(|e| fail(e.to_string()))?;
    let equivalent = match logical {
        Some(l) => Some(verify_equivalence(l, c).map_err(|e| fail(e.to_string()))?),
        None => None,
    };
    Ok(VerifyOutcome {
        max_deviation: max_deviation(&oracle, &tab),
        tvd: tvd(&dec.words, expected),
        discarded: dec.discarded.values().sum(),
        equivalent,
    })
}

/// Every builder circuit, logical and lowered, that fits the oracle.
pub fn run_suite() -> Result<Vec<VerifyRow>, CliError> {
    let mut rows = Vec::new();
    for spec in suite_specs() {
        let Ok(e) = build(&spec) else { continue };
        let physical = lower(&e.circuit).map_err(|err| CliError::Verification(format!("{}: {err}", spec.label())))?;
        for (tier, c, logical) in [("logical", &e.circuit, None), ("physical", &physical, Some(&e.circuit))] {
            let atoms = c.n_atoms();
            let outcome = if atoms <= ORACLE_MAX_QUBITS { Some(check(c, &e.expected, logical)?) } else { None };
            rows.push(VerifyRow { circuit: format!("{} {tier}", spec.label()), atoms, outcome });
        }
    }
    Ok(rows)
}

pub fn verify_csv(rows: &[VerifyRow]) -> String {
    let mut s = String::from(VERIFY_HEADER);
    s.push('\n');
    for r in rows {
        match &r.outcome {
            None => writeln!(s, "{},{},skipped,,,,", r.circuit, r.atoms).unwrap(),
            Some(o) => {
                let eq = o.equivalent.map_or(String::new(), |b| b.to_string());
                writeln!(
                    s,
                    "{},{},{},{:e},{:e},{:e},{eq}",
                    r.circuit,
                    r.atoms,
                    r.status(),
                    o.max_deviation + 0.0,
                    o.tvd + 0.0,
                    o.discarded + 0.0
                )
                .unwrap()
            }
        }
    }
    s
}
