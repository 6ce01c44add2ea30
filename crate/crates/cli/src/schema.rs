//! Column documentation for every CSV the CLI writes.

use atomqec::analysis::MetricReport;
use atomqec::costmodel::REGIME_CSV_HEADER;

pub const DECODED_HEADER: &str = "kind,key,count";
pub const THRESHOLDS_HEADER: &str = "pair,encoded,unencoded,kind,low,high";
pub const SCALING_HEADER: &str =
    "n,pseudothreshold,pt_low,pt_high,alpha_ref,yield,discard_prep_flag,discard_loss,discard_out_of_codespace,discard_ldu_flag";
pub const VERIFY_HEADER: &str = "circuit,atoms,status,max_deviation,tvd,discarded,equivalent";

const DISCARDS: [(&str, &str); 4] = [
    ("discard_prep_flag", "fraction of shots discarded by a preparation flag"),
    ("discard_loss", "fraction discarded for atom loss"),
    ("discard_out_of_codespace", "fraction discarded by the codespace check"),
    ("discard_ldu_flag", "fraction discarded because an LDU flag marked a lost atom"),
];

fn columns(file: &str) -> Vec<(String, &'static str)> {
    let mut v: Vec<(String, &'static str)> = Vec::new();
    let mut add = |c: &str, d: &'static str| v.push((c.to_string(), d));
    match file {
        "metrics.csv" => {
            add("alpha", "noise scale applied to the scaled channels");
            add("experiment", "experiment name from the config");
            add("shots", "raw shots simulated");
            add("accepted_samples", "output words kept after post-selection");
            add("tvd", "total variation distance to the ideal word distribution; empty if nothing was accepted");
            add("tvd_lo", "lower end of the 68% bootstrap interval");
            add("tvd_hi", "upper end of the 68% bootstrap interval");
            add("error_rate", "fraction of wrong words when the ideal output is a single word, else empty");
            add("error_lo", "lower end of the error-rate interval");
            add("error_hi", "upper end of the error-rate interval");
            add("yield", "accepted shots over raw shots");
            for (c, d) in DISCARDS {
                add(c, d);
            }
        }
        "decoded/*.csv" => {
            add("kind", "`word` for an accepted output word, `discard` for a discard reason");
            add("key", "the word bits or the discard reason name");
            add("count", "number of occurrences");
        }
        "thresholds.csv" => {
            add("pair", "pair name from the config");
            add("encoded", "encoded experiment");
            add("unencoded", "unencoded experiment");
            add("kind", "`interval`, `open_ended` (bands meet, curves never cross) or `indeterminate`");
            add("low", "alpha where the 68% interval bands first touch");
            add("high", "alpha where the encoded TVD reaches the unencoded TVD");
        }
        "scaling.csv" => {
            add("n", "logical qubits in the ladder, ancillas included");
            add("pseudothreshold", "interval label, bounds separated by `;`");
            add("pt_low", "lower bound of the pseudothreshold interval");
            add("pt_high", "upper bound; empty unless the curves cross in the grid");
            add("alpha_ref", "grid alpha closest to 1 used for the discard columns");
            add("yield", "encoded yield at alpha_ref");
            for (c, d) in DISCARDS {
                add(c, d);
            }
        }
        "regime_map.csv" => {
            add("d", "code distance");
            add("logical_spaces", "logical movement spaces per layer");
            add("cost_s", "layer time in seconds");
            add("regime", "`measurement` or `movement`, whichever bounds the layer");
        }
        "verify.csv" => {
            add("circuit", "builder circuit label and tier");
            add("atoms", "atoms in the circuit");
            add("status", "`pass`, `fail` or `skipped` (above the oracle cap)");
            add("max_deviation", "largest per-outcome gap between tableau enumeration and the statevector oracle");
            add("tvd", "TVD between decoded oracle words and the ideal distribution");
            add("discarded", "oracle probability mass discarded by post-processing");
            add("equivalent", "whether lowering preserved the decoded distribution");
        }
        _ => {}
    }
    v
}

fn header_of(file: &str) -> String {
    match file {
        "metrics.csv" => format!("alpha,{}", MetricReport::CSV_HEADER),
        "decoded/*.csv" => DECODED_HEADER.into(),
        "thresholds.csv" => THRESHOLDS_HEADER.into(),
        "scaling.csv" => SCALING_HEADER.into(),
        "regime_map.csv" => REGIME_CSV_HEADER.into(),
        "verify.csv" => VERIFY_HEADER.into(),
        _ => String::new(),
    }
}

/// Markdown schema for the given CSV files.
pub fn document(files: &[&str]) -> String {
    let mut s = String::from("# CSV schema\n");
    for f in files {
        s.push_str(&format!("\n## {f}\n\nHeader: `{}`\n\n| column | meaning |\n|---|---|\n", header_of(f)));
        for (c, d) in columns(f) {
            s.push_str(&format!("| {c} | {d} |\n"));
        }
    }
    s
}
