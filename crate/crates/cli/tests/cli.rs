use std::collections::BTreeMap;
use std::path::Path;
use std::process::{Command, Output};

use atomqec_cli::parse_config;
use proptest::prelude::*;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_atomqec"));
    c.env_remove("ATOMQEC_OUT");
    c
}

fn run_cfg(dir: &Path, text: &str, extra: &[&str]) -> Output {
    let cfg = dir.join("exp.cfg");
    std::fs::write(&cfg, text).unwrap();
    bin().arg("run").arg(&cfg).args(extra).output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn tree(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.insert(p.strip_prefix(dir).unwrap().display().to_string(), std::fs::read(&p).unwrap());
            }
        }
    }
    out
}

const SMALL: &str = "\
[run]
seed = 3
shots = 400
alphas = 1, 4

[experiment enc]
family = shor_two_row

[experiment unenc]
family = shor_unencoded

[pair shor]
encoded = enc
unencoded = unenc
";

#[test]
fn config_error_names_line_and_field() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run_cfg(tmp.path(), "[run]\nseed = 1\nshots = ten\n", &[]);
    assert_eq!(o.status.code(), Some(1));
    let e = stderr(&o);
    assert!(e.contains("line 3") && e.contains("`shots`"), "{e}");
}

#[test]
fn empty_alpha_grid_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run_cfg(tmp.path(), "[run]\nalphas =\n[experiment a]\nfamily = shor_unencoded\n", &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("empty alpha grid"));
}

#[test]
fn oversized_circuit_is_a_capacity_error() {
    let tmp = tempfile::tempdir().unwrap();
    let text = "[run]\nseed = 1\nshots = 10\n[experiment big]\nfamily = ladder_outside_in\nn = 26\nencoded = true\nbits = random\n";
    let out = tmp.path().join("out");
    let o = run_cfg(tmp.path(), text, &["--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("capacity"));
}

#[test]
fn usage_errors_and_help() {
    assert_eq!(bin().arg("frobnicate").output().unwrap().status.code(), Some(1));
    assert_eq!(bin().arg("--help").output().unwrap().status.code(), Some(0));
    let missing = bin().args(["run", "/definitely/not/here.cfg"]).output().unwrap();
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn reruns_are_byte_identical_across_threads() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for (dir, threads) in [(&a, "1"), (&b, "3")] {
        let o = run_cfg(tmp.path(), SMALL, &["--out", dir.to_str().unwrap(), "--threads", threads]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let (ta, tb) = (tree(&a), tree(&b));
    assert!(ta.contains_key("metrics.csv") && ta.contains_key("thresholds.csv") && ta.contains_key("tvd.svg"));
    assert!(ta.keys().any(|k| k.starts_with("records")));
    assert_eq!(ta, tb);
}

#[test]
fn seed_flag_changes_records() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    run_cfg(tmp.path(), SMALL, &["--out", a.to_str().unwrap()]);
    run_cfg(tmp.path(), SMALL, &["--out", b.to_str().unwrap(), "--seed", "99"]);
    assert_ne!(tree(&a).get("metrics.csv"), tree(&b).get("metrics.csv"));
}

#[test]
fn single_alpha_threshold_is_indeterminate() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    let text = SMALL.replace("alphas = 1, 4", "alphas = 1");
    let o = run_cfg(tmp.path(), &text, &["--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let t = std::fs::read_to_string(out.join("thresholds.csv")).unwrap();
    assert!(t.lines().nth(1).unwrap().contains("indeterminate"), "{t}");
}

#[test]
fn out_root_comes_from_the_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("named.cfg");
    std::fs::write(&cfg, "[run]\nshots = 50\n[experiment a]\nfamily = shor_unencoded\n").unwrap();
    let root = tmp.path().join("root");
    let o = bin().env("ATOMQEC_OUT", &root).arg("run").arg(&cfg).output().unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(root.join("named").join("metrics.csv").exists());
}

#[test]
fn shipped_configs_parse() {
    for (name, text) in [
        ("shor_suite", include_str!("../configs/shor_suite.cfg")),
        ("shor_sweep", include_str!("../configs/shor_sweep.cfg")),
        ("cdcx_sweep", include_str!("../configs/cdcx_sweep.cfg")),
        ("scaling", include_str!("../configs/scaling.cfg")),
        ("mhc", include_str!("../configs/mhc.cfg")),
        ("costmodel", include_str!("../configs/costmodel.cfg")),
    ] {
        parse_config(text).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}

proptest! {
    #[test]
    fn parser_never_panics(text in "\\PC{0,200}") {
        let _ = parse_config(&text);
    }

    #[test]
    fn errors_point_inside_the_text(lines in prop::collection::vec("[a-z\\[\\] =,0-9.#-]{0,24}", 0..12)) {
        let text = lines.join("\n");
        if let Err(e) = parse_config(&text) {
            prop_assert!(e.line <= lines.len().max(1), "line {} of {}", e.line, lines.len());
        }
    }
}
