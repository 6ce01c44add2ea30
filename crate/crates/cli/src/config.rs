//! Line-oriented run configuration.
//!
//! ```text
//! # comment
//! [run]
//! seed = 7
//! shots = 5000
//! alphas = 0.5, 1, 2
//!
//! [noise]
//! cz_pauli = 0.0045
//!
//! [experiment two_row]
//! family = shor_two_row
//! ```
//!
//! Sections: `run`, `noise`, `experiment <name>` (repeatable), `pair <name>` (repeatable),
//! `scaling`, `costmodel`.

use std::collections::BTreeSet;
use std::fmt;

use atomqec::analysis::{LossPolicy, PostProcessConfig};
use atomqec::builders::{random_ladder_inputs, ExperimentSpec, Family};
use atomqec::costmodel::TimingParams;
use atomqec::sim::NoiseModel;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigError {
    /// 1-based; 0 when the problem is not tied to a line.
    pub line: usize,
    pub field: Option<String>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, &self.field) {
            (0, None) => write!(f, "{}", self.message),
            (0, Some(k)) => write!(f, "field `{k}`: {}", self.message),
            (l, None) => write!(f, "line {l}: {}", self.message),
            (l, Some(k)) => write!(f, "line {l}, field `{k}`: {}", self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

fn err(line: usize, field: &str, message: impl Into<String>) -> ConfigError {
    let field = if field.is_empty() { None } else { Some(field.to_string()) };
    ConfigError { line, field, message: message.into() }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub name: String,
    pub spec: ExperimentSpec,
    pub shots: u64,
    pub post: PostProcessConfig,
    /// Line of the section header.
    pub line: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairConfig {
    pub name: String,
    pub encoded: String,
    pub unencoded: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalingConfig {
    pub family: Family,
    pub n_values: Vec<usize>,
    pub bits_seed: u64,
    pub line: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CostConfig {
    pub distances: Vec<u32>,
    pub spaces: Vec<u32>,
    pub timing: TimingParams,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Config {
    pub seed: u64,
    pub shots: u64,
    pub alphas: Vec<f64>,
    pub resamples: usize,
    pub out: Option<String>,
    pub threads: usize,
    pub write_records: bool,
    pub noise: NoiseModel,
    pub experiments: Vec<ExperimentConfig>,
    pub pairs: Vec<PairConfig>,
    pub scaling: Option<ScalingConfig>,
    pub costmodel: Option<CostConfig>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            seed: 0,
            shots: 5000,
            alphas: vec![1.0],
            resamples: 200,
            out: None,
            threads: 0,
            write_records: true,
            noise: NoiseModel::calibrated(),
            experiments: Vec::new(),
            pairs: Vec::new(),
            scaling: None,
            costmodel: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Section {
    None,
    Run,
    Noise,
    Experiment,
    Pair,
    Scaling,
    Costmodel,
}

fn parse_u64(line: usize, key: &str, v: &str) -> Result<u64, ConfigError> {
    v.parse().map_err(|_| err(line, key, format!("expected a non-negative integer, got {v:?}")))
}

fn parse_positive(line: usize, key: &str, v: &str) -> Result<u64, ConfigError> {
    match parse_u64(line, key, v)? {
        0 => Err(err(line, key, "must be positive")),
        n => Ok(n),
    }
}

fn parse_bool(line: usize, key: &str, v: &str) -> Result<bool, ConfigError> {
    match v {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(err(line, key, format!("expected true or false, got {v:?}"))),
    }
}

fn parse_f64(line: usize, key: &str, v: &str) -> Result<f64, ConfigError> {
    match v.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(err(line, key, format!("expected a finite number, got {v:?}"))),
    }
}

fn items(v: &str) -> impl Iterator<Item = &str> {
    v.split(',').map(str::trim).filter(|s| !s.is_empty())
}

/// Comma-separated integers; `a-b` is an inclusive range and `a-b:s` one with step `s`.
/// Far above anything the site grid holds; keeps bit-vector allocation bounded before the builder rejects it.
const MAX_N: u64 = 1024;

fn parse_n(line: usize, key: &str, v: &str) -> Result<usize, ConfigError> {
    let n = parse_positive(line, key, v)?;
    if n > MAX_N {
        return Err(err(line, key, format!("n={n} is outside 1..={MAX_N}")));
    }
    Ok(n as usize)
}

pub fn parse_int_list(line: usize, key: &str, v: &str) -> Result<Vec<u64>, ConfigError> {
    let mut out = Vec::new();
    for it in items(v) {
        match it.split_once('-') {
            None => out.push(parse_u64(line, key, it)?),
            Some((a, rest)) => {
                let (b, step) = match rest.split_once(':') {
                    Some((b, s)) => (b, parse_positive(line, key, s)?),
                    None => (rest, 1),
                };
                let (a, b) = (parse_u64(line, key, a)?, parse_u64(line, key, b)?);
                if a > b {
                    return Err(err(line, key, format!("empty range {it:?}")));
                }
                if (b - a) / step > 100_000 {
                    return Err(err(line, key, format!("range {it:?} is too long")));
                }
                out.extend((a..=b).step_by(step as usize));
            }
        }
    }
    if out.is_empty() {
        return Err(err(line, key, "empty list"));
    }
    Ok(out)
}

fn parse_name(line: usize, what: &str, name: &str) -> Result<String, ConfigError> {
    let ok = !name.is_empty()
        && name.len() <= 64
        && name.bytes().all(|b| b.is_ascii_lowercase() || b.is_ascii_digit() || b == b'_');
    if ok {
        Ok(name.to_string())
    } else {
        Err(err(line, "", format!("{what} name {name:?} must be 1-64 characters of [a-z0-9_]")))
    }
}

/// Raw experiment fields; resolved once the section ends.
#[derive(Default)]
struct PendingExperiment {
    name: String,
    line: usize,
    family: Option<(usize, Family)>,
    n: Option<usize>,
    encoded: Option<bool>,
    bits: Option<(usize, String)>,
    bits_seed: Option<u64>,
    shots: Option<u64>,
    post: PostProcessConfig,
}

#[derive(Default)]
struct PendingPair {
    name: String,
    line: usize,
    encoded: Option<String>,
    unencoded: Option<String>,
}

fn resolve_experiment(p: PendingExperiment, cfg: &Config) -> Result<ExperimentConfig, ConfigError> {
    let (_, family) = p.family.ok_or_else(|| err(p.line, "family", "missing"))?;
    let mut spec = if family.is_shor() {
        if p.n.is_some() || p.encoded.is_some() || p.bits.is_some() {
            return Err(err(p.line, "", "Shor experiments take no n, encoded or bits"));
        }
        ExperimentSpec::shor(family)
    } else if family == Family::MhcStatePrep {
        let (bl, bits) = p.bits.ok_or_else(|| err(p.line, "bits", "MHC experiments need a 4-bit string"))?;
        let bits = atomqec::builders::parse_bits(&bits).map_err(|e| err(bl, "bits", e.to_string()))?;
        ExperimentSpec::mhc(p.encoded.unwrap_or(true), bits)
    } else {
        let n = p.n.ok_or_else(|| err(p.line, "n", "ladders need n"))?;
        let bits = match p.bits {
            Some((bl, s)) if s != "random" => {
                let b: Vec<u8> = s
                    .bytes()
                    .map(|c| match c {
                        b'0' => Ok(0),
                        b'1' => Ok(1),
                        _ => Err(err(bl, "bits", format!("expected 0/1 string or `random`, got {s:?}"))),
                    })
                    .collect::<Result<_, _>>()?;
                if b.len() != n {
                    return Err(err(bl, "bits", format!("{} bits for n = {n}", b.len())));
                }
                b
            }
            _ => random_ladder_inputs(n, 1, p.bits_seed.unwrap_or(cfg.seed)).remove(0),
        };
        ExperimentSpec::ladder(family, n, p.encoded.unwrap_or(true), bits)
    };
    spec.seed = cfg.seed;
    Ok(ExperimentConfig { name: p.name, spec, shots: p.shots.unwrap_or(cfg.shots), post: p.post, line: p.line })
}

pub fn parse_config(text: &str) -> Result<Config, ConfigError> {
    parse_config_with(text, None)
}

/// As [`parse_config`], with the run seed replaced before random inputs are drawn.
pub fn parse_config_with(text: &str, seed: Option<u64>) -> Result<Config, ConfigError> {
    let mut cfg = Config::default();
    let mut section = Section::None;
    let mut seen_sections: BTreeSet<String> = BTreeSet::new();
    let mut seen_keys: BTreeSet<String> = BTreeSet::new();
    let mut pending_exps: Vec<PendingExperiment> = Vec::new();
    let mut pending_pairs: Vec<PendingPair> = Vec::new();
    let mut scaling: Option<(usize, Option<Family>, Option<Vec<usize>>, Option<u64>)> = None;
    let mut cost: Option<(usize, Option<Vec<u32>>, Option<Vec<u32>>, TimingParams)> = None;
    let mut alphas_line = 0;

    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(inner) = line.strip_prefix('[') {
            let inner = inner.strip_suffix(']').ok_or_else(|| err(ln, "", "unterminated section header"))?.trim();
            let mut parts = inner.split_whitespace();
            let kind = parts.next().unwrap_or("");
            let label = parts.next();
            if parts.next().is_some() {
                return Err(err(ln, "", "section header has too many words"));
            }
            section = match (kind, label) {
                ("run", None) => Section::Run,
                ("noise", None) => Section::Noise,
                ("scaling", None) => {
                    scaling = Some((ln, None, None, None));
                    Section::Scaling
                }
                ("costmodel", None) => {
                    cost = Some((ln, None, None, TimingParams::default()));
                    Section::Costmodel
                }
                ("experiment", Some(name)) => {
                    let name = parse_name(ln, "experiment", name)?;
                    if pending_exps.iter().any(|e| e.name == name) {
                        return Err(err(ln, "", format!("duplicate experiment {name:?}")));
                    }
                    pending_exps.push(PendingExperiment { name, line: ln, ..Default::default() });
                    Section::Experiment
                }
                ("pair", Some(name)) => {
                    let name = parse_name(ln, "pair", name)?;
                    if pending_pairs.iter().any(|p| p.name == name) {
                        return Err(err(ln, "", format!("duplicate pair {name:?}")));
                    }
                    pending_pairs.push(PendingPair { name, line: ln, ..Default::default() });
                    Section::Pair
                }
                ("experiment" | "pair", None) => return Err(err(ln, "", format!("[{kind}] needs a name"))),
                _ => return Err(err(ln, "", format!("unknown section [{inner}]"))),
            };
            if matches!(section, Section::Run | Section::Noise | Section::Scaling | Section::Costmodel)
                && !seen_sections.insert(kind.to_string())
            {
                return Err(err(ln, "", format!("duplicate section [{kind}]")));
            }
            seen_keys.clear();
            continue;
        }
        let (key, value) =
            line.split_once('=').ok_or_else(|| err(ln, "", format!("expected `key = value`, got {line:?}")))?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() {
            return Err(err(ln, "", "empty key"));
        }
        if !seen_keys.insert(key.to_string()) {
            return Err(err(ln, key, "set twice in this section"));
        }
        match section {
            Section::None => return Err(err(ln, key, "setting outside any section")),
            Section::Run => match key {
                "seed" => cfg.seed = parse_u64(ln, key, value)?,
                "shots" => cfg.shots = parse_positive(ln, key, value)?,
                "resamples" => cfg.resamples = parse_positive(ln, key, value)? as usize,
                "threads" => cfg.threads = parse_u64(ln, key, value)? as usize,
                "records" => cfg.write_records = parse_bool(ln, key, value)?,
                "out" => {
                    if value.is_empty() {
                        return Err(err(ln, key, "empty path"));
                    }
                    cfg.out = Some(value.to_string());
                }
                "alphas" => {
                    alphas_line = ln;
                    let a: Vec<f64> = items(value).map(|s| parse_f64(ln, key, s)).collect::<Result<_, _>>()?;
                    if a.iter().any(|&x| x < 0.0) {
                        return Err(err(ln, key, "alphas must be non-negative"));
                    }
                    if a.windows(2).any(|w| w[0] >= w[1]) {
                        return Err(err(ln, key, "alphas must be strictly increasing"));
                    }
                    cfg.alphas = a;
                }
                _ => return Err(err(ln, key, "unknown key in [run]")),
            },
            Section::Noise => {
                if key == "alpha" {
                    return Err(err(ln, key, "alpha comes from [run] alphas"));
                }
                cfg.noise.apply_setting(key, value).map_err(|e| err(ln, key, e.to_string()))?;
            }
            Section::Experiment => {
                let e = pending_exps.last_mut().expect("inside an experiment section");
                match key {
                    "family" => {
                        let f = Family::parse(value).map_err(|e| err(ln, key, e.to_string()))?;
                        e.family = Some((ln, f));
                    }
                    "n" => e.n = Some(parse_n(ln, key, value)?),
                    "encoded" => e.encoded = Some(parse_bool(ln, key, value)?),
                    "bits" => e.bits = Some((ln, value.to_string())),
                    "bits_seed" => e.bits_seed = Some(parse_u64(ln, key, value)?),
                    "shots" => e.shots = Some(parse_positive(ln, key, value)?),
                    "loss_policy" => {
                        e.post.loss_policy = match value {
                            "discard" => LossPolicy::Discard,
                            "correct" => LossPolicy::Correct,
                            _ => return Err(err(ln, key, "expected discard or correct")),
                        }
                    }
                    "ldu_flags" => e.post.use_ldu_flags = parse_bool(ln, key, value)?,
                    "pauli_correction" => e.post.apply_pauli_correction = parse_bool(ln, key, value)?,
                    _ => return Err(err(ln, key, "unknown key in [experiment]")),
                }
            }
            Section::Pair => {
                let p = pending_pairs.last_mut().expect("inside a pair section");
                match key {
                    "encoded" => p.encoded = Some(value.to_string()),
                    "unencoded" => p.unencoded = Some(value.to_string()),
                    _ => return Err(err(ln, key, "unknown key in [pair]")),
                }
            }
            Section::Scaling => {
                let s = scaling.as_mut().expect("inside [scaling]");
                match key {
                    "family" => s.1 = Some(Family::parse(value).map_err(|e| err(ln, key, e.to_string()))?),
                    "n" => {
                        let v = parse_int_list(ln, key, value)?;
                        if let Some(bad) = v.iter().find(|&&x| x == 0 || x > MAX_N) {
                            return Err(err(ln, key, format!("n={bad} is outside 1..={MAX_N}")));
                        }
                        s.2 = Some(v.into_iter().map(|x| x as usize).collect());
                    }
                    "bits_seed" => s.3 = Some(parse_u64(ln, key, value)?),
                    _ => return Err(err(ln, key, "unknown key in [scaling]")),
                }
            }
            Section::Costmodel => {
                let c = cost.as_mut().expect("inside [costmodel]");
                let narrow = |v: Vec<u64>| -> Result<Vec<u32>, ConfigError> {
                    v.into_iter().map(|x| u32::try_from(x).map_err(|_| err(ln, key, "value too large"))).collect()
                };
                match key {
                    "distances" => c.1 = Some(narrow(parse_int_list(ln, key, value)?)?),
                    "spaces" => c.2 = Some(narrow(parse_int_list(ln, key, value)?)?),
                    "t_measure" => c.3.t_measure = parse_f64(ln, key, value)?,
                    "t_move_per_site" => c.3.t_move_per_site = parse_f64(ln, key, value)?,
                    _ => return Err(err(ln, key, "unknown key in [costmodel]")),
                }
            }
        }
    }

    if let Some(s) = seed {
        cfg.seed = s;
    }
    if cfg.alphas.is_empty() {
        return Err(err(alphas_line, "alphas", "empty alpha grid"));
    }
    cfg.noise.alpha = cfg.alphas[0];
    for p in pending_exps {
        let e = resolve_experiment(p, &cfg)?;
        cfg.experiments.push(e);
    }
    for p in pending_pairs {
        let enc = p.encoded.ok_or_else(|| err(p.line, "encoded", "missing"))?;
        let unenc = p.unencoded.ok_or_else(|| err(p.line, "unencoded", "missing"))?;
        for (k, v) in [("encoded", &enc), ("unencoded", &unenc)] {
            if !cfg.experiments.iter().any(|e| &e.name == v) {
                return Err(err(p.line, k, format!("no experiment named {v:?}")));
            }
        }
        cfg.pairs.push(PairConfig { name: p.name, encoded: enc, unencoded: unenc });
    }
    if let Some((ln, family, n, seed)) = scaling {
        let family = family.unwrap_or(Family::LadderConstantDepth);
        if family.is_shor() || family == Family::MhcStatePrep {
            return Err(err(ln, "family", "scaling needs a ladder family"));
        }
        let n_values = n.ok_or_else(|| err(ln, "n", "missing"))?;
        cfg.scaling = Some(ScalingConfig { family, n_values, bits_seed: seed.unwrap_or(cfg.seed), line: ln });
    }
    if let Some((ln, d, s, timing)) = cost {
        timing.validate().map_err(|e| err(ln, "", e.to_string()))?;
        let distances = d.ok_or_else(|| err(ln, "distances", "missing"))?;
        if distances.contains(&0) {
            return Err(err(ln, "distances", "distances must be positive"));
        }
        let spaces = s.ok_or_else(|| err(ln, "spaces", "missing"))?;
        cfg.costmodel = Some(CostConfig { distances, spaces, timing });
    }
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn huge_ladder_is_rejected_early() {
        let e = parse_config("[experiment a]\nfamily = ladder_constant_depth\nn = 7000000000000000022\n").unwrap_err();
        assert_eq!((e.line, e.field.as_deref()), (3, Some("n")));
    }

    #[test]
    fn minimal_config() {
        let c = parse_config("[run]\nseed = 3\nalphas = 0.5, 1\n[experiment a]\nfamily = shor_two_row\n").unwrap();
        assert_eq!(c.seed, 3);
        assert_eq!(c.alphas, vec![0.5, 1.0]);
        assert_eq!(c.experiments.len(), 1);
        assert_eq!(c.experiments[0].shots, 5000);
    }

    #[test]
    fn diagnostics_carry_line_and_field() {
        let e = parse_config("[run]\n\nshots = many\n").unwrap_err();
        assert_eq!((e.line, e.field.as_deref()), (3, Some("shots")));
        let e = parse_config("[run]\nalphas = \n").unwrap_err();
        assert_eq!(e.field.as_deref(), Some("alphas"));
        assert!(e.message.contains("empty alpha grid"));
        let e = parse_config("[nope]\n").unwrap_err();
        assert_eq!(e.line, 1);
        let e =
            parse_config("[experiment x]\nfamily = shor_two_row\n[pair p]\nencoded = x\nunencoded = y\n").unwrap_err();
        assert_eq!((e.line, e.field.as_deref()), (3, Some("unencoded")));
        let e = parse_config("[noise]\ncz_pauli = 2\n").unwrap_err();
        assert_eq!((e.line, e.field.as_deref()), (2, Some("cz_pauli")));
    }

    #[test]
    fn ladder_bits_default_to_random_inputs() {
        let c = parse_config("[run]\nseed = 9\n[experiment l]\nfamily = ladder_constant_depth\nn = 8\n").unwrap();
        assert_eq!(c.experiments[0].spec.initial_bits, random_ladder_inputs(8, 1, 9)[0]);
        let e = parse_config("[experiment l]\nfamily = ladder_outside_in\nn = 4\nbits = 101\n").unwrap_err();
        assert_eq!((e.line, e.field.as_deref()), (4, Some("bits")));
    }

    #[test]
    fn int_lists_and_ranges() {
        assert_eq!(parse_int_list(1, "d", "2-6:2, 9").unwrap(), vec![2, 4, 6, 9]);
        assert!(parse_int_list(1, "d", "5-2").is_err());
        assert!(parse_int_list(1, "d", ",").is_err());
    }
}
