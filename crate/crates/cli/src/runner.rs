//! build -> lower -> simulate -> post-process -> summarize, and the artifact writers.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use atomqec::analysis::{
    postprocess, pseudothreshold, summarize, AnalysisError, DecodedSample, DiscardReason, MetricReport,
    Pseudothreshold, SweepPoint,
};
use atomqec::builders::{build, random_ladder_inputs, BuildError, Experiment, ExperimentSpec};
use atomqec::circuit::Circuit;
use atomqec::compiler::{lower, CompileError};
use atomqec::costmodel::{regime_map, RegimeMap};
use atomqec::sim::{circuit_hash, run_shots_with, write_records, RunOptions, SimError};
use rayon::prelude::*;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::config::{Config, ConfigError, ExperimentConfig, PairConfig};
use crate::schema;
use crate::svg;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error("capacity error: {0}")]
    Capacity(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => 1,
            CliError::Capacity(_) => 2,
            CliError::Verification(_) => 3,
        }
    }
}

fn config_at(line: usize, msg: String) -> CliError {
    CliError::Config(ConfigError { line, field: None, message: msg })
}

fn from_build(line: usize, e: BuildError) -> CliError {
    match e {
        BuildError::Capacity(m) => CliError::Capacity(m),
        e => config_at(line, e.to_string()),
    }
}

fn from_compile(line: usize, e: CompileError) -> CliError {
    match e {
        CompileError::Capacity(m) | CompileError::Sim(SimError::Capacity(m)) => CliError::Capacity(m),
        e => config_at(line, format!("cannot compile: {e}")),
    }
}

fn from_sim(line: usize, e: SimError) -> CliError {
    match e {
        SimError::Capacity(m) => CliError::Capacity(m),
        e => config_at(line, format!("cannot simulate: {e}")),
    }
}

/// Per-experiment seed: the same for every alpha, so sweep points share random streams.
pub fn derive_seed(base: u64, name: &str) -> u64 {
    let d = Sha256::digest(format!("{base}/{name}").as_bytes());
    u64::from_le_bytes(d[..8].try_into().unwrap())
}

pub struct Prepared {
    pub config: ExperimentConfig,
    pub experiment: Experiment,
    pub physical: Circuit,
}

pub fn prepare(cfg: &ExperimentConfig) -> Result<Prepared, CliError> {
    let experiment = build(&cfg.spec).map_err(|e| from_build(cfg.line, e))?;
    let physical = lower(&experiment.circuit).map_err(|e| from_compile(cfg.line, e))?;
    Ok(Prepared { config: cfg.clone(), experiment, physical })
}

#[derive(Clone, Debug)]
pub struct PointResult {
    pub experiment: String,
    pub alpha_index: usize,
    pub alpha: f64,
    pub shots: u64,
    /// None when no sample was accepted.
    pub report: Option<MetricReport>,
    pub discards: BTreeMap<DiscardReason, f64>,
    pub records: Option<String>,
    pub decoded: String,
}

#[derive(Clone, Debug)]
pub struct RunResult {
    pub alphas: Vec<f64>,
    pub points: Vec<PointResult>,
    pub thresholds: Vec<(PairConfig, Pseudothreshold)>,
    pub manifest: String,
}

fn decoded_csv(samples: &[DecodedSample]) -> String {
    let mut words: BTreeMap<&str, u64> = BTreeMap::new();
    let mut discards: BTreeMap<DiscardReason, u64> = DiscardReason::ALL.iter().map(|&r| (r, 0)).collect();
    for s in samples {
        match s.discard_reason {
            Some(r) => *discards.get_mut(&r).unwrap() += 1,
            None => {
                for w in &s.words {
                    *words.entry(w).or_insert(0) += 1;
                }
            }
        }
    }
    let mut out = String::from(schema::DECODED_HEADER);
    out.push('\n');
    for (w, c) in words {
        writeln!(out, "word,{w},{c}").unwrap();
    }
    for (r, c) in discards {
        writeln!(out, "discard,{},{c}", r.name()).unwrap();
    }
    out
}

fn discard_fractions(samples: &[DecodedSample]) -> BTreeMap<DiscardReason, f64> {
    let mut m: BTreeMap<DiscardReason, f64> = DiscardReason::ALL.iter().map(|&r| (r, 0.0)).collect();
    for s in samples {
        if let Some(r) = s.discard_reason {
            *m.get_mut(&r).unwrap() += 1.0;
        }
    }
    let n = samples.len().max(1) as f64;
    m.values_mut().for_each(|v| *v /= n);
    m
}

fn run_point(cfg: &Config, p: &Prepared, ai: usize, alpha: f64) -> Result<PointResult, CliError> {
    let ec = &p.config;
    let noise = cfg.noise.clone().with_alpha(alpha, cfg.noise.alpha_scope.clone());
    let seed = derive_seed(cfg.seed, &ec.name);
    let opts = RunOptions { experiment: ec.name.clone(), threads: 1, injections: Vec::new() };
    let out = run_shots_with(&p.physical, &noise, ec.shots, seed, &opts).map_err(|e| from_sim(ec.line, e))?;
    let samples = postprocess(&out.records, &p.physical, &ec.post).map_err(|e| config_at(ec.line, e.to_string()))?;
    let report = match summarize(&ec.name, &samples, &p.experiment.expected, cfg.resamples, seed) {
        Ok(r) => Some(r),
        Err(AnalysisError::Undefined(_)) => None,
        Err(e) => return Err(config_at(ec.line, e.to_string())),
    };
    Ok(PointResult {
        experiment: ec.name.clone(),
        alpha_index: ai,
        alpha,
        shots: ec.shots,
        report,
        discards: discard_fractions(&samples),
        records: cfg.write_records.then(|| write_records(&out.records)),
        decoded: decoded_csv(&samples),
    })
}

/// Encoded/unencoded points at alphas where both are defined.
fn sweep_points(points: &[PointResult], name: &str) -> BTreeMap<usize, SweepPoint> {
    points
        .iter()
        .filter(|p| p.experiment == name)
        .filter_map(|p| {
            p.report.as_ref().map(|r| (p.alpha_index, SweepPoint { alpha: p.alpha, value: r.tvd, ci: r.tvd_ci68 }))
        })
        .collect()
}

pub fn pair_threshold(points: &[PointResult], pair: &PairConfig) -> Pseudothreshold {
    let e = sweep_points(points, &pair.encoded);
    let u = sweep_points(points, &pair.unencoded);
    let (ev, uv): (Vec<SweepPoint>, Vec<SweepPoint>) = e.iter().filter_map(|(i, p)| u.get(i).map(|q| (*p, *q))).unzip();
    pseudothreshold(&ev, &uv)
}

fn manifest(cfg: &Config, prepared: &[Prepared]) -> String {
    let mut s = String::from("atomqec run manifest\n");
    writeln!(s, "version {}", env!("CARGO_PKG_VERSION")).unwrap();
    writeln!(s, "seed {}", cfg.seed).unwrap();
    let alphas: Vec<String> = cfg.alphas.iter().map(f64::to_string).collect();
    writeln!(s, "alphas {}", alphas.join(",")).unwrap();
    writeln!(s, "resamples {}", cfg.resamples).unwrap();
    writeln!(s, "noise {}", cfg.noise.to_text()).unwrap();
    for p in prepared {
        let bits: String = p.config.spec.initial_bits.iter().map(|b| char::from(b'0' + b)).collect();
        writeln!(
            s,
            "experiment {} family={} label={} bits={} shots={} atoms={} circuit={}",
            p.config.name,
            p.config.spec.family.name(),
            p.config.spec.label(),
            if bits.is_empty() { "-" } else { &bits },
            p.config.shots,
            p.physical.n_atoms(),
            circuit_hash(&p.physical)
        )
        .unwrap();
    }
    s
}

/// Runs every (experiment, alpha) point; experiments run in parallel on `threads` workers
/// (0 = all cores). The result does not depend on `threads`.
pub fn simulate(cfg: &Config, threads: usize) -> Result<RunResult, CliError> {
    let prepared: Vec<Prepared> = cfg.experiments.iter().map(prepare).collect::<Result<_, _>>()?;
    let jobs: Vec<(usize, usize)> =
        (0..prepared.len()).flat_map(|e| (0..cfg.alphas.len()).map(move |a| (e, a))).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Capacity(format!("thread pool: {e}")))?;
    let points: Vec<PointResult> = pool.install(|| {
        jobs.par_iter().map(|&(e, a)| run_point(cfg, &prepared[e], a, cfg.alphas[a])).collect::<Result<_, _>>()
    })?;
    let thresholds = cfg.pairs.iter().map(|p| (p.clone(), pair_threshold(&points, p))).collect();
    Ok(RunResult { alphas: cfg.alphas.clone(), points, thresholds, manifest: manifest(cfg, &prepared) })
}

fn write(dir: &Path, rel: &str, text: &str) -> Result<(), CliError> {
    let path = dir.join(rel);
    let io = |source| CliError::Io { path: path.display().to_string(), source };
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(io)?;
    }
    fs::write(&path, text).map_err(io)
}

fn metrics_csv(points: &[PointResult]) -> String {
    let mut s = format!("alpha,{}\n", MetricReport::CSV_HEADER);
    for p in points {
        match &p.report {
            Some(r) => writeln!(s, "{},{}", p.alpha, r.csv_row()).unwrap(),
            None => {
                let d: Vec<String> = DiscardReason::ALL.iter().map(|r| p.discards[r].to_string()).collect();
                writeln!(s, "{},{},{},0,,,,,,,0,{}", p.alpha, p.experiment, p.shots, d.join(",")).unwrap();
            }
        }
    }
    s
}

fn thresholds_csv(t: &[(PairConfig, Pseudothreshold)]) -> String {
    let mut s = String::from(schema::THRESHOLDS_HEADER);
    s.push('\n');
    for (p, th) in t {
        let (kind, lo, hi) = match *th {
            Pseudothreshold::Interval { low, high } => ("interval", low.to_string(), high.to_string()),
            Pseudothreshold::OpenEnded { low } => ("open_ended", low.to_string(), String::new()),
            Pseudothreshold::Indeterminate => ("indeterminate", String::new(), String::new()),
        };
        writeln!(s, "{},{},{},{kind},{lo},{hi}", p.name, p.encoded, p.unencoded).unwrap();
    }
    s
}

fn band(p: &PairConfig, t: &Pseudothreshold) -> Option<svg::Band> {
    match *t {
        Pseudothreshold::Interval { low, high } => Some(svg::Band { label: p.name.clone(), low, high }),
        Pseudothreshold::OpenEnded { low } => {
            Some(svg::Band { label: format!("{} (open)", p.name), low, high: f64::INFINITY })
        }
        Pseudothreshold::Indeterminate => None,
    }
}

fn tvd_figure(title: &str, r: &RunResult, names: &[String]) -> String {
    if r.alphas.len() == 1 {
        let bars: Vec<svg::Bar> = names
            .iter()
            .filter_map(|n| r.points.iter().find(|p| &p.experiment == n))
            .map(|p| {
                let (value, lo, hi) =
                    p.report.as_ref().map_or((0.0, 0.0, 0.0), |m| (m.tvd, m.tvd_ci68.0, m.tvd_ci68.1));
                svg::Bar { label: p.experiment.clone(), value, lo, hi, parts: p.discards.values().copied().collect() }
            })
            .collect();
        let parts: Vec<&str> = DiscardReason::ALL.iter().map(|r| r.name()).collect();
        svg::bar_chart(title, "TVD", &bars, &parts)
    } else {
        let series: Vec<svg::Series> = names
            .iter()
            .map(|n| svg::Series {
                name: n.clone(),
                points: r
                    .points
                    .iter()
                    .filter(|p| &p.experiment == n)
                    .filter_map(|p| {
                        p.report.as_ref().map(|m| svg::Point {
                            x: p.alpha,
                            y: m.tvd,
                            lo: m.tvd_ci68.0,
                            hi: m.tvd_ci68.1,
                        })
                    })
                    .collect(),
            })
            .collect();
        let bands: Vec<svg::Band> = r.thresholds.iter().filter_map(|(p, t)| band(p, t)).collect();
        svg::line_chart(title, "noise scale alpha", "TVD", &series, &bands)
    }
}

/// Writes every artifact of a run into `dir`; returns the relative paths written.
pub fn write_run(dir: &Path, cfg: &Config, r: &RunResult) -> Result<Vec<String>, CliError> {
    let mut files = Vec::new();
    let mut put = |rel: String, text: &str| -> Result<(), CliError> {
        write(dir, &rel, text)?;
        files.push(rel);
        Ok(())
    };
    put("manifest.txt".into(), &r.manifest)?;
    for p in &r.points {
        let stem = format!("{}_a{}", p.experiment, p.alpha_index);
        if let Some(rec) = &p.records {
            put(format!("records/{stem}.txt"), rec)?;
        }
        if let Some(m) = &p.report {
            put(format!("reports/{stem}.txt"), &m.to_text())?;
        }
        put(format!("decoded/{stem}.csv"), &p.decoded)?;
    }
    let mut csvs = vec!["metrics.csv", "decoded/*.csv"];
    if !r.points.is_empty() {
        put("metrics.csv".into(), &metrics_csv(&r.points))?;
        let names: Vec<String> = cfg.experiments.iter().map(|e| e.name.clone()).collect();
        put("tvd.svg".into(), &tvd_figure("TVD by experiment", r, &names))?;
    }
    if !r.thresholds.is_empty() {
        put("thresholds.csv".into(), &thresholds_csv(&r.thresholds))?;
        csvs.push("thresholds.csv");
    }
    if let Some(c) = &cfg.costmodel {
        let map = cost_map(c)?;
        put("regime_map.csv".into(), &map.to_csv())?;
        put("regime_map.svg".into(), &svg::regime_heatmap(&map))?;
        csvs.push("regime_map.csv");
    }
    put("schema.md".into(), &schema::document(&csvs))?;
    Ok(files)
}

pub fn cost_map(c: &crate::config::CostConfig) -> Result<RegimeMap, CliError> {
    regime_map(&c.distances, &c.spaces, &c.timing).map_err(|e| config_at(0, e.to_string()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalingRow {
    pub n: usize,
    pub threshold: Pseudothreshold,
    pub alpha_ref: f64,
    pub yield_: f64,
    pub discards: BTreeMap<DiscardReason, f64>,
}

/// Expands `[scaling]` into encoded/unencoded experiment pairs, one per N.
pub fn scaling_experiments(cfg: &Config) -> Result<Config, CliError> {
    let s = cfg.scaling.as_ref().ok_or_else(|| config_at(0, "sweep needs a [scaling] section".into()))?;
    let mut out = cfg.clone();
    out.experiments.clear();
    out.pairs.clear();
    for &n in &s.n_values {
        let bits = random_ladder_inputs(n, 1, s.bits_seed).remove(0);
        for enc in [true, false] {
            let name = format!("n{n}_{}", if enc { "enc" } else { "unenc" });
            let mut spec = ExperimentSpec::ladder(s.family, n, enc, bits.clone());
            spec.seed = cfg.seed;
            out.experiments.push(ExperimentConfig {
                name,
                spec,
                shots: cfg.shots,
                post: Default::default(),
                line: s.line,
            });
        }
        out.pairs.push(PairConfig {
            name: format!("n{n}"),
            encoded: format!("n{n}_enc"),
            unencoded: format!("n{n}_unenc"),
        });
    }
    Ok(out)
}

/// Per-N pseudothreshold and discard proportions at the grid point closest to alpha = 1.
pub fn sweep_scaling(cfg: &Config, threads: usize) -> Result<(Config, RunResult, Vec<ScalingRow>), CliError> {
    let expanded = scaling_experiments(cfg)?;
    let r = simulate(&expanded, threads)?;
    let ai = (0..r.alphas.len())
        .min_by(|&a, &b| (r.alphas[a] - 1.0).abs().total_cmp(&(r.alphas[b] - 1.0).abs()))
        .expect("alpha grid is non-empty");
    let rows = expanded
        .scaling
        .as_ref()
        .unwrap()
        .n_values
        .iter()
        .zip(&r.thresholds)
        .map(|(&n, (pair, t))| {
            let p = r.points.iter().find(|p| p.experiment == pair.encoded && p.alpha_index == ai).unwrap();
            ScalingRow {
                n,
                threshold: *t,
                alpha_ref: r.alphas[ai],
                yield_: p.report.as_ref().map_or(0.0, |m| m.yield_),
                discards: p.discards.clone(),
            }
        })
        .collect();
    Ok((expanded, r, rows))
}

pub fn scaling_csv(rows: &[ScalingRow]) -> String {
    let mut s = String::from(schema::SCALING_HEADER);
    s.push('\n');
    for r in rows {
        let (lo, hi) = match r.threshold {
            Pseudothreshold::Interval { low, high } => (low.to_string(), high.to_string()),
            Pseudothreshold::OpenEnded { low } => (low.to_string(), String::new()),
            Pseudothreshold::Indeterminate => (String::new(), String::new()),
        };
        let d: Vec<String> = r.discards.values().map(f64::to_string).collect();
        writeln!(
            s,
            "{},{},{lo},{hi},{},{},{}",
            r.n,
            r.threshold.label().replace(',', ";"),
            r.alpha_ref,
            r.yield_,
            d.join(",")
        )
        .unwrap();
    }
    s
}

pub fn write_scaling(
    dir: &Path,
    expanded: &Config,
    r: &RunResult,
    rows: &[ScalingRow],
) -> Result<Vec<String>, CliError> {
    let mut files = write_run(dir, expanded, r)?;
    write(dir, "scaling.csv", &scaling_csv(rows))?;
    let ns: Vec<usize> = rows.iter().map(|r| r.n).collect();
    let intervals: Vec<Option<(f64, f64)>> = rows
        .iter()
        .map(|r| match r.threshold {
            Pseudothreshold::Interval { low, high } => Some((low, high)),
            _ => None,
        })
        .collect();
    let parts: Vec<Vec<f64>> = rows.iter().map(|r| r.discards.values().copied().collect()).collect();
    let names: Vec<&str> = DiscardReason::ALL.iter().map(|r| r.name()).collect();
    write(
        dir,
        "scaling.svg",
        &svg::scaling_panels("Pseudothreshold and discards against N", &ns, &intervals, &parts, &names),
    )?;
    let mut csvs = vec!["metrics.csv", "decoded/*.csv", "thresholds.csv", "scaling.csv"];
    if expanded.costmodel.is_some() {
        csvs.push("regime_map.csv");
    }
    write(dir, "schema.md", &schema::document(&csvs))?;
    files.extend(["scaling.csv".to_string(), "scaling.svg".to_string()]);
    Ok(files)
}

/// `--out` wins; otherwise `<root>/<config out or config file stem>`.
pub fn output_dir(flag: Option<&Path>, root: &Path, cfg: &Config, config_path: &Path) -> PathBuf {
    if let Some(p) = flag {
        return p.to_path_buf();
    }
    let stem = cfg
        .out
        .clone()
        .or_else(|| config_path.file_stem().map(|s| s.to_string_lossy().into_owned()))
        .unwrap_or_else(|| "run".into());
    root.join(stem)
}
