//! TVD, error rates, bootstrap intervals and the metric report format.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{AnalysisError, DecodedSample, DiscardReason};
use crate::sim::Distribution;

pub const DEFAULT_RESAMPLES: usize = 2000;
pub const CI_LEVEL: f64 = 0.68;

/// Half the L1 distance between two distributions over the union of their supports.
pub fn tvd(p: &Distribution, q: &Distribution) -> f64 {
    let mut sum = 0.0;
    for (k, &pk) in p {
        sum += (pk - q.get(k).copied().unwrap_or(0.0)).abs();
    }
    for (k, &qk) in q {
        if !p.contains_key(k) {
            sum += qk;
        }
    }
    0.5 * sum
}

pub fn empirical(words: &[&str]) -> Distribution {
    let mut d = Distribution::new();
    if words.is_empty() {
        return d;
    }
    let w = 1.0 / words.len() as f64;
    for s in words {
        *d.entry(s.to_string()).or_insert(0.0) += w;
    }
    d
}

/// Narrowest interval holding `level` of the sorted values.
pub fn narrowest_interval(sorted: &[f64], level: f64) -> (f64, f64) {
    let n = sorted.len();
    let m = ((level * n as f64).ceil() as usize).clamp(1, n);
    let mut best = (sorted[0], sorted[m - 1]);
    for i in 0..=n - m {
        let (lo, hi) = (sorted[i], sorted[i + m - 1]);
        if hi - lo < best.1 - best.0 {
            best = (lo, hi);
        }
    }
    best
}

/// Seeded bootstrap of `stat` over resampled word lists; returns the narrowest 68% interval.
pub fn bootstrap_ci<F>(words: &[&str], resamples: usize, seed: u64, stat: F) -> (f64, f64)
where
    F: Fn(&[usize], usize) -> f64,
{
    // Work on category indices and counts to keep resampling cheap.
    let mut cats: BTreeMap<&str, usize> = BTreeMap::new();
    for w in words {
        let next = cats.len();
        cats.entry(w).or_insert(next);
    }
    let idx: Vec<usize> = words.iter().map(|w| cats[w]).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stats = Vec::with_capacity(resamples);
    let mut counts = vec![0usize; cats.len()];
    for _ in 0..resamples.max(1) {
        counts.iter_mut().for_each(|c| *c = 0);
        for _ in 0..idx.len() {
            counts[idx[rng.random_range(0..idx.len())]] += 1;
        }
        stats.push(stat(&counts, idx.len()));
    }
    stats.sort_by(f64::total_cmp);
    narrowest_interval(&stats, CI_LEVEL)
}

fn category_names(words: &[&str]) -> Vec<String> {
    let mut cats: BTreeMap<&str, usize> = BTreeMap::new();
    for w in words {
        let next = cats.len();
        cats.entry(w).or_insert(next);
    }
    let mut names = vec![String::new(); cats.len()];
    for (k, v) in cats {
        names[v] = k.to_string();
    }
    names
}

/// TVD of the accepted words against `ideal`, with its bootstrap interval.
pub fn tvd_with_ci(
    words: &[&str],
    ideal: &Distribution,
    resamples: usize,
    seed: u64,
) -> Result<(f64, (f64, f64)), AnalysisError> {
    if words.is_empty() {
        return Err(AnalysisError::Undefined("TVD of an empty accepted set".into()));
    }
    let point = tvd(&empirical(words), ideal);
    let names = category_names(words);
    let ci = bootstrap_ci(words, resamples, seed, |counts, n| {
        let mut p = Distribution::new();
        for (i, &c) in counts.iter().enumerate() {
            if c > 0 {
                p.insert(names[i].clone(), c as f64 / n as f64);
            }
        }
        tvd(&p, ideal)
    });
    Ok((point, ci))
}

/// Fraction of accepted words differing from `expected`, with its bootstrap interval.
pub fn error_rate(
    words: &[&str],
    expected: &str,
    resamples: usize,
    seed: u64,
) -> Result<(f64, (f64, f64)), AnalysisError> {
    if words.is_empty() {
        return Err(AnalysisError::Undefined("error rate of an empty accepted set".into()));
    }
    let wrong = words.iter().filter(|w| **w != expected).count();
    let point = wrong as f64 / words.len() as f64;
    let names = category_names(words);
    let ci = bootstrap_ci(words, resamples, seed, |counts, n| {
        let good: usize = counts.iter().enumerate().filter(|(i, _)| names[*i] == expected).map(|(_, c)| c).sum();
        1.0 - good as f64 / n as f64
    });
    Ok((point, ci))
}

#[derive(Clone, Debug, PartialEq)]
pub struct MetricReport {
    pub experiment: String,
    pub shots: u64,
    pub accepted_samples: u64,
    pub tvd: f64,
    pub tvd_ci68: (f64, f64),
    /// Only for experiments with a single expected word.
    pub error_rate: Option<(f64, (f64, f64))>,
    pub yield_: f64,
    pub discard_breakdown: BTreeMap<DiscardReason, f64>,
}

/// Report over decoded shots; `ideal` is the expected word distribution.
pub fn summarize(
    experiment: &str,
    samples: &[DecodedSample],
    ideal: &Distribution,
    resamples: usize,
    seed: u64,
) -> Result<MetricReport, AnalysisError> {
    let shots = samples.len() as u64;
    if shots == 0 {
        return Err(AnalysisError::Undefined("no shots".into()));
    }
    let mut breakdown: BTreeMap<DiscardReason, f64> = DiscardReason::ALL.iter().map(|&r| (r, 0.0)).collect();
    let mut accepted = 0u64;
    for s in samples {
        match s.discard_reason {
            Some(r) => *breakdown.get_mut(&r).unwrap() += 1.0,
            None => accepted += 1,
        }
    }
    for v in breakdown.values_mut() {
        *v /= shots as f64;
    }
    let words: Vec<&str> =
        samples.iter().filter(|s| s.accepted()).flat_map(|s| s.words.iter().map(String::as_str)).collect();
    let (tvd, tvd_ci68) = tvd_with_ci(&words, ideal, resamples, seed)?;
    let deterministic: Vec<&String> = ideal.iter().filter(|(_, &p)| (p - 1.0).abs() < 1e-12).map(|(k, _)| k).collect();
    let error_rate = match deterministic.as_slice() {
        [w] => Some(error_rate(&words, w, resamples, seed)?),
        _ => None,
    };
    Ok(MetricReport {
        experiment: experiment.to_string(),
        shots,
        accepted_samples: words.len() as u64,
        tvd,
        tvd_ci68,
        error_rate,
        yield_: accepted as f64 / shots as f64,
        discard_breakdown: breakdown,
    })
}

impl MetricReport {
    /// `key value` lines; see [`MetricReport::parse`].
    pub fn to_text(&self) -> String {
        let mut s = String::from("metric_report v1\n");
        writeln!(s, "experiment {}", self.experiment).unwrap();
        writeln!(s, "shots {}", self.shots).unwrap();
        writeln!(s, "accepted_samples {}", self.accepted_samples).unwrap();
        writeln!(s, "tvd {}", self.tvd).unwrap();
        writeln!(s, "tvd_ci68 {} {}", self.tvd_ci68.0, self.tvd_ci68.1).unwrap();
        match self.error_rate {
            Some((e, (lo, hi))) => writeln!(s, "error_rate {e} {lo} {hi}").unwrap(),
            None => s.push_str("error_rate none\n"),
        }
        writeln!(s, "yield {}", self.yield_).unwrap();
        for (r, v) in &self.discard_breakdown {
            writeln!(s, "discard {} {v}", r.name()).unwrap();
        }
        s
    }

    pub fn parse(text: &str) -> Result<MetricReport, AnalysisError> {
        let mut lines = text.lines().enumerate();
        let err = |ln: usize, m: &str| AnalysisError::Parse(format!("line {}: {m}", ln + 1));
        match lines.next() {
            Some((_, "metric_report v1")) => {}
            _ => return Err(err(0, "expected 'metric_report v1'")),
        }
        let mut r = MetricReport {
            experiment: String::new(),
            shots: 0,
            accepted_samples: 0,
            tvd: 0.0,
            tvd_ci68: (0.0, 0.0),
            error_rate: None,
            yield_: 0.0,
            discard_breakdown: BTreeMap::new(),
        };
        let mut seen = Vec::new();
        for (ln, line) in lines {
            let toks: Vec<&str> = line.split(' ').collect();
            let f = |i: usize| -> Result<f64, AnalysisError> {
                let v: f64 =
                    toks.get(i).ok_or_else(|| err(ln, "missing value"))?.parse().map_err(|_| err(ln, "bad number"))?;
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(err(ln, "non-finite number"))
                }
            };
            let arity = |n: usize| if toks.len() == n { Ok(()) } else { Err(err(ln, "wrong number of fields")) };
            let key = toks[0];
            if key != "discard" {
                if seen.contains(&key) {
                    return Err(err(ln, "duplicate key"));
                }
                seen.push(key);
            }
            match key {
                "experiment" => {
                    arity(2)?;
                    if toks[1].is_empty() || toks[1].contains(char::is_whitespace) {
                        return Err(err(ln, "experiment id must be one non-empty token"));
                    }
                    r.experiment = toks[1].to_string();
                }
                "shots" => {
                    arity(2)?;
                    r.shots = toks[1].parse().map_err(|_| err(ln, "bad count"))?;
                }
                "accepted_samples" => {
                    arity(2)?;
                    r.accepted_samples = toks[1].parse().map_err(|_| err(ln, "bad count"))?;
                }
                "tvd" => {
                    arity(2)?;
                    r.tvd = f(1)?;
                }
                "tvd_ci68" => {
                    arity(3)?;
                    r.tvd_ci68 = (f(1)?, f(2)?);
                }
                "error_rate" if toks.get(1) == Some(&"none") => arity(2)?,
                "error_rate" => {
                    arity(4)?;
                    r.error_rate = Some((f(1)?, (f(2)?, f(3)?)));
                }
                "yield" => {
                    arity(2)?;
                    r.yield_ = f(1)?;
                }
                "discard" => {
                    arity(3)?;
                    let reason = DiscardReason::parse(toks[1]).ok_or_else(|| err(ln, "unknown discard reason"))?;
                    if r.discard_breakdown.insert(reason, f(2)?).is_some() {
                        return Err(err(ln, "duplicate discard reason"));
                    }
                }
                _ => return Err(err(ln, "unknown key")),
            }
        }
        for k in ["experiment", "shots", "accepted_samples", "tvd", "tvd_ci68", "error_rate", "yield"] {
            if !seen.contains(&k) {
                return Err(AnalysisError::Parse(format!("missing {k}")));
            }
        }
        Ok(r)
    }

    pub const CSV_HEADER: &'static str =
        "experiment,shots,accepted_samples,tvd,tvd_lo,tvd_hi,error_rate,error_lo,error_hi,yield,discard_prep_flag,discard_loss,discard_out_of_codespace,discard_ldu_flag";

    pub fn csv_row(&self) -> String {
        let (e, lo, hi) = match self.error_rate {
            Some((e, (lo, hi))) => (e.to_string(), lo.to_string(), hi.to_string()),
            None => (String::new(), String::new(), String::new()),
        };
        let d = |r| self.discard_breakdown.get(&r).copied().unwrap_or(0.0);
        format!(
            "{},{},{},{},{},{},{e},{lo},{hi},{},{},{},{},{}",
            self.experiment,
            self.shots,
            self.accepted_samples,
            self.tvd,
            self.tvd_ci68.0,
            self.tvd_ci68.1,
            self.yield_,
            d(DiscardReason::PrepFlag),
            d(DiscardReason::Loss),
            d(DiscardReason::OutOfCodespace),
            d(DiscardReason::LduFlag),
        )
    }
}
