//! Post-processing of shot records and the metrics computed from decoded samples.

mod decode;
mod metrics;
mod pipeline;
mod threshold;

use thiserror::Error;

pub use decode::{bits_from_str, decoder_for, BlockDecoder};
pub use metrics::{
    bootstrap_ci, empirical, error_rate, narrowest_interval, summarize, tvd, tvd_with_ci, MetricReport, CI_LEVEL,
    DEFAULT_RESAMPLES,
};
pub use pipeline::{decode_distribution, postprocess, DecodedDistribution, Decoder};
pub use threshold::{pseudothreshold, Pseudothreshold, SweepPoint};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("layout mismatch: {0}")]
    Layout(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("undefined metric: {0}")]
    Undefined(String),
    #[error("parse error: {0}")]
    Parse(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LossPolicy {
    Discard,
    Correct,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PostProcessConfig {
    pub loss_policy: LossPolicy,
    pub use_ldu_flags: bool,
    pub apply_pauli_correction: bool,
}

impl Default for PostProcessConfig {
    fn default() -> Self {
        PostProcessConfig { loss_policy: LossPolicy::Discard, use_ldu_flags: true, apply_pauli_correction: true }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DiscardReason {
    PrepFlag,
    Loss,
    OutOfCodespace,
    LduFlag,
}

impl DiscardReason {
    pub const ALL: [DiscardReason; 4] =
        [DiscardReason::PrepFlag, DiscardReason::Loss, DiscardReason::OutOfCodespace, DiscardReason::LduFlag];

    pub fn name(self) -> &'static str {
        match self {
            DiscardReason::PrepFlag => "prep_flag",
            DiscardReason::Loss => "loss",
            DiscardReason::OutOfCodespace => "out_of_codespace",
            DiscardReason::LduFlag => "ldu_flag",
        }
    }

    pub fn parse(s: &str) -> Option<DiscardReason> {
        DiscardReason::ALL.into_iter().find(|r| r.name() == s)
    }
}

/// One shot after post-processing. Accepted shots carry one word per circuit sample.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodedSample {
    pub words: Vec<String>,
    pub discard_reason: Option<DiscardReason>,
}

impl DecodedSample {
    pub fn accepted(&self) -> bool {
        self.discard_reason.is_none()
    }
}
