//! Noise channels, default calibration and alpha scaling.

use std::fmt::Write as _;

use super::SimError;

/// Channel names accepted by [`NoiseModel::get`], [`NoiseModel::set`] and alpha scopes.
pub const CHANNELS: [&str; 10] = [
    "cz_pauli",
    "cz_leak",
    "cz_loss",
    "gr_pauli",
    "rz_dephase",
    "prep_flip",
    "meas_flip",
    "meas_loss",
    "move_phase",
    "idle_dephase",
];

/// Channels scaled by alpha when the scope is left at its default.
pub const DEFAULT_ALPHA_SUBSET: [&str; 5] = ["cz_pauli", "cz_leak", "cz_loss", "meas_flip", "meas_loss"];

#[derive(Clone, Debug, PartialEq)]
pub enum AlphaScope {
    All,
    Subset(Vec<String>),
}

impl AlphaScope {
    pub fn default_subset() -> Self {
        AlphaScope::Subset(DEFAULT_ALPHA_SUBSET.iter().map(|s| s.to_string()).collect())
    }

    pub fn contains(&self, channel: &str) -> bool {
        match self {
            AlphaScope::All => true,
            AlphaScope::Subset(v) => v.iter().any(|c| c == channel),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IdleMode {
    /// One idle channel application per moment an atom sits out.
    PerMoment,
    /// Idle probability weighted by the moment's duration in CZ-time units.
    Duration,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NoiseModel {
    /// Total two-qubit Pauli probability per CZ.
    pub cz_pauli: f64,
    /// Relative weights of the 15 non-identity two-qubit Paulis, index `4*a + b` minus one with
    /// letters 1=X, 2=Z, 3=Y on the first (a) and second (b) operand.
    pub cz_pauli_weights: [f64; 15],
    pub cz_leak: f64,
    pub cz_loss: f64,
    pub gr_pauli: f64,
    pub rz_dephase: f64,
    pub prep_flip: f64,
    pub meas_flip: f64,
    pub meas_loss: f64,
    pub move_phase: f64,
    pub idle_dephase: f64,
    /// Readout bit reported for the two leaked levels.
    pub leak_readout: [u8; 2],
    pub alpha: f64,
    pub alpha_scope: AlphaScope,
    pub idle_mode: IdleMode,
    /// Allow non-Clifford Rz via the Pauli twirl.
    pub twirl: bool,
}

impl Default for NoiseModel {
    fn default() -> Self {
        NoiseModel::calibrated()
    }
}

impl NoiseModel {
    /// Estimated defaults; raw CZ infidelity 0.0065 split over Pauli, leak and loss.
    pub fn calibrated() -> Self {
        NoiseModel {
            cz_pauli: 0.0045,
            cz_pauli_weights: [1.0; 15],
            cz_leak: 0.001,
            cz_loss: 0.001,
            gr_pauli: 4e-4,
            rz_dephase: 1e-4,
            prep_flip: 5e-4,
            meas_flip: 5e-4,
            meas_loss: 5e-4,
            move_phase: 5e-4,
            idle_dephase: 1e-4,
            leak_readout: [0, 1],
            alpha: 1.0,
            alpha_scope: AlphaScope::default_subset(),
            idle_mode: IdleMode::PerMoment,
            twirl: true,
        }
    }

    pub fn noiseless() -> Self {
        let mut m = NoiseModel::calibrated();
        for c in CHANNELS {
            m.set(c, 0.0).unwrap();
        }
        m
    }

    pub fn with_alpha(mut self, alpha: f64, scope: AlphaScope) -> Self {
        self.alpha = alpha;
        self.alpha_scope = scope;
        self
    }

    fn slot(&mut self, channel: &str) -> Option<&mut f64> {
        Some(match channel {
            "cz_pauli" => &mut self.cz_pauli,
            "cz_leak" => &mut self.cz_leak,
            "cz_loss" => &mut self.cz_loss,
            "gr_pauli" => &mut self.gr_pauli,
            "rz_dephase" => &mut self.rz_dephase,
            "prep_flip" => &mut self.prep_flip,
            "meas_flip" => &mut self.meas_flip,
            "meas_loss" => &mut self.meas_loss,
            "move_phase" => &mut self.move_phase,
            "idle_dephase" => &mut self.idle_dephase,
            _ => return None,
        })
    }

    pub fn get(&self, channel: &str) -> Option<f64> {
        self.clone().slot(channel).map(|v| *v)
    }

    pub fn set(&mut self, channel: &str, value: f64) -> Result<(), SimError> {
        if !(0.0..=1.0).contains(&value) {
            return Err(SimError::Noise(format!("{channel}={value} is not a probability")));
        }
        let slot = self.slot(channel).ok_or_else(|| SimError::Noise(format!("unknown channel {channel:?}")))?;
        *slot = value;
        Ok(())
    }

    /// Base rates times alpha on the scoped channels, clamped at 1. Warnings name each clamp.
    pub fn effective(&self) -> (NoiseModel, Vec<String>) {
        let mut out = self.clone();
        let mut warnings = Vec::new();
        for c in CHANNELS {
            if !self.alpha_scope.contains(c) {
                continue;
            }
            let v = self.get(c).unwrap() * self.alpha;
            let clamped = v.clamp(0.0, 1.0);
            if clamped != v {
                warnings.push(format!("{c} scaled to {v} by alpha={}, clamped to {clamped}", self.alpha));
            }
            *out.slot(c).unwrap() = clamped;
        }
        // CZ channels are drawn as exclusive outcomes of one draw.
        let total = out.cz_pauli + out.cz_leak + out.cz_loss;
        if total > 1.0 {
            warnings.push(format!("CZ channel total {total} exceeds 1, renormalised"));
            out.cz_pauli /= total;
            out.cz_leak /= total;
            out.cz_loss /= total;
        }
        out.alpha = 1.0;
        out.alpha_scope = AlphaScope::All;
        (out, warnings)
    }

    /// One-line `key=value` rendering, parsed back by [`NoiseModel::from_text`].
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for c in CHANNELS {
            write!(s, "{c}={} ", self.get(c).unwrap()).unwrap();
        }
        if self.cz_pauli_weights.iter().all(|&w| w == 1.0) {
            s.push_str("cz_pauli_weights=uniform ");
        } else {
            let w: Vec<String> = self.cz_pauli_weights.iter().map(|w| w.to_string()).collect();
            write!(s, "cz_pauli_weights={} ", w.join(",")).unwrap();
        }
        write!(s, "leak_readout={},{} alpha={} ", self.leak_readout[0], self.leak_readout[1], self.alpha).unwrap();
        match &self.alpha_scope {
            AlphaScope::All => s.push_str("alpha_scope=all "),
            AlphaScope::Subset(v) => write!(s, "alpha_scope=subset:{} ", v.join(",")).unwrap(),
        }
        let idle = match self.idle_mode {
            IdleMode::PerMoment => "per_moment",
            IdleMode::Duration => "duration",
        };
        write!(s, "idle_mode={idle} twirl={}", u8::from(self.twirl)).unwrap();
        s
    }

    /// Applies one `key=value` setting.
    pub fn apply_setting(&mut self, key: &str, value: &str) -> Result<(), SimError> {
        let bad = || SimError::Noise(format!("bad value {value:?} for {key}"));
        let float =
            |v: &str| v.parse::<f64>().map_err(|_| bad()).and_then(|x| if x.is_finite() { Ok(x) } else { Err(bad()) });
        match key {
            "cz_pauli_weights" => {
                if value == "uniform" {
                    self.cz_pauli_weights = [1.0; 15];
                } else {
                    let w: Vec<f64> = value.split(',').map(float).collect::<Result<_, _>>()?;
                    if w.len() != 15 || w.iter().any(|&x| x < 0.0) || w.iter().sum::<f64>() <= 0.0 {
                        return Err(bad());
                    }
                    self.cz_pauli_weights.copy_from_slice(&w);
                }
            }
            "leak_readout" => {
                let (a, b) = value.split_once(',').ok_or_else(bad)?;
                let bit = |t: &str| match t {
                    "0" => Ok(0u8),
                    "1" => Ok(1u8),
                    _ => Err(bad()),
                };
                self.leak_readout = [bit(a)?, bit(b)?];
            }
            "alpha" => {
                let a = float(value)?;
                if a < 0.0 {
                    return Err(bad());
                }
                self.alpha = a;
            }
            "alpha_scope" => {
                self.alpha_scope = if value == "all" {
                    AlphaScope::All
                } else if let Some(list) = value.strip_prefix("subset:") {
                    let v: Vec<String> = list.split(',').filter(|t| !t.is_empty()).map(str::to_string).collect();
                    if let Some(u) = v.iter().find(|c| !CHANNELS.contains(&c.as_str())) {
                        return Err(SimError::Noise(format!("unknown channel {u:?} in alpha_scope")));
                    }
                    AlphaScope::Subset(v)
                } else if value == "subset" {
                    AlphaScope::default_subset()
                } else {
                    return Err(bad());
                };
            }
            "idle_mode" => {
                self.idle_mode = match value {
                    "per_moment" => IdleMode::PerMoment,
                    "duration" => IdleMode::Duration,
                    _ => return Err(bad()),
                }
            }
            "twirl" => {
                self.twirl = match value {
                    "1" | "true" => true,
                    "0" | "false" => false,
                    _ => return Err(bad()),
                }
            }
            _ => self.set(key, float(value)?)?,
        }
        Ok(())
    }

    pub fn from_text(text: &str) -> Result<NoiseModel, SimError> {
        let mut m = NoiseModel::calibrated();
        for tok in text.split_whitespace() {
            let (k, v) =
                tok.split_once('=').ok_or_else(|| SimError::Noise(format!("expected key=value, got {tok:?}")))?;
            m.apply_setting(k, v)?;
        }
        Ok(m)
    }
}
