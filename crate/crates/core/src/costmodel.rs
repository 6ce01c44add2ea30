//! Time cost of one logical gate layer: measurement-bound or movement-bound.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CostError {
    #[error("invalid cost-model input: {0}")]
    Invalid(String),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimingParams {
    /// Seconds per measurement round.
    pub t_measure: f64,
    /// Seconds to move an atom by one lattice site.
    pub t_move_per_site: f64,
}

impl Default for TimingParams {
    /// 1 ms measurement. The move speed is not a measured value: 16 us per site keeps a one-space
    /// move below a measurement round up to d = 62.
    fn default() -> Self {
        TimingParams { t_measure: 1e-3, t_move_per_site: 1.6e-5 }
    }
}

impl TimingParams {
    pub fn validate(&self) -> Result<(), CostError> {
        if !(self.t_measure > 0.0 && self.t_measure.is_finite()) {
            return Err(CostError::Invalid(format!("t_measure must be positive, got {}", self.t_measure)));
        }
        if !(self.t_move_per_site >= 0.0 && self.t_move_per_site.is_finite()) {
            return Err(CostError::Invalid(format!(
                "t_move_per_site must be non-negative, got {}",
                self.t_move_per_site
            )));
        }
        Ok(())
    }

    /// Physical sites crossed per logical movement space; one patch width.
    pub fn spaces_per_logical(d: u32) -> u32 {
        d
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Regime {
    Measurement,
    Movement,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::Measurement => "measurement",
            Regime::Movement => "movement",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LayerCost {
    pub seconds: f64,
    pub regime: Regime,
}

/// Cost of a layer that measures once and moves patches by `logical_spaces` logical spaces.
/// Ties go to measurement.
pub fn layer_cost(d: u32, logical_spaces: u32, p: &TimingParams) -> Result<LayerCost, CostError> {
    if d == 0 {
        return Err(CostError::Invalid("code distance must be at least 1".into()));
    }
    p.validate()?;
    let sites = f64::from(logical_spaces) * f64::from(TimingParams::spaces_per_logical(d));
    let moving = sites * p.t_move_per_site;
    Ok(if moving > p.t_measure {
        LayerCost { seconds: moving, regime: Regime::Movement }
    } else {
        LayerCost { seconds: p.t_measure, regime: Regime::Measurement }
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegimeMap {
    pub distances: Vec<u32>,
    pub spaces: Vec<u32>,
    /// `cells[i][j]` is distance `distances[i]` with `spaces[j]` logical spaces.
    pub cells: Vec<Vec<LayerCost>>,
}

pub const REGIME_CSV_HEADER: &str = "d,logical_spaces,cost_s,regime";

impl RegimeMap {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(REGIME_CSV_HEADER);
        out.push('\n');
        for (i, d) in self.distances.iter().enumerate() {
            for (j, s) in self.spaces.iter().enumerate() {
                let c = self.cells[i][j];
                out.push_str(&format!("{d},{s},{:e},{}\n", c.seconds, c.regime));
            }
        }
        out
    }

    /// True when the regime switches to movement at most once along every row and column.
    /// Axes are checked in the order given, so pass sorted ranges.
    pub fn is_monotone(&self) -> bool {
        let rows = self.cells.iter().all(|r| r.windows(2).all(|w| w[0].regime <= w[1].regime));
        let cols = (0..self.spaces.len()).all(|j| self.cells.windows(2).all(|w| w[0][j].regime <= w[1][j].regime));
        rows && cols
    }
}

pub fn regime_map(distances: &[u32], spaces: &[u32], p: &TimingParams) -> Result<RegimeMap, CostError> {
    if distances.is_empty() || spaces.is_empty() {
        return Err(CostError::Invalid("regime map needs non-empty ranges".into()));
    }
    let cells = distances
        .iter()
        .map(|&d| spaces.iter().map(|&s| layer_cost(d, s, p)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    Ok(RegimeMap { distances: distances.to_vec(), spaces: spaces.to_vec(), cells })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_movement_is_measurement_bound() {
        let c = layer_cost(7, 0, &TimingParams::default()).unwrap();
        assert_eq!(c, LayerCost { seconds: 1e-3, regime: Regime::Measurement });
    }

    #[test]
    fn crossing_the_bound_switches_regime() {
        // 5 spaces at d = 5 is 25 sites; 5e-5 s per site gives 1.25 ms.
        let p = TimingParams { t_measure: 1e-3, t_move_per_site: 5e-5 };
        let c = layer_cost(5, 5, &p).unwrap();
        assert_eq!(c.regime, Regime::Movement);
        assert!((c.seconds - 1.25e-3).abs() < 1e-15);
        // Exactly 1 ms is a tie.
        assert_eq!(layer_cost(5, 4, &p).unwrap().regime, Regime::Measurement);
    }

    #[test]
    fn defaults_keep_single_space_moves_measurement_bound() {
        let p = TimingParams::default();
        for d in 1..=31 {
            assert_eq!(layer_cost(d, 1, &p).unwrap().regime, Regime::Measurement);
        }
    }

    #[test]
    fn zero_speed_is_all_measurement() {
        let p = TimingParams { t_move_per_site: 0.0, ..TimingParams::default() };
        let m = regime_map(&[3, 9, 31], &[0, 1, 32], &p).unwrap();
        assert!(m.cells.iter().flatten().all(|c| c.regime == Regime::Measurement));
    }

    #[test]
    fn bad_inputs_are_rejected() {
        assert!(layer_cost(0, 1, &TimingParams::default()).is_err());
        assert!(layer_cost(3, 1, &TimingParams { t_measure: 0.0, t_move_per_site: 1.0 }).is_err());
        assert!(regime_map(&[], &[1], &TimingParams::default()).is_err());
    }

    #[test]
    fn csv_has_one_row_per_cell() {
        let m = regime_map(&[3, 5], &[0, 1, 2], &TimingParams::default()).unwrap();
        let csv = m.to_csv();
        assert_eq!(csv.lines().count(), 7);
        assert!(csv.starts_with(REGIME_CSV_HEADER));
    }
}
