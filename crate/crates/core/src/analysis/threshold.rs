//! Pseudothreshold interval from paired encoded/unencoded sweeps.

/// One sweep point: alpha, metric value and its interval.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepPoint {
    pub alpha: f64,
    pub value: f64,
    pub ci: (f64, f64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Pseudothreshold {
    /// From where the interval bands first touch to where the encoded curve reaches the
    /// unencoded one.
    Interval { low: f64, high: f64 },
    /// Bands meet at `low` but the encoded curve stays below within the grid.
    OpenEnded { low: f64 },
    /// The encoded curve is never clearly better, or the grid has a single point.
    Indeterminate,
}

impl Pseudothreshold {
    pub fn label(&self) -> String {
        match self {
            Pseudothreshold::Interval { low, high } => format!("[{low}, {high}]"),
            Pseudothreshold::OpenEnded { low } => format!("[{low}, >grid]"),
            Pseudothreshold::Indeterminate => "indeterminate".into(),
        }
    }

    /// Upper end of the crossing, when it lies inside the grid.
    pub fn crossing(&self) -> Option<f64> {
        match *self {
            Pseudothreshold::Interval { high, .. } => Some(high),
            _ => None,
        }
    }
}

/// First zero of `f` along the grid, linearly interpolated; `f >= 0` counts as reached.
fn first_crossing(alpha: &[f64], f: &[f64]) -> Option<f64> {
    let i = f.iter().position(|&v| v >= 0.0)?;
    if i == 0 {
        return Some(alpha[0]);
    }
    let (a0, a1, f0, f1) = (alpha[i - 1], alpha[i], f[i - 1], f[i]);
    Some(a0 + (a1 - a0) * (-f0) / (f1 - f0))
}

/// Lower metric is better on both curves. Grids must match point for point.
pub fn pseudothreshold(encoded: &[SweepPoint], unencoded: &[SweepPoint]) -> Pseudothreshold {
    if encoded.len() < 2 || encoded.len() != unencoded.len() {
        return Pseudothreshold::Indeterminate;
    }
    let alpha: Vec<f64> = encoded.iter().map(|p| p.alpha).collect();
    if unencoded.iter().zip(&alpha).any(|(u, &a)| u.alpha != a) {
        return Pseudothreshold::Indeterminate;
    }
    // Band overlap: encoded upper edge reaches unencoded lower edge.
    let overlap: Vec<f64> = encoded.iter().zip(unencoded).map(|(e, u)| e.ci.1 - u.ci.0).collect();
    let reach: Vec<f64> = encoded.iter().zip(unencoded).map(|(e, u)| e.value - u.value).collect();
    match (first_crossing(&alpha, &overlap), first_crossing(&alpha, &reach)) {
        (Some(low), Some(high)) => Pseudothreshold::Interval { low: low.min(high), high },
        (Some(low), None) => Pseudothreshold::OpenEnded { low },
        (None, Some(high)) => Pseudothreshold::Interval { low: high, high },
        (None, None) => Pseudothreshold::Indeterminate,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve(alpha: &[f64], v: &[f64], w: f64) -> Vec<SweepPoint> {
        alpha.iter().zip(v).map(|(&a, &x)| SweepPoint { alpha: a, value: x, ci: (x - w, x + w) }).collect()
    }

    #[test]
    fn identical_curves_degenerate_at_start() {
        let a = [0.5, 1.0, 2.0];
        let c = curve(&a, &[0.1, 0.2, 0.3], 0.01);
        assert_eq!(pseudothreshold(&c, &c), Pseudothreshold::Interval { low: 0.5, high: 0.5 });
    }

    #[test]
    fn crossing_is_interpolated() {
        let a = [1.0, 2.0, 3.0];
        let enc = curve(&a, &[0.1, 0.3, 0.7], 0.0);
        let un = curve(&a, &[0.3, 0.4, 0.5], 0.0);
        // reach: -0.2, -0.1, 0.2 -> zero at 2 + 1/3.
        match pseudothreshold(&enc, &un) {
            Pseudothreshold::Interval { low, high } => {
                assert!((high - (2.0 + 1.0 / 3.0)).abs() < 1e-12);
                assert!((low - high).abs() < 1e-12);
            }
            p => panic!("{p:?}"),
        }
    }

    #[test]
    fn sentinels() {
        let a = [1.0, 2.0];
        let enc = curve(&a, &[0.1, 0.15], 0.06);
        let un = curve(&a, &[0.3, 0.2], 0.0);
        assert!(matches!(pseudothreshold(&enc, &un), Pseudothreshold::OpenEnded { .. }));
        assert_eq!(pseudothreshold(&enc[..1], &un[..1]), Pseudothreshold::Indeterminate);
    }
}
