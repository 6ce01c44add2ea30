use atomqec::costmodel::{layer_cost, regime_map, Regime, TimingParams};
use proptest::prelude::*;

proptest! {
    #[test]
    fn cost_is_monotone_in_every_argument(d in 1u32..64, s in 0u32..64, t in 0.0f64..1e-4) {
        let p = TimingParams { t_measure: 1e-3, t_move_per_site: t };
        let base = layer_cost(d, s, &p).unwrap().seconds;
        prop_assert!(layer_cost(d + 1, s, &p).unwrap().seconds >= base);
        prop_assert!(layer_cost(d, s + 1, &p).unwrap().seconds >= base);
        let faster = TimingParams { t_move_per_site: t * 1.5, ..p };
        prop_assert!(layer_cost(d, s, &faster).unwrap().seconds >= base);
    }

    #[test]
    fn boundary_is_monotone_for_any_speed(t in 0.0f64..2e-4) {
        let p = TimingParams { t_measure: 1e-3, t_move_per_site: t };
        let ds: Vec<u32> = (3..=31).collect();
        let ss: Vec<u32> = (1..=32).collect();
        prop_assert!(regime_map(&ds, &ss, &p).unwrap().is_monotone());
    }
}

#[test]
fn default_map_has_both_regimes() {
    let ds: Vec<u32> = (3..=31).collect();
    let ss: Vec<u32> = (0..=32).collect();
    let m = regime_map(&ds, &ss, &TimingParams::default()).unwrap();
    assert!(m.is_monotone());
    let cells: Vec<_> = m.cells.iter().flatten().collect();
    assert!(cells.iter().any(|c| c.regime == Regime::Movement));
    assert!(m.cells.iter().all(|row| row[0].seconds == 1e-3 && row[1].regime == Regime::Measurement));
}
