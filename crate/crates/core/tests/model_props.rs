use dirac_decay::model::{classify_regime, from_dimensionless, to_dimensionless};
use dirac_decay::{Cutoff, ModelParams, Regime};
use proptest::prelude::*;

fn cutoff() -> impl Strategy<Value = Cutoff> {
    prop_oneof![Just(Cutoff::Infinite), (1e-3f64..1e3).prop_map(Cutoff::Finite)]
}

fn params() -> impl Strategy<Value = ModelParams> {
    (1e-3f64..1e2, 1e-2f64..10.0, prop_oneof![Just(0.0), 1e-3f64..50.0], cutoff(), 0.1f64..10.0)
        .prop_map(|(w, g, m, l, h)| ModelParams::new(w, g, m, l, h).unwrap())
}

proptest! {
    #[test]
    fn regime_is_total_and_deterministic(p in params()) {
        let r = classify_regime(&p);
        prop_assert_eq!(r, classify_regime(&p));
        let expected = match (p.m() == 0.0, p.lambda().is_infinite()) {
            (true, true) => Regime::MasslessNocut,
            (false, true) => Regime::MassiveNocut,
            (true, false) => Regime::MasslessCut,
            (false, false) => Regime::General,
        };
        prop_assert_eq!(r, expected);
    }

    #[test]
    fn dimensionless_roundtrip_within_four_ulp(p in params(), t in 0.0f64..1e4) {
        let back = from_dimensionless(to_dimensionless(t, &p), &p);
        prop_assert!((back - t).abs() <= 4.0 * f64::EPSILON * t.abs().max(f64::MIN_POSITIVE));
    }
}

#[test]
fn dimensionless_examples() {
    let p = ModelParams::with_unit_hbar(1.0, 1.0, 0.0, Cutoff::Infinite).unwrap();
    assert_eq!(to_dimensionless(2.0, &p), 2.0);
    let p = ModelParams::with_unit_hbar(1.0, 0.3, 0.0, Cutoff::Infinite).unwrap();
    assert!((to_dimensionless(1.0, &p) - 0.09).abs() < 1e-15);
    assert_eq!(to_dimensionless(0.0, &p), 0.0);
}

#[test]
fn rejects_invalid_parameters() {
    assert!(ModelParams::with_unit_hbar(1.0, 0.0, 0.0, Cutoff::Infinite).is_err());
    assert!(ModelParams::with_unit_hbar(1.0, 1.0, -1.0, Cutoff::Infinite).is_err());
    assert!(ModelParams::with_unit_hbar(1.0, 1.0, 0.0, Cutoff::Finite(0.0)).is_err());
    assert!(ModelParams::new(1.0, 1.0, 0.0, Cutoff::Infinite, 0.0).is_err());
}
