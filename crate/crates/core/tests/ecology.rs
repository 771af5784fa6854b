use proptest::prelude::*;
use seaweed_core::ecology::*;

fn cfg() -> EcoConfig {
    EcoConfig::default()
}

#[test]
fn joints_are_continuous() {
    let c = cfg();
    for joint in [c.c1 as f64, c.c2 as f64] {
        let d = (ei_at(joint - 1e-6, &c) - ei_at(joint + 1e-6, &c)).abs();
        assert!(d < 1e-4, "jump {d} at {joint}");
    }
    // wrap from the end of crisis back to the start of prosperity
    let d = (ei_at(c.cycle as f64 - 1e-6, &c) - ei_at(1e-6, &c)).abs();
    assert!(d < 1e-4);
}

#[test]
fn peak_and_trough() {
    let c = cfg();
    assert!((ei_from_insertions(c.c1, &c).unwrap() - c.a1).abs() < 1e-12);
    assert_eq!(ei_from_insertions(c.c2, &c).unwrap(), 0.0);
    assert!((ei_from_insertions(100, &c).unwrap() + c.a2).abs() < 1e-12);
}

#[test]
fn factors_move_monotonically_with_ei() {
    let c = cfg();
    let mut prev = factors_from_ei(-c.a2, &c);
    for k in 1..=1000 {
        let ei = -c.a2 + (c.a1 + c.a2) * k as f64 / 1000.0;
        let f = factors_from_ei(ei, &c);
        for factor in Factor::ALL {
            let r = c.factor_ranges.get(factor);
            assert!(
                f.get(factor) >= prev.get(factor),
                "{factor:?} fell at ei={ei}"
            );
            assert!((r.min..=r.max).contains(&f.get(factor)));
        }
        prev = f;
    }
    let base = factors_from_ei(0.0, &c);
    for factor in Factor::ALL {
        assert_eq!(base.get(factor), c.factor_ranges.get(factor).baseline);
    }
}

#[test]
fn every_insertion_keeps_state_consistent() {
    let c = cfg();
    let mut s = EcoState::new(&c);
    for n in 1..=3 * c.cycle as u64 {
        let wrapped = s.advance(&c);
        assert_eq!(wrapped, n % c.cycle as u64 == 0);
        s.check_invariants(&c).unwrap();
        assert_eq!(s.total_insertions, n);
    }
}

proptest! {
    #[test]
    fn sign_structure(c in 0u32..120) {
        let cf = cfg();
        let ei = ei_from_insertions(c, &cf).unwrap();
        if c == 0 || c >= cf.c2 {
            prop_assert!(ei <= 0.0);
        } else {
            prop_assert!(ei > 0.0);
        }
        prop_assert!(ei >= -cf.a2 && ei <= cf.a1);
    }

    #[test]
    fn out_of_domain_rejected(c in 120u32..) {
        prop_assert!(ei_from_insertions(c, &cfg()).is_err());
        prop_assert!(stage_of(c, &cfg()).is_err());
    }

    #[test]
    fn custom_boundaries_keep_sign_structure(c1 in 1u32..50, d2 in 1u32..50, d3 in 1u32..50, a1 in 0.1f64..5.0, a2 in 0.1f64..5.0) {
        let cf = EcoConfig { a1, a2, c1, c2: c1 + d2, cycle: c1 + d2 + d3, ..cfg() };
        cf.validate().unwrap();
        for c in 1..cf.cycle {
            let ei = ei_from_insertions(c, &cf).unwrap();
            prop_assert_eq!(ei > 0.0, c < cf.c2);
        }
    }
}
