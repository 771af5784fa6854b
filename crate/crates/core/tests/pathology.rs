mod common;

use common::OracleNoise;
use proptest::prelude::*;
use seaweed_core::ecology::EcoConfig;
use seaweed_core::pathology::*;

#[test]
fn mask_fraction_matches_independent_noise() {
    for seed in [0u64, 1, 42, 0xFFFF_FFFF_FFFF] {
        for scale in [2.0, 4.5, 8.0] {
            let params = DiseaseMaskParams {
                edge: 0.5,
                noise_scale: scale,
                seed,
            };
            let got = disease_mask_fraction(&params, 64).unwrap();
            let want = OracleNoise::new(seed).fraction_above(0.5, scale, 64);
            assert_eq!(got, want, "seed {seed} scale {scale}");
        }
    }
}

#[test]
fn healthier_means_fewer_patches() {
    let mask = PathologyConfig::default().mask;
    let mut last = f64::INFINITY;
    for k in 0..=20 {
        let params = mask_params_from_health(k as f64 / 20.0, 5, &mask);
        // compare at a fixed scale so only the edge varies
        let frac = disease_mask_fraction(
            &DiseaseMaskParams {
                noise_scale: 4.0,
                ..params
            },
            64,
        )
        .unwrap();
        assert!(frac <= last);
        last = frac;
    }
}

#[test]
fn small_resolutions_rejected() {
    let params = DiseaseMaskParams {
        edge: 0.5,
        noise_scale: 4.0,
        seed: 1,
    };
    assert!(disease_mask(&params, MIN_MASK_RESOLUTION - 1).is_err());
    assert_eq!(
        disease_mask(&params, MIN_MASK_RESOLUTION).unwrap().len(),
        256
    );
}

#[test]
fn infect_cure_respawn_cycle() {
    let cfg = PathologyConfig::default();
    let range = EcoConfig::default().ei_range();
    let ei = 1.0;
    let mut s = PathologyState::new(ei, range, &cfg);
    assert!(
        !s.cultivate_fungus(ei, range, &cfg),
        "no oomycete, nothing to cure"
    );
    assert_eq!(s.fungi_count, 0);
    let mut ticks = 1;
    while !s.tick(ei, 0.1, range, &cfg) {
        ticks += 1;
        assert!(ticks < 1000);
    }
    assert_eq!(ticks, 900);
    assert_eq!(s.required_fungi, cfg.r_min);
    assert!(!s.cultivate_fungus(ei, range, &cfg));
    assert_eq!(s.swarm_health, 0.5);
    assert!(s.cultivate_fungus(ei, range, &cfg));
    assert!(!s.oomycete_present);
    assert_eq!(s.swarm_health, 1.0);
    assert_eq!(s.respawn_timer, cfg.t_max);
}

proptest! {
    #[test]
    fn mask_fraction_non_increasing_in_edge(seed in any::<u64>(), scale in 1.0f64..10.0, a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let f = |edge| disease_mask_fraction(&DiseaseMaskParams { edge, noise_scale: scale, seed }, 32).unwrap();
        prop_assert!(f(hi) <= f(lo));
    }

    #[test]
    fn cure_cost_and_delay_monotone(a in -0.5f64..=1.0, b in -0.5f64..=1.0) {
        let cfg = PathologyConfig::default();
        let range = EcoConfig::default().ei_range();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(required_fungi(hi, range, &cfg) <= required_fungi(lo, range, &cfg));
        prop_assert!(respawn_delay(hi, range, &cfg) >= respawn_delay(lo, range, &cfg));
        let r = required_fungi(a, range, &cfg);
        prop_assert!(r >= cfg.r_min && r <= cfg.r_max);
    }
}
