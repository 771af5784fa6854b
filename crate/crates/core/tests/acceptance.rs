//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the test fails if any criterion fails.

mod common;

use std::time::{Duration, Instant};

use common::*;
use seaweed_core::ecology::*;
use seaweed_core::engine::{run_replay, Engine, EngineConfig, EventKind, SimEvent, Target};
use seaweed_core::fungigen::*;
use seaweed_core::genmodel::*;
use seaweed_core::pathology::*;
use seaweed_core::policy::{simulate, PolicyScript, SimulationOutput};

type Check = Result<(), String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(limit: Duration, start: Instant) -> Check {
    let took = start.elapsed();
    ensure(took < limit, || format!("took {took:?}, limit {limit:?}"))
}

fn ei_curve_suite() -> Check {
    let start = Instant::now();
    let cfg = EcoConfig::default();
    let cycle = cfg.cycle as f64;
    for c in 0..cfg.cycle {
        let ei = ei_from_insertions(c, &cfg).map_err(|e| e.to_string())?;
        // periodicity: the cycle restarts from the same value
        let wrapped = ei_at((c as f64 + cycle) % cycle, &cfg);
        ensure(ei == wrapped, || format!("periodicity broken at c={c}"))?;
        if c < cfg.c2 {
            ensure(ei > 0.0 || c == 0, || {
                format!("ei({c}) = {ei} should be positive")
            })?;
        } else {
            ensure(ei <= 0.0, || {
                format!("ei({c}) = {ei} should be non-positive")
            })?;
        }
        let expected = if c <= cfg.c1 {
            Stage::Prosperity
        } else if c <= cfg.c2 {
            Stage::Decline
        } else {
            Stage::Crisis
        };
        let got = stage_of(c, &cfg).map_err(|e| e.to_string())?;
        ensure(got == expected, || format!("stage at c={c}: {got:?}"))?;
    }
    ensure(ei_from_insertions(0, &cfg).unwrap() == 0.0, || {
        "ei(0) != 0".into()
    })?;
    let eps = 1e-6;
    for joint in [cfg.c1 as f64, cfg.c2 as f64, cycle] {
        let left = ei_at(joint - eps, &cfg);
        let right = if joint == cycle {
            ei_at(eps, &cfg)
        } else {
            ei_at(joint + eps, &cfg)
        };
        ensure((left - right).abs() < 1e-4, || {
            format!("discontinuity at c={joint}")
        })?;
    }
    let mut state = EcoState::new(&cfg);
    for _ in 0..cfg.cycle {
        state.advance(&cfg);
    }
    ensure(
        state
            == EcoState {
                total_insertions: cfg.cycle as u64,
                ..EcoState::new(&cfg)
            },
        || "state after one full cycle differs from the start".into(),
    )?;
    within(Duration::from_secs(1), start)
}

fn mixed_trace(seed: u64, events: usize, ticks: u64) -> Vec<SimEvent> {
    let mut rng = Xorshift(seed);
    let mut out: Vec<SimEvent> = (0..events)
        .map(|_| {
            let tick = rng.below(ticks);
            let kind = match rng.below(10) {
                0..=4 => EventKind::InsertToken {
                    target: Target::Seaweed,
                },
                5..=8 => EventKind::InsertToken {
                    target: Target::Fungi,
                },
                _ => EventKind::SwitchTarget,
            };
            SimEvent::new(tick, kind)
        })
        .collect();
    out.sort_by_key(|e| e.tick);
    out
}

fn determinism() -> Check {
    let start = Instant::now();
    let cfg = EngineConfig::default();
    let trace = mixed_trace(0xDEC0DE, 500, 10_000);
    let a = run_replay(&cfg, &trace, 10_000, None).map_err(|e| e.to_string())?;
    let b = run_replay(&cfg, &trace, 10_000, None).map_err(|e| e.to_string())?;
    ensure(a.final_hash == b.final_hash, || {
        "replay hashes differ".into()
    })?;
    ensure(a.final_state.tick == 10_000, || {
        "replay stopped early".into()
    })?;
    within(Duration::from_secs(5), start)
}

fn economy_conservation() -> Check {
    let cfg = EngineConfig::default();
    let settle_ticks = (cfg.settlement.period / cfg.dt).round() as u64;
    for run in 0..20u64 {
        let trace = mixed_trace(1 + run * 7919, 1000, 6000);
        let mut engine = Engine::new(cfg.clone()).map_err(|e| e.to_string())?;
        let mut harvested = 0.0;
        let mut settled_at = Vec::new();
        let mut pending = trace.iter().peekable();
        let end = 6000u64.div_ceil(settle_ticks) * settle_ticks;
        while engine.state().tick < end {
            while let Some(e) = pending.next_if(|e| e.tick == engine.state().tick) {
                let out = engine.apply_event(e).map_err(|e| e.to_string())?;
                if let Some((_, price)) = out.harvested {
                    harvested += price;
                }
            }
            if engine.tick().settled.is_some() {
                settled_at.push(engine.state().sim_time);
            }
        }
        let ledger = &engine.state().ledger;
        ensure(ledger.unsettled_pool.is_empty(), || {
            "pool not drained at settlement".into()
        })?;
        let paid = ledger.dispensed as f64 + ledger.settlement_carry;
        ensure((paid - harvested).abs() < 1e-9, || {
            format!("run {run}: dispensed+carry {paid} vs harvested {harvested}")
        })?;
        ensure(harvested > 0.0, || format!("run {run} harvested nothing"))?;
        let spaced = settled_at
            .iter()
            .enumerate()
            .all(|(k, t)| (t - 20.0 * (k + 1) as f64).abs() < 1e-9);
        ensure(
            spaced && settled_at.len() as u64 == end / settle_ticks,
            || format!("settlements at {settled_at:?}"),
        )?;
    }
    Ok(())
}

fn mlp_correctness() -> Check {
    let mut rng = Xorshift(0x00AC_CE97);
    for i in 0..20 {
        let model = random_model(&mut rng);
        let samples: Vec<(f64, f64)> = (0..5)
            .map(|_| (rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0)))
            .collect();
        let (_, grads) = mse_gradient(&model, &samples);
        let analytic: Vec<f64> = grads
            .iter()
            .flat_map(|g| g.weights.iter().chain(&g.bias).copied())
            .collect();
        let err = relative_error(
            &analytic,
            &finite_difference_gradient(&model, &samples, 1e-5),
        );
        ensure(err < 1e-4, || {
            format!("model {i}: gradient rel. error {err}")
        })?;
    }
    for ds in bundled_datasets() {
        let report = fit_mlp(&ds, &FitParams::default()).map_err(|e| e.to_string())?;
        ensure(report.mse < 1e-3, || {
            format!("{} fit mse {}", ds.factor, report.mse)
        })?;
    }
    let models = ModelSet::bundled();
    for factor in Factor::ALL {
        let m = models.get(factor).unwrap();
        let r = *EcoConfig::default().factor_ranges.get(factor);
        for k in 0..=20 {
            let x = r.min + (r.max - r.min) * k as f64 / 20.0;
            let diff = (mlp_forward(m, x).unwrap() - oracle_forward(m, x)).abs();
            ensure(diff < 1e-9, || {
                format!("{factor:?} forward off by {diff} at {x}")
            })?;
        }
    }
    Ok(())
}

fn pathology_monotonicity() -> Check {
    let mut last = f64::INFINITY;
    for k in 0..50 {
        let edge = k as f64 / 49.0;
        let params = DiseaseMaskParams {
            edge,
            noise_scale: 4.0,
            seed: 99,
        };
        let frac = disease_mask_fraction(&params, 64).map_err(|e| e.to_string())?;
        ensure(frac <= last, || {
            format!("mask fraction rose at edge {edge}")
        })?;
        last = frac;
    }
    let cfg = PathologyConfig::default();
    let eco = EcoConfig::default();
    let range = eco.ei_range();
    let (mut req, mut delay) = (u32::MAX, f64::NEG_INFINITY);
    for k in 0..=1000 {
        let ei = range.low + (range.high - range.low) * k as f64 / 1000.0;
        let r = required_fungi(ei, range, &cfg);
        let d = respawn_delay(ei, range, &cfg);
        ensure(r <= req && d >= delay, || {
            format!("monotonicity broken at ei={ei}")
        })?;
        req = r;
        delay = d;
    }

    // infect -> cure -> respawn, driven through the engine with no seaweed tokens
    let mut engine = Engine::new(EngineConfig::default()).map_err(|e| e.to_string())?;
    let first = engine.state().pathology.respawn_timer;
    let dt = engine.config().dt;
    let ticks_to = |secs: f64| (secs / dt).round() as u64;
    ensure(!engine.state().pathology.oomycete_present, || {
        "infected at start".into()
    })?;
    let mut infected_at = None;
    for _ in 0..ticks_to(first) + 1 {
        if engine.tick().oomycete_spawned {
            infected_at = Some(engine.state().tick);
        }
    }
    ensure(infected_at == Some(ticks_to(first)), || {
        format!("infection at {infected_at:?}")
    })?;
    let p = &engine.state().pathology;
    ensure(p.swarm_health == cfg.infected_health, || {
        "infected health wrong".into()
    })?;
    ensure(
        engine
            .state()
            .swarm
            .plants
            .iter()
            .all(|pl| pl.health == cfg.infected_health),
        || "plants not marked infected".into(),
    )?;
    let needed = p.required_fungi;
    ensure(needed == required_fungi(0.0, range, &cfg), || {
        "required fungi mismatch".into()
    })?;
    let mut cured = false;
    for i in 0..needed {
        let tick = engine.state().tick;
        let out = engine
            .apply_event(&SimEvent::fungi(tick))
            .map_err(|e| e.to_string())?;
        let health = engine.state().pathology.swarm_health;
        if i + 1 < needed {
            ensure(!out.oomycete_killed, || "cured too early".into())?;
            let want = (i + 1) as f64 / needed as f64;
            ensure((health - want).abs() < 1e-12, || {
                format!("health {health} vs {want}")
            })?;
        } else {
            cured = out.oomycete_killed && health == 1.0;
        }
    }
    ensure(cured, || "final fungus did not cure".into())?;
    engine.tick();
    ensure(
        engine
            .state()
            .swarm
            .plants
            .iter()
            .all(|pl| pl.health == 1.0),
        || "cure not broadcast to plants".into(),
    )?;
    let cured_tick = engine.state().tick;
    let mut respawned = None;
    for _ in 0..ticks_to(respawn_delay(0.0, range, &cfg)) + 1 {
        if engine.tick().oomycete_spawned {
            respawned = Some(engine.state().tick);
            break;
        }
    }
    let expected = cured_tick - 1 + ticks_to(respawn_delay(0.0, range, &cfg));
    ensure(respawned == Some(expected), || {
        format!("respawn at {respawned:?}, expected {expected}")
    })
}

fn fungus_generation() -> Check {
    let cfg = FungiConfig::default();
    for species in [&cfg.penicillium, &cfg.aspergillus] {
        let mut seen = [false; 6];
        for seed in 0..10_000u64 {
            let t = generate_fungus(species, seed);
            t.validate(species).map_err(|e| e.to_string())?;
            seen[t.metulae.len()] = true;
            // stipe -> metulae -> phialides -> conidia, never skipping a level
            let levels_ok = t.metulae.iter().all(|m| {
                !m.phialides.is_empty() && m.phialides.iter().all(|p| !p.conidia.is_empty())
            });
            ensure(levels_ok, || format!("seed {seed}: empty level"))?;
            ensure(generate_fungus(species, seed) == t, || {
                format!("seed {seed} not reproducible")
            })?;
        }
        ensure(seen[2..=5].iter().all(|s| *s), || {
            format!("metula counts seen {seen:?}")
        })?;
    }
    Ok(())
}

fn run(policy: PolicyScript, capacity: usize, seconds: f64) -> Result<SimulationOutput, String> {
    let mut cfg = EngineConfig::default();
    cfg.swarm.capacity = capacity;
    cfg.swarm.initial_plants = cfg.swarm.initial_plants.min(capacity);
    simulate(&cfg, &policy, seconds, 1).map_err(|e| e.to_string())
}

fn greedy_scenario() -> Check {
    let start = Instant::now();
    // one token per second; a full cycle takes two minutes
    let out = run(PolicyScript::rate(60.0, 0.0), 20, 120.0)?;
    let rows = &out.rows;
    let crisis = rows.iter().position(|r| r.stage == Stage::Crisis);
    ensure(crisis.is_some(), || "never reached crisis".into())?;
    let extinct = rows.iter().position(|r| r.extinct);
    let extinct = extinct.ok_or("never went extinct")?;
    ensure(rows[extinct].stage == Stage::Crisis, || {
        "extinction outside crisis".into()
    })?;
    // whatever was harvested before extinction settles at the next boundary
    let settle_ticks = 200;
    let drained = (rows[extinct].tick / settle_ticks + 1) * settle_ticks;
    let after: Vec<_> = rows
        .iter()
        .filter(|r| r.tick >= drained && r.stage == Stage::Crisis)
        .collect();
    ensure(!after.is_empty(), || {
        "no crisis time left after extinction".into()
    })?;
    ensure(
        after
            .iter()
            .all(|r| r.dispensed == after[0].dispensed && r.plants == 0),
        || "dispensing continued after extinction".into(),
    )?;
    ensure(out.final_state.ledger.inserted_seaweed > 80, || {
        "too few insertions".into()
    })?;
    within(Duration::from_secs(10), start)
}

fn balanced_scenario() -> Check {
    let start = Instant::now();
    let cfg = EcoConfig::default();
    // three cycles at two seaweed tokens per minute, plus steady fungi care
    let minutes = 3.0 * cfg.cycle as f64 / 2.0;
    let out = run(PolicyScript::rate(2.0, 4.0), 60, minutes * 60.0)?;
    let mean_ei = out.rows.iter().map(|r| r.ei).sum::<f64>() / out.rows.len() as f64;
    ensure(mean_ei > 0.0, || format!("mean ei {mean_ei}"))?;
    ensure(out.final_state.ledger.dispensed > 0, || {
        "nothing dispensed".into()
    })?;
    ensure(
        out.final_state.eco.total_insertions >= 3 * cfg.cycle as u64,
        || "fewer than three cycles".into(),
    )?;
    within(Duration::from_secs(10), start)
}

fn fungi_only_scenario() -> Check {
    let start = Instant::now();
    let out = run(PolicyScript::rate(0.0, 30.0), 60, 600.0)?;
    ensure(out.final_state.ledger.inserted_fungi > 0, || {
        "no fungi inserted".into()
    })?;
    ensure(
        out.rows
            .iter()
            .all(|r| r.ei == 0.0 && r.stage == Stage::Prosperity),
        || "EI moved".into(),
    )?;
    ensure(out.final_state.eco.total_insertions == 0, || {
        "insertion counter moved".into()
    })?;
    within(Duration::from_secs(10), start)
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 9] = [
        ("1 EI curve suite", ei_curve_suite),
        ("2 determinism", determinism),
        ("3 economy conservation", economy_conservation),
        ("4 MLP correctness", mlp_correctness),
        ("5 pathology monotonicity", pathology_monotonicity),
        ("6 fungus generation", fungus_generation),
        ("7a greedy harvest", greedy_scenario),
        ("7b balanced care", balanced_scenario),
        ("7c fungi only", fungi_only_scenario),
    ];
    let mut failed = Vec::new();
    for (name, check) in criteria {
        match check() {
            Ok(()) => println!("PASS {name}"),
            Err(why) => {
                println!("FAIL {name}: {why}");
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
