mod common;

use std::collections::HashSet;

use fastgrant::engine::replication_config;
use fastgrant::{ScenarioConfig, Simulation, VariantKind};

const OMA: VariantKind = VariantKind::OmaMab;
const NOMA: VariantKind = VariantKind::NomaMab { mode_switch: false };
const NOMA_MS: VariantKind = VariantKind::NomaMab { mode_switch: true };

fn all_kinds() -> Vec<VariantKind> {
    vec![OMA, NOMA, NOMA_MS, VariantKind::QuasiOptBest, VariantKind::QuasiOptMab]
}

#[test]
fn per_cycle_capacity_and_sign_invariants() {
    let cfg = common::small_config(4);
    let mut sim = Simulation::new(&cfg, &all_kinds()).unwrap();
    for _ in 0..cfg.n_cycles {
        let log = sim.run_cycle();
        assert!((0.0..=1.0).contains(&log.realized_error));
        for v in &log.variants {
            assert!(v.wasted_rbs <= cfg.n_rbs, "{:?}", v.kind);
            assert!(v.reward_sum >= 0.0);
            let cap = if v.kind.pairs() { 2 * cfg.n_rbs } else { cfg.n_rbs };
            assert!(v.served_ids.len() <= cap);
            let unique: HashSet<_> = v.served_ids.iter().collect();
            assert_eq!(unique.len(), v.served_ids.len(), "device served twice");
            if matches!(v.kind, VariantKind::BestOma | VariantKind::QuasiOptBest) {
                assert_eq!(v.wasted_rbs, 0, "oracles only grant active devices");
            }
        }
    }
}

#[test]
fn regret_is_reward_gap_to_best_oma() {
    let cfg = common::small_config(9);
    let runs = Simulation::new(&cfg, &all_kinds()).unwrap().run();
    let best = runs.iter().find(|r| r.kind == VariantKind::BestOma).unwrap();
    assert!(best.regret.iter().all(|&r| r == 0.0));
    for r in &runs {
        for t in 0..cfg.n_cycles {
            assert_eq!(r.regret[t], best.reward[t] - r.reward[t]);
        }
        let total: f64 = r.regret.iter().sum();
        assert!((total - (best.total_reward() - r.total_reward())).abs() < 1e-6);
    }
}

#[test]
fn histogram_sums_to_grants() {
    let cfg = common::small_config(2);
    for r in Simulation::new(&cfg, &all_kinds()).unwrap().run() {
        assert_eq!(r.histogram.iter().sum::<u64>(), r.grants, "{:?}", r.kind);
        let rb_grants = (cfg.n_rbs * cfg.n_cycles) as u64;
        assert!(r.grants <= if r.kind.pairs() { 2 * rb_grants } else { rb_grants });
        assert!(r.transmissions <= r.grants);
    }
}

#[test]
fn mode_switch_never_adds_waste_or_loses_reward() {
    for seed in 0..3 {
        let cfg = common::small_config(seed);
        let runs = Simulation::new(&cfg, &[NOMA_MS]).unwrap().run();
        let ms = runs.iter().find(|r| r.kind == NOMA_MS).unwrap();
        assert_eq!(ms.shadow_wasted.len(), cfg.n_cycles);
        for t in 0..cfg.n_cycles {
            assert!(ms.wasted[t] <= ms.shadow_wasted[t], "seed {seed} cycle {t}");
            assert!(ms.reward[t] >= ms.shadow_reward[t], "seed {seed} cycle {t}");
        }
    }
}

#[test]
fn perfect_prediction_wastes_nothing() {
    let cfg = ScenarioConfig {
        pred_err_mean: 0.0,
        pred_err_std: 0.0,
        ..common::small_config(5)
    };
    for r in Simulation::new(&cfg, &[OMA, NOMA]).unwrap().run() {
        assert_eq!(r.total_wasted(), 0, "{:?}", r.kind);
    }
}

#[test]
fn drained_network_goes_quiet() {
    // no reactivation: once the burst is served or dropped nobody is active
    let cfg = ScenarioConfig {
        n_devices: 20,
        n_rbs: 5,
        n_cycles: 400,
        reactivation_prob: 0.0,
        pred_err_mean: 0.0,
        pred_err_std: 0.0,
        ..ScenarioConfig::default()
    };
    let runs = Simulation::new(&cfg, &[OMA, NOMA]).unwrap().run();
    for r in &runs {
        assert_eq!(r.total_wasted(), 0);
        assert!(r.reward[350..].iter().all(|&x| x == 0.0), "{:?}", r.kind);
        assert!(r.transmissions <= 20);
    }
}

#[test]
fn noma_serves_more_than_oma() {
    let cfg = ScenarioConfig {
        n_cycles: 1_000,
        ..common::small_config(8)
    };
    let runs = Simulation::new(&cfg, &[OMA, NOMA]).unwrap().run();
    let get = |k| runs.iter().find(|r| r.kind == k).unwrap();
    assert!(get(NOMA).transmissions > get(OMA).transmissions);
}

#[test]
fn replays_are_identical_and_seeds_matter() {
    let cfg = common::small_config(12);
    let a = Simulation::new(&cfg, &all_kinds()).unwrap().run();
    let b = Simulation::new(&cfg, &all_kinds()).unwrap().run();
    assert_eq!(a, b);
    let c = Simulation::new(&replication_config(&cfg, 1), &all_kinds()).unwrap().run();
    assert_ne!(a, c);
}

#[test]
fn variant_results_do_not_depend_on_companions() {
    let cfg = common::small_config(6);
    let alone = Simulation::new(&cfg, &[NOMA]).unwrap().run();
    let crowd = Simulation::new(&cfg, &all_kinds()).unwrap().run();
    let pick = |runs: &[fastgrant::metrics::VariantRun]| runs.iter().find(|r| r.kind == NOMA).unwrap().clone();
    assert_eq!(pick(&alone), pick(&crowd));
}

#[test]
fn invalid_config_is_rejected_up_front() {
    let cfg = ScenarioConfig {
        delta_weights: [0.2, 0.3, 0.4],
        ..ScenarioConfig::default()
    };
    assert!(Simulation::new(&cfg, &[OMA]).is_err());
}
