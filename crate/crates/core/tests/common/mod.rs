//! Helpers shared by the integration test binaries.

#![allow(dead_code)]

use fastgrant::matching::MatchingInstance;
use fastgrant::ScenarioConfig;
use rand::Rng;

/// Random pairing instance with weights on the 1/64 grid, so that every
/// partial sum is exact in f64 and solvers can be compared with `==`.
pub fn dyadic_instance(rng: &mut impl Rng, max_chs: usize, max_nchs: usize) -> MatchingInstance {
    let rows = rng.random_range(1..=max_chs);
    let cols = rng.random_range(0..=max_nchs);
    let weights = (0..rows)
        .map(|_| (0..cols).map(|_| f64::from(rng.random_range(0u32..=64)) / 64.0).collect())
        .collect();
    let eligibility = (0..rows)
        .map(|_| (0..cols).map(|_| rng.random_bool(0.7)).collect())
        .collect();
    MatchingInstance::new((0..rows).collect(), (100..100 + cols).collect(), weights, eligibility)
}

/// A scenario small enough for many-cycle property tests.
pub fn small_config(seed: u64) -> ScenarioConfig {
    ScenarioConfig {
        n_devices: 80,
        n_rbs: 4,
        n_cycles: 600,
        rng_seed: seed,
        ..ScenarioConfig::default()
    }
}

use fastgrant::bandit::{select_cluster_heads, BanditState};
use fastgrant::pairing::{PairingMode, PairingOutcome};
use fastgrant::predictor::{apply_prediction, Candidate, PredictionDraws, PredictionSnapshot};
use fastgrant::rng::derive_stream;

/// Outcome of an unpaired RB whose CH earned `theta`.
pub fn solo_outcome(ch_id: usize, theta: f64) -> PairingOutcome {
    PairingOutcome {
        rb_index: 0,
        ch_id,
        ch_was_active: theta > 0.0,
        nch_id: None,
        mode_used: PairingMode::ChWeak,
        mode_switched: false,
        r_ch: 0.0,
        r_nch: 0.0,
        theta_ch: theta,
        theta_nch: 0.0,
        wasted: theta == 0.0,
    }
}

pub fn snapshot_of(ids: &[usize], p_active: f64) -> PredictionSnapshot {
    PredictionSnapshot {
        cycle: 0,
        candidates: ids.iter().map(|&id| Candidate { id, p_active }).collect(),
        realized_error: 0.0,
    }
}

/// Drive the scheduler for `cycles` cycles on random activity with a noisy
/// predictor and random rewards; count selections outside the predicted set.
pub fn selections_outside_prediction(cycles: u64, seed: u64) -> usize {
    let cfg = ScenarioConfig {
        n_devices: 200,
        pred_err_mean: 0.1,
        ..ScenarioConfig::default()
    };
    let mut world = derive_stream(seed, "scan/world");
    let mut tie = derive_stream(seed, "scan/tie");
    let mut bandit = BanditState::new(cfg.n_devices);
    let mut violations = 0;
    for cycle in 0..cycles {
        let mask: Vec<bool> = (0..cfg.n_devices).map(|_| world.random_bool(0.3)).collect();
        let draws = PredictionDraws::sample(&cfg, &mut world);
        let prediction = apply_prediction(cycle, &mask, &draws);
        let predicted: Vec<usize> = prediction.snapshot.predicted_ids().collect();
        let chs = select_cluster_heads(&prediction.snapshot, &bandit, cfg.n_rbs, &mut tie);
        violations += chs.iter().filter(|c| !predicted.contains(c)).count();
        let outcomes: Vec<_> = chs
            .iter()
            .map(|&c| solo_outcome(c, if mask[c] { world.random::<f64>() } else { 0.0 }))
            .collect();
        bandit.update_after_cycle(&prediction.snapshot, &outcomes, cfg.reward_share_rho);
    }
    violations
}

/// Share of `trials` in which each of four equally ranked devices wins a
/// single RB.
pub fn four_way_tie_shares(trials: usize, seed: u64) -> [f64; 4] {
    let bandit = BanditState::new(4);
    let snap = snapshot_of(&[0, 1, 2, 3], 0.9);
    let mut tie = derive_stream(seed, "scan/four-way");
    let mut wins = [0usize; 4];
    for _ in 0..trials {
        wins[select_cluster_heads(&snap, &bandit, 1, &mut tie)[0]] += 1;
    }
    wins.map(|w| w as f64 / trials as f64)
}
