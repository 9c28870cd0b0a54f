//! Traffic-predictor emulation.
//!
//! The base station does not observe which devices hold packets. It sees a
//! predicted active set: the true set with a per-cycle fraction of device
//! statuses flipped, each predicted device tagged with an activity
//! probability.

use rand::seq::index;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::config::ScenarioConfig;
use crate::rng::Stream;

const MAX_REJECTIONS: usize = 100;

/// Draw from `N(mean, std^2)` truncated to `[0, 1]` by rejection, clamping
/// after `MAX_REJECTIONS` failed attempts.
pub fn truncated_error_rate(mean: f64, std: f64, stream: &mut Stream) -> f64 {
    let mut x = mean;
    for _ in 0..MAX_REJECTIONS {
        x = mean + std * stream.sample::<f64, _>(StandardNormal);
        if (0.0..=1.0).contains(&x) {
            return x;
        }
    }
    x.clamp(0.0, 1.0)
}

/// Predictor randomness for one cycle, shared across system variants.
#[derive(Debug, Clone)]
pub struct PredictionDraws {
    pub error_rate: f64,
    /// Devices whose status is flipped, `round(error_rate * N)` of them.
    pub flips: Vec<usize>,
    /// Activity probability offered for each device should it be predicted.
    pub p_active: Vec<f64>,
}

impl PredictionDraws {
    pub fn sample(cfg: &ScenarioConfig, stream: &mut Stream) -> Self {
        let n = cfg.n_devices;
        let error_rate = truncated_error_rate(cfg.pred_err_mean, cfg.pred_err_std, stream);
        let k = ((error_rate * n as f64).round() as usize).min(n);
        let mut flips = index::sample(stream, n, k).into_vec();
        flips.sort_unstable();
        let [lo, hi] = cfg.p_active_range;
        let p_active = (0..n).map(|_| lo + (hi - lo) * stream.random::<f64>()).collect();
        Self {
            error_rate,
            flips,
            p_active,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub id: usize,
    pub p_active: f64,
}

/// What the scheduler is allowed to see.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionSnapshot {
    pub cycle: u64,
    /// Predicted-active devices in increasing id order, with their P_a.
    pub candidates: Vec<Candidate>,
    pub realized_error: f64,
}

impl PredictionSnapshot {
    pub fn predicted_ids(&self) -> impl Iterator<Item = usize> + '_ {
        self.candidates.iter().map(|c| c.id)
    }
}

/// A snapshot plus the ground truth it was derived from. Only the
/// simulation engine and metrics hold this; schedulers get the snapshot.
#[derive(Debug, Clone)]
pub struct Prediction {
    pub snapshot: PredictionSnapshot,
    pub true_active: Vec<usize>,
}

/// Distort the true activity mask with this cycle's draws.
pub fn apply_prediction(cycle: u64, true_active: &[bool], draws: &PredictionDraws) -> Prediction {
    let mut predicted = true_active.to_vec();
    for &f in &draws.flips {
        predicted[f] = !predicted[f];
    }
    let candidates = predicted
        .iter()
        .enumerate()
        .filter(|(_, &p)| p)
        .map(|(id, _)| Candidate {
            id,
            p_active: draws.p_active[id],
        })
        .collect();
    Prediction {
        snapshot: PredictionSnapshot {
            cycle,
            candidates,
            realized_error: draws.error_rate,
        },
        true_active: true_active
            .iter()
            .enumerate()
            .filter(|(_, &a)| a)
            .map(|(i, _)| i)
            .collect(),
    }
}

pub fn predict(cycle: u64, true_active: &[bool], cfg: &ScenarioConfig, stream: &mut Stream) -> Prediction {
    let draws = PredictionDraws::sample(cfg, stream);
    apply_prediction(cycle, true_active, &draws)
}
