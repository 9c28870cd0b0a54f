//! Sleeping-bandit fast-grant scheduler.
//!
//! Arms are devices; only predicted-active devices are available in a cycle.
//! Each available arm is scored with an upper-confidence index scaled by its
//! predicted activity probability, and the top `M` arms receive the grants.

use std::io::{Read, Write};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::pairing::PairingOutcome;
use crate::predictor::PredictionSnapshot;
use crate::rng::Stream;

/// `P_a (z/n + sqrt(8 ln t' / n))`, or `+inf` for a device that has never
/// earned a reward. `ln t'` is floored at `ln 2`.
pub fn ucb_index(z: f64, n: u64, p_active: f64, t_prime: f64) -> f64 {
    if n == 0 {
        return f64::INFINITY;
    }
    let n = n as f64;
    let log_t = t_prime.max(2.0).ln();
    p_active * (z / n + (8.0 * log_t / n).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArmRecord {
    pub device: usize,
    pub z: f64,
    pub n: u64,
    pub predicted_count: u64,
}

/// Learning memory for every device.
#[derive(Debug, Clone, PartialEq)]
pub struct BanditState {
    /// Cumulative credited reward.
    pub z: Vec<f64>,
    /// Number of cycles the device earned a nonzero individual reward.
    pub n: Vec<u64>,
    /// Number of cycles the device was predicted active.
    pub predicted_count: Vec<u64>,
    /// Number of cycles the device was truly active; only maintained when
    /// the engine runs the true-count comparison.
    pub true_active_count: Vec<u64>,
    pub ever_selected: Vec<bool>,
    use_true_count: bool,
}

impl BanditState {
    pub fn new(n_devices: usize) -> Self {
        Self {
            z: vec![0.0; n_devices],
            n: vec![0; n_devices],
            predicted_count: vec![0; n_devices],
            true_active_count: vec![0; n_devices],
            ever_selected: vec![false; n_devices],
            use_true_count: false,
        }
    }

    /// Use the true activity count in place of the predicted count.
    pub fn with_true_count(mut self) -> Self {
        self.use_true_count = true;
        self
    }

    pub fn uses_true_count(&self) -> bool {
        self.use_true_count
    }

    fn t_prime(&self, device: usize) -> f64 {
        if self.use_true_count {
            self.true_active_count[device] as f64
        } else {
            self.predicted_count[device] as f64
        }
    }

    pub fn index(&self, device: usize, p_active: f64) -> f64 {
        ucb_index(self.z[device], self.n[device], p_active, self.t_prime(device))
    }

    /// Fold one cycle's transmissions into the learning state. A CH is
    /// credited its own reward plus a `rho` share of its partner's; the
    /// partner keeps the remaining share. Play counts only move for devices
    /// whose own reward was nonzero.
    pub fn update_after_cycle(&mut self, snapshot: &PredictionSnapshot, outcomes: &[PairingOutcome], rho: f64) {
        for o in outcomes {
            let c = o.ch_id;
            self.ever_selected[c] = true;
            self.z[c] += o.theta_ch;
            if o.theta_ch > 0.0 {
                self.n[c] += 1;
            }
            if let Some(nc) = o.nch_id {
                self.z[c] += rho * o.theta_nch;
                self.z[nc] += (1.0 - rho) * o.theta_nch;
                if o.theta_nch > 0.0 {
                    self.n[nc] += 1;
                }
            }
        }
        for id in snapshot.predicted_ids() {
            self.predicted_count[id] += 1;
        }
    }

    pub fn record_true_activity(&mut self, active: &[usize]) {
        for &id in active {
            self.true_active_count[id] += 1;
        }
    }

    pub fn records(&self) -> Vec<ArmRecord> {
        (0..self.z.len())
            .map(|device| ArmRecord {
                device,
                z: self.z[device],
                n: self.n[device],
                predicted_count: self.predicted_count[device],
            })
            .collect()
    }

    /// Dump `(device, z, n, predicted_count)` as CSV.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for r in self.records() {
            w.serialize(r)?;
        }
        w.flush().map_err(|e| crate::error::Error::io("<bandit csv>", e))?;
        Ok(())
    }

    /// Restore a state from a CSV dump. Selection flags are rebuilt from
    /// the play counts.
    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut rows: Vec<ArmRecord> = csv::Reader::from_reader(input)
            .deserialize()
            .collect::<std::result::Result<_, _>>()?;
        rows.sort_by_key(|r| r.device);
        let mut state = BanditState::new(rows.len());
        for (i, r) in rows.iter().enumerate() {
            state.z[i] = r.z;
            state.n[i] = r.n;
            state.predicted_count[i] = r.predicted_count;
            state.ever_selected[i] = r.n > 0;
        }
        Ok(state)
    }
}

/// Pick up to `m` cluster heads among the predicted-active devices, highest
/// index first. Equal indices (including the `+inf` of unexplored devices)
/// are ordered uniformly at random.
pub fn select_cluster_heads(
    snapshot: &PredictionSnapshot,
    state: &BanditState,
    m: usize,
    stream: &mut Stream,
) -> Vec<usize> {
    let mut scored: Vec<(f64, u64, usize)> = snapshot
        .candidates
        .iter()
        .map(|c| (state.index(c.id, c.p_active), stream.random::<u64>(), c.id))
        .collect();
    let by_rank = |a: &(f64, u64, usize), b: &(f64, u64, usize)| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1));
    if scored.len() > m && m > 0 {
        scored.select_nth_unstable_by(m - 1, by_rank);
    }
    scored.truncate(m);
    scored.sort_unstable_by(by_rank);
    scored.into_iter().map(|(_, _, id)| id).collect()
}
