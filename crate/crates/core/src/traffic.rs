//! Device activation and pending packets.
//!
//! Devices first wake up in a Beta-shaped burst spread over the activation
//! slots; afterwards each idle device reactivates independently with a fixed
//! per-cycle probability. A device holds at most one pending packet.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::function::beta::beta;

use crate::config::ScenarioConfig;
use crate::error::{Error, Result};
use crate::population::MtdProfile;
use crate::rng::Stream;

/// Beta activation density over `[0, t_a]`.
pub fn beta_activation_pdf(t: f64, t_a: f64, alpha: f64, beta_shape: f64) -> Result<f64> {
    if !(alpha > 0.0 && beta_shape > 0.0) {
        return Err(Error::Domain(format!("shape parameters ({alpha}, {beta_shape})")));
    }
    if !(t_a > 0.0 && (0.0..=t_a).contains(&t)) {
        return Err(Error::Domain(format!("t = {t} with T_A = {t_a}")));
    }
    let numer = t.powf(alpha - 1.0) * (t_a - t).powf(beta_shape - 1.0);
    Ok(numer / (t_a.powf(alpha + beta_shape - 1.0) * beta(alpha, beta_shape)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Packet {
    pub owner_id: usize,
    pub created_cycle: u64,
    pub value_of_info: f64,
    pub deadline_cycle: u64,
}

impl Packet {
    pub fn access_delay(&self, cycle: u64) -> u64 {
        cycle - self.created_cycle
    }

    pub fn expired(&self, cycle: u64) -> bool {
        cycle > self.deadline_cycle
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ActivationSchedule {
    pub slot_probabilities: Vec<f64>,
    /// Activation slot of each device.
    pub assignment: Vec<usize>,
}

/// Discretize the Beta activation density over `activation_slots` unit-width
/// slots (density at slot midpoints, renormalized) and assign every device
/// its first-activation slot.
pub fn build_activation_schedule(cfg: &ScenarioConfig, stream: &mut Stream) -> Result<ActivationSchedule> {
    let slots = cfg.activation_slots;
    if slots == 0 {
        return Err(Error::Domain("zero activation slots".into()));
    }
    let t_a = slots as f64;
    let raw = (0..slots)
        .map(|i| beta_activation_pdf(i as f64 + 0.5, t_a, cfg.beta_alpha, cfg.beta_beta))
        .collect::<Result<Vec<_>>>()?;
    let total: f64 = raw.iter().sum();
    let slot_probabilities: Vec<f64> = raw.iter().map(|p| p / total).collect();
    let picker = WeightedIndex::new(&slot_probabilities)
        .map_err(|e| Error::Domain(format!("activation weights: {e}")))?;
    let assignment = (0..cfg.n_devices).map(|_| picker.sample(stream)).collect();
    Ok(ActivationSchedule {
        slot_probabilities,
        assignment,
    })
}

/// Per-cycle exogenous traffic randomness, drawn for every device whether or
/// not it is idle so that every system variant consumes the same stream.
#[derive(Debug, Clone)]
pub struct TrafficDraws {
    pub reactivation: Vec<f64>,
    pub value_of_info: Vec<f64>,
}

impl TrafficDraws {
    pub fn sample(n_devices: usize, stream: &mut Stream) -> Self {
        let mut reactivation = Vec::with_capacity(n_devices);
        let mut value_of_info = Vec::with_capacity(n_devices);
        for _ in 0..n_devices {
            reactivation.push(stream.random::<f64>());
            value_of_info.push(stream.random::<f64>());
        }
        Self {
            reactivation,
            value_of_info,
        }
    }
}

/// Pending packets of one system variant.
#[derive(Debug, Clone)]
pub struct TrafficState {
    pending: Vec<Option<Packet>>,
    max_delay: Vec<u64>,
    slot: Vec<usize>,
    burst_cycles: u64,
    reactivation_prob: f64,
}

impl TrafficState {
    pub fn new(population: &[MtdProfile], schedule: &ActivationSchedule, cfg: &ScenarioConfig) -> Self {
        Self {
            pending: vec![None; population.len()],
            max_delay: population.iter().map(|p| p.max_delay_cycles).collect(),
            slot: schedule.assignment.clone(),
            burst_cycles: cfg.activation_slots as u64,
            reactivation_prob: cfg.reactivation_prob,
        }
    }

    pub fn n_devices(&self) -> usize {
        self.pending.len()
    }

    pub fn is_active(&self, device: usize) -> bool {
        self.pending[device].is_some()
    }

    pub fn packet(&self, device: usize) -> Option<&Packet> {
        self.pending[device].as_ref()
    }

    pub fn active_mask(&self) -> Vec<bool> {
        self.pending.iter().map(Option::is_some).collect()
    }

    pub fn active_ids(&self) -> Vec<usize> {
        (0..self.pending.len()).filter(|&i| self.is_active(i)).collect()
    }

    pub fn active_count(&self) -> usize {
        self.pending.iter().filter(|p| p.is_some()).count()
    }

    /// Remove packets whose access delay would exceed the device budget.
    pub fn drop_expired(&mut self, cycle: u64) -> Vec<usize> {
        let mut dropped = Vec::new();
        for (id, slot) in self.pending.iter_mut().enumerate() {
            if slot.as_ref().is_some_and(|p| p.expired(cycle)) {
                *slot = None;
                dropped.push(id);
            }
        }
        dropped
    }

    /// Activate devices for this cycle; returns the newly active ids.
    pub fn step(&mut self, cycle: u64, draws: &TrafficDraws) -> Vec<usize> {
        let mut activated = Vec::new();
        for id in 0..self.pending.len() {
            if self.pending[id].is_some() {
                continue;
            }
            let wakes = if cycle < self.burst_cycles {
                self.slot[id] as u64 == cycle
            } else {
                draws.reactivation[id] < self.reactivation_prob
            };
            if wakes {
                self.pending[id] = Some(Packet {
                    owner_id: id,
                    created_cycle: cycle,
                    value_of_info: draws.value_of_info[id],
                    deadline_cycle: cycle + self.max_delay[id],
                });
                activated.push(id);
            }
        }
        activated
    }

    /// Access delay of the device's pending packet at `cycle`.
    pub fn access_delay(&self, device: usize, cycle: u64) -> Result<u64> {
        match &self.pending[device] {
            Some(p) if !p.expired(cycle) => Ok(p.access_delay(cycle)),
            Some(p) => Err(Error::PacketDropped {
                device,
                dropped_at: p.deadline_cycle + 1,
            }),
            None => Err(Error::Domain(format!("device {device} has no pending packet"))),
        }
    }

    /// Clear the packet of a device that transmitted this cycle.
    pub fn serve(&mut self, device: usize) -> Option<Packet> {
        self.pending[device].take()
    }
}

/// Draw this cycle's traffic randomness and apply it.
pub fn step_traffic(cycle: u64, state: &mut TrafficState, stream: &mut Stream) -> Vec<usize> {
    let draws = TrafficDraws::sample(state.n_devices(), stream);
    state.step(cycle, &draws)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::population::build_population;
    use crate::rng::derive_stream;
    use approx::assert_abs_diff_eq;

    #[test]
    fn pdf_vanishes_at_endpoints() {
        assert_eq!(beta_activation_pdf(0.0, 10.0, 3.0, 4.0).unwrap(), 0.0);
        assert_eq!(beta_activation_pdf(10.0, 10.0, 3.0, 4.0).unwrap(), 0.0);
    }

    #[test]
    fn pdf_midpoint_value() {
        // B(3,4) = 1/60; 5^2 * 5^3 / (10^6 / 60)
        assert_abs_diff_eq!(beta_activation_pdf(5.0, 10.0, 3.0, 4.0).unwrap(), 0.1875, epsilon = 1e-12);
    }

    #[test]
    fn pdf_integrates_to_one() {
        // composite Simpson, independent of the Beta-function normalization path
        let n = 2000;
        let h = 10.0 / n as f64;
        let mut s = 0.0;
        for i in 0..=n {
            let w = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            s += w * beta_activation_pdf(i as f64 * h, 10.0, 3.0, 4.0).unwrap();
        }
        assert_abs_diff_eq!(s * h / 3.0, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn pdf_domain_errors() {
        assert!(beta_activation_pdf(-0.1, 10.0, 3.0, 4.0).is_err());
        assert!(beta_activation_pdf(10.5, 10.0, 3.0, 4.0).is_err());
        assert!(beta_activation_pdf(1.0, 10.0, 0.0, 4.0).is_err());
    }

    #[test]
    fn schedule_mode_and_normalization() {
        let cfg = ScenarioConfig::default();
        let s = build_activation_schedule(&cfg, &mut derive_stream(1, "a")).unwrap();
        assert_eq!(s.slot_probabilities.len(), 10);
        assert_abs_diff_eq!(s.slot_probabilities.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
        let argmax = s
            .slot_probabilities
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap()
            .0;
        // Beta(3,4) peaks at 0.4 of the activation window
        assert_eq!(argmax, 4);
        assert!(s.assignment.iter().all(|&a| a < 10));
    }

    #[test]
    fn single_slot_schedule() {
        let cfg = ScenarioConfig {
            activation_slots: 1,
            ..Default::default()
        };
        let s = build_activation_schedule(&cfg, &mut derive_stream(1, "a")).unwrap();
        assert_eq!(s.slot_probabilities, vec![1.0]);
        assert!(s.assignment.iter().all(|&a| a == 0));
    }

    fn small_state(cfg: &ScenarioConfig) -> TrafficState {
        let pop = build_population(cfg).unwrap();
        let s = build_activation_schedule(cfg, &mut derive_stream(cfg.rng_seed, "a")).unwrap();
        TrafficState::new(&pop, &s, cfg)
    }

    #[test]
    fn burst_activates_everyone_once() {
        let cfg = ScenarioConfig {
            reactivation_prob: 0.0,
            ..Default::default()
        };
        let mut st = small_state(&cfg);
        let mut stream = derive_stream(3, "t");
        let mut total = 0;
        for c in 0..10 {
            total += step_traffic(c, &mut st, &mut stream).len();
        }
        assert_eq!(total, 500);
        // with no reactivation nothing else ever wakes once everyone is idle again
        for id in 0..500 {
            st.serve(id);
        }
        for c in 10..50 {
            assert!(step_traffic(c, &mut st, &mut stream).is_empty());
        }
    }

    #[test]
    fn full_reactivation_wakes_all_idle() {
        let cfg = ScenarioConfig {
            reactivation_prob: 1.0,
            ..Default::default()
        };
        let mut st = small_state(&cfg);
        let mut stream = derive_stream(3, "t");
        let woke = step_traffic(10, &mut st, &mut stream);
        assert_eq!(woke.len(), 500);
        // already-active devices are untouched
        assert!(step_traffic(11, &mut st, &mut stream).is_empty());
    }

    #[test]
    fn deadline_drop_rule() {
        let cfg = ScenarioConfig {
            reactivation_prob: 0.0,
            ..Default::default()
        };
        let mut st = small_state(&cfg);
        st.max_delay[0] = 1;
        st.pending[0] = Some(Packet {
            owner_id: 0,
            created_cycle: 7,
            value_of_info: 0.5,
            deadline_cycle: 8,
        });
        assert!(st.drop_expired(8).is_empty());
        assert_eq!(st.access_delay(0, 8).unwrap(), 1);
        assert_eq!(st.drop_expired(9), vec![0]);
        assert!(!st.is_active(0));
    }

    #[test]
    fn access_delay_examples() {
        let p = Packet {
            owner_id: 0,
            created_cycle: 10,
            value_of_info: 0.1,
            deadline_cycle: 13,
        };
        assert_eq!(p.access_delay(10), 0);
        assert_eq!(p.access_delay(13), 3);
        let cfg = ScenarioConfig::default();
        let mut st = small_state(&cfg);
        st.pending[0] = Some(p);
        assert_eq!(st.access_delay(0, 10).unwrap(), 0);
        assert!(matches!(st.access_delay(0, 14), Err(Error::PacketDropped { .. })));
        assert!(st.access_delay(1, 14).is_err());
    }

    #[test]
    fn burst_histogram_matches_slot_probabilities() {
        // chi-square goodness of fit over pooled seeds
        let cfg = ScenarioConfig::default();
        let mut counts = [0usize; 10];
        let mut probs = vec![];
        for seed in 0..20 {
            let s = build_activation_schedule(&cfg, &mut derive_stream(seed, "activation")).unwrap();
            for &a in &s.assignment {
                counts[a] += 1;
            }
            probs = s.slot_probabilities;
        }
        let n: usize = counts.iter().sum();
        let chi2: f64 = counts
            .iter()
            .zip(&probs)
            .map(|(&o, &p)| {
                let e = p * n as f64;
                (o as f64 - e).powi(2) / e
            })
            .sum();
        // 9 degrees of freedom, 0.999 quantile ~ 27.88
        assert!(chi2 < 27.88, "chi2 = {chi2}");
    }
}
