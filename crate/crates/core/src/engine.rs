//! The per-cycle simulation loop.
//!
//! All variants share one exogenous trajectory: the same population, the
//! same activation, reactivation, value-of-information, channel, and
//! predictor draws. Each variant keeps its own pending packets, learning
//! state, and scheduler-internal randomness (tie-breaks, pair selection).
//! Cycle order: drops, traffic, channel, prediction, scheduling, pairing,
//! rewards, learning.

use crate::bandit::{select_cluster_heads, BanditState};
use crate::baselines::{best_oma, quasi_optimal_pairing};
use crate::channel::{oma_rate, ChannelModel, ChannelRealization};
use crate::config::{ActiveCountSource, ScenarioConfig};
use crate::error::Result;
use crate::metrics::{CycleLog, ShadowCycle, VariantCycle, VariantKind, VariantRun};
use crate::pairing::{run_pairing, settle, Grant, LinkParams, PairingMode, PairingOutcome, PairingPolicy};
use crate::population::{build_population, MtdProfile, Point};
use crate::predictor::{apply_prediction, Prediction, PredictionDraws};
use crate::reward::{QosSample, RewardParams};
use crate::rng::{derive_stream, labels, replication_seed, Stream};
use crate::traffic::{build_activation_schedule, TrafficDraws, TrafficState};

/// Exogenous randomness of one cycle.
#[derive(Debug, Clone)]
pub struct CycleDraws {
    pub traffic: TrafficDraws,
    pub channel: ChannelRealization,
    pub prediction: PredictionDraws,
}

struct Shared<'a> {
    cfg: &'a ScenarioConfig,
    params: &'a RewardParams,
    link: &'a LinkParams,
    population: &'a [MtdProfile],
    positions: &'a [Point],
}

struct VariantSim {
    kind: VariantKind,
    traffic: TrafficState,
    bandit: Option<BanditState>,
    tie_stream: Stream,
    pairing_stream: Stream,
    run: VariantRun,
}

/// Everything a variant decided in one cycle, before bookkeeping.
struct Decision {
    outcomes: Vec<PairingOutcome>,
    shadow: Option<ShadowCycle>,
}

impl VariantSim {
    fn reward_of(&self, sh: &Shared<'_>, cycle: u64, device: usize, rate: f64) -> f64 {
        let Some(packet) = self.traffic.packet(device) else {
            return 0.0;
        };
        let profile = &sh.population[device];
        sh.params.reward(&QosSample {
            value_of_info: packet.value_of_info,
            rate_bps: rate,
            max_delay: profile.max_delay_cycles,
            access_delay: packet.access_delay(cycle),
            min_rate_bps: profile.min_rate_bps,
        })
    }

    fn grants(&self, chs: &[usize]) -> Vec<Grant> {
        chs.iter()
            .map(|&ch_id| Grant {
                ch_id,
                ch_active: self.traffic.is_active(ch_id),
            })
            .collect()
    }

    fn nchs(&self, prediction: &Prediction, chs: &[usize]) -> Vec<usize> {
        prediction
            .true_active
            .iter()
            .copied()
            .filter(|d| !chs.contains(d))
            .collect()
    }

    fn oracle_chs(&self, sh: &Shared<'_>, cycle: u64, prediction: &Prediction, gamma: &[f64]) -> Vec<usize> {
        let rewards: Vec<(usize, f64)> = prediction
            .true_active
            .iter()
            .map(|&d| {
                let r = oma_rate(sh.link.bandwidth_hz, sh.link.p_t, gamma[d]);
                (d, self.reward_of(sh, cycle, d, r))
            })
            .collect();
        best_oma(&rewards, sh.cfg.n_rbs)
    }

    fn oma_outcomes(&self, sh: &Shared<'_>, cycle: u64, chs: &[usize], gamma: &[f64]) -> Vec<PairingOutcome> {
        let reward = |d: usize, r: f64| self.reward_of(sh, cycle, d, r);
        self.grants(chs)
            .into_iter()
            .enumerate()
            .map(|(rb, g)| settle(sh.link, rb, g, None, PairingMode::ChWeak, false, gamma, &reward))
            .collect()
    }

    fn decide(&mut self, sh: &Shared<'_>, cycle: u64, prediction: &Prediction, gamma: &[f64]) -> Decision {
        let m = sh.cfg.n_rbs;
        let chs = match self.kind {
            VariantKind::BestOma | VariantKind::QuasiOptBest => self.oracle_chs(sh, cycle, prediction, gamma),
            _ => {
                let bandit = self.bandit.as_ref().expect("bandit variant has learning state");
                select_cluster_heads(&prediction.snapshot, bandit, m, &mut self.tie_stream)
            }
        };
        let reward = |d: usize, r: f64| self.reward_of(sh, cycle, d, r);
        match self.kind {
            VariantKind::OmaMab | VariantKind::BestOma => Decision {
                outcomes: self.oma_outcomes(sh, cycle, &chs, gamma),
                shadow: None,
            },
            VariantKind::QuasiOptBest | VariantKind::QuasiOptMab => Decision {
                outcomes: quasi_optimal_pairing(&self.grants(&chs), &self.nchs(prediction, &chs), gamma, sh.link, reward),
                shadow: None,
            },
            VariantKind::NomaMab { mode_switch } => {
                let grants = self.grants(&chs);
                let nchs = self.nchs(prediction, &chs);
                let default_mode = PairingMode::from_bit(sh.cfg.default_mode);
                let shadow = mode_switch.then(|| {
                    let mut replay = self.pairing_stream.clone();
                    let off = PairingPolicy {
                        default_mode,
                        mode_switch: false,
                    };
                    let out = run_pairing(&grants, &nchs, gamma, sh.positions, sh.link, off, &mut replay, reward);
                    ShadowCycle::from_outcomes(&out)
                });
                let policy = PairingPolicy {
                    default_mode,
                    mode_switch,
                };
                let mut stream = self.pairing_stream.clone();
                let outcomes = run_pairing(&grants, &nchs, gamma, sh.positions, sh.link, policy, &mut stream, reward);
                self.pairing_stream = stream;
                Decision { outcomes, shadow }
            }
        }
    }

    fn step(&mut self, sh: &Shared<'_>, cycle: u64, draws: &CycleDraws) -> (VariantCycle, f64) {
        self.traffic.drop_expired(cycle);
        self.traffic.step(cycle, &draws.traffic);
        let prediction = apply_prediction(cycle, &self.traffic.active_mask(), &draws.prediction);
        let decision = self.decide(sh, cycle, &prediction, &draws.channel.gamma);

        if let Some(bandit) = self.bandit.as_mut() {
            bandit.update_after_cycle(&prediction.snapshot, &decision.outcomes, sh.cfg.reward_share_rho);
            if bandit.uses_true_count() {
                bandit.record_true_activity(&prediction.true_active);
            }
        }

        let mut served = Vec::new();
        let mut reward_sum = 0.0;
        let mut wasted = 0;
        for o in &decision.outcomes {
            reward_sum += o.reward();
            wasted += usize::from(o.wasted);
            self.run.grants += 1;
            self.run.histogram[o.ch_id] += 1;
            if o.ch_was_active {
                served.push(o.ch_id);
            }
            if let Some(n) = o.nch_id {
                self.run.histogram[n] += 1;
                self.run.grants += 1;
                served.push(n);
            }
        }
        for &d in &served {
            let packet = self.traffic.serve(d).expect("served device holds a packet");
            self.run.transmissions += 1;
            self.run.sum_access_delay += packet.access_delay(cycle);
            self.run.sum_max_delay += sh.population[d].max_delay_cycles;
        }
        self.run.reward.push(reward_sum);
        self.run.wasted.push(wasted as u32);
        if let Some(s) = decision.shadow {
            self.run.shadow_reward.push(s.reward_sum);
            self.run.shadow_wasted.push(s.wasted_rbs as u32);
        }
        (
            VariantCycle {
                kind: self.kind,
                reward_sum,
                wasted_rbs: wasted,
                served_ids: served,
                regret_increment: 0.0,
                shadow_off: decision.shadow,
            },
            prediction.snapshot.realized_error,
        )
    }
}

/// One replication: a shared world and a set of variants evolving on it.
pub struct Simulation {
    cfg: ScenarioConfig,
    params: RewardParams,
    link: LinkParams,
    population: Vec<MtdProfile>,
    positions: Vec<Point>,
    channel: ChannelModel,
    traffic_stream: Stream,
    channel_stream: Stream,
    predictor_stream: Stream,
    variants: Vec<VariantSim>,
    reference: usize,
    cycle: u64,
}

impl Simulation {
    /// Build a replication. The oracle `BestOma` variant is always present
    /// since it defines the regret reference.
    pub fn new(cfg: &ScenarioConfig, kinds: &[VariantKind]) -> Result<Self> {
        cfg.validate()?;
        let population = build_population(cfg)?;
        let seed = cfg.rng_seed;
        let schedule = build_activation_schedule(cfg, &mut derive_stream(seed, labels::ACTIVATION))?;
        let mut all: Vec<VariantKind> = kinds.to_vec();
        if !all.contains(&VariantKind::BestOma) {
            all.push(VariantKind::BestOma);
        }
        let reference = all.iter().position(|k| *k == VariantKind::BestOma).unwrap();
        let variants = all
            .iter()
            .map(|&kind| {
                let bandit = kind.uses_bandit().then(|| {
                    let b = BanditState::new(cfg.n_devices);
                    match cfg.active_count_source {
                        ActiveCountSource::Estimated => b,
                        ActiveCountSource::True => b.with_true_count(),
                    }
                });
                VariantSim {
                    kind,
                    traffic: TrafficState::new(&population, &schedule, cfg),
                    bandit,
                    tie_stream: derive_stream(seed, &format!("{}/{}", labels::TIE_BREAK, kind.slug())),
                    pairing_stream: derive_stream(seed, &format!("{}/{}", labels::PAIRING, kind.slug())),
                    run: VariantRun::new(kind, cfg.n_devices, cfg.n_rbs, cfg.n_cycles),
                }
            })
            .collect();
        Ok(Self {
            params: RewardParams::from_config(cfg),
            link: LinkParams {
                bandwidth_hz: cfg.bandwidth_hz,
                p_t: cfg.tx_power_w(),
                p_tol: cfg.sic_tolerance_w(),
            },
            positions: population.iter().map(|p| p.position).collect(),
            channel: ChannelModel::new(&population, cfg),
            population,
            traffic_stream: derive_stream(seed, labels::TRAFFIC),
            channel_stream: derive_stream(seed, labels::CHANNEL),
            predictor_stream: derive_stream(seed, labels::PREDICTOR),
            variants,
            reference,
            cycle: 0,
            cfg: cfg.clone(),
        })
    }

    pub fn population(&self) -> &[MtdProfile] {
        &self.population
    }

    pub fn cycle(&self) -> u64 {
        self.cycle
    }

    /// Learning state of the first variant of `kind`, if it learns.
    pub fn bandit(&self, kind: VariantKind) -> Option<&BanditState> {
        self.variants.iter().find(|v| v.kind == kind)?.bandit.as_ref()
    }

    pub fn draw_cycle(&mut self) -> CycleDraws {
        CycleDraws {
            traffic: TrafficDraws::sample(self.cfg.n_devices, &mut self.traffic_stream),
            channel: self.channel.draw_gains(self.cycle, &mut self.channel_stream),
            prediction: PredictionDraws::sample(&self.cfg, &mut self.predictor_stream),
        }
    }

    /// Advance every variant by one cycle.
    pub fn run_cycle(&mut self) -> CycleLog {
        let draws = self.draw_cycle();
        self.run_cycle_with(&draws)
    }

    /// Advance every variant by one cycle using externally supplied draws.
    pub fn run_cycle_with(&mut self, draws: &CycleDraws) -> CycleLog {
        let cycle = self.cycle;
        let shared = Shared {
            cfg: &self.cfg,
            params: &self.params,
            link: &self.link,
            population: &self.population,
            positions: &self.positions,
        };
        let mut realized_error = 0.0;
        let mut logs: Vec<VariantCycle> = self
            .variants
            .iter_mut()
            .map(|v| {
                let (log, err) = v.step(&shared, cycle, draws);
                realized_error = err;
                log
            })
            .collect();
        let best = logs[self.reference].reward_sum;
        for (v, log) in self.variants.iter_mut().zip(logs.iter_mut()) {
            log.regret_increment = best - log.reward_sum;
            v.run.regret.push(log.regret_increment);
        }
        self.cycle += 1;
        CycleLog {
            cycle,
            realized_error,
            variants: logs,
        }
    }

    /// Run the remaining cycles and return each variant's record.
    pub fn run(mut self) -> Vec<VariantRun> {
        while (self.cycle as usize) < self.cfg.n_cycles {
            self.run_cycle();
        }
        self.finish()
    }

    pub fn finish(self) -> Vec<VariantRun> {
        self.variants.into_iter().map(|v| v.run).collect()
    }
}

/// Seed of replication `rep`, derived from the configured seed.
pub fn replication_config(cfg: &ScenarioConfig, rep: usize) -> ScenarioConfig {
    ScenarioConfig {
        rng_seed: replication_seed(cfg.rng_seed, rep),
        ..cfg.clone()
    }
}
