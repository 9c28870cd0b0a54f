//! Per-cycle logs, per-run accumulators and cross-replication summaries.

use serde::{Deserialize, Serialize};

use crate::pairing::PairingOutcome;

/// System variant being simulated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum VariantKind {
    /// Bandit grants, one device per RB.
    OmaMab,
    /// Bandit grants plus distributed random NOMA pairing.
    NomaMab { mode_switch: bool },
    /// Oracle: highest realized rewards among truly active devices.
    BestOma,
    /// Oracle CHs with optimal pairing.
    QuasiOptBest,
    /// Bandit CHs with optimal pairing.
    QuasiOptMab,
}

impl VariantKind {
    /// File-name stem.
    pub fn slug(self) -> &'static str {
        match self {
            VariantKind::OmaMab => "oma_mab",
            VariantKind::NomaMab { mode_switch: false } => "noma_mab",
            VariantKind::NomaMab { mode_switch: true } => "noma_mab_ms",
            VariantKind::BestOma => "best_oma",
            VariantKind::QuasiOptBest => "quasi_opt_best",
            VariantKind::QuasiOptMab => "quasi_opt_mab",
        }
    }

    /// Row label in summary tables.
    pub fn label(self) -> &'static str {
        match self {
            VariantKind::OmaMab => "OMA",
            VariantKind::NomaMab { mode_switch: false } => "NOMA",
            VariantKind::NomaMab { mode_switch: true } => "NOMA-MS",
            VariantKind::BestOma => "Best",
            VariantKind::QuasiOptBest => "QuasiOpt-BestCH",
            VariantKind::QuasiOptMab => "QuasiOpt-MABCH",
        }
    }

    pub fn uses_bandit(self) -> bool {
        matches!(
            self,
            VariantKind::OmaMab | VariantKind::NomaMab { .. } | VariantKind::QuasiOptMab
        )
    }

    pub fn pairs(self) -> bool {
        !matches!(self, VariantKind::OmaMab | VariantKind::BestOma)
    }
}

/// What one variant did in one cycle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantCycle {
    pub kind: VariantKind,
    pub reward_sum: f64,
    pub wasted_rbs: usize,
    pub served_ids: Vec<usize>,
    pub regret_increment: f64,
    /// For mode-switching variants: the same cycle with the second round
    /// suppressed, on identical inputs and randomness.
    pub shadow_off: Option<ShadowCycle>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShadowCycle {
    pub reward_sum: f64,
    pub wasted_rbs: usize,
}

impl ShadowCycle {
    pub fn from_outcomes(outcomes: &[PairingOutcome]) -> Self {
        Self {
            reward_sum: outcomes.iter().map(PairingOutcome::reward).sum(),
            wasted_rbs: outcomes.iter().filter(|o| o.wasted).count(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleLog {
    pub cycle: u64,
    pub realized_error: f64,
    pub variants: Vec<VariantCycle>,
}

/// Accumulated record of one variant over one replication.
#[derive(Debug, Clone, PartialEq)]
pub struct VariantRun {
    pub kind: VariantKind,
    pub n_rbs: usize,
    pub reward: Vec<f64>,
    pub wasted: Vec<u32>,
    pub regret: Vec<f64>,
    pub shadow_reward: Vec<f64>,
    pub shadow_wasted: Vec<u32>,
    /// Per device: RB occupancies (CH grants plus admitted pair slots).
    pub histogram: Vec<u64>,
    pub grants: u64,
    pub transmissions: u64,
    pub sum_access_delay: u64,
    pub sum_max_delay: u64,
}

impl VariantRun {
    pub fn new(kind: VariantKind, n_devices: usize, n_rbs: usize, n_cycles: usize) -> Self {
        Self {
            kind,
            n_rbs,
            reward: Vec::with_capacity(n_cycles),
            wasted: Vec::with_capacity(n_cycles),
            regret: Vec::with_capacity(n_cycles),
            shadow_reward: Vec::new(),
            shadow_wasted: Vec::new(),
            histogram: vec![0; n_devices],
            grants: 0,
            transmissions: 0,
            sum_access_delay: 0,
            sum_max_delay: 0,
        }
    }

    pub fn cycles(&self) -> usize {
        self.reward.len()
    }

    pub fn total_wasted(&self) -> u64 {
        self.wasted.iter().map(|&w| u64::from(w)).sum()
    }

    pub fn total_reward(&self) -> f64 {
        self.reward.iter().sum()
    }

    pub fn missing_ratio(&self) -> f64 {
        self.total_wasted() as f64 / (self.n_rbs * self.cycles()) as f64
    }

    pub fn avg_access_delay(&self) -> f64 {
        ratio(self.sum_access_delay as f64, self.transmissions)
    }

    pub fn avg_max_delay(&self) -> f64 {
        ratio(self.sum_max_delay as f64, self.transmissions)
    }
}

fn ratio(num: f64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num / den as f64
    }
}

pub fn cumulative<T: Copy + Into<f64>>(xs: &[T]) -> Vec<f64> {
    xs.iter()
        .scan(0.0, |acc, &x| {
            *acc += x.into();
            Some(*acc)
        })
        .collect()
}

/// Per-cycle mean and (population) standard deviation across replications.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesStats {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl SeriesStats {
    pub fn from_runs(series: &[Vec<f64>]) -> Self {
        let len = series.first().map_or(0, Vec::len);
        let k = series.len() as f64;
        let mut mean = vec![0.0; len];
        let mut std = vec![0.0; len];
        for t in 0..len {
            let m = series.iter().map(|s| s[t]).sum::<f64>() / k;
            let var = series.iter().map(|s| (s[t] - m).powi(2)).sum::<f64>() / k;
            mean[t] = m;
            std[t] = var.sqrt();
        }
        Self { mean, std }
    }

    pub fn last(&self) -> f64 {
        self.mean.last().copied().unwrap_or(0.0)
    }
}

/// One variant, averaged over replications.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub kind: VariantKind,
    pub replications: usize,
    pub missing_ratio: f64,
    pub winners: f64,
    pub avg_max_delay: f64,
    pub avg_access_delay: f64,
    pub total_reward: f64,
    pub total_regret: f64,
    pub total_grants: f64,
    /// Mean per-device occupancy count.
    pub histogram: Vec<f64>,
    pub cumulative_reward: SeriesStats,
    pub cumulative_regret: SeriesStats,
    pub cumulative_waste: SeriesStats,
    /// Waste per cycle, averaged; kept for per-cycle comparisons.
    pub wasted_per_cycle: SeriesStats,
    pub shadow_cumulative_reward: Option<SeriesStats>,
    pub shadow_cumulative_waste: Option<SeriesStats>,
}

impl RunSummary {
    pub fn from_runs(runs: &[VariantRun]) -> Self {
        assert!(!runs.is_empty(), "summary needs at least one run");
        let k = runs.len() as f64;
        let mean = |f: &dyn Fn(&VariantRun) -> f64| runs.iter().map(f).sum::<f64>() / k;
        let n_devices = runs[0].histogram.len();
        let histogram = (0..n_devices)
            .map(|d| runs.iter().map(|r| r.histogram[d] as f64).sum::<f64>() / k)
            .collect();
        let series = |f: &dyn Fn(&VariantRun) -> Vec<f64>| {
            SeriesStats::from_runs(&runs.iter().map(f).collect::<Vec<_>>())
        };
        let has_shadow = runs.iter().all(|r| !r.shadow_reward.is_empty());
        Self {
            kind: runs[0].kind,
            replications: runs.len(),
            missing_ratio: mean(&|r| r.missing_ratio()),
            winners: mean(&|r| r.transmissions as f64),
            avg_max_delay: mean(&|r| r.avg_max_delay()),
            avg_access_delay: mean(&|r| r.avg_access_delay()),
            total_reward: mean(&|r| r.total_reward()),
            total_regret: mean(&|r| r.regret.iter().sum()),
            total_grants: mean(&|r| r.grants as f64),
            histogram,
            cumulative_reward: series(&|r| cumulative(&r.reward)),
            cumulative_regret: series(&|r| cumulative(&r.regret)),
            cumulative_waste: series(&|r| cumulative(&r.wasted)),
            wasted_per_cycle: series(&|r| r.wasted.iter().map(|&w| f64::from(w)).collect()),
            shadow_cumulative_reward: has_shadow.then(|| series(&|r| cumulative(&r.shadow_reward))),
            shadow_cumulative_waste: has_shadow.then(|| series(&|r| cumulative(&r.shadow_wasted))),
        }
    }
}
