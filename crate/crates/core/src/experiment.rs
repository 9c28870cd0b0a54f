//! Named experiments, replication fan-out and CSV output.
//!
//! Output layout for an experiment run into `DIR`:
//!
//! ```text
//! DIR/<experiment>/manifest.json
//! DIR/<experiment>/summary.csv
//! DIR/<experiment>/<variant>_<metric>.csv      cycle,mean,std
//! DIR/<experiment>/<variant>_histogram.csv     device,qos_class,count
//! ```
//!
//! The prediction-error sweep nests one such set per error level under
//! `ep_<value>/` and adds a top-level `sweep_summary.csv`.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::config::ScenarioConfig;
use crate::engine::{replication_config, Simulation};
use crate::error::{Error, Result};
use crate::metrics::{RunSummary, SeriesStats, VariantKind, VariantRun};
use crate::population::{build_population, QosClass};

/// Prediction-error levels of the sweep experiment.
pub const SWEEP_ERRORS: [f64; 3] = [0.01, 0.1, 0.4];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Table2,
    RewardCurves,
    WasteCurves,
    PredErrorSweep,
    ModeSwitch,
    QuasiOptimal,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Experiment::Table2,
        Experiment::RewardCurves,
        Experiment::WasteCurves,
        Experiment::PredErrorSweep,
        Experiment::ModeSwitch,
        Experiment::QuasiOptimal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Table2 => "table2",
            Experiment::RewardCurves => "reward-curves",
            Experiment::WasteCurves => "waste-curves",
            Experiment::PredErrorSweep => "pred-error-sweep",
            Experiment::ModeSwitch => "mode-switch",
            Experiment::QuasiOptimal => "quasi-optimal",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Experiment::Table2 => "OMA vs NOMA summary: missing ratio, winners, average delays",
            Experiment::RewardCurves => "cumulative reward and regret of OMA-MAB, NOMA-MAB and Best",
            Experiment::WasteCurves => "cumulative wasted resource blocks of OMA and NOMA",
            Experiment::PredErrorSweep => "waste and reward of OMA and NOMA for mean prediction error 0.01, 0.1, 0.4",
            Experiment::ModeSwitch => "NOMA-MAB with and without the pairing mode switch",
            Experiment::QuasiOptimal => "random pairing against optimal pairing with oracle or bandit CHs",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|e| e.name() == name)
            .ok_or_else(|| Error::UnknownExperiment(name.to_string()))
    }

    /// Variants simulated by this experiment.
    pub fn variants(self, cfg: &ScenarioConfig) -> Vec<VariantKind> {
        let noma = VariantKind::NomaMab {
            mode_switch: cfg.mode_switch_enabled,
        };
        match self {
            Experiment::Table2 | Experiment::RewardCurves => vec![VariantKind::OmaMab, noma, VariantKind::BestOma],
            Experiment::WasteCurves | Experiment::PredErrorSweep => vec![VariantKind::OmaMab, noma],
            Experiment::ModeSwitch => vec![
                VariantKind::NomaMab { mode_switch: false },
                VariantKind::NomaMab { mode_switch: true },
            ],
            Experiment::QuasiOptimal => vec![
                VariantKind::QuasiOptBest,
                VariantKind::QuasiOptMab,
                noma,
                VariantKind::BestOma,
                VariantKind::OmaMab,
            ],
        }
    }
}

/// Summaries of every variant of one experiment.
#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub summaries: Vec<RunSummary>,
}

impl ExperimentResult {
    pub fn get(&self, kind: VariantKind) -> Option<&RunSummary> {
        self.summaries.iter().find(|s| s.kind == kind)
    }
}

#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub pred_err_mean: f64,
    pub result: ExperimentResult,
}

/// Run `reps` seeded replications on a pool of `jobs` workers. The result
/// is ordered by replication and independent of `jobs`.
pub fn run_replications(
    cfg: &ScenarioConfig,
    kinds: &[VariantKind],
    reps: usize,
    jobs: usize,
) -> Result<Vec<Vec<VariantRun>>> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Domain(format!("worker pool: {e}")))?;
    pool.install(|| {
        (0..reps)
            .into_par_iter()
            .map(|rep| Ok(Simulation::new(&replication_config(cfg, rep), kinds)?.run()))
            .collect()
    })
}

/// Average each requested variant over `reps` replications.
pub fn run_experiment(cfg: &ScenarioConfig, kinds: &[VariantKind], reps: usize, jobs: usize) -> Result<ExperimentResult> {
    if reps == 0 {
        return Err(Error::InvalidConfig(vec!["replications must be positive".into()]));
    }
    let runs = run_replications(cfg, kinds, reps, jobs)?;
    let mut order: Vec<VariantKind> = kinds.to_vec();
    if !order.contains(&VariantKind::BestOma) {
        order.push(VariantKind::BestOma);
    }
    let summaries = order
        .iter()
        .map(|kind| {
            let per_rep: Vec<VariantRun> = runs
                .iter()
                .map(|rep| rep.iter().find(|r| r.kind == *kind).expect("variant simulated").clone())
                .collect();
            RunSummary::from_runs(&per_rep)
        })
        .collect();
    Ok(ExperimentResult { summaries })
}

/// One full experiment per mean prediction error, on identical seeds.
pub fn sweep_prediction_error(
    cfg: &ScenarioConfig,
    errs: &[f64],
    kinds: &[VariantKind],
    reps: usize,
    jobs: usize,
) -> Result<Vec<SweepPoint>> {
    errs.iter()
        .map(|&e| {
            let cfg_e = ScenarioConfig {
                pred_err_mean: e,
                ..cfg.clone()
            };
            Ok(SweepPoint {
                pred_err_mean: e,
                result: run_experiment(&cfg_e, kinds, reps, jobs)?,
            })
        })
        .collect()
}

#[derive(Serialize)]
struct Manifest<'a> {
    experiment: &'a str,
    replications: usize,
    rng_seed: u64,
    variants: Vec<&'static str>,
    pred_err_sweep: Option<&'a [f64]>,
    generator: String,
    config: &'a ScenarioConfig,
}

#[derive(Serialize)]
struct SummaryRow<'a> {
    #[serde(skip_serializing_if = "Option::is_none")]
    pred_err_mean: Option<f64>,
    system: &'a str,
    variant: &'a str,
    replications: usize,
    missing_ratio: f64,
    winners: f64,
    avg_max_delay: f64,
    avg_access_delay: f64,
    total_reward: f64,
    total_regret: f64,
    total_grants: f64,
    strict_mean_count: f64,
    relaxed_mean_count: f64,
}

/// Mean histogram count of strict- and relaxed-class devices.
pub fn class_means(histogram: &[f64], classes: &[QosClass]) -> (f64, f64) {
    let mean_of = |class: QosClass| {
        let xs: Vec<f64> = histogram
            .iter()
            .zip(classes)
            .filter(|(_, c)| **c == class)
            .map(|(h, _)| *h)
            .collect();
        if xs.is_empty() {
            0.0
        } else {
            xs.iter().sum::<f64>() / xs.len() as f64
        }
    };
    (mean_of(QosClass::Strict), mean_of(QosClass::Relaxed))
}

fn summary_row<'a>(s: &'a RunSummary, classes: &[QosClass]) -> SummaryRow<'a> {
    let (strict, relaxed) = class_means(&s.histogram, classes);
    SummaryRow {
        pred_err_mean: None,
        system: s.kind.label(),
        variant: s.kind.slug(),
        replications: s.replications,
        missing_ratio: s.missing_ratio,
        winners: s.winners,
        avg_max_delay: s.avg_max_delay,
        avg_access_delay: s.avg_access_delay,
        total_reward: s.total_reward,
        total_regret: s.total_regret,
        total_grants: s.total_grants,
        strict_mean_count: strict,
        relaxed_mean_count: relaxed,
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_series(path: &Path, series: &SeriesStats) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["cycle", "mean", "std"])?;
    for (t, (m, s)) in series.mean.iter().zip(&series.std).enumerate() {
        w.write_record([t.to_string(), m.to_string(), s.to_string()])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn write_result(dir: &Path, result: &ExperimentResult, classes: &[QosClass]) -> Result<()> {
    create_dir(dir)?;
    let path = dir.join("summary.csv");
    let mut w = csv::Writer::from_path(&path)?;
    for s in &result.summaries {
        w.serialize(summary_row(s, classes))?;
    }
    w.flush().map_err(|e| Error::io(&path, e))?;

    for s in &result.summaries {
        let slug = s.kind.slug();
        let mut series = vec![
            ("cumulative_reward", &s.cumulative_reward),
            ("cumulative_regret", &s.cumulative_regret),
            ("cumulative_waste", &s.cumulative_waste),
        ];
        if let Some(x) = &s.shadow_cumulative_reward {
            series.push(("shadow_off_cumulative_reward", x));
        }
        if let Some(x) = &s.shadow_cumulative_waste {
            series.push(("shadow_off_cumulative_waste", x));
        }
        for (metric, stats) in series {
            write_series(&dir.join(format!("{slug}_{metric}.csv")), stats)?;
        }
        let path = dir.join(format!("{slug}_histogram.csv"));
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(["device", "qos_class", "count"])?;
        for (d, (count, class)) in s.histogram.iter().zip(classes).enumerate() {
            let class = match class {
                QosClass::Strict => "strict",
                QosClass::Relaxed => "relaxed",
            };
            w.write_record([d.to_string(), class.to_string(), count.to_string()])?;
        }
        w.flush().map_err(|e| Error::io(&path, e))?;
    }
    Ok(())
}

fn write_manifest(dir: &Path, exp: Experiment, cfg: &ScenarioConfig, reps: usize) -> Result<()> {
    let sweep = (exp == Experiment::PredErrorSweep).then_some(&SWEEP_ERRORS[..]);
    let manifest = Manifest {
        experiment: exp.name(),
        replications: reps,
        rng_seed: cfg.rng_seed,
        variants: exp.variants(cfg).into_iter().map(VariantKind::slug).collect(),
        pred_err_sweep: sweep,
        generator: format!("fastgrant {}", env!("CARGO_PKG_VERSION")),
        config: cfg,
    };
    let path = dir.join("manifest.json");
    let text = serde_json::to_string_pretty(&manifest)?;
    fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))
}

/// Run an experiment and write its outputs under `out_dir/<name>/`.
/// Returns the experiment directory.
pub fn execute(exp: Experiment, cfg: &ScenarioConfig, reps: usize, jobs: usize, out_dir: &Path) -> Result<PathBuf> {
    cfg.validate()?;
    let dir = out_dir.join(exp.name());
    create_dir(&dir)?;
    // device classes only depend on the population split, not on the seed
    let classes: Vec<QosClass> = build_population(cfg)?.iter().map(|p| p.qos_class).collect();
    let kinds = exp.variants(cfg);
    if exp == Experiment::PredErrorSweep {
        let points = sweep_prediction_error(cfg, &SWEEP_ERRORS, &kinds, reps, jobs)?;
        let path = dir.join("sweep_summary.csv");
        let mut w = csv::Writer::from_path(&path)?;
        for p in &points {
            write_result(&dir.join(format!("ep_{}", p.pred_err_mean)), &p.result, &classes)?;
            for s in &p.result.summaries {
                w.serialize(SummaryRow {
                    pred_err_mean: Some(p.pred_err_mean),
                    ..summary_row(s, &classes)
                })?;
            }
        }
        w.flush().map_err(|e| Error::io(&path, e))?;
    } else {
        write_result(&dir, &run_experiment(cfg, &kinds, reps, jobs)?, &classes)?;
    }
    write_manifest(&dir, exp, cfg, reps)?;
    Ok(dir)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_names_round_trip() {
        for e in Experiment::ALL {
            assert_eq!(Experiment::from_name(e.name()).unwrap(), e);
        }
        assert!(matches!(Experiment::from_name("nope"), Err(Error::UnknownExperiment(_))));
    }

    #[test]
    fn class_means_split() {
        let classes = [QosClass::Strict, QosClass::Strict, QosClass::Relaxed];
        assert_eq!(class_means(&[2.0, 4.0, 1.0], &classes), (3.0, 1.0));
    }

    #[test]
    fn results_do_not_depend_on_worker_count() {
        let cfg = ScenarioConfig {
            n_devices: 60,
            n_rbs: 4,
            n_cycles: 80,
            ..Default::default()
        };
        let kinds = [VariantKind::OmaMab, VariantKind::NomaMab { mode_switch: false }];
        let a = run_replications(&cfg, &kinds, 3, 1).unwrap();
        let b = run_replications(&cfg, &kinds, 3, 3).unwrap();
        assert_eq!(a, b);
    }
}
