//! Discrete-time simulator of fast uplink grant for massive machine-type
//! communications: a sleeping-bandit scheduler picks which devices receive
//! the resource blocks each cycle, and granted devices act as NOMA cluster
//! heads that share their block with a nearby active device. Oracle
//! baselines (best OMA, optimally paired NOMA) provide reward references.

pub mod bandit;
pub mod baselines;
pub mod channel;
pub mod config;
pub mod engine;
pub mod error;
pub mod experiment;
pub mod matching;
pub mod metrics;
pub mod pairing;
pub mod population;
pub mod predictor;
pub mod reward;
pub mod rng;
pub mod traffic;

pub use config::ScenarioConfig;
pub use engine::Simulation;
pub use error::{Error, Result};
pub use experiment::{execute, run_experiment, sweep_prediction_error, Experiment};
pub use metrics::{RunSummary, VariantKind};
