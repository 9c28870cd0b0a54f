//! Device population: fixed positions and per-device QoS requirements.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config::ScenarioConfig;
use crate::error::Result;
use crate::rng::{derive_stream, labels};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QosClass {
    Strict,
    Relaxed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MtdProfile {
    pub id: usize,
    pub position: Point,
    /// Maximum tolerable access delay in cycles.
    pub max_delay_cycles: u64,
    pub min_rate_bps: f64,
    pub qos_class: QosClass,
}

/// Base station position: the center of the square deployment area.
pub fn base_station(cfg: &ScenarioConfig) -> Point {
    Point::new(cfg.area_side_m / 2.0, cfg.area_side_m / 2.0)
}

/// Place `n_devices` devices uniformly over the square area. The first
/// ceil(N/2) devices get strict delay budgets, the rest relaxed ones.
pub fn build_population(cfg: &ScenarioConfig) -> Result<Vec<MtdProfile>> {
    cfg.validate()?;
    let mut stream = derive_stream(cfg.rng_seed, labels::POPULATION);
    let n_strict = cfg.n_devices.div_ceil(2);
    let side = cfg.area_side_m;
    Ok((0..cfg.n_devices)
        .map(|id| {
            let position = Point::new(stream.random::<f64>() * side, stream.random::<f64>() * side);
            let (qos_class, [lo, hi]) = if id < n_strict {
                (QosClass::Strict, cfg.strict_delay_range)
            } else {
                (QosClass::Relaxed, cfg.relaxed_delay_range)
            };
            MtdProfile {
                id,
                position,
                max_delay_cycles: stream.random_range(lo..=hi),
                min_rate_bps: cfg.min_rate_bps,
                qos_class,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_population_shape() {
        let cfg = ScenarioConfig::default();
        let pop = build_population(&cfg).unwrap();
        assert_eq!(pop.len(), 500);
        assert!(pop.iter().enumerate().all(|(i, p)| p.id == i));
        let strict = pop.iter().filter(|p| p.qos_class == QosClass::Strict).count();
        assert_eq!(strict, 250);
        for p in &pop {
            assert!((0.0..=500.0).contains(&p.position.x) && (0.0..=500.0).contains(&p.position.y));
            match p.qos_class {
                QosClass::Strict => assert!((1..=100).contains(&p.max_delay_cycles)),
                QosClass::Relaxed => assert!((150..=300).contains(&p.max_delay_cycles)),
            }
        }
    }

    #[test]
    fn two_devices_split_strict_relaxed() {
        let cfg = ScenarioConfig {
            n_devices: 2,
            n_rbs: 1,
            ..Default::default()
        };
        let pop = build_population(&cfg).unwrap();
        assert_eq!(pop[0].qos_class, QosClass::Strict);
        assert_eq!(pop[1].qos_class, QosClass::Relaxed);
    }

    #[test]
    fn odd_population_rounds_strict_up() {
        let cfg = ScenarioConfig {
            n_devices: 5,
            n_rbs: 1,
            ..Default::default()
        };
        let pop = build_population(&cfg).unwrap();
        assert_eq!(pop.iter().filter(|p| p.qos_class == QosClass::Strict).count(), 3);
    }

    #[test]
    fn same_seed_same_population() {
        let cfg = ScenarioConfig::default();
        assert_eq!(build_population(&cfg).unwrap(), build_population(&cfg).unwrap());
        let other = ScenarioConfig {
            rng_seed: cfg.rng_seed + 1,
            ..cfg.clone()
        };
        assert_ne!(build_population(&cfg).unwrap(), build_population(&other).unwrap());
    }

    #[test]
    fn invalid_config_rejected() {
        let cfg = ScenarioConfig {
            n_devices: 10,
            n_rbs: 10,
            ..Default::default()
        };
        assert!(build_population(&cfg).is_err());
    }

    #[test]
    fn base_station_at_center() {
        let cfg = ScenarioConfig::default();
        assert_eq!(base_station(&cfg), Point::new(250.0, 250.0));
    }
}
