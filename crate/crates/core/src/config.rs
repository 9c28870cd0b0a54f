//! Scenario configuration.
//!
//! Read from a flat TOML file, one `key = value` per line. Every key has a
//! default, so an empty file yields the reference scenario (500 devices,
//! 10 resource blocks, 10^4 cycles).

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which reward counter stands in for the number of times a device was active.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActiveCountSource {
    /// Number of cycles the predictor reported the device active.
    Estimated,
    /// Number of cycles the device truly held a packet. Comparison only.
    True,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub n_devices: usize,
    pub n_rbs: usize,
    pub n_cycles: usize,
    pub bandwidth_hz: f64,
    pub tx_power_dbm: f64,
    pub sic_tolerance_dbm: f64,
    /// Share of the nCH reward credited to its CH.
    pub reward_share_rho: f64,
    pub beta_alpha: f64,
    pub beta_beta: f64,
    pub activation_slots: usize,
    pub area_side_m: f64,
    pub min_distance_m: f64,
    pub noise_psd_dbm_hz: f64,
    pub shadowing_sigma_db: f64,
    pub delta_weights: [f64; 3],
    pub gompertz_a: f64,
    pub gompertz_b: f64,
    pub gompertz_c: f64,
    pub r_max_bps: f64,
    pub min_rate_bps: f64,
    pub strict_delay_range: [u64; 2],
    pub relaxed_delay_range: [u64; 2],
    pub pred_err_mean: f64,
    pub pred_err_std: f64,
    pub p_active_range: [f64; 2],
    pub reactivation_prob: f64,
    /// 0: CH acts as the weak user, 1: CH acts as the strong user.
    pub default_mode: u8,
    pub mode_switch_enabled: bool,
    pub active_count_source: ActiveCountSource,
    pub rng_seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            n_devices: 500,
            n_rbs: 10,
            n_cycles: 10_000,
            bandwidth_hz: 360e3,
            tx_power_dbm: 10.0,
            sic_tolerance_dbm: 4.0,
            reward_share_rho: 0.3,
            beta_alpha: 3.0,
            beta_beta: 4.0,
            activation_slots: 10,
            area_side_m: 500.0,
            min_distance_m: 1.0,
            noise_psd_dbm_hz: -174.0,
            shadowing_sigma_db: 10.0,
            delta_weights: [0.2, 0.3, 0.5],
            gompertz_a: 1.0,
            gompertz_b: 8.0,
            gompertz_c: 0.03,
            r_max_bps: 1e7,
            min_rate_bps: 0.0,
            strict_delay_range: [1, 100],
            relaxed_delay_range: [150, 300],
            pred_err_mean: 0.01,
            pred_err_std: 0.04,
            p_active_range: [0.8, 1.0],
            reactivation_prob: 0.1,
            default_mode: 0,
            mode_switch_enabled: false,
            active_count_source: ActiveCountSource::Estimated,
            rng_seed: 1,
        }
    }
}

const WEIGHT_SUM_TOL: f64 = 1e-9;

fn unit_interval(x: f64) -> bool {
    (0.0..=1.0).contains(&x)
}

impl ScenarioConfig {
    /// Parse a config from TOML text; missing keys keep their defaults.
    pub fn from_toml_str(text: &str) -> std::result::Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    /// Load a config file without validating it.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text).map_err(|message| Error::ConfigParse {
            path: path.to_path_buf(),
            message,
        })
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config is always representable as TOML")
    }

    /// Apply `key=value` overrides, with values written in TOML syntax.
    pub fn with_overrides<S: AsRef<str>>(&self, overrides: &[S]) -> std::result::Result<Self, String> {
        let mut table = toml::Table::try_from(self).map_err(|e| e.to_string())?;
        for raw in overrides {
            let raw = raw.as_ref();
            let (key, value) = raw
                .split_once('=')
                .ok_or_else(|| format!("override `{raw}` is not of the form key=value"))?;
            let parsed: toml::Table =
                toml::from_str(&format!("v = {}", value.trim())).map_err(|e| format!("override `{raw}`: {e}"))?;
            table.insert(key.trim().to_string(), parsed["v"].clone());
        }
        toml::Value::Table(table).try_into().map_err(|e: toml::de::Error| e.to_string())
    }

    /// Every violated invariant, as a human-readable line naming the key.
    // negated comparisons so that NaN fails every check
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        for (name, count) in [
            ("n_devices", self.n_devices),
            ("n_rbs", self.n_rbs),
            ("n_cycles", self.n_cycles),
            ("activation_slots", self.activation_slots),
        ] {
            if count == 0 {
                v.push(format!("{name} must be positive"));
            }
        }
        if self.n_devices <= self.n_rbs {
            v.push(format!(
                "n_devices ({}) must exceed n_rbs ({})",
                self.n_devices, self.n_rbs
            ));
        }
        let sum: f64 = self.delta_weights.iter().sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
            v.push(format!("delta_weights must sum to 1 (got {sum})"));
        }
        if self.delta_weights.iter().any(|d| *d < 0.0) {
            v.push("delta_weights must be nonnegative".into());
        }
        if !unit_interval(self.reward_share_rho) {
            v.push(format!("reward_share_rho must lie in [0,1] (got {})", self.reward_share_rho));
        }
        if !unit_interval(self.pred_err_mean) {
            v.push(format!("pred_err_mean must lie in [0,1] (got {})", self.pred_err_mean));
        }
        if !(self.pred_err_std >= 0.0) {
            v.push("pred_err_std must be nonnegative".into());
        }
        let [lo, hi] = self.p_active_range;
        if !(unit_interval(lo) && unit_interval(hi) && lo <= hi) {
            v.push(format!("p_active_range must be an ordered subinterval of [0,1] (got [{lo}, {hi}])"));
        }
        if !unit_interval(self.reactivation_prob) {
            v.push("reactivation_prob must lie in [0,1]".into());
        }
        if self.default_mode > 1 {
            v.push(format!("default_mode must be 0 or 1 (got {})", self.default_mode));
        }
        for (name, x) in [
            ("beta_alpha", self.beta_alpha),
            ("beta_beta", self.beta_beta),
            ("bandwidth_hz", self.bandwidth_hz),
            ("area_side_m", self.area_side_m),
            ("min_distance_m", self.min_distance_m),
            ("r_max_bps", self.r_max_bps),
        ] {
            if !(x > 0.0 && x.is_finite()) {
                v.push(format!("{name} must be positive and finite"));
            }
        }
        if !(self.shadowing_sigma_db >= 0.0) {
            v.push("shadowing_sigma_db must be nonnegative".into());
        }
        if !(self.min_rate_bps >= 0.0) {
            v.push("min_rate_bps must be nonnegative".into());
        }
        if !(self.gompertz_b >= 0.0 && self.gompertz_c >= 0.0 && self.gompertz_a >= 0.0) {
            v.push("gompertz_a, gompertz_b and gompertz_c must be nonnegative".into());
        }
        for (name, [lo, hi]) in [
            ("strict_delay_range", self.strict_delay_range),
            ("relaxed_delay_range", self.relaxed_delay_range),
        ] {
            if lo > hi {
                v.push(format!("{name} must be ordered (got [{lo}, {hi}])"));
            }
        }
        v
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(v))
        }
    }

    pub fn tx_power_w(&self) -> f64 {
        crate::channel::dbm_to_watts(self.tx_power_dbm)
    }

    pub fn sic_tolerance_w(&self) -> f64 {
        crate::channel::dbm_to_watts(self.sic_tolerance_dbm)
    }
}
