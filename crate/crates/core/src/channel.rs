//! Uplink channel: path loss, log-normal shadowing, Rayleigh fading, and the
//! OMA / 2-user NOMA rate expressions.

use rand::Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::config::ScenarioConfig;
use crate::population::{base_station, MtdProfile};
use crate::rng::Stream;

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * watts.log10() + 30.0
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Urban-macro path loss in dB, `128.1 + 37.6 log10(d / 1 km)`, with the
/// distance clamped below at `min_distance_m`.
pub fn path_loss_db(distance_m: f64, min_distance_m: f64) -> f64 {
    let d_km = distance_m.max(min_distance_m) / 1000.0;
    128.1 + 37.6 * d_km.log10()
}

/// Interference-free rate `B log2(1 + p gamma)`.
pub fn oma_rate(bandwidth_hz: f64, p_tx: f64, gamma: f64) -> f64 {
    bandwidth_hz * (p_tx * gamma).ln_1p() / std::f64::consts::LN_2
}

/// Rates of a 2-user uplink NOMA pair under SIC: the strong user is decoded
/// first and sees the weak user as interference; the weak user is decoded
/// interference-free. Returns `(r_strong, r_weak)`.
pub fn noma_rates(bandwidth_hz: f64, p_s: f64, gamma_s: f64, p_w: f64, gamma_w: f64) -> (f64, f64) {
    let weak_snr = p_w * gamma_w;
    let strong_sinr = p_s * gamma_s / (weak_snr + 1.0);
    (
        bandwidth_hz * strong_sinr.ln_1p() / std::f64::consts::LN_2,
        bandwidth_hz * weak_snr.ln_1p() / std::f64::consts::LN_2,
    )
}

/// Normalized gains `gamma = |h|^2 / (N0 B)` of every device for one cycle.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub cycle: u64,
    pub gamma: Vec<f64>,
}

/// Static part of the channel: per-device path loss and the noise floor.
#[derive(Debug, Clone)]
pub struct ChannelModel {
    path_gain: Vec<f64>,
    noise_w: f64,
    shadowing_sigma_db: f64,
}

impl ChannelModel {
    pub fn new(population: &[MtdProfile], cfg: &ScenarioConfig) -> Self {
        let bs = base_station(cfg);
        let path_gain = population
            .iter()
            .map(|p| db_to_linear(-path_loss_db(p.position.distance(bs), cfg.min_distance_m)))
            .collect();
        Self {
            path_gain,
            noise_w: dbm_to_watts(cfg.noise_psd_dbm_hz) * cfg.bandwidth_hz,
            shadowing_sigma_db: cfg.shadowing_sigma_db,
        }
    }

    /// Linear large-scale gain (inverse path loss) of a device.
    pub fn path_gain(&self, device: usize) -> f64 {
        self.path_gain[device]
    }

    /// Noise power `N0 B` in watts.
    pub fn noise_power_w(&self) -> f64 {
        self.noise_w
    }

    /// gamma for a given shadowing draw (dB) and Rayleigh power draw.
    pub fn gamma(&self, device: usize, shadow_db: f64, fading_power: f64) -> f64 {
        self.path_gain[device] * db_to_linear(shadow_db) * fading_power / self.noise_w
    }

    /// Fresh i.i.d. shadowing and fading for every device.
    pub fn draw_gains(&self, cycle: u64, stream: &mut Stream) -> ChannelRealization {
        let gamma = (0..self.path_gain.len())
            .map(|i| {
                let shadow_db = self.shadowing_sigma_db * stream.sample::<f64, _>(StandardNormal);
                let fading: f64 = stream.sample(Exp1);
                self.gamma(i, shadow_db, fading)
            })
            .collect();
        ChannelRealization { cycle, gamma }
    }
}
