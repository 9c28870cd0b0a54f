//! Utility and reward of a served transmission.

use serde::{Deserialize, Serialize};

use crate::config::ScenarioConfig;

/// Modified Gompertz normalization of a delay budget: `a - a exp(-b exp(-c d))`.
pub fn gompertz(d: f64, a: f64, b: f64, c: f64) -> f64 {
    a - a * (-b * (-c * d).exp()).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QosSample {
    pub value_of_info: f64,
    pub rate_bps: f64,
    pub max_delay: u64,
    pub access_delay: u64,
    pub min_rate_bps: f64,
}

/// Weights and normalization constants of the utility function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RewardParams {
    pub deltas: [f64; 3],
    pub r_max_bps: f64,
    pub gompertz: [f64; 3],
}

impl RewardParams {
    pub fn from_config(cfg: &ScenarioConfig) -> Self {
        Self {
            deltas: cfg.delta_weights,
            r_max_bps: cfg.r_max_bps,
            gompertz: [cfg.gompertz_a, cfg.gompertz_b, cfg.gompertz_c],
        }
    }

    pub fn delay_score(&self, max_delay: u64) -> f64 {
        let [a, b, c] = self.gompertz;
        gompertz(max_delay as f64, a, b, c)
    }

    /// `d1 v + d2 min(r / R_max, 1) + d3 f(D)`; the delay term scores the
    /// device's delay budget, not the realized access delay.
    pub fn utility(&self, s: &QosSample) -> f64 {
        let [d1, d2, d3] = self.deltas;
        let rate_norm = (s.rate_bps / self.r_max_bps).min(1.0);
        d1 * s.value_of_info + d2 * rate_norm + d3 * self.delay_score(s.max_delay)
    }

    /// Utility gated by the rate and deadline indicators.
    pub fn reward(&self, s: &QosSample) -> f64 {
        if s.rate_bps >= s.min_rate_bps && s.access_delay <= s.max_delay {
            self.utility(s)
        } else {
            0.0
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn params() -> RewardParams {
        RewardParams::from_config(&ScenarioConfig::default())
    }

    #[test]
    fn gompertz_reference_values() {
        assert_abs_diff_eq!(gompertz(0.0, 1.0, 8.0, 0.03), 1.0 - (-8f64).exp(), epsilon = 1e-12);
        assert_abs_diff_eq!(gompertz(0.0, 1.0, 8.0, 0.03), 0.99966, epsilon = 1e-5);
        let direct = 1.0 - (-8.0 * (-3f64).exp()).exp();
        assert_abs_diff_eq!(gompertz(100.0, 1.0, 8.0, 0.03), direct, epsilon = 1e-12);
        assert_abs_diff_eq!(gompertz(100.0, 1.0, 8.0, 0.03), 0.328537, epsilon = 1e-6);
        assert_abs_diff_eq!(gompertz(1e6, 1.0, 8.0, 0.03), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn gompertz_strictly_decreasing() {
        let g: Vec<f64> = (0..400).map(|d| gompertz(d as f64, 1.0, 8.0, 0.03)).collect();
        assert!(g.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn utility_extremes() {
        let p = RewardParams {
            gompertz: [1.0, 8.0, 0.03],
            ..params()
        };
        // a steep Gompertz saturates f(0) at 1 in double precision
        let top = RewardParams {
            gompertz: [1.0, 1000.0, 0.03],
            ..p
        };
        let s = QosSample {
            value_of_info: 1.0,
            rate_bps: p.r_max_bps,
            max_delay: 0,
            access_delay: 0,
            min_rate_bps: 0.0,
        };
        assert_abs_diff_eq!(top.utility(&s), 1.0, epsilon = 1e-12);
        let bottom = QosSample {
            value_of_info: 0.0,
            rate_bps: 0.0,
            max_delay: 100_000,
            ..s
        };
        assert_abs_diff_eq!(p.utility(&bottom), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn utility_substitution() {
        let p = params();
        let f100 = gompertz(100.0, 1.0, 8.0, 0.03);
        let s = QosSample {
            value_of_info: 0.5,
            rate_bps: 0.4 * p.r_max_bps,
            max_delay: 100,
            access_delay: 3,
            min_rate_bps: 0.0,
        };
        let expected = 0.2 * 0.5 + 0.3 * 0.4 + 0.5 * f100;
        assert_abs_diff_eq!(p.utility(&s), expected, epsilon = 1e-12);
        assert_abs_diff_eq!(p.utility(&s), 0.384269, epsilon = 1e-6);
    }

    #[test]
    fn reward_indicators() {
        let p = params();
        let s = QosSample {
            value_of_info: 0.7,
            rate_bps: 1e6,
            max_delay: 10,
            access_delay: 10,
            min_rate_bps: 5e5,
        };
        assert_eq!(p.reward(&s), p.utility(&s));
        assert_eq!(p.reward(&QosSample { access_delay: 11, ..s }), 0.0);
        assert_eq!(p.reward(&QosSample { rate_bps: 4e5, ..s }), 0.0);
    }

    proptest! {
        #[test]
        fn reward_bounded_by_utility(v in 0.0f64..=1.0, r in 0.0f64..1e8, dmax in 0u64..400, d in 0u64..400, rmin in 0.0f64..1e7) {
            let p = params();
            let s = QosSample { value_of_info: v, rate_bps: r, max_delay: dmax, access_delay: d, min_rate_bps: rmin };
            let u = p.utility(&s);
            let th = p.reward(&s);
            prop_assert!(0.0 <= th && th <= u && u <= 1.0 + 1e-12);
        }

        #[test]
        fn utility_scale_invariant(v in 0.0f64..=1.0, r in 0.0f64..1e7, k in 0.01f64..100.0, dmax in 0u64..400) {
            let p = params();
            let s = QosSample { value_of_info: v, rate_bps: r, max_delay: dmax, access_delay: 0, min_rate_bps: 0.0 };
            let scaled = RewardParams { r_max_bps: p.r_max_bps * k, ..p };
            let u1 = p.utility(&s);
            let u2 = scaled.utility(&QosSample { rate_bps: r * k, ..s });
            prop_assert!((u1 - u2).abs() < 1e-12);
        }
    }
}
