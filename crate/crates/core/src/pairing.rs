//! Distributed 2-user NOMA pairing.
//!
//! Every granted device (cluster head, CH) announces a pairing request
//! carrying an SNR threshold. Each active device without a grant (nCH)
//! associates with its nearest CH and answers that CH's request if its own
//! BS-link gain satisfies the SIC power-gap condition. Each CH then picks one
//! responder uniformly at random. With mode switching on, CHs left unpaired
//! re-announce once with the opposite role.

use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::channel::{noma_rates, oma_rate};
use crate::population::Point;
use crate::rng::Stream;

/// Role the CH takes in the NOMA pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PairingMode {
    /// Mode 0: the CH is the weak user and seeks a stronger partner.
    ChWeak,
    /// Mode 1: the CH is the strong user and seeks a weaker partner.
    ChStrong,
}

impl PairingMode {
    pub fn from_bit(bit: u8) -> Self {
        if bit == 0 {
            PairingMode::ChWeak
        } else {
            PairingMode::ChStrong
        }
    }

    pub fn bit(self) -> u8 {
        match self {
            PairingMode::ChWeak => 0,
            PairingMode::ChStrong => 1,
        }
    }

    pub fn opposite(self) -> Self {
        match self {
            PairingMode::ChWeak => PairingMode::ChStrong,
            PairingMode::ChStrong => PairingMode::ChWeak,
        }
    }
}

/// Threshold announced by a CH under equal transmit power `p_t`.
pub fn gamma_threshold(gamma_ch: f64, p_t: f64, p_tol: f64, mode: PairingMode) -> f64 {
    match mode {
        PairingMode::ChWeak => gamma_ch + p_tol / p_t,
        PairingMode::ChStrong => (gamma_ch - p_tol / p_t).max(0.0),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairingRequest {
    pub ch_id: usize,
    pub gamma_ch: f64,
    pub mode: PairingMode,
    pub gamma_threshold: f64,
}

impl PairingRequest {
    pub fn new(ch_id: usize, gamma_ch: f64, mode: PairingMode, p_t: f64, p_tol: f64) -> Self {
        Self {
            ch_id,
            gamma_ch,
            mode,
            gamma_threshold: gamma_threshold(gamma_ch, p_t, p_tol, mode),
        }
    }
}

/// Whether an nCH with gain `nch_gamma` may answer `request`.
pub fn eligible(nch_gamma: f64, request: &PairingRequest) -> bool {
    match request.mode {
        PairingMode::ChWeak => nch_gamma >= request.gamma_threshold,
        PairingMode::ChStrong => nch_gamma <= request.gamma_threshold,
    }
}

/// Nearest-CH association. Returns, per entry of `nch_ids`, the position in
/// `ch_ids` of the chosen CH; distance ties go to the lower CH id.
pub fn associate(nch_ids: &[usize], ch_ids: &[usize], positions: &[Point]) -> Vec<Option<usize>> {
    nch_ids
        .iter()
        .map(|&n| {
            let at = positions[n];
            ch_ids
                .iter()
                .enumerate()
                .min_by(|(_, &a), (_, &b)| {
                    at.distance(positions[a])
                        .total_cmp(&at.distance(positions[b]))
                        .then(a.cmp(&b))
                })
                .map(|(slot, _)| slot)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairingOutcome {
    pub rb_index: usize,
    pub ch_id: usize,
    pub ch_was_active: bool,
    pub nch_id: Option<usize>,
    pub mode_used: PairingMode,
    pub mode_switched: bool,
    pub r_ch: f64,
    pub r_nch: f64,
    pub theta_ch: f64,
    pub theta_nch: f64,
    /// Granted to an idle CH that found no partner.
    pub wasted: bool,
}

impl PairingOutcome {
    pub fn reward(&self) -> f64 {
        self.theta_ch + self.theta_nch
    }

    /// Number of devices that transmitted on this RB.
    pub fn transmissions(&self) -> usize {
        usize::from(self.ch_was_active) + usize::from(self.nch_id.is_some())
    }
}

/// A granted resource block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grant {
    pub ch_id: usize,
    pub ch_active: bool,
}

/// Physical-layer constants needed to pair and rate transmissions.
#[derive(Debug, Clone, Copy)]
pub struct LinkParams {
    pub bandwidth_hz: f64,
    pub p_t: f64,
    pub p_tol: f64,
}

/// Rates `(r_ch, r_nch)` on one RB. A silent CH leaves its partner
/// interference-free; otherwise the strong/weak roles follow `mode`.
pub fn pair_rates(
    link: &LinkParams,
    gamma_ch: f64,
    ch_active: bool,
    partner: Option<f64>,
    mode: PairingMode,
) -> (f64, f64) {
    let b = link.bandwidth_hz;
    let p = link.p_t;
    match (ch_active, partner) {
        (false, None) => (0.0, 0.0),
        (true, None) => (oma_rate(b, p, gamma_ch), 0.0),
        (false, Some(g)) => (0.0, oma_rate(b, p, g)),
        (true, Some(g)) => match mode {
            PairingMode::ChWeak => {
                let (r_strong, r_weak) = noma_rates(b, p, g, p, gamma_ch);
                (r_weak, r_strong)
            }
            PairingMode::ChStrong => noma_rates(b, p, gamma_ch, p, g),
        },
    }
}

/// Assemble the outcome of one RB; `reward(device, rate)` scores a transmission.
#[allow(clippy::too_many_arguments)]
pub fn settle(
    link: &LinkParams,
    rb_index: usize,
    grant: Grant,
    partner: Option<usize>,
    mode: PairingMode,
    mode_switched: bool,
    gamma: &[f64],
    reward: &impl Fn(usize, f64) -> f64,
) -> PairingOutcome {
    let (r_ch, r_nch) = pair_rates(link, gamma[grant.ch_id], grant.ch_active, partner.map(|n| gamma[n]), mode);
    PairingOutcome {
        rb_index,
        ch_id: grant.ch_id,
        ch_was_active: grant.ch_active,
        nch_id: partner,
        mode_used: mode,
        mode_switched,
        r_ch,
        r_nch,
        theta_ch: if grant.ch_active { reward(grant.ch_id, r_ch) } else { 0.0 },
        theta_nch: partner.map_or(0.0, |n| reward(n, r_nch)),
        wasted: !grant.ch_active && partner.is_none(),
    }
}

/// Pairing-protocol settings.
#[derive(Debug, Clone, Copy)]
pub struct PairingPolicy {
    pub default_mode: PairingMode,
    pub mode_switch: bool,
}

/// Run the distributed pairing over the granted RBs (in RB order).
///
/// Two sub-streams are split off `stream` up front, one per round, so the
/// first round consumes identical randomness whether or not mode switching
/// is enabled.
#[allow(clippy::too_many_arguments)]
pub fn run_pairing(
    grants: &[Grant],
    active_nchs: &[usize],
    gamma: &[f64],
    positions: &[Point],
    link: &LinkParams,
    policy: PairingPolicy,
    stream: &mut Stream,
    reward: impl Fn(usize, f64) -> f64,
) -> Vec<PairingOutcome> {
    let mut round_streams = [Stream::seed_from_u64(stream.random()), Stream::seed_from_u64(stream.random())];
    let ch_ids: Vec<usize> = grants.iter().map(|g| g.ch_id).collect();
    let association = associate(active_nchs, &ch_ids, positions);

    let mut partner: Vec<Option<usize>> = vec![None; grants.len()];
    let mut mode = vec![policy.default_mode; grants.len()];
    let mut nch_taken = vec![false; active_nchs.len()];

    let rounds: &[(PairingMode, usize)] = if policy.mode_switch {
        &[(policy.default_mode, 0), (policy.default_mode.opposite(), 1)]
    } else {
        &[(policy.default_mode, 0)]
    };
    for &(round_mode, round) in rounds {
        let rng = &mut round_streams[round];
        for (slot, grant) in grants.iter().enumerate() {
            if partner[slot].is_some() {
                continue;
            }
            let request = PairingRequest::new(grant.ch_id, gamma[grant.ch_id], round_mode, link.p_t, link.p_tol);
            let responders: Vec<usize> = (0..active_nchs.len())
                .filter(|&k| {
                    !nch_taken[k] && association[k] == Some(slot) && eligible(gamma[active_nchs[k]], &request)
                })
                .collect();
            if responders.is_empty() {
                continue;
            }
            let k = responders[rng.random_range(0..responders.len())];
            nch_taken[k] = true;
            partner[slot] = Some(active_nchs[k]);
            mode[slot] = round_mode;
        }
    }

    grants
        .iter()
        .enumerate()
        .map(|(slot, &grant)| {
            let switched = partner[slot].is_some() && mode[slot] != policy.default_mode;
            settle(link, slot, grant, partner[slot], mode[slot], switched, gamma, &reward)
        })
        .collect()
}
