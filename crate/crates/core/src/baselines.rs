//! Oracle reference schedulers.
//!
//! `best_oma` grants the resource blocks to the truly active devices with the
//! highest realized rewards. The quasi-optimal NOMA reference keeps a given
//! set of CHs and pairs them optimally via maximum-weight matching.

use crate::channel::oma_rate;
use crate::matching::{optimal_pairing, MatchingInstance};
use crate::pairing::{settle, Grant, LinkParams, PairingMode, PairingOutcome};

/// The `m` devices with the largest rewards, ties to the lower id.
pub fn best_oma(rewards_if_served: &[(usize, f64)], m: usize) -> Vec<usize> {
    let mut ranked = rewards_if_served.to_vec();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    ranked.truncate(m);
    ranked.into_iter().map(|(id, _)| id).collect()
}

/// Build the pairing instance for the given CHs. Pair weights are the sum
/// of both devices' standalone (OMA-rate) rewards, an idle CH contributing
/// nothing; eligibility is the SIC power gap on this cycle's gains.
pub fn build_instance(
    grants: &[Grant],
    active_nchs: &[usize],
    gamma: &[f64],
    link: &LinkParams,
    reward: &impl Fn(usize, f64) -> f64,
) -> MatchingInstance {
    let standalone = |id: usize| reward(id, oma_rate(link.bandwidth_hz, link.p_t, gamma[id]));
    let theta_n: Vec<f64> = active_nchs.iter().map(|&n| standalone(n)).collect();
    let mut weights = Vec::with_capacity(grants.len());
    let mut eligibility = Vec::with_capacity(grants.len());
    for g in grants {
        let theta_c = if g.ch_active { standalone(g.ch_id) } else { 0.0 };
        weights.push(theta_n.iter().map(|t| theta_c + t).collect());
        eligibility.push(
            active_nchs
                .iter()
                .map(|&n| (link.p_t * gamma[n] - link.p_t * gamma[g.ch_id]).abs() >= link.p_tol)
                .collect(),
        );
    }
    MatchingInstance::new(
        grants.iter().map(|g| g.ch_id).collect(),
        active_nchs.to_vec(),
        weights,
        eligibility,
    )
}

/// Optimal pairing for fixed CHs. Realized rates put the device with the
/// larger received power in the strong (decoded-first) role.
pub fn quasi_optimal_pairing(
    grants: &[Grant],
    active_nchs: &[usize],
    gamma: &[f64],
    link: &LinkParams,
    reward: impl Fn(usize, f64) -> f64,
) -> Vec<PairingOutcome> {
    let inst = build_instance(grants, active_nchs, gamma, link, &reward);
    let matching = optimal_pairing(&inst);
    let partners = matching.partner_of(grants.len());
    grants
        .iter()
        .enumerate()
        .map(|(slot, &grant)| {
            let partner = partners[slot].map(|k| active_nchs[k]);
            let mode = match partner {
                Some(n) if gamma[n] < gamma[grant.ch_id] => PairingMode::ChStrong,
                _ => PairingMode::ChWeak,
            };
            settle(link, slot, grant, partner, mode, false, gamma, &reward)
        })
        .collect()
}
