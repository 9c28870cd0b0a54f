//! Maximum-weight bipartite matching between CHs and nCHs.
//!
//! The pairing problem (each CH with at most one nCH and vice versa, only
//! SIC-compatible pairs scoring) is an assignment problem. It is solved with
//! the shortest-augmenting-path Hungarian method in O(rows^2 cols), plus an
//! exhaustive solver for small instances used as a cross-check.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Weights `w[c][n]` and SIC eligibility for one cycle's pairing problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchingInstance {
    pub ch_ids: Vec<usize>,
    pub nch_ids: Vec<usize>,
    pub weights: Vec<Vec<f64>>,
    pub eligibility: Vec<Vec<bool>>,
}

impl MatchingInstance {
    pub fn new(ch_ids: Vec<usize>, nch_ids: Vec<usize>, weights: Vec<Vec<f64>>, eligibility: Vec<Vec<bool>>) -> Self {
        debug_assert_eq!(weights.len(), ch_ids.len());
        debug_assert!(weights.iter().all(|r| r.len() == nch_ids.len()));
        debug_assert_eq!(eligibility.len(), ch_ids.len());
        Self {
            ch_ids,
            nch_ids,
            weights,
            eligibility,
        }
    }

    /// Weight with ineligible pairs zeroed.
    pub fn effective_weight(&self, c: usize, n: usize) -> f64 {
        if self.eligibility[c][n] {
            self.weights[c][n]
        } else {
            0.0
        }
    }

    fn rows(&self) -> usize {
        self.ch_ids.len()
    }

    fn cols(&self) -> usize {
        self.nch_ids.len()
    }
}

/// A set of `(ch_slot, nch_slot)` pairs, indices into the instance lists.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matching {
    pub pairs: Vec<(usize, usize)>,
    pub objective: f64,
}

impl Matching {
    /// Partner slot of each CH slot.
    pub fn partner_of(&self, n_chs: usize) -> Vec<Option<usize>> {
        let mut out = vec![None; n_chs];
        for &(c, n) in &self.pairs {
            out[c] = Some(n);
        }
        out
    }

    /// Check one-to-one usage and that every pair is eligible with positive weight.
    pub fn is_feasible(&self, inst: &MatchingInstance) -> bool {
        let mut row = vec![false; inst.rows()];
        let mut col = vec![false; inst.cols()];
        self.pairs.iter().all(|&(c, n)| {
            let fresh = !row[c] && !col[n];
            row[c] = true;
            col[n] = true;
            fresh && inst.eligibility[c][n] && inst.weights[c][n] > 0.0
        })
    }
}

fn objective_of(inst: &MatchingInstance, pairs: &[(usize, usize)]) -> f64 {
    pairs.iter().fold(0.0, |acc, &(c, n)| acc + inst.effective_weight(c, n))
}

/// Minimum-cost assignment of every row of an `n x m` matrix (`n <= m`).
/// Returns the column assigned to each row.
fn hungarian_min(cost: &[Vec<f64>], n: usize, m: usize) -> Vec<usize> {
    debug_assert!(n <= m);
    // 1-based potentials; column 0 is the virtual source
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; m + 1];
    let mut owner = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    for i in 1..=n {
        owner[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=m {
                if used[j] {
                    continue;
                }
                let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![0; n];
    for j in 1..=m {
        if owner[j] != 0 {
            assignment[owner[j] - 1] = j - 1;
        }
    }
    assignment
}

/// Maximum-weight one-to-one pairing. Pairs carrying zero effective weight
/// are left out; the objective is summed in CH order.
pub fn optimal_pairing(inst: &MatchingInstance) -> Matching {
    let (rows, cols) = (inst.rows(), inst.cols());
    if rows == 0 || cols == 0 {
        return Matching {
            pairs: Vec::new(),
            objective: 0.0,
        };
    }
    // nonnegative weights: a max-weight matching saturating the smaller side exists
    let mut pairs: Vec<(usize, usize)> = if rows <= cols {
        let cost: Vec<Vec<f64>> = (0..rows)
            .map(|c| (0..cols).map(|n| -inst.effective_weight(c, n)).collect())
            .collect();
        hungarian_min(&cost, rows, cols).into_iter().enumerate().collect()
    } else {
        let cost: Vec<Vec<f64>> = (0..cols)
            .map(|n| (0..rows).map(|c| -inst.effective_weight(c, n)).collect())
            .collect();
        hungarian_min(&cost, cols, rows)
            .into_iter()
            .enumerate()
            .map(|(n, c)| (c, n))
            .collect()
    };
    pairs.retain(|&(c, n)| inst.effective_weight(c, n) > 0.0);
    pairs.sort_unstable();
    let objective = objective_of(inst, &pairs);
    Matching { pairs, objective }
}

pub const BRUTE_FORCE_MAX_CHS: usize = 6;
pub const BRUTE_FORCE_MAX_NCHS: usize = 8;

/// Exhaustive search over every injective partial assignment.
pub fn brute_force_matching(inst: &MatchingInstance) -> Result<f64> {
    if inst.rows() > BRUTE_FORCE_MAX_CHS || inst.cols() > BRUTE_FORCE_MAX_NCHS {
        return Err(Error::InstanceTooLarge {
            chs: inst.rows(),
            nchs: inst.cols(),
        });
    }
    fn search(inst: &MatchingInstance, c: usize, used: &mut [bool], acc: f64) -> f64 {
        if c == inst.rows() {
            return acc;
        }
        let mut best = search(inst, c + 1, used, acc);
        for n in 0..inst.cols() {
            if used[n] || !inst.eligibility[c][n] {
                continue;
            }
            used[n] = true;
            best = best.max(search(inst, c + 1, used, acc + inst.weights[c][n]));
            used[n] = false;
        }
        best
    }
    Ok(search(inst, 0, &mut vec![false; inst.cols()], 0.0))
}
