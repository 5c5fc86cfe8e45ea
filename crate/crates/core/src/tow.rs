//! Tug-of-war adaptation of the polarization adjusters.
//!
//! A win on the left subtree pulls the PA value down by Δ, a win on the right
//! pushes it up; a loss pushes the value towards the other side by Ω. Every
//! update also decays the old value by α. Ω couples the two sides through the
//! estimated reward probabilities of each child subtree.

use std::ops::Range;

use crate::optics::{PaState, RoutingTree, Side};

/// Default ceiling on Ω, also used when the estimates sum to 2.
///
/// Larger than any converged Ω of the four-armed problems (at most 4), small
/// enough that one early loss cannot throw a 101-step adjuster across its range.
pub const DEFAULT_OMEGA_CAP: f64 = 10.0;

/// Per-arm play and win counts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArmStats {
    plays: Vec<u64>,
    wins: Vec<u64>,
}

impl ArmStats {
    pub fn new(arms: usize) -> Self {
        ArmStats {
            plays: vec![0; arms],
            wins: vec![0; arms],
        }
    }

    /// Builds stats from explicit counts. Returns `None` when lengths differ
    /// or some arm has more wins than plays.
    pub fn from_counts(plays: Vec<u64>, wins: Vec<u64>) -> Option<Self> {
        if plays.len() != wins.len() || wins.iter().zip(&plays).any(|(w, p)| w > p) {
            return None;
        }
        Some(ArmStats { plays, wins })
    }

    pub fn arms(&self) -> usize {
        self.plays.len()
    }

    pub fn plays(&self) -> &[u64] {
        &self.plays
    }

    pub fn wins(&self) -> &[u64] {
        &self.wins
    }

    pub fn total_plays(&self) -> u64 {
        self.plays.iter().sum()
    }

    pub fn record(&mut self, arm: usize, rewarded: bool) {
        self.plays[arm] += 1;
        if rewarded {
            self.wins[arm] += 1;
        }
    }

    pub fn reset(&mut self) {
        self.plays.fill(0);
        self.wins.fill(0);
    }
}

/// Result of one slot play.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Outcome {
    /// Zero-based arm index.
    pub arm: usize,
    pub rewarded: bool,
}

/// Applies one tug-of-war step to an adjuster. `side` is the child subtree
/// that contains the played arm.
pub fn update_pa(pa: &PaState, side: Side, rewarded: bool) -> PaState {
    let pull = match (side, rewarded) {
        (Side::Left, true) => -pa.delta,
        (Side::Right, true) => pa.delta,
        (Side::Left, false) => pa.omega,
        (Side::Right, false) => -pa.omega,
    };
    PaState {
        value: pull + pa.alpha * pa.value,
        ..pa.clone()
    }
}

/// Pooled win rate over a set of arms, or `None` if none of them was played.
pub fn estimate_subtree_prob(stats: &ArmStats, arms: Range<usize>) -> Option<f64> {
    let plays: u64 = stats.plays[arms.clone()].iter().sum();
    if plays == 0 {
        return None;
    }
    let wins: u64 = stats.wins[arms].iter().sum();
    Some(wins as f64 / plays as f64)
}

/// Loss increment from the two child estimates.
///
/// Falls back to 1 (the initial value) while either side is unplayed and to `omega_cap` when the
/// estimates sum to 2 or more. Never exceeds `omega_cap`.
pub fn compute_omega(left: Option<f64>, right: Option<f64>, omega_cap: f64) -> f64 {
    let (Some(left), Some(right)) = (left, right) else {
        return 1.0_f64.min(omega_cap);
    };
    let sum = left + right;
    let denom = 2.0 - sum;
    if denom <= 0.0 {
        omega_cap
    } else {
        (sum / denom).min(omega_cap)
    }
}

/// Recomputes Ω at every internal node from its two child subtrees.
pub fn refresh_all_omegas(tree: &mut RoutingTree, stats: &ArmStats, omega_cap: f64) {
    for id in 0..tree.node_count() {
        let left = estimate_subtree_prob(stats, tree.subtree_leaves(id, Side::Left));
        let right = estimate_subtree_prob(stats, tree.subtree_leaves(id, Side::Right));
        tree.node_mut(id).omega = compute_omega(left, right, omega_cap);
    }
}

/// Set of node ids whose PA values must not move.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeSet {
    mask: Vec<bool>,
}

impl NodeSet {
    pub fn empty(node_count: usize) -> Self {
        NodeSet {
            mask: vec![false; node_count],
        }
    }

    pub fn from_ids(node_count: usize, ids: impl IntoIterator<Item = usize>) -> Self {
        let mut set = Self::empty(node_count);
        for id in ids {
            set.mask[id] = true;
        }
        set
    }

    /// Every node except those on `level`.
    pub fn all_but_level(tree: &RoutingTree, level: u32) -> Self {
        let keep = tree.level_nodes(level);
        Self::from_ids(
            tree.node_count(),
            (0..tree.node_count()).filter(|id| !keep.contains(id)),
        )
    }

    pub fn contains(&self, id: usize) -> bool {
        self.mask.get(id).copied().unwrap_or(false)
    }

    pub fn is_empty(&self) -> bool {
        !self.mask.iter().any(|&b| b)
    }
}

/// Records the outcome, moves every non-frozen adjuster on the arm's path,
/// then refreshes Ω everywhere.
///
/// The Ω used for a loss is the one computed at the end of the previous cycle.
pub fn apply_outcome(
    tree: &mut RoutingTree,
    stats: &mut ArmStats,
    outcome: Outcome,
    frozen: &NodeSet,
    omega_cap: f64,
) {
    stats.record(outcome.arm, outcome.rewarded);
    let path: Vec<(usize, Side)> = tree.path(outcome.arm).collect();
    for (id, side) in path {
        if frozen.contains(id) {
            continue;
        }
        let updated = update_pa(tree.node(id), side, outcome.rewarded);
        *tree.node_mut(id) = updated;
    }
    refresh_all_omegas(tree, stats, omega_cap);
}
