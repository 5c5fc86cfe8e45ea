//! Polarization-routing tree.
//!
//! Each internal node holds a polarization adjuster (PA). Its value is rounded
//! to one of `N` half-wave-plate steps, the plate rotates the 45° input
//! polarization, and the beam splitter behind it sends the photon left with the
//! Malus-law probability. A photon therefore reaches leaf `j` with the product
//! of branch probabilities along the root-to-leaf path.
//!
//! Nodes are stored breadth-first with the root at index 0, so the children of
//! node `i` are `2i + 1` (left) and `2i + 2` (right). Leaves are numbered left
//! to right from 0. Negative PA values favour the left branch at every node.

use std::f64::consts::PI;
use std::ops::Range;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of discrete polarization steps per adjuster. Always odd and ≥ 3.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Resolution(u32);

impl Resolution {
    pub const DEFAULT: Resolution = Resolution(7);

    pub fn new(steps: u32) -> Result<Self> {
        if steps < 3 || steps.is_multiple_of(2) {
            return Err(Error::InvalidResolution(steps));
        }
        Ok(Resolution(steps))
    }

    pub fn steps(self) -> u32 {
        self.0
    }

    /// Largest admissible rounded PA magnitude, `(N - 1) / 2`.
    pub fn n_max(self) -> i32 {
        ((self.0 - 1) / 2) as i32
    }

    /// Mechanical step between adjacent plate orientations, in degrees.
    pub fn step_deg(self) -> f64 {
        45.0 / f64::from(self.0 - 1)
    }

    fn check(self, n: i32) -> Result<()> {
        let n_max = self.n_max();
        if n.abs() > n_max {
            return Err(Error::StepOutOfRange { n, n_max });
        }
        Ok(())
    }
}

impl TryFrom<u32> for Resolution {
    type Error = Error;

    fn try_from(steps: u32) -> Result<Self> {
        Resolution::new(steps)
    }
}

impl From<Resolution> for u32 {
    fn from(r: Resolution) -> u32 {
        r.0
    }
}

impl std::fmt::Display for Resolution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Which child subtree of a node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

/// One polarization adjuster.
#[derive(Clone, Debug, PartialEq)]
pub struct PaState {
    /// Continuous PA value. Unbounded; clamping happens only when rounding.
    pub value: f64,
    /// Increment applied on a win.
    pub delta: f64,
    /// Forgetting factor in (0, 1].
    pub alpha: f64,
    /// Loss increment, refreshed from play statistics once per cycle.
    pub omega: f64,
    pub resolution: Resolution,
}

impl PaState {
    /// Fresh adjuster at PA value 0 with Ω = 1.
    pub fn new(resolution: Resolution, delta: f64, alpha: f64) -> Result<Self> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::config(format!("delta must be > 0, got {delta}")));
        }
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::config(format!(
                "alpha must be in (0, 1], got {alpha}"
            )));
        }
        Ok(PaState {
            value: 0.0,
            delta,
            alpha,
            omega: 1.0,
            resolution,
        })
    }

    pub fn rounded(&self) -> i32 {
        round_clamp(self.value, self.resolution)
    }

    /// Probability that a photon reaching this node leaves through the left branch.
    pub fn left_probability(&self) -> f64 {
        left_probability_unchecked(self.rounded(), self.resolution)
    }
}

/// Rounds a PA value to the nearest step (halves away from zero) and clamps
/// it into `[-n_max, n_max]`, keeping the sign.
pub fn round_clamp(value: f64, resolution: Resolution) -> i32 {
    let n_max = resolution.n_max();
    if value.is_nan() {
        return 0;
    }
    // f64::round rounds halves away from zero
    let r = value.round();
    if r >= f64::from(n_max) {
        n_max
    } else if r <= -f64::from(n_max) {
        -n_max
    } else {
        r as i32
    }
}

/// Half-wave-plate mechanical orientation in degrees for rounded PA value `n`.
pub fn pos_angle(n: i32, resolution: Resolution) -> Result<f64> {
    resolution.check(n)?;
    Ok(-resolution.step_deg() * f64::from(n))
}

/// Probability of the left branch for rounded PA value `n`.
///
/// The plate at `pos_angle(n)` turns the 45° input by twice that angle, so the
/// left (transmitted) port sees `cos²(45° + n·90°/(N-1))`. Written here as
/// `(1 - sin(n·π/(N-1))) / 2`, which is exact at 0 and at both endpoints.
pub fn branch_prob_left(n: i32, resolution: Resolution) -> Result<f64> {
    resolution.check(n)?;
    Ok(left_probability_unchecked(n, resolution))
}

fn left_probability_unchecked(n: i32, resolution: Resolution) -> f64 {
    let arg = f64::from(n) * PI / f64::from(resolution.steps() - 1);
    (0.5 * (1.0 - arg.sin())).clamp(0.0, 1.0)
}

/// Binary tree of polarization adjusters routing photons to `2^depth` arms.
#[derive(Clone, Debug, PartialEq)]
pub struct RoutingTree {
    depth: u32,
    nodes: Vec<PaState>,
}

impl RoutingTree {
    /// Largest supported depth; keeps leaf indices and bit tricks in range.
    pub const MAX_DEPTH: u32 = 20;

    /// Tree with one resolution for every node.
    pub fn uniform(depth: u32, resolution: Resolution, delta: f64, alpha: f64) -> Result<Self> {
        check_depth(depth)?;
        let count = (1usize << depth) - 1;
        Self::with_resolutions(depth, &vec![resolution; count], delta, alpha)
    }

    /// Tree with an explicit resolution per node, in breadth-first order.
    pub fn with_resolutions(
        depth: u32,
        resolutions: &[Resolution],
        delta: f64,
        alpha: f64,
    ) -> Result<Self> {
        check_depth(depth)?;
        let count = (1usize << depth) - 1;
        if resolutions.len() != count {
            return Err(Error::config(format!(
                "per-node resolution list has {} entries, depth {depth} needs {count}",
                resolutions.len()
            )));
        }
        let nodes = resolutions
            .iter()
            .map(|&r| PaState::new(r, delta, alpha))
            .collect::<Result<Vec<_>>>()?;
        Ok(RoutingTree { depth, nodes })
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn leaf_count(&self) -> usize {
        1 << self.depth
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[PaState] {
        &self.nodes
    }

    pub fn nodes_mut(&mut self) -> &mut [PaState] {
        &mut self.nodes
    }

    pub fn node(&self, id: usize) -> &PaState {
        &self.nodes[id]
    }

    pub fn node_mut(&mut self, id: usize) -> &mut PaState {
        &mut self.nodes[id]
    }

    pub fn values(&self) -> Vec<f64> {
        self.nodes.iter().map(|n| n.value).collect()
    }

    pub fn rounded_values(&self) -> Vec<i32> {
        self.nodes.iter().map(PaState::rounded).collect()
    }

    /// Level of a node, root = 0.
    pub fn node_level(&self, id: usize) -> u32 {
        usize::BITS - 1 - (id + 1).leading_zeros()
    }

    /// Node ids at a level, root = level 0.
    pub fn level_nodes(&self, level: u32) -> Range<usize> {
        let start = (1usize << level) - 1;
        start..(start << 1) + 1
    }

    /// The internal nodes crossed on the way to `leaf`, root first, paired
    /// with the branch taken at each.
    pub fn path(&self, leaf: usize) -> impl Iterator<Item = (usize, Side)> + '_ {
        let depth = self.depth;
        (0..depth).map(move |level| {
            let node = (1usize << level) - 1 + (leaf >> (depth - level));
            let side = if (leaf >> (depth - 1 - level)) & 1 == 0 {
                Side::Left
            } else {
                Side::Right
            };
            (node, side)
        })
    }

    /// Leaves below the given child of `node`.
    pub fn subtree_leaves(&self, node: usize, side: Side) -> Range<usize> {
        let level = self.node_level(node);
        let position = node + 1 - (1usize << level);
        let half = 1usize << (self.depth - level - 1);
        let start = position * 2 * half
            + match side {
                Side::Left => 0,
                Side::Right => half,
            };
        start..start + half
    }
}

fn check_depth(depth: u32) -> Result<()> {
    if depth == 0 || depth > RoutingTree::MAX_DEPTH {
        return Err(Error::config(format!(
            "depth must be in 1..={}, got {depth}",
            RoutingTree::MAX_DEPTH
        )));
    }
    Ok(())
}

/// Detection probability of every leaf, left to right.
pub fn leaf_distribution(tree: &RoutingTree) -> Vec<f64> {
    let left: Vec<f64> = tree.nodes.iter().map(PaState::left_probability).collect();
    (0..tree.leaf_count())
        .map(|leaf| {
            tree.path(leaf)
                .map(|(node, side)| match side {
                    Side::Left => left[node],
                    Side::Right => 1.0 - left[node],
                })
                .product()
        })
        .collect()
}

/// Routes one photon through the tree and returns the leaf it is detected at.
///
/// Draws exactly one uniform variate per tree level.
pub fn sample_leaf<R: Rng + ?Sized>(tree: &RoutingTree, rng: &mut R) -> usize {
    let mut node = 0;
    let mut leaf = 0;
    for _ in 0..tree.depth {
        let u: f64 = rng.gen();
        let go_right = u >= tree.nodes[node].left_probability();
        leaf = (leaf << 1) | usize::from(go_right);
        node = 2 * node + 1 + usize::from(go_right);
    }
    leaf
}
