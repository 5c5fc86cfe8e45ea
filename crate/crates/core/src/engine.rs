//! Decision loop, strategies, replication and correct-decision-rate curves.
//!
//! One cycle: route a photon through the current tree, play the arm it lands
//! on, move the adjusters on its path, refresh Ω. A trial starts from zero
//! knowledge (all PA values 0, Ω = 1, no plays) and runs `cycles` cycles.
//! Trials are independent; each one owns two ChaCha8 streams derived from the
//! master seed and the trial index, so results do not depend on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bandit::{validate_probs, BanditEnv};
use crate::error::{Error, Result};
use crate::optics::{leaf_distribution, sample_leaf, Resolution, RoutingTree};
use crate::tow::{apply_outcome, ArmStats, NodeSet, Outcome, DEFAULT_OMEGA_CAP};

pub const DEFAULT_SNAPSHOT_CYCLE: usize = 30;

/// Resolution for the whole tree or one entry per node (breadth-first).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ResolutionSpec {
    Uniform(u32),
    PerNode(Vec<u32>),
}

impl Default for ResolutionSpec {
    fn default() -> Self {
        ResolutionSpec::Uniform(Resolution::DEFAULT.steps())
    }
}

impl ResolutionSpec {
    fn resolve(&self, node_count: usize) -> Result<Vec<Resolution>> {
        match self {
            ResolutionSpec::Uniform(n) => Ok(vec![Resolution::new(*n)?; node_count]),
            ResolutionSpec::PerNode(ns) => {
                if ns.len() != node_count {
                    return Err(Error::config(format!(
                        "per-node resolution list must have {node_count} entries, got {}",
                        ns.len()
                    )));
                }
                ns.iter().map(|&n| Resolution::new(n)).collect()
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Strategy {
    /// Every adjuster adapts every cycle.
    Standard,
    /// Adapt one tree level at a time, leaves first. Each of the first
    /// `depth - 1` phases lasts `round1_cycles`; the root phase takes the rest.
    Tournament {
        round1_cycles: usize,
        /// Clear play statistics when a phase ends instead of carrying them over.
        #[serde(default)]
        reset_stats: bool,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub reward_probs: Vec<f64>,
    #[serde(default = "default_depth")]
    pub depth: u32,
    #[serde(default)]
    pub resolution: ResolutionSpec,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_omega_cap")]
    pub omega_cap: f64,
    pub cycles: usize,
    #[serde(default = "default_replications")]
    pub replications: usize,
    #[serde(default = "default_strategy")]
    pub strategy: Strategy,
    #[serde(default)]
    pub master_seed: u64,
}

fn default_depth() -> u32 {
    2
}
fn default_delta() -> f64 {
    1.0
}
fn default_alpha() -> f64 {
    0.999
}
fn default_omega_cap() -> f64 {
    DEFAULT_OMEGA_CAP
}
fn default_replications() -> usize {
    1000
}
fn default_strategy() -> Strategy {
    Strategy::Standard
}

impl ExperimentConfig {
    /// Standard-strategy config with the default parameters.
    pub fn new(reward_probs: Vec<f64>, cycles: usize, replications: usize) -> Self {
        ExperimentConfig {
            depth: reward_probs.len().max(1).trailing_zeros(),
            reward_probs,
            resolution: ResolutionSpec::default(),
            delta: default_delta(),
            alpha: default_alpha(),
            omega_cap: default_omega_cap(),
            cycles,
            replications,
            strategy: Strategy::Standard,
            master_seed: 0,
        }
    }

    pub fn with_resolution(mut self, steps: u32) -> Self {
        self.resolution = ResolutionSpec::Uniform(steps);
        self
    }

    pub fn with_strategy(mut self, strategy: Strategy) -> Self {
        self.strategy = strategy;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.master_seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        validate_probs(&self.reward_probs)?;
        if self.depth == 0 || self.depth > RoutingTree::MAX_DEPTH {
            return Err(Error::config(format!(
                "depth must be in 1..={}, got {}",
                RoutingTree::MAX_DEPTH,
                self.depth
            )));
        }
        if self.reward_probs.len() != 1usize << self.depth {
            return Err(Error::config(format!(
                "2^depth must equal the number of reward_probs ({} != {})",
                1usize << self.depth,
                self.reward_probs.len()
            )));
        }
        self.resolution.resolve((1usize << self.depth) - 1)?;
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(Error::config(format!(
                "delta must be > 0, got {}",
                self.delta
            )));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::config(format!(
                "alpha must be in (0, 1], got {}",
                self.alpha
            )));
        }
        if !(self.omega_cap > 0.0 && self.omega_cap.is_finite()) {
            return Err(Error::config(format!(
                "omega_cap must be > 0, got {}",
                self.omega_cap
            )));
        }
        if self.cycles == 0 {
            return Err(Error::config("cycles must be >= 1"));
        }
        if self.replications == 0 {
            return Err(Error::config("replications must be >= 1"));
        }
        if let Strategy::Tournament { round1_cycles, .. } = self.strategy {
            let early = round1_cycles * (self.depth as usize - 1);
            if round1_cycles == 0 || early >= self.cycles {
                return Err(Error::config(format!(
                    "tournament round1_cycles must be >= 1 and leave cycles for the root round \
                     (round1_cycles = {round1_cycles}, cycles = {})",
                    self.cycles
                )));
            }
        }
        Ok(())
    }

    pub fn build_tree(&self) -> Result<RoutingTree> {
        let resolutions = self.resolution.resolve((1usize << self.depth) - 1)?;
        RoutingTree::with_resolutions(self.depth, &resolutions, self.delta, self.alpha)
    }
}

/// Random streams of one trial: `(photon routing, slot machines)`.
///
/// Both are ChaCha8 seeded from the master seed, on streams `2·trial` and
/// `2·trial + 1`.
pub fn trial_rngs(master_seed: u64, trial: usize) -> (ChaCha8Rng, ChaCha8Rng) {
    let mut photon = ChaCha8Rng::seed_from_u64(master_seed);
    photon.set_stream(2 * trial as u64);
    let mut slots = ChaCha8Rng::seed_from_u64(master_seed);
    slots.set_stream(2 * trial as u64 + 1);
    (photon, slots)
}

pub const SEED_DERIVATION: &str =
    "ChaCha8Rng::seed_from_u64(master_seed); photon stream = 2*trial, slot-machine stream = 2*trial+1";

/// One phase of the schedule: from `start` (0-based cycle) on, freeze `frozen`.
#[derive(Clone, Debug)]
struct Phase {
    start: usize,
    frozen: NodeSet,
}

fn schedule(config: &ExperimentConfig, tree: &RoutingTree) -> Vec<Phase> {
    match config.strategy {
        Strategy::Standard => vec![Phase {
            start: 0,
            frozen: NodeSet::empty(tree.node_count()),
        }],
        Strategy::Tournament { round1_cycles, .. } => (0..tree.depth())
            .map(|k| Phase {
                start: k as usize * round1_cycles,
                frozen: NodeSet::all_but_level(tree, tree.depth() - 1 - k),
            })
            .collect(),
    }
}

/// State of the system as seen by the photon of one cycle, plus what happened.
#[derive(Clone, Debug, PartialEq)]
pub struct CycleRecord {
    /// Zero-based arm index.
    pub arm: usize,
    pub rewarded: bool,
    /// PA values at decision time, breadth-first.
    pub pa_values: Vec<f64>,
    pub rounded: Vec<i32>,
    pub leaf_distribution: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrialTrace {
    pub trial: usize,
    pub records: Vec<CycleRecord>,
}

/// Runs one decision cycle in place and returns its record.
pub fn run_cycle(
    tree: &mut RoutingTree,
    env: &mut BanditEnv,
    stats: &mut ArmStats,
    frozen: &NodeSet,
    photon_rng: &mut ChaCha8Rng,
    omega_cap: f64,
) -> CycleRecord {
    let pa_values = tree.values();
    let rounded = tree.rounded_values();
    let dist = leaf_distribution(tree);
    let arm = sample_leaf(tree, photon_rng);
    let rewarded = env.pull(arm).expect("tree and environment arity agree");
    apply_outcome(tree, stats, Outcome { arm, rewarded }, frozen, omega_cap);
    CycleRecord {
        arm,
        rewarded,
        pa_values,
        rounded,
        leaf_distribution: dist,
    }
}

/// Runs one trial from zero knowledge.
pub fn run_trial(config: &ExperimentConfig, trial: usize) -> Result<TrialTrace> {
    config.validate()?;
    Ok(run_trial_unchecked(config, trial))
}

fn run_trial_unchecked(config: &ExperimentConfig, trial: usize) -> TrialTrace {
    let mut tree = config.build_tree().expect("validated config");
    let (mut photon_rng, slot_rng) = trial_rngs(config.master_seed, trial);
    let mut env = BanditEnv::new(config.reward_probs.clone(), slot_rng).expect("validated config");
    let mut stats = ArmStats::new(tree.leaf_count());
    let phases = schedule(config, &tree);
    let reset_stats = matches!(
        config.strategy,
        Strategy::Tournament {
            reset_stats: true,
            ..
        }
    );

    let mut phase = 0;
    let mut records = Vec::with_capacity(config.cycles);
    for cycle in 0..config.cycles {
        while phase + 1 < phases.len() && phases[phase + 1].start == cycle {
            phase += 1;
            if reset_stats {
                stats.reset();
                crate::tow::refresh_all_omegas(&mut tree, &stats, config.omega_cap);
            }
        }
        records.push(run_cycle(
            &mut tree,
            &mut env,
            &mut stats,
            &phases[phase].frozen,
            &mut photon_rng,
            config.omega_cap,
        ));
    }
    TrialTrace { trial, records }
}

/// Correct-decision-rate curves averaged over trials. Index 0 is cycle 1.
#[derive(Clone, Debug, PartialEq)]
pub struct CdrCurves {
    pub replications: usize,
    /// Fraction of trials choosing a best arm.
    pub fine_cdr: Vec<f64>,
    /// `coarse_cdr[t][l - 1]`: fraction of trials whose arm lies in a best
    /// subtree at level `l`, for `l` in `1..depth`.
    pub coarse_cdr: Vec<Vec<f64>>,
    /// `mean_pa[t][node]`: PA value at decision time averaged over trials.
    pub mean_pa: Vec<Vec<f64>>,
}

struct TrialSummary {
    trial: usize,
    arms: Vec<usize>,
    pa: Vec<Vec<f64>>,
}

impl From<&TrialTrace> for TrialSummary {
    fn from(t: &TrialTrace) -> Self {
        TrialSummary {
            trial: t.trial,
            arms: t.records.iter().map(|r| r.arm).collect(),
            pa: t.records.iter().map(|r| r.pa_values.clone()).collect(),
        }
    }
}

impl CdrCurves {
    /// Aggregates traces in trial-index order, whatever order they arrive in.
    pub fn from_traces(reward_probs: &[f64], traces: &[TrialTrace]) -> Result<Self> {
        let summaries: Vec<TrialSummary> = traces.iter().map(TrialSummary::from).collect();
        Self::aggregate(reward_probs, summaries)
    }

    fn aggregate(reward_probs: &[f64], mut trials: Vec<TrialSummary>) -> Result<Self> {
        let env = BanditEnv::seeded(reward_probs.to_vec(), 0)?;
        trials.sort_by_key(|t| t.trial);
        let n = trials.len();
        let cycles = trials.first().map_or(0, |t| t.arms.len());
        let depth = env.depth();
        let best_arm = env.best_arm();
        let coarse_levels: Vec<u32> = (1..depth).collect();
        let best_groups: Vec<Vec<usize>> =
            coarse_levels.iter().map(|&l| env.best_group(l)).collect();
        let nodes = trials
            .first()
            .map_or(0, |t| t.pa.first().map_or(0, Vec::len));

        let mut fine = vec![0usize; cycles];
        let mut coarse = vec![vec![0usize; coarse_levels.len()]; cycles];
        let mut pa_sum = vec![vec![0.0f64; nodes]; cycles];
        for t in &trials {
            if t.arms.len() != cycles {
                return Err(Error::config("traces have different cycle counts"));
            }
            for (c, &arm) in t.arms.iter().enumerate() {
                fine[c] += usize::from(best_arm.contains(&arm));
                for (i, &level) in coarse_levels.iter().enumerate() {
                    let group = arm >> (depth - level);
                    coarse[c][i] += usize::from(best_groups[i].contains(&group));
                }
                for (s, v) in pa_sum[c].iter_mut().zip(&t.pa[c]) {
                    *s += v;
                }
            }
        }
        let rate = |k: usize| k as f64 / n as f64;
        Ok(CdrCurves {
            replications: n,
            fine_cdr: fine.into_iter().map(rate).collect(),
            coarse_cdr: coarse
                .into_iter()
                .map(|row| row.into_iter().map(rate).collect())
                .collect(),
            mean_pa: pa_sum
                .into_iter()
                .map(|row| row.into_iter().map(|s| s / n as f64).collect())
                .collect(),
        })
    }

    pub fn cycles(&self) -> usize {
        self.fine_cdr.len()
    }

    /// Coarse curve at one level (1 = root split).
    pub fn coarse(&self, level: u32) -> Vec<f64> {
        self.coarse_cdr
            .iter()
            .map(|row| row[level as usize - 1])
            .collect()
    }

    /// Mean PA curve for one node.
    pub fn pa(&self, node: usize) -> Vec<f64> {
        self.mean_pa.iter().map(|row| row[node]).collect()
    }

    /// First cycle (1-based) where the fine rate reaches `threshold`.
    pub fn first_fine_at_least(&self, threshold: f64) -> Option<usize> {
        self.fine_cdr
            .iter()
            .position(|&r| r >= threshold)
            .map(|i| i + 1)
    }
}

/// Mean of `curve` over 1-based cycles `first..=last`.
pub fn window_mean(curve: &[f64], first: usize, last: usize) -> f64 {
    let slice = &curve[first - 1..last];
    slice.iter().sum::<f64>() / slice.len() as f64
}

#[derive(Clone, Debug)]
pub struct ExperimentResult {
    pub curves: CdrCurves,
    /// Present when traces were requested; ordered by trial index.
    pub traces: Option<Vec<TrialTrace>>,
}

/// Runs `config.replications` independent trials and aggregates them.
pub fn run_experiment(config: &ExperimentConfig) -> Result<CdrCurves> {
    Ok(run_experiment_with(config, false)?.curves)
}

pub fn run_experiment_with(
    config: &ExperimentConfig,
    keep_traces: bool,
) -> Result<ExperimentResult> {
    config.validate()?;
    let run = |trial: usize| {
        let trace = run_trial_unchecked(config, trial);
        let summary = TrialSummary::from(&trace);
        (summary, keep_traces.then_some(trace))
    };

    #[cfg(feature = "parallel")]
    let results: Vec<_> = {
        use rayon::prelude::*;
        (0..config.replications).into_par_iter().map(run).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let results: Vec<_> = (0..config.replications).map(run).collect();

    let (summaries, traces): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    let curves = CdrCurves::aggregate(&config.reward_probs, summaries)?;
    let traces = keep_traces.then(|| traces.into_iter().flatten().collect());
    Ok(ExperimentResult { curves, traces })
}

#[derive(Clone, Debug)]
pub struct SweepPoint {
    pub resolution: u32,
    pub curves: CdrCurves,
    pub snapshot_cycle: usize,
    pub fine_at_snapshot: f64,
    /// One entry per coarse level.
    pub coarse_at_snapshot: Vec<f64>,
}

/// Runs the base config once per uniform resolution, all with the same seed.
pub fn sweep_resolutions(
    base: &ExperimentConfig,
    resolutions: &[u32],
    snapshot_cycle: usize,
) -> Result<Vec<SweepPoint>> {
    if snapshot_cycle == 0 || snapshot_cycle > base.cycles {
        return Err(Error::config(format!(
            "snapshot cycle must be in 1..={}, got {snapshot_cycle}",
            base.cycles
        )));
    }
    for &r in resolutions {
        Resolution::new(r)?;
    }
    resolutions
        .iter()
        .map(|&resolution| {
            let config = base.clone().with_resolution(resolution);
            let curves = run_experiment(&config)?;
            let fine_at_snapshot = curves.fine_cdr[snapshot_cycle - 1];
            let coarse_at_snapshot = curves.coarse_cdr[snapshot_cycle - 1].clone();
            Ok(SweepPoint {
                resolution,
                curves,
                snapshot_cycle,
                fine_at_snapshot,
                coarse_at_snapshot,
            })
        })
        .collect()
}
