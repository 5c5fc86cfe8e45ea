//! Simulator for a tree of polarization adjusters that routes single photons
//! to slot machines and adapts by tug-of-war dynamics.
//!
//! - [`optics`]: PA rounding, plate angles, branch and leaf probabilities, photon sampling.
//! - [`tow`]: win/loss updates, Ω estimation, per-cycle tree update.
//! - [`bandit`]: Bernoulli slot machines.
//! - [`engine`]: decision loop, tournament schedule, replication, CDR curves, sweeps.
//! - [`figures`]: built-in reproductions of the four-armed experiments and their checks.

pub mod bandit;
pub mod engine;
pub mod error;
pub mod figures;
pub mod optics;
pub mod problems;
pub mod tow;

pub use bandit::BanditEnv;
pub use engine::{
    run_cycle, run_experiment, run_experiment_with, run_trial, sweep_resolutions, CdrCurves,
    CycleRecord, ExperimentConfig, ExperimentResult, ResolutionSpec, Strategy, SweepPoint,
    TrialTrace,
};
pub use error::{Error, Result};
pub use optics::{
    branch_prob_left, leaf_distribution, pos_angle, round_clamp, sample_leaf, PaState, Resolution,
    RoutingTree, Side,
};
pub use tow::{
    apply_outcome, compute_omega, estimate_subtree_prob, refresh_all_omegas, update_pa, ArmStats,
    NodeSet, Outcome,
};
