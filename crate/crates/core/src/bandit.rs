//! Bernoulli slot machines.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Sums closer than this count as tied.
const TIE_EPS: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct BanditEnv {
    reward_probs: Vec<f64>,
    rng: ChaCha8Rng,
}

impl BanditEnv {
    /// Arm count must be a power of two (≥ 2) so it fits a routing tree.
    pub fn new(reward_probs: Vec<f64>, rng: ChaCha8Rng) -> Result<Self> {
        validate_probs(&reward_probs)?;
        Ok(BanditEnv { reward_probs, rng })
    }

    pub fn seeded(reward_probs: Vec<f64>, seed: u64) -> Result<Self> {
        Self::new(reward_probs, ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn reward_probs(&self) -> &[f64] {
        &self.reward_probs
    }

    pub fn arms(&self) -> usize {
        self.reward_probs.len()
    }

    pub fn depth(&self) -> u32 {
        self.arms().trailing_zeros()
    }

    /// Plays one arm. Consumes exactly one uniform variate.
    pub fn pull(&mut self, arm: usize) -> Result<bool> {
        let p = *self.reward_probs.get(arm).ok_or(Error::ArmOutOfRange {
            arm,
            arms: self.arms(),
        })?;
        let u: f64 = self.rng.gen();
        Ok(u < p)
    }

    /// All arms sharing the highest reward probability.
    pub fn best_arm(&self) -> Vec<usize> {
        argmax_set(&self.reward_probs)
    }

    /// Subtrees at `level` (1 = the two halves) with the largest summed
    /// reward probability. Subtrees are numbered left to right from 0.
    pub fn best_group(&self, level: u32) -> Vec<usize> {
        argmax_set(&self.group_sums(level))
    }

    pub fn group_sums(&self, level: u32) -> Vec<f64> {
        let groups = 1usize << level.min(self.depth());
        let size = self.arms() / groups;
        self.reward_probs
            .chunks(size)
            .map(|c| c.iter().sum())
            .collect()
    }
}

pub(crate) fn validate_probs(probs: &[f64]) -> Result<()> {
    if probs.len() < 2 || !probs.len().is_power_of_two() {
        return Err(Error::config(format!(
            "reward_probs length must be a power of two >= 2, got {}",
            probs.len()
        )));
    }
    if let Some(p) = probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::config(format!(
            "reward probabilities must lie in [0, 1], got {p}"
        )));
    }
    Ok(())
}

fn argmax_set(xs: &[f64]) -> Vec<usize> {
    let best = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    xs.iter()
        .enumerate()
        .filter(|(_, &x)| best - x <= TIE_EPS)
        .map(|(i, _)| i)
        .collect()
}
