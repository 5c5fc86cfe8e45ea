use std::path::Path;

use anyhow::{Context, Result};
use photon_tow::engine::SEED_DERIVATION;
use photon_tow::ExperimentConfig;
use serde::{Deserialize, Serialize};

/// Random streams used by one trial.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrialSeed {
    pub trial: usize,
    pub photon_stream: u64,
    pub slot_stream: u64,
}

/// Everything needed to regenerate the outputs of one command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub configs: Vec<ExperimentConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snapshot_cycle: Option<usize>,
    pub master_seed: u64,
    pub seed_derivation: String,
    pub trial_seeds: Vec<TrialSeed>,
    pub wall_clock_seconds: f64,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &str, configs: Vec<ExperimentConfig>, master_seed: u64) -> Self {
        let trials = configs.iter().map(|c| c.replications).max().unwrap_or(0);
        RunManifest {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            configs,
            snapshot_cycle: None,
            master_seed,
            seed_derivation: SEED_DERIVATION.to_string(),
            trial_seeds: (0..trials)
                .map(|trial| TrialSeed {
                    trial,
                    photon_stream: 2 * trial as u64,
                    slot_stream: 2 * trial as u64 + 1,
                })
                .collect(),
            wall_clock_seconds: 0.0,
            outputs: Vec::new(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    #[cfg(test)]
    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?).with_context(|| format!("writing {}", path.display()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use photon_tow::problems::CASE3;
    use photon_tow::Strategy;

    #[test]
    fn json_round_trip_is_byte_identical() {
        let cfg = ExperimentConfig::new(CASE3.to_vec(), 30, 4)
            .with_seed(u64::MAX)
            .with_strategy(Strategy::Tournament {
                round1_cycles: 15,
                reset_stats: true,
            });
        let mut m = RunManifest::new("run", vec![cfg], u64::MAX);
        m.wall_clock_seconds = 0.123456789012345;
        m.snapshot_cycle = Some(30);
        m.outputs = vec!["curves.csv".into(), "manifest.json".into()];
        let text = m.to_json().unwrap();
        let back = RunManifest::from_json(&text).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.to_json().unwrap(), text);
        assert_eq!(back.trial_seeds.len(), 4);
        assert_eq!(back.trial_seeds[3].slot_stream, 7);
    }
}
