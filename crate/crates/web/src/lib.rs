//! wasm-bindgen bindings for the browser demo in `www/`.
//!
//! The exported functions are thin wrappers over plain Rust functions in
//! [`demo`], which the native tests exercise directly.

use wasm_bindgen::prelude::*;

pub mod demo {
    use photon_tow::engine::window_mean;
    use photon_tow::{
        leaf_distribution, run_experiment, sweep_resolutions, CdrCurves, ExperimentConfig,
        Resolution, RoutingTree, Strategy,
    };

    /// Leaf probabilities for PA values given breadth-first, root first.
    pub fn leaf_probabilities(pa_values: &[f64], resolution: u32) -> Result<Vec<f64>, String> {
        let nodes = pa_values.len();
        if nodes == 0 || !(nodes + 1).is_power_of_two() {
            return Err(format!("need 2^d - 1 PA values, got {nodes}"));
        }
        let depth = (nodes + 1).trailing_zeros();
        let res = Resolution::new(resolution).map_err(|e| e.to_string())?;
        let mut tree = RoutingTree::uniform(depth, res, 1.0, 1.0).map_err(|e| e.to_string())?;
        for (node, &v) in tree.nodes_mut().iter_mut().zip(pa_values) {
            node.value = v;
        }
        Ok(leaf_distribution(&tree))
    }

    pub fn config(
        reward_probs: &[f64],
        resolution: u32,
        cycles: usize,
        replications: usize,
        round1_cycles: usize,
        seed: u64,
    ) -> Result<ExperimentConfig, String> {
        let strategy = if round1_cycles == 0 {
            Strategy::Standard
        } else {
            Strategy::Tournament {
                round1_cycles,
                reset_stats: false,
            }
        };
        let config = ExperimentConfig::new(reward_probs.to_vec(), cycles, replications)
            .with_resolution(resolution)
            .with_strategy(strategy)
            .with_seed(seed);
        config.validate().map_err(|e| e.to_string())?;
        Ok(config)
    }

    pub fn simulate(config: &ExperimentConfig) -> Result<CdrCurves, String> {
        run_experiment(config).map_err(|e| e.to_string())
    }

    /// `(resolution, fine rate at snapshot, root-level coarse rate at snapshot,
    /// fine rate averaged over the last 10% of cycles)` per resolution.
    pub fn sweep(
        base: &ExperimentConfig,
        resolutions: &[u32],
        snapshot: usize,
    ) -> Result<Vec<(u32, f64, f64, f64)>, String> {
        let points = sweep_resolutions(base, resolutions, snapshot).map_err(|e| e.to_string())?;
        let tail_start = (base.cycles * 9 / 10).max(1);
        Ok(points
            .iter()
            .map(|p| {
                (
                    p.resolution,
                    p.fine_at_snapshot,
                    p.coarse_at_snapshot.first().copied().unwrap_or(f64::NAN),
                    window_mean(&p.curves.fine_cdr, tail_start, base.cycles),
                )
            })
            .collect())
    }
}

fn js_err(msg: String) -> JsError {
    JsError::new(&msg)
}

/// Leaf (arm) detection probabilities for the given PA values.
#[wasm_bindgen(js_name = leafProbabilities)]
pub fn leaf_probabilities(pa_values: Vec<f64>, resolution: u32) -> Result<Vec<f64>, JsError> {
    demo::leaf_probabilities(&pa_values, resolution).map_err(js_err)
}

/// Aggregated curves of one experiment, flattened for JavaScript.
#[wasm_bindgen]
pub struct Curves {
    inner: photon_tow::CdrCurves,
}

#[wasm_bindgen]
impl Curves {
    pub fn cycles(&self) -> usize {
        self.inner.cycles()
    }

    pub fn fine(&self) -> Vec<f64> {
        self.inner.fine_cdr.clone()
    }

    /// Coarse rate at `level` (1 = root split).
    pub fn coarse(&self, level: u32) -> Vec<f64> {
        if self.inner.coarse_cdr.first().map_or(0, Vec::len) < level as usize || level == 0 {
            return Vec::new();
        }
        self.inner.coarse(level)
    }

    /// Mean PA value of a node (0 = root).
    #[wasm_bindgen(js_name = meanPa)]
    pub fn mean_pa(&self, node: usize) -> Vec<f64> {
        if self.inner.mean_pa.first().map_or(0, Vec::len) <= node {
            return Vec::new();
        }
        self.inner.pa(node)
    }
}

/// Runs replicated trials. `round1_cycles == 0` selects the standard
/// strategy, anything else the tournament.
#[wasm_bindgen]
pub fn simulate(
    reward_probs: Vec<f64>,
    resolution: u32,
    cycles: usize,
    replications: usize,
    round1_cycles: usize,
    seed: u64,
) -> Result<Curves, JsError> {
    let config = demo::config(
        &reward_probs,
        resolution,
        cycles,
        replications,
        round1_cycles,
        seed,
    )
    .map_err(js_err)?;
    let inner = demo::simulate(&config).map_err(js_err)?;
    Ok(Curves { inner })
}

/// Resolution sweep flattened to rows of
/// `[resolution, fine@snapshot, coarse@snapshot, fine over last 10%]`.
#[wasm_bindgen]
pub fn sweep(
    reward_probs: Vec<f64>,
    resolutions: Vec<u32>,
    cycles: usize,
    replications: usize,
    snapshot: usize,
    seed: u64,
) -> Result<Vec<f64>, JsError> {
    let base = demo::config(&reward_probs, 7, cycles, replications, 0, seed).map_err(js_err)?;
    let rows = demo::sweep(&base, &resolutions, snapshot).map_err(js_err)?;
    Ok(rows
        .into_iter()
        .flat_map(|(r, f, c, tail)| [f64::from(r), f, c, tail])
        .collect())
}
