//! Four-armed problem instances.

/// Best arm 1, and its group is also the better group by a wide margin.
pub const CASE1: [f64; 4] = [0.8, 0.2, 0.1, 0.1];
/// Same probabilities as [`CASE1`] with arms 2 and 3 swapped; harder coarse split.
pub const CASE2: [f64; 4] = [0.8, 0.1, 0.2, 0.1];
/// Contradictory: best arm 3 sits in the worse group.
pub const CASE3: [f64; 4] = [0.7, 0.5, 0.9, 0.1];

/// Resolutions compared in the resolution sweep.
pub const SWEEP_RESOLUTIONS: [u32; 6] = [5, 7, 9, 11, 51, 101];
