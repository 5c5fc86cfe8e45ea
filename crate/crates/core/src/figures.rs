//! Built-in four-armed experiments and the checks reported alongside them.
//!
//! - `fig3`: CASE 1 and CASE 2, standard strategy, 30 cycles.
//! - `fig4`: CASE 3, standard versus tournament (15 + 15 cycles).
//! - `fig5`: CASE 3 resolution sweep to cycle 500.

use serde::Serialize;

use crate::engine::{
    run_experiment, sweep_resolutions, window_mean, CdrCurves, ExperimentConfig, Strategy,
    SweepPoint, DEFAULT_SNAPSHOT_CYCLE,
};
use crate::error::Result;
use crate::problems::{CASE1, CASE2, CASE3, SWEEP_RESOLUTIONS};

/// Replications used unless `--paper-fidelity` counts are requested.
pub const DEFAULT_REPLICATIONS: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Figure {
    Fig3,
    Fig4,
    Fig5,
}

impl Figure {
    pub fn name(self) -> &'static str {
        match self {
            Figure::Fig3 => "fig3",
            Figure::Fig4 => "fig4",
            Figure::Fig5 => "fig5",
        }
    }

    /// Trial count of the original runs: 10 physical trials for the 30-cycle
    /// experiments, 100 simulated ones for the long sweep.
    pub fn original_replications(self) -> usize {
        match self {
            Figure::Fig3 | Figure::Fig4 => 10,
            Figure::Fig5 => 100,
        }
    }
}

impl std::str::FromStr for Figure {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "fig3" => Ok(Figure::Fig3),
            "fig4" => Ok(Figure::Fig4),
            "fig5" => Ok(Figure::Fig5),
            other => Err(format!(
                "unknown figure {other:?}, expected fig3, fig4 or fig5"
            )),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub detail: String,
    pub passed: bool,
}

impl Check {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        Check {
            name: name.to_string(),
            detail,
            passed,
        }
    }
}

#[derive(Clone, Debug)]
pub struct LabeledRun {
    pub label: String,
    pub config: ExperimentConfig,
    pub curves: CdrCurves,
}

#[derive(Clone, Debug)]
pub struct FigureReport {
    pub figure: Figure,
    pub runs: Vec<LabeledRun>,
    pub sweep: Vec<SweepPoint>,
    pub checks: Vec<Check>,
}

impl FigureReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

pub fn tournament() -> Strategy {
    Strategy::Tournament {
        round1_cycles: 15,
        reset_stats: false,
    }
}

pub fn reproduce(figure: Figure, replications: usize, seed: u64) -> Result<FigureReport> {
    match figure {
        Figure::Fig3 => fig3(replications, seed),
        Figure::Fig4 => fig4(replications, seed),
        Figure::Fig5 => fig5(replications, seed),
    }
}

fn labeled(label: &str, config: ExperimentConfig) -> Result<LabeledRun> {
    let curves = run_experiment(&config)?;
    Ok(LabeledRun {
        label: label.to_string(),
        config,
        curves,
    })
}

fn non_increasing(xs: &[f64], tol: f64) -> bool {
    xs.windows(2).all(|w| w[1] <= w[0] + tol)
}

fn non_decreasing(xs: &[f64], tol: f64) -> bool {
    xs.windows(2).all(|w| w[1] + tol >= w[0])
}

fn fig3(replications: usize, seed: u64) -> Result<FigureReport> {
    let case1 = labeled(
        "case1",
        ExperimentConfig::new(CASE1.to_vec(), 30, replications).with_seed(seed),
    )?;
    let case2 = labeled(
        "case2",
        ExperimentConfig::new(CASE2.to_vec(), 30, replications).with_seed(seed),
    )?;
    let (c1, c2) = (&case1.curves, &case2.curves);

    let fine30 = c1.fine_cdr[29];
    let coarse = (
        window_mean(&c1.coarse(1), 5, 30),
        window_mean(&c2.coarse(1), 5, 30),
    );
    let fine = (
        window_mean(&c1.fine_cdr, 5, 30),
        window_mean(&c2.fine_cdr, 5, 30),
    );
    let pa1 = c1.pa(0);
    let pa2 = c1.pa(1);
    let falling = |pa: &[f64]| pa[1..].iter().all(|&v| v < 0.0) && non_increasing(pa, 0.0);
    let pa3_band = [c1, c2]
        .iter()
        .flat_map(|c| c.pa(2))
        .all(|v| (-1.0..=1.0).contains(&v));

    let checks = vec![
        Check::new(
            "case1_fine_cdr_at_30",
            fine30 >= 0.7,
            format!("{fine30:.4} >= 0.7"),
        ),
        Check::new(
            "case1_coarse_beats_case2",
            coarse.0 >= coarse.1,
            format!("mean cycles 5-30: {:.4} >= {:.4}", coarse.0, coarse.1),
        ),
        Check::new(
            "case1_fine_beats_case2",
            fine.0 >= fine.1,
            format!("mean cycles 5-30: {:.4} >= {:.4}", fine.0, fine.1),
        ),
        Check::new(
            "case1_pa1_pa2_negative_falling",
            falling(&pa1) && falling(&pa2),
            format!(
                "mean PA1 at 30 = {:.3}, mean PA2 at 30 = {:.3}",
                pa1[29], pa2[29]
            ),
        ),
        Check::new(
            "pa3_near_zero",
            pa3_band,
            "mean PA3 within [-1, 1] for both cases".to_string(),
        ),
    ];
    Ok(FigureReport {
        figure: Figure::Fig3,
        runs: vec![case1, case2],
        sweep: Vec::new(),
        checks,
    })
}

fn fig4(replications: usize, seed: u64) -> Result<FigureReport> {
    let standard = labeled(
        "standard",
        ExperimentConfig::new(CASE3.to_vec(), 30, replications).with_seed(seed),
    )?;
    let tour = labeled(
        "tournament",
        ExperimentConfig::new(CASE3.to_vec(), 30, replications)
            .with_seed(seed)
            .with_strategy(tournament()),
    )?;
    let s = &standard.curves;
    let t = &tour.curves;
    let std_mid = window_mean(&s.fine_cdr, 10, 30);
    let gap = window_mean(&t.fine_cdr, 26, 30) - window_mean(&s.fine_cdr, 26, 30);
    let round1 = window_mean(&t.coarse(1), 1, 15);
    let round2 = window_mean(&t.coarse(1), 16, 30);
    let fine_r1 = window_mean(&t.fine_cdr, 1, 15);
    let fine_r2 = window_mean(&t.fine_cdr, 16, 30);

    let checks = vec![
        Check::new(
            "standard_fine_cdr_near_half",
            (0.3..=0.7).contains(&std_mid),
            format!("mean cycles 10-30: {std_mid:.4} in [0.3, 0.7]"),
        ),
        Check::new(
            "tournament_beats_standard",
            gap >= 0.1,
            format!("mean cycles 26-30 gap: {gap:.4} >= 0.1"),
        ),
        Check::new(
            "tournament_coarse_falls",
            round2 < round1,
            format!("round 1 {round1:.4} -> round 2 {round2:.4}"),
        ),
        Check::new(
            "tournament_fine_rises",
            fine_r2 > fine_r1,
            format!("round 1 {fine_r1:.4} -> round 2 {fine_r2:.4}"),
        ),
    ];
    Ok(FigureReport {
        figure: Figure::Fig4,
        runs: vec![standard, tour],
        sweep: Vec::new(),
        checks,
    })
}

fn fig5(replications: usize, seed: u64) -> Result<FigureReport> {
    let base = ExperimentConfig::new(CASE3.to_vec(), 500, replications).with_seed(seed);
    let sweep = sweep_resolutions(&base, &SWEEP_RESOLUTIONS, DEFAULT_SNAPSHOT_CYCLE)?;

    let at500: Vec<f64> = sweep.iter().map(|p| p.curves.fine_cdr[499]).collect();
    let first_half: Vec<Option<usize>> = sweep
        .iter()
        .map(|p| p.curves.first_fine_at_least(0.5))
        .collect();
    let slower = first_half
        .windows(2)
        .all(|w| matches!((w[0], w[1]), (Some(a), Some(b)) if b >= a) || w[1].is_none());
    let small: Vec<&SweepPoint> = sweep.iter().filter(|p| p.resolution <= 11).collect();
    let fine30: Vec<f64> = small.iter().map(|p| p.fine_at_snapshot).collect();
    let coarse30: Vec<f64> = small.iter().map(|p| p.coarse_at_snapshot[0]).collect();

    let checks = vec![
        Check::new(
            "fine_cdr_500_monotone",
            non_decreasing(&at500, 0.05),
            format!("{at500:.3?}"),
        ),
        Check::new(
            "fine_cdr_500_res101",
            at500.last().is_some_and(|&v| v >= 0.9),
            format!("{:.4} >= 0.9", at500.last().copied().unwrap_or(f64::NAN)),
        ),
        Check::new(
            "adaptation_slows_with_resolution",
            slower,
            format!("first cycle with fine_cdr >= 0.5: {first_half:?}"),
        ),
        Check::new(
            "snapshot_fine_rises",
            non_decreasing(&fine30, 0.05),
            format!("fine_cdr@30 over 5..11: {fine30:.3?}"),
        ),
        Check::new(
            "snapshot_coarse_falls",
            non_increasing(&coarse30, 0.05),
            format!("coarse_cdr@30 over 5..11: {coarse30:.3?}"),
        ),
    ];
    Ok(FigureReport {
        figure: Figure::Fig5,
        runs: Vec::new(),
        sweep,
        checks,
    })
}
