//! Named reproduction presets: the reference experiment grids for the
//! yield charts and the resource table.
//!
//! - `fig3b` — yield vs size at 0.5% error, distance 3, no spares.
//! - `fig6` — yield vs size at 0.5% error for distances 3/5/7/9 without
//!   repair plus the distance-3 eight-spare series.
//! - `fig7a`..`fig7e` — yield over size × error-rate at distance 3 with
//!   0 / 1 / 2 / 4 / 8 spares.
//! - `table1` — the full resource grid (resource command only).

use crate::yield_engine::SweepGrid;

use super::config::{RunConfig, DEFAULT_ERROR_RATES, DEFAULT_LOGICAL_COUNTS};

pub const YIELD_PRESETS: [&str; 7] = ["fig3b", "fig6", "fig7a", "fig7b", "fig7c", "fig7d", "fig7e"];
pub const RESOURCE_PRESETS: [&str; 1] = ["table1"];

fn base_grid(cfg: &RunConfig) -> SweepGrid {
    SweepGrid {
        distances: vec![3],
        logical_counts: DEFAULT_LOGICAL_COUNTS.to_vec(),
        spare_counts: vec![0],
        error_rates: vec![0.005],
        chips_per_rep: cfg.chips_per_rep,
        reps: cfg.reps,
        master_seed: cfg.master_seed,
        spares_fallible: cfg.spares_fallible,
    }
}

/// Grids for a yield preset, run back to back under one master seed.
pub fn yield_preset_grids(name: &str, cfg: &RunConfig) -> Option<Vec<SweepGrid>> {
    let grids = match name {
        "fig3b" => vec![base_grid(cfg)],
        "fig6" => {
            let mut no_repair = base_grid(cfg);
            no_repair.distances = vec![3, 5, 7, 9];
            let mut repaired = base_grid(cfg);
            repaired.spare_counts = vec![8];
            vec![no_repair, repaired]
        }
        "fig7a" | "fig7b" | "fig7c" | "fig7d" | "fig7e" => {
            let spares = match name {
                "fig7a" => 0,
                "fig7b" => 1,
                "fig7c" => 2,
                "fig7d" => 4,
                _ => 8,
            };
            let mut grid = base_grid(cfg);
            grid.spare_counts = vec![spares];
            grid.error_rates = DEFAULT_ERROR_RATES.to_vec();
            vec![grid]
        }
        _ => return None,
    };
    Some(grids)
}
