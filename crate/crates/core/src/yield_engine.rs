//! Monte-Carlo fabrication of qRAM chips and the closed-form yield oracle.
//!
//! A chip is `N` original memory patches plus `X` spares, every patch drawn
//! independently through [`crate::qec::sample_patch`]. The chip survives if
//! each defective original can be handed a healthy spare. Yield over a batch
//! is `(1 - defective/fabricated) · 100`, averaged over repetitions.
//!
//! Determinism: every chip owns a ChaCha8 stream keyed by
//! `(master_seed, point_index, rep_index, chip_index)` — the four words fill
//! the 32-byte seed — so results are bit-identical at any thread count.

use std::fmt;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::qec::{self, FabricationModel, QecError, QecParams};

#[derive(Debug, Clone, PartialEq)]
pub enum YieldError {
    Qec(QecError),
    /// A sweep axis has no values.
    EmptyAxis(&'static str),
    /// chips_per_rep and reps must both be at least 1.
    EmptyBatch,
}

impl fmt::Display for YieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            YieldError::Qec(e) => e.fmt(f),
            YieldError::EmptyAxis(axis) => write!(f, "sweep axis `{axis}` is empty"),
            YieldError::EmptyBatch => write!(f, "chips_per_rep and reps must be >= 1"),
        }
    }
}

impl std::error::Error for YieldError {}

impl From<QecError> for YieldError {
    fn from(e: QecError) -> Self {
        YieldError::Qec(e)
    }
}

/// One fabrication run's parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChipSpec {
    pub num_logical: u32,
    pub num_spares: u32,
    pub qec: QecParams,
    pub fab: FabricationModel,
    /// When set (the default model), spares are fabricated like originals
    /// and can themselves be defective; the chip then survives iff the
    /// total defects among `N + X` patches stay within `X`. When clear,
    /// spares are assumed healthy and only the `N` originals are drawn.
    pub spares_fallible: bool,
}

impl ChipSpec {
    pub fn new(
        num_logical: u32,
        num_spares: u32,
        distance: u32,
        error_rate: f64,
    ) -> Result<Self, YieldError> {
        Ok(Self {
            num_logical,
            num_spares,
            qec: QecParams::new(distance)?,
            fab: FabricationModel::new(error_rate)?,
            spares_fallible: true,
        })
    }

    pub fn with_spares_fallible(mut self, fallible: bool) -> Self {
        self.spares_fallible = fallible;
        self
    }
}

/// Defect outcome of one fabricated chip.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChipOutcome {
    pub defective_originals: u32,
    pub defective_spares: u32,
    pub repairable: bool,
}

/// Fabricates one chip: `N` original patches, then `X` spare patches when
/// spares are fallible. Repairable iff every defective original has a
/// healthy spare left.
pub fn simulate_chip<R: Rng + ?Sized>(spec: &ChipSpec, rng: &mut R) -> ChipOutcome {
    let mut defective_originals = 0u32;
    for _ in 0..spec.num_logical {
        if qec::sample_patch(spec.qec, spec.fab, rng).defective {
            defective_originals += 1;
        }
    }
    let mut defective_spares = 0u32;
    if spec.spares_fallible {
        for _ in 0..spec.num_spares {
            if qec::sample_patch(spec.qec, spec.fab, rng).defective {
                defective_spares += 1;
            }
        }
    }
    ChipOutcome {
        defective_originals,
        defective_spares,
        repairable: defective_originals <= spec.num_spares - defective_spares,
    }
}

/// Yield statistics for one sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct YieldReport {
    pub distance: u32,
    pub num_logical: u32,
    pub num_spares: u32,
    pub error_rate: f64,
    pub spares_fallible: bool,
    pub chips_per_rep: u32,
    pub reps: u32,
    pub master_seed: u64,
    /// Raw defective-chip counts, one per repetition.
    pub defective_per_rep: Vec<u32>,
    /// Mean of the per-rep yields, percent.
    pub yield_mean_pct: f64,
    /// Sample standard deviation of the per-rep yields, percent
    /// (0 when reps == 1).
    pub yield_std_pct: f64,
    /// Closed-form oracle value for the same spec, percent.
    pub analytic_pct: f64,
}

impl YieldReport {
    pub fn total_chips(&self) -> u64 {
        u64::from(self.chips_per_rep) * u64::from(self.reps)
    }

    /// Binomial standard error of the Monte-Carlo yield estimate at the
    /// analytic rate, in percentage points.
    pub fn mc_standard_error_pct(&self) -> f64 {
        let y = self.analytic_pct / 100.0;
        100.0 * (y * (1.0 - y) / self.total_chips() as f64).sqrt()
    }
}

fn chip_rng(master_seed: u64, point: u64, rep: u64, chip: u64) -> ChaCha8Rng {
    let mut seed = [0u8; 32];
    seed[0..8].copy_from_slice(&master_seed.to_le_bytes());
    seed[8..16].copy_from_slice(&point.to_le_bytes());
    seed[16..24].copy_from_slice(&rep.to_le_bytes());
    seed[24..32].copy_from_slice(&chip.to_le_bytes());
    ChaCha8Rng::from_seed(seed)
}

fn simulate_point(
    spec: &ChipSpec,
    chips_per_rep: u32,
    reps: u32,
    master_seed: u64,
    point_index: u64,
) -> Result<YieldReport, YieldError> {
    if chips_per_rep == 0 || reps == 0 {
        return Err(YieldError::EmptyBatch);
    }
    let defective_per_rep: Vec<u32> = (0..reps)
        .map(|rep| {
            (0..chips_per_rep)
                .into_par_iter()
                .map(|chip| {
                    let mut rng =
                        chip_rng(master_seed, point_index, u64::from(rep), u64::from(chip));
                    u32::from(!simulate_chip(spec, &mut rng).repairable)
                })
                .sum()
        })
        .collect();

    let yields: Vec<f64> = defective_per_rep
        .iter()
        .map(|&d| 100.0 * (1.0 - f64::from(d) / f64::from(chips_per_rep)))
        .collect();
    let mean = yields.iter().sum::<f64>() / yields.len() as f64;
    let std = if yields.len() > 1 {
        let var =
            yields.iter().map(|y| (y - mean).powi(2)).sum::<f64>() / (yields.len() - 1) as f64;
        var.sqrt()
    } else {
        0.0
    };

    Ok(YieldReport {
        distance: spec.qec.distance(),
        num_logical: spec.num_logical,
        num_spares: spec.num_spares,
        error_rate: spec.fab.error_rate(),
        spares_fallible: spec.spares_fallible,
        chips_per_rep,
        reps,
        master_seed,
        defective_per_rep,
        yield_mean_pct: mean,
        yield_std_pct: std,
        analytic_pct: 100.0 * analytic_yield(spec),
    })
}

/// Fabricates `chips_per_rep × reps` chips and reports per-rep yields.
pub fn simulate_yield(
    spec: &ChipSpec,
    chips_per_rep: u32,
    reps: u32,
    master_seed: u64,
) -> Result<YieldReport, YieldError> {
    simulate_point(spec, chips_per_rep, reps, master_seed, 0)
}

/// Closed-form survival probability of one chip.
///
/// With `q` the per-patch defect probability: fallible spares give
/// `P(defects among N+X <= X)`; healthy spares give
/// `P(defective originals <= X)`. Both are binomial CDFs evaluated in
/// log space.
pub fn analytic_yield(spec: &ChipSpec) -> f64 {
    let q = qec::logical_defect_prob(spec.qec, spec.fab);
    let x = u64::from(spec.num_spares);
    let n = if spec.spares_fallible {
        u64::from(spec.num_logical) + x
    } else {
        u64::from(spec.num_logical)
    };
    binomial_cdf(n, x, q)
}

/// P(X <= x) for X ~ Binomial(n, q).
fn binomial_cdf(n: u64, x: u64, q: f64) -> f64 {
    if q <= 0.0 {
        return 1.0;
    }
    if x >= n {
        return 1.0;
    }
    if q >= 1.0 {
        return 0.0;
    }
    let ln_q = q.ln();
    let ln_1q = (-q).ln_1p();
    let mut ln_choose = 0.0;
    let mut sum = 0.0;
    for k in 0..=x {
        let ln_term = ln_choose + k as f64 * ln_q + (n - k) as f64 * ln_1q;
        sum += ln_term.exp();
        ln_choose += ((n - k) as f64).ln() - ((k + 1) as f64).ln();
    }
    sum.min(1.0)
}

/// Cartesian sweep over (distance, logical count, spare count, error rate),
/// in that lexicographic order.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub distances: Vec<u32>,
    pub logical_counts: Vec<u32>,
    pub spare_counts: Vec<u32>,
    pub error_rates: Vec<f64>,
    pub chips_per_rep: u32,
    pub reps: u32,
    pub master_seed: u64,
    pub spares_fallible: bool,
}

impl SweepGrid {
    pub fn num_points(&self) -> usize {
        self.distances.len()
            * self.logical_counts.len()
            * self.spare_counts.len()
            * self.error_rates.len()
    }

    fn validate(&self) -> Result<(), YieldError> {
        if self.distances.is_empty() {
            return Err(YieldError::EmptyAxis("distances"));
        }
        if self.logical_counts.is_empty() {
            return Err(YieldError::EmptyAxis("logical_counts"));
        }
        if self.spare_counts.is_empty() {
            return Err(YieldError::EmptyAxis("spare_counts"));
        }
        if self.error_rates.is_empty() {
            return Err(YieldError::EmptyAxis("error_rates"));
        }
        if self.chips_per_rep == 0 || self.reps == 0 {
            return Err(YieldError::EmptyBatch);
        }
        Ok(())
    }

    /// Sweep points in row order.
    pub fn points(&self) -> Result<Vec<ChipSpec>, YieldError> {
        self.validate()?;
        let mut specs = Vec::with_capacity(self.num_points());
        for &d in &self.distances {
            for &n in &self.logical_counts {
                for &x in &self.spare_counts {
                    for &p in &self.error_rates {
                        specs.push(
                            ChipSpec::new(n, x, d, p)?.with_spares_fallible(self.spares_fallible),
                        );
                    }
                }
            }
        }
        Ok(specs)
    }
}

/// Runs every grid point, one [`YieldReport`] per row.
pub fn sweep(grid: &SweepGrid) -> Result<Vec<YieldReport>, YieldError> {
    sweep_with_offset(grid, 0)
}

/// Like [`sweep`] but numbering points from `point_offset`, so several grids
/// can be chained under one master seed without stream collisions.
pub fn sweep_with_offset(
    grid: &SweepGrid,
    point_offset: u64,
) -> Result<Vec<YieldReport>, YieldError> {
    let specs = grid.points()?;
    specs
        .iter()
        .enumerate()
        .map(|(i, spec)| {
            simulate_point(
                spec,
                grid.chips_per_rep,
                grid.reps,
                grid.master_seed,
                point_offset + i as u64,
            )
        })
        .collect()
}

/// Percentage-point gain of a repaired distance-3 chip over the mean
/// unrepaired yield across `distances`, from the analytic oracle with
/// fallible spares.
pub fn yield_improvement(
    num_logical: u32,
    error_rate: f64,
    distances: &[u32],
    rr_spares: u32,
) -> Result<f64, YieldError> {
    if distances.is_empty() {
        return Err(YieldError::EmptyAxis("distances"));
    }
    let repaired = 100.0 * analytic_yield(&ChipSpec::new(num_logical, rr_spares, 3, error_rate)?);
    let mut base = 0.0;
    for &d in distances {
        base += 100.0 * analytic_yield(&ChipSpec::new(num_logical, 0, d, error_rate)?);
    }
    Ok(repaired - base / distances.len() as f64)
}
