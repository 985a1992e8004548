//! Lockstep execution of playouts.
//!
//! A warp of `width` lanes advances one game turn per cycle. A lane whose
//! playout has ended stays idle until the longest lane in the warp finishes,
//! so utilization drops as playout lengths spread out. Memory effects are not
//! modelled.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::determinize::Determinizer;
use crate::error::{Error, Result};
use crate::observation::Observation;
use crate::playout::random_playout;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LaneTask {
    pub steps: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WarpTrace {
    pub width: usize,
    /// Active lanes in each lockstep cycle.
    pub step_masks: Vec<u32>,
}

impl WarpTrace {
    pub fn cycles(&self) -> usize {
        self.step_masks.len()
    }
}

pub fn simulate_warp(tasks: &[LaneTask], width: usize) -> Result<WarpTrace> {
    if tasks.len() != width {
        return Err(Error::Protocol(format!("{} lane tasks for a warp of width {width}", tasks.len())));
    }
    if tasks.iter().any(|t| t.steps == 0) {
        return Err(Error::Config("every lane task needs at least one step".into()));
    }
    let cycles = tasks.iter().map(|t| t.steps).max().unwrap_or(0);
    let step_masks = (0..cycles).map(|c| tasks.iter().filter(|t| t.steps > c).count() as u32).collect();
    Ok(WarpTrace { width, step_masks })
}

/// Fraction of lane-cycles doing work. An empty trace counts as fully utilized.
pub fn simd_efficiency(trace: &WarpTrace) -> f64 {
    if trace.step_masks.is_empty() || trace.width == 0 {
        return 1.0;
    }
    let active: u64 = trace.step_masks.iter().map(|&m| m as u64).sum();
    active as f64 / (trace.width as f64 * trace.step_masks.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepOptions {
    /// Real playouts run to build the length distribution lanes draw from.
    pub length_pool: usize,
    /// Count a turn with a correct guess as two steps instead of one.
    pub outcome_substeps: bool,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions { length_pool: 4096, outcome_substeps: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DivergenceRecord {
    pub width: usize,
    pub mean_efficiency: f64,
    pub mean_cycles: f64,
    pub samples: usize,
}

/// Step counts of `count` random playouts from determinizations of `obs`,
/// played under the one-guess-per-turn rule.
pub fn playout_lengths<R: Rng + ?Sized>(obs: &Observation, count: usize, substeps: bool, rng: &mut R) -> Result<Vec<u32>> {
    let det = Determinizer::new(obs)?;
    Ok((0..count)
        .map(|_| {
            let mut state = det.sample(rng);
            state.rules.consecutive_guessing = false;
            let r = random_playout(&mut state, rng);
            if substeps {
                r.turns + r.correct_guesses
            } else {
                r.turns
            }
        })
        .collect())
}

/// For each width, `samples` warps whose lanes draw lengths uniformly from `lengths`.
pub fn sweep_lengths<R: Rng + ?Sized>(lengths: &[u32], widths: &[usize], samples: usize, rng: &mut R) -> Result<Vec<DivergenceRecord>> {
    if samples == 0 {
        return Err(Error::Config("samples must be at least 1".into()));
    }
    if lengths.is_empty() || lengths.contains(&0) {
        return Err(Error::Config("lane lengths must be non-empty and positive".into()));
    }
    widths
        .iter()
        .map(|&width| {
            if width == 0 {
                return Err(Error::Config("warp width must be at least 1".into()));
            }
            let mut eff = 0.0;
            let mut cycles = 0.0;
            let mut tasks = Vec::with_capacity(width);
            for _ in 0..samples {
                tasks.clear();
                tasks.extend((0..width).map(|_| LaneTask { steps: lengths[rng.gen_range(0..lengths.len())] }));
                let trace = simulate_warp(&tasks, width)?;
                eff += simd_efficiency(&trace);
                cycles += trace.cycles() as f64;
            }
            Ok(DivergenceRecord {
                width,
                mean_efficiency: eff / samples as f64,
                mean_cycles: cycles / samples as f64,
                samples,
            })
        })
        .collect()
}

pub fn sweep_divergence(obs: &Observation, widths: &[usize], samples: usize, seed: u64) -> Result<Vec<DivergenceRecord>> {
    sweep_divergence_with(obs, widths, samples, seed, &SweepOptions::default())
}

pub fn sweep_divergence_with(
    obs: &Observation,
    widths: &[usize],
    samples: usize,
    seed: u64,
    opts: &SweepOptions,
) -> Result<Vec<DivergenceRecord>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lengths = playout_lengths(obs, opts.length_pool.max(1), opts.outcome_substeps, &mut rng)?;
    sweep_lengths(&lengths, widths, samples, &mut rng)
}

/// Writes `width,mean_efficiency,mean_cycles,samples`.
pub fn write_divergence_csv<W: Write>(records: &[DivergenceRecord], out: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()
}
