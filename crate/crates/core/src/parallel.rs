//! Root parallelization: independent per-worker trees merged at the end.

use std::thread;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::observation::Observation;
use crate::search::{run_search, Budget, SearchParams};
use crate::tree::{SearchNode, SearchTree};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ParallelParams {
    pub workers: usize,
    /// Worker `i` runs with seed `per_worker.seed + i`.
    pub per_worker: SearchParams,
}

impl Default for ParallelParams {
    fn default() -> Self {
        ParallelParams { workers: 1, per_worker: SearchParams::default() }
    }
}

impl ParallelParams {
    pub fn worker_params(&self) -> Vec<SearchParams> {
        (0..self.workers)
            .map(|i| SearchParams { seed: self.per_worker.seed.wrapping_add(i as u64), ..self.per_worker })
            .collect()
    }
}

/// Sums two trees node by node into `into`.
fn merge_node(into: &mut SearchNode, from: &SearchNode) {
    into.visits += from.visits;
    into.wins += from.wins;
    for (key, child) in &from.children {
        match into.children.get_mut(key) {
            Some(existing) => merge_node(existing, child),
            None => {
                into.children.insert(*key, child.clone());
            }
        }
    }
}

/// Structural union of trees grown from the same observation, with visits
/// and wins summed.
pub fn merge_trees(trees: &[SearchTree]) -> Result<SearchTree> {
    let (first, rest) = trees.split_first().ok_or_else(|| Error::Protocol("nothing to merge".into()))?;
    let mut merged = first.clone();
    for t in rest {
        if t.observation_digest != merged.observation_digest || t.root_player != merged.root_player {
            return Err(Error::Protocol("trees were grown from different observations".into()));
        }
        merge_node(&mut merged.root, &t.root);
    }
    Ok(merged)
}

/// Runs one search per entry of `workers` on its own thread and merges the
/// trees in worker order. Errors are reported once every worker has finished.
pub fn run_workers(obs: &Observation, workers: &[SearchParams]) -> Result<SearchTree> {
    if workers.is_empty() {
        return Err(Error::Config("at least one worker is required".into()));
    }
    let results: Vec<Result<SearchTree>> = thread::scope(|scope| {
        let handles: Vec<_> = workers.iter().map(|p| scope.spawn(move || run_search(obs, p))).collect();
        handles.into_iter().map(|h| h.join().expect("search worker panicked")).collect()
    });
    let trees = results.into_iter().collect::<Result<Vec<_>>>()?;
    merge_trees(&trees)
}

pub fn run_parallel_search(obs: &Observation, params: &ParallelParams) -> Result<SearchTree> {
    if params.workers == 0 {
        return Err(Error::Config("workers must be at least 1".into()));
    }
    run_workers(obs, &params.worker_params())
}

/// Splits `total` simulations over `workers`, earlier workers taking the
/// remainder. Workers left with nothing are dropped.
pub fn split_budget(template: &SearchParams, total: u64, workers: usize) -> Vec<SearchParams> {
    let w = workers.max(1) as u64;
    (0..w)
        .map(|i| total / w + u64::from(i < total % w))
        .enumerate()
        .filter(|(_, n)| *n > 0)
        .map(|(i, n)| SearchParams { budget: Budget::Simulations(n), seed: template.seed.wrapping_add(i as u64), ..*template })
        .collect()
}
