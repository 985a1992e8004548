//! Timed runs of the parallel search: throughput against worker count and
//! elapsed time against simulation count. Every configuration is repeated and
//! followed by a mean row (`run_index = -1`).

use std::io::Write;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::observation::Observation;
use crate::parallel::{run_workers, split_budget};
use crate::search::{Budget, SearchParams};

/// One row of benchmark output. Field names are the CSV header.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    #[serde(rename = "run")]
    pub run_index: i64,
    pub workers: usize,
    pub total_simulations: u64,
    #[serde(rename = "elapsed_ns")]
    pub elapsed: u64,
    pub sims_per_sec: f64,
}

pub const MEAN_ROW: i64 = -1;

impl BenchRecord {
    fn new(run_index: i64, workers: usize, total_simulations: u64, elapsed_ns: u64) -> Self {
        let elapsed = elapsed_ns.max(1);
        BenchRecord {
            run_index,
            workers,
            total_simulations,
            elapsed,
            sims_per_sec: total_simulations as f64 * 1e9 / elapsed as f64,
        }
    }

    pub fn is_mean(&self) -> bool {
        self.run_index == MEAN_ROW
    }
}

fn timed_runs(obs: &Observation, workers: &[SearchParams], label_workers: usize, repeats: usize) -> Result<Vec<BenchRecord>> {
    if repeats == 0 {
        return Err(Error::Config("repeats must be at least 1".into()));
    }
    let total: u64 = workers
        .iter()
        .map(|p| match p.budget {
            Budget::Simulations(n) => n,
            Budget::WallMillis(_) => 0,
        })
        .sum();
    let mut rows = Vec::with_capacity(repeats + 1);
    for run in 0..repeats {
        let start = Instant::now();
        let tree = run_workers(obs, workers)?;
        let elapsed = start.elapsed().as_nanos() as u64;
        debug_assert_eq!(tree.root.visits, total);
        rows.push(BenchRecord::new(run as i64, label_workers, total, elapsed));
    }
    let mean = rows.iter().map(|r| r.elapsed as f64).sum::<f64>() / repeats as f64;
    rows.push(BenchRecord::new(MEAN_ROW, label_workers, total, mean.round() as u64));
    Ok(rows)
}

/// Simulations per second for each worker count, `sims_per_worker` each.
pub fn bench_throughput(
    obs: &Observation,
    template: &SearchParams,
    worker_counts: &[usize],
    sims_per_worker: u64,
    repeats: usize,
) -> Result<Vec<BenchRecord>> {
    let mut out = Vec::new();
    for &w in worker_counts {
        if w == 0 || sims_per_worker == 0 {
            return Err(Error::Config("worker counts and simulations must be positive".into()));
        }
        let workers: Vec<SearchParams> = (0..w)
            .map(|i| SearchParams {
                budget: Budget::Simulations(sims_per_worker),
                seed: template.seed.wrapping_add(i as u64),
                ..*template
            })
            .collect();
        out.extend(timed_runs(obs, &workers, w, repeats)?);
    }
    Ok(out)
}

/// Elapsed time for each total simulation count, split over `workers`.
pub fn bench_time_vs_sims(
    obs: &Observation,
    template: &SearchParams,
    sim_counts: &[u64],
    workers: usize,
    repeats: usize,
) -> Result<Vec<BenchRecord>> {
    let mut out = Vec::new();
    for &n in sim_counts {
        if n == 0 || workers == 0 {
            return Err(Error::Config("simulation counts and workers must be positive".into()));
        }
        out.extend(timed_runs(obs, &split_budget(template, n, workers), workers, repeats)?);
    }
    Ok(out)
}

pub fn mean_rows(records: &[BenchRecord]) -> impl Iterator<Item = &BenchRecord> {
    records.iter().filter(|r| r.is_mean())
}

/// Writes `run,workers,total_simulations,elapsed_ns,sims_per_sec`.
pub fn write_bench_csv<W: Write>(records: &[BenchRecord], out: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()
}
