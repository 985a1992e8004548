use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::net::SocketAddr;
use std::path::Path;
use std::time::Duration;

use davinci_core::agent::{play_agent_turn, AgentConfig};
use davinci_core::bench::mean_rows;
use davinci_core::playout::advance_to_guess;
use davinci_core::simt::{sweep_divergence_with, write_divergence_csv, SweepOptions};
use davinci_core::{
    bench_throughput, bench_time_vs_sims, best_guess, observe, run_parallel_search, write_bench_csv, Error, GameState, Guess,
    Observation, ParallelParams, RuleSet,
};
use davinci_service::ServiceConfig;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::args::{Command, Common, PositionArgs};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) => CliError::Usage(e.to_string()),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Runtime(format!("invalid JSON: {e}"))
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn output<'a>(common: &Common, stdout: &'a mut dyn Write) -> Result<Box<dyn Write + 'a>> {
    Ok(match &common.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(stdout),
    })
}

fn write_json<T: Serialize>(common: &Common, stdout: &mut dyn Write, value: &T) -> Result<()> {
    let mut out = output(common, stdout)?;
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

fn read_observation(path: Option<&Path>, stdin: &mut dyn Read) -> Result<Observation> {
    let mut text = String::new();
    match path {
        Some(p) => {
            File::open(p)?.read_to_string(&mut text)?;
        }
        None => {
            stdin.read_to_string(&mut text)?;
        }
    }
    Ok(serde_json::from_str(&text)?)
}

/// The first player's view right after their opening draw.
fn opening(rules: RuleSet, seed: u64) -> Result<Observation> {
    let mut g = GameState::new(rules, seed)?;
    advance_to_guess(&mut g, &mut ChaCha8Rng::seed_from_u64(seed));
    Ok(observe(&g, 0))
}

fn position(common: &Common, position: &PositionArgs) -> Result<Observation> {
    match &position.obs {
        Some(p) => read_observation(Some(p), &mut io::empty()),
        None => opening(common.rules, common.seed),
    }
}

fn positive(common: &Common) -> Result<()> {
    if common.workers.contains(&0) || common.sims.contains(&0) {
        return Err(CliError::Usage("--workers and --sims values must be positive".into()));
    }
    Ok(())
}

fn agent_config(common: &Common, continue_threshold: f64) -> AgentConfig {
    AgentConfig {
        search: ParallelParams { workers: common.first_workers(), per_worker: common.search(common.first_sims()) },
        continue_threshold,
    }
}

pub fn run(command: Command, stdin: &mut dyn Read, stdout: &mut dyn Write) -> Result<()> {
    match command {
        Command::BenchThroughput { common, position: pos } => {
            positive(&common)?;
            let obs = position(&common, &pos)?;
            let mut rows = Vec::new();
            for &sims in &common.sims {
                rows.extend(bench_throughput(&obs, &common.search(sims), &common.workers, sims, common.repeats)?);
            }
            for r in mean_rows(&rows) {
                eprintln!("workers {:>3}: {:>12.0} sims/s", r.workers, r.sims_per_sec);
            }
            let mut out = output(&common, stdout)?;
            write_bench_csv(&rows, &mut out)?;
            out.flush()?;
        }
        Command::BenchTime { common, position: pos } => {
            positive(&common)?;
            let obs = position(&common, &pos)?;
            let mut rows = Vec::new();
            for &workers in &common.workers {
                rows.extend(bench_time_vs_sims(&obs, &common.search(1), &common.sims, workers, common.repeats)?);
            }
            for r in mean_rows(&rows) {
                eprintln!("{:>9} sims on {} workers: {:>12} ns", r.total_simulations, r.workers, r.elapsed);
            }
            let mut out = output(&common, stdout)?;
            write_bench_csv(&rows, &mut out)?;
            out.flush()?;
        }
        Command::SimtSweep { common, position: pos, widths, samples, length_pool, substeps } => {
            let obs = position(&common, &pos)?;
            let opts = SweepOptions { length_pool, outcome_substeps: substeps };
            let records = sweep_divergence_with(&obs, &widths, samples, common.seed, &opts)?;
            for r in &records {
                eprintln!("width {:>3}: efficiency {:.4}, {:.2} cycles", r.width, r.mean_efficiency, r.mean_cycles);
            }
            let mut out = output(&common, stdout)?;
            write_divergence_csv(&records, &mut out)?;
            out.flush()?;
        }
        Command::Selfplay { common, games, continue_threshold } => {
            positive(&common)?;
            let report = selfplay(&common, games, continue_threshold)?;
            eprintln!("wins {:?} over {} games, mean length {:.2} turns", report.wins, report.games, report.mean_turns);
            write_json(&common, stdout, &report)?;
        }
        Command::AgentMove { common, obs } => {
            positive(&common)?;
            let obs = read_observation(obs.as_deref(), stdin)?;
            let report = agent_move(&common, &obs)?;
            eprintln!("best guess {:?} with win rate {:.3}", report.guess, report.win_rate);
            write_json(&common, stdout, &report)?;
        }
        Command::Serve { common, bind, port, idle_expiry_secs, continue_threshold } => {
            positive(&common)?;
            let addr: SocketAddr =
                format!("{bind}:{port}").parse().map_err(|e| CliError::Usage(format!("bad bind address: {e}")))?;
            let config = ServiceConfig {
                idle_expiry: Duration::from_secs(idle_expiry_secs),
                agent: agent_config(&common, continue_threshold),
            };
            let runtime = tokio::runtime::Runtime::new()?;
            writeln!(stdout, "{}", serde_json::json!({ "listening": addr.to_string() }))?;
            stdout.flush()?;
            runtime.block_on(davinci_service::serve(addr, config))?;
        }
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct GameRecord {
    seed: u64,
    winner: usize,
    turns: usize,
}

#[derive(Debug, Serialize)]
struct SelfplayReport {
    games: usize,
    rules: RuleSet,
    wins: Vec<usize>,
    mean_turns: f64,
    results: Vec<GameRecord>,
}

fn selfplay(common: &Common, games: usize, continue_threshold: f64) -> Result<SelfplayReport> {
    if games == 0 {
        return Err(CliError::Usage("--games must be positive".into()));
    }
    let config = agent_config(common, continue_threshold);
    let mut wins = vec![0; common.rules.players];
    let mut results = Vec::with_capacity(games);
    for i in 0..games as u64 {
        let seed = common.seed.wrapping_add(i);
        let mut state = GameState::new(common.rules, seed)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
        let mut turns = 0;
        while !state.is_terminal() {
            play_agent_turn(&mut state, &config, &mut rng)?;
            turns += 1;
        }
        let winner = state.winner().expect("terminal game has a winner");
        wins[winner] += 1;
        results.push(GameRecord { seed, winner, turns });
    }
    let mean_turns = results.iter().map(|r| r.turns as f64).sum::<f64>() / games as f64;
    Ok(SelfplayReport { games, rules: common.rules, wins, mean_turns, results })
}

#[derive(Debug, Serialize)]
struct ChildStats {
    guess: Guess,
    visits: u64,
    wins: u64,
    win_rate: f64,
}

#[derive(Debug, Serialize)]
struct MoveReport {
    guess: Guess,
    win_rate: f64,
    root_visits: u64,
    children: Vec<ChildStats>,
}

fn agent_move(common: &Common, obs: &Observation) -> Result<MoveReport> {
    let params = ParallelParams { workers: common.first_workers(), per_worker: common.search(common.first_sims()) };
    let tree = run_parallel_search(obs, &params)?;
    let guess = best_guess(&tree)?;
    let children: Vec<ChildStats> = tree
        .root
        .children
        .iter()
        .map(|(k, c)| ChildStats { guess: (*k).into(), visits: c.visits, wins: c.wins, win_rate: c.win_rate() })
        .collect();
    let win_rate = children.iter().find(|c| c.guess == guess).map_or(0.0, |c| c.win_rate);
    Ok(MoveReport { guess, win_rate, root_visits: tree.root.visits, children })
}
