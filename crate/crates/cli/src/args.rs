use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use davinci_core::{Budget, Policy, RuleSet, SearchParams};

#[derive(Debug, Parser)]
#[command(name = "dvc", version, about = "Da Vinci Code search benchmarks, self-play and game server")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulations per second against worker count. `--sims` is per worker.
    BenchThroughput {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        position: PositionArgs,
    },
    /// Elapsed time against total simulation count, split over the workers.
    BenchTime {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        position: PositionArgs,
    },
    /// Warp efficiency of lockstep playouts against warp width.
    SimtSweep {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        position: PositionArgs,
        #[arg(long, value_delimiter = ',', default_value = "1,2,4,8,16,32")]
        widths: Vec<usize>,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// Real playouts collected for the lane length distribution.
        #[arg(long, default_value_t = 4096)]
        length_pool: usize,
        /// Count turns with a correct guess as two steps.
        #[arg(long)]
        substeps: bool,
    },
    /// Full agent-vs-agent games; reports wins per seat and mean length.
    Selfplay {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 10)]
        games: usize,
        #[arg(long, default_value_t = 0.5)]
        continue_threshold: f64,
    },
    /// Best guess for an observation read as JSON from `--obs` or stdin.
    AgentMove {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        obs: Option<PathBuf>,
    },
    /// Runs the HTTP game service.
    Serve {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "127.0.0.1")]
        bind: String,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value_t = 3600)]
        idle_expiry_secs: u64,
        #[arg(long, default_value_t = 0.5)]
        continue_threshold: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PolicyArg {
    Uct,
    Flat,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Comma-separated worker counts.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub workers: Vec<usize>,
    /// Comma-separated simulation counts.
    #[arg(long, value_delimiter = ',', default_value = "1000")]
    pub sims: Vec<u64>,
    #[arg(long, default_value_t = 4)]
    pub max_depth: u32,
    #[arg(long = "c", default_value_t = std::f64::consts::SQRT_2)]
    pub exploration_c: f64,
    #[arg(long, value_enum, default_value_t = PolicyArg::Uct)]
    pub policy: PolicyArg,
    /// Comma-separated key=value pairs: jokers, consecutive (on/off),
    /// players, tiles, ranks.
    #[arg(long, value_parser = parse_rules, default_value = "")]
    pub rules: RuleSet,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 5)]
    pub repeats: usize,
}

impl Common {
    pub fn search(&self, sims: u64) -> SearchParams {
        SearchParams {
            exploration_c: self.exploration_c,
            max_depth: self.max_depth,
            budget: Budget::Simulations(sims),
            policy: match self.policy {
                PolicyArg::Uct => Policy::Uct,
                PolicyArg::Flat => Policy::FlatRoot,
            },
            seed: self.seed,
        }
    }

    pub fn first_workers(&self) -> usize {
        self.workers[0]
    }

    pub fn first_sims(&self) -> u64 {
        self.sims[0]
    }
}

#[derive(Debug, Clone, Args)]
pub struct PositionArgs {
    /// Observation JSON to search from instead of the seeded opening.
    #[arg(long)]
    pub obs: Option<PathBuf>,
}

fn switch(key: &str, v: &str) -> Result<bool, String> {
    match v {
        "on" | "true" | "1" | "yes" => Ok(true),
        "off" | "false" | "0" | "no" => Ok(false),
        _ => Err(format!("{key} must be on or off, got {v:?}")),
    }
}

pub fn parse_rules(s: &str) -> Result<RuleSet, String> {
    let mut rules = RuleSet::default();
    for pair in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = pair.split_once('=').ok_or_else(|| format!("expected key=value, got {pair:?}"))?;
        let number = || v.parse::<usize>().map_err(|e| format!("{k}: {e}"));
        match k {
            "jokers" => rules.include_jokers = switch(k, v)?,
            "consecutive" => rules.consecutive_guessing = switch(k, v)?,
            "players" => rules.players = number()?,
            "tiles" => rules.tiles_per_player = number()?,
            "ranks" => rules.ranks = v.parse().map_err(|e| format!("{k}: {e}"))?,
            _ => return Err(format!("unknown rule {k:?}")),
        }
    }
    rules.validate().map_err(|e| e.to_string())?;
    Ok(rules)
}
