//! Da Vinci Code rules engine with a determinized Monte Carlo Tree Search
//! agent, root-parallel search and benchmark runners, and a lockstep
//! execution model for playout-length divergence.

pub mod agent;
pub mod bench;
pub mod determinize;
pub mod error;
pub mod observation;
pub mod parallel;
pub mod playout;
pub mod rules;
pub mod search;
pub mod simt;
pub mod state;
pub mod tile;
pub mod tree;

pub use agent::{play_agent_turn, AgentConfig, Event};
pub use bench::{bench_throughput, bench_time_vs_sims, write_bench_csv, BenchRecord};
pub use determinize::{sample_determinization, Determinizer};
pub use error::{Error, Result};
pub use observation::{legal_guesses, observe, Observation, OpponentLine, SlotView};
pub use parallel::{merge_trees, run_parallel_search, ParallelParams};
pub use rules::RuleSet;
pub use search::{root_branching, run_search, run_search_with_rng, Budget, Policy, RootBranching, SearchParams};
pub use simt::{simd_efficiency, simulate_warp, sweep_divergence, DivergenceRecord, LaneTask, WarpTrace};
pub use state::{
    apply_guess, draw_tile, new_game, place_joker, stop_guessing, winner, Drawn, GameState, Guess, GuessOutcome,
    Phase, RevealedSlot,
};
pub use tile::{compare_tiles, Color, Line, SlotOrdering, Tile, TileEntry, Value};
pub use tree::{best_guess, ucb1, NodeKey, SearchNode, SearchTree};
