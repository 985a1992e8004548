//! A full-rules player backed by the parallel search, and the public event
//! stream a turn produces.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::observation::observe;
use crate::parallel::{run_parallel_search, ParallelParams};
use crate::playout::advance_to_guess;
use crate::state::{GameState, Guess, GuessOutcome, Phase};
use crate::tile::Tile;
use crate::tree::{best_guess, NodeKey};

/// Something every player at the table sees happen.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum Event {
    /// A tile entered `player`'s line at `position`. Jokers are reported the
    /// same way once placed.
    Drew { player: usize, position: usize },
    PoolEmpty { player: usize },
    Guessed { player: usize, guess: Guess, correct: bool },
    Revealed { player: usize, position: usize, tile: Tile },
    Eliminated { player: usize },
    StoppedGuessing { player: usize },
    TurnPassed { player: usize },
    GameOver { winner: usize },
}

/// Events following a resolved guess by `player`; `state` is the state after it.
pub fn guess_events(player: usize, guess: Guess, outcome: &GuessOutcome, state: &GameState) -> Vec<Event> {
    let r = outcome.revealed;
    let mut events = vec![
        Event::Guessed { player, guess, correct: outcome.correct },
        Event::Revealed { player: r.player, position: r.position, tile: state.lines[r.player].entries[r.position].tile },
    ];
    if state.eliminated[r.player] {
        events.push(Event::Eliminated { player: r.player });
    }
    events.extend(turn_events(player, state));
    events
}

/// `TurnPassed` or `GameOver` when the turn of `player` is over in `state`.
pub fn turn_events(player: usize, state: &GameState) -> Vec<Event> {
    if let Some(winner) = state.winner() {
        vec![Event::GameOver { winner }]
    } else if state.current_player != player || state.phase == Phase::AwaitDraw {
        vec![Event::TurnPassed { player: state.current_player }]
    } else {
        Vec::new()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AgentConfig {
    pub search: ParallelParams,
    /// After a correct guess the agent keeps guessing only if the best
    /// child's win rate is above this.
    pub continue_threshold: f64,
}

impl Default for AgentConfig {
    fn default() -> Self {
        AgentConfig { search: ParallelParams::default(), continue_threshold: 0.5 }
    }
}

/// Best guess for the player to move and the win rate of its node.
pub fn choose_guess<R: Rng + ?Sized>(state: &GameState, config: &AgentConfig, rng: &mut R) -> Result<(Guess, f64)> {
    let obs = observe(state, state.current_player);
    let mut params = config.search;
    params.per_worker.seed = rng.gen();
    let tree = run_parallel_search(&obs, &params)?;
    let guess = best_guess(&tree)?;
    let rate = tree.root.children[&NodeKey::from(guess)].win_rate();
    Ok((guess, rate))
}

/// Plays the current player's whole turn: draw (joker to a uniformly random
/// slot), one mandatory searched guess, then further guesses while allowed
/// and promising.
pub fn play_agent_turn<R: Rng + ?Sized>(state: &mut GameState, config: &AgentConfig, rng: &mut R) -> Result<Vec<Event>> {
    let me = state.current_player;
    let mut events = Vec::new();
    if matches!(state.phase, Phase::AwaitDraw | Phase::AwaitJokerPlacement) {
        advance_to_guess(state, rng);
        events.push(match state.pending_drawn {
            Some(position) => Event::Drew { player: me, position },
            None => Event::PoolEmpty { player: me },
        });
    }
    let mut first = state.correct_this_turn == 0;
    while state.phase == Phase::AwaitGuess && state.current_player == me {
        let (guess, rate) = choose_guess(state, config, rng)?;
        if !first && rate <= config.continue_threshold {
            state.stop_guessing()?;
            events.push(Event::StoppedGuessing { player: me });
            events.extend(turn_events(me, state));
            break;
        }
        first = false;
        let outcome = state.apply_guess(guess)?;
        events.extend(guess_events(me, guess, &outcome, state));
    }
    Ok(events)
}
