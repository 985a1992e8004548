use std::time::Instant;

use davinci_core::agent::{guess_events, play_agent_turn, turn_events, AgentConfig, Event};
use davinci_core::{observe, Drawn, GameState, Guess, Observation, Phase, Value};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::ApiError;

/// What the human may ask for on their turn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum Action {
    Draw,
    PlaceJoker {
        slot: usize,
    },
    Guess {
        target: usize,
        position: usize,
        value: Value,
        /// Which hidden tile to reveal after a wrong guess with an empty pool.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        penalty_position: Option<usize>,
    },
    StopGuessing,
}

pub struct Session {
    pub id: String,
    pub state: GameState,
    pub human: usize,
    pub agent: AgentConfig,
    pub events: Vec<Event>,
    pub rng: ChaCha8Rng,
    pub last_active: Instant,
}

/// Everything the human is shown.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateView {
    pub id: String,
    pub human: usize,
    pub observation: Observation,
    pub current_player: usize,
    pub phase: Phase,
    pub events: Vec<Event>,
    pub winner: Option<usize>,
}

impl Session {
    pub fn view(&self) -> StateView {
        StateView {
            id: self.id.clone(),
            human: self.human,
            observation: observe(&self.state, self.human),
            current_player: self.state.current_player,
            phase: self.state.phase,
            events: self.events.clone(),
            winner: self.state.winner(),
        }
    }

    pub fn agent_to_move(&self) -> bool {
        !self.state.is_terminal() && self.state.current_player != self.human
    }

    /// Applies one human action and records its public events.
    pub fn apply_human(&mut self, action: Action) -> Result<(), ApiError> {
        if self.state.is_terminal() {
            return Err(ApiError::new(axum::http::StatusCode::CONFLICT, "game_over", "the game is over"));
        }
        if self.state.current_player != self.human {
            return Err(ApiError::out_of_turn());
        }
        let me = self.human;
        match action {
            Action::Draw => match self.state.draw()? {
                Drawn::Inserted { index, .. } => self.events.push(Event::Drew { player: me, position: index }),
                Drawn::PoolEmpty => self.events.push(Event::PoolEmpty { player: me }),
                Drawn::Joker { .. } => {}
            },
            Action::PlaceJoker { slot } => {
                self.state.place_joker(slot)?;
                self.events.push(Event::Drew { player: me, position: slot });
            }
            Action::Guess { target, position, value, penalty_position } => {
                let guess = Guess { target, position, value };
                let outcome = self.state.apply_guess_with_penalty(guess, penalty_position)?;
                self.events.extend(guess_events(me, guess, &outcome, &self.state));
            }
            Action::StopGuessing => {
                self.state.stop_guessing()?;
                self.events.push(Event::StoppedGuessing { player: me });
                self.events.extend(turn_events(me, &self.state));
            }
        }
        Ok(())
    }
}

/// Plays agent turns on a detached copy until the human is to move again or
/// the game ends. Blocking: run it off the async executor.
pub fn run_agents(
    mut state: GameState,
    human: usize,
    config: AgentConfig,
    mut rng: ChaCha8Rng,
) -> davinci_core::Result<(GameState, Vec<Event>, ChaCha8Rng)> {
    let mut events = Vec::new();
    while !state.is_terminal() && state.current_player != human {
        events.extend(play_agent_turn(&mut state, &config, &mut rng)?);
    }
    Ok((state, events, rng))
}
