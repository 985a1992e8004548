//! One player's view of the table.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rules::RuleSet;
use crate::state::{GameState, Guess, Phase};
use crate::tile::{Color, Line, Tile, Value, JOKER_BIT};

/// What an opponent's tile shows: always its color, its value once revealed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SlotView {
    pub color: Color,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<Value>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OpponentLine {
    pub player: usize,
    pub entries: Vec<SlotView>,
}

impl OpponentLine {
    pub fn hidden_count(&self) -> usize {
        self.entries.iter().filter(|s| s.value.is_none()).count()
    }
}

/// A player's information set. Besides the lines it carries every public
/// fact of the referee state (turn, phase, where this turn's tile went).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Observation {
    pub viewer: usize,
    pub own_line: Line,
    pub opponent_lines: Vec<OpponentLine>,
    pub pool_size: usize,
    pub rules: RuleSet,
    pub current_player: usize,
    pub phase: Phase,
    #[serde(default)]
    pub pending_drawn: Option<usize>,
    #[serde(default)]
    pub eliminated: Vec<bool>,
    #[serde(default)]
    pub correct_this_turn: u32,
    /// Color of the joker the viewer just drew and has yet to place.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub drawn_joker: Option<Color>,
}

/// Projects `state` onto what `viewer` can see.
pub fn observe(state: &GameState, viewer: usize) -> Observation {
    let opponent_lines = state
        .lines
        .iter()
        .enumerate()
        .filter(|(p, _)| *p != viewer)
        .map(|(player, line)| OpponentLine {
            player,
            entries: line
                .entries
                .iter()
                .map(|e| SlotView { color: e.tile.color, value: e.revealed.then_some(e.tile.value) })
                .collect(),
        })
        .collect();
    let drawn_joker = (state.phase == Phase::AwaitJokerPlacement && state.current_player == viewer)
        .then(|| state.pool[0].color);
    Observation {
        viewer,
        own_line: state.lines[viewer].clone(),
        opponent_lines,
        pool_size: state.pool.len(),
        rules: state.rules,
        current_player: state.current_player,
        phase: state.phase,
        pending_drawn: state.pending_drawn,
        eliminated: state.eliminated.clone(),
        correct_this_turn: state.correct_this_turn,
        drawn_joker,
    }
}

impl GameState {
    pub fn observe(&self, viewer: usize) -> Observation {
        observe(self, viewer)
    }
}

/// Set of tiles identified to a viewer, one bitmask per color.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub(crate) struct KnownTiles {
    masks: [u16; 2],
}

impl KnownTiles {
    pub fn insert(&mut self, tile: Tile) {
        self.masks[tile.color.index()] |= tile.value.bit();
    }

    pub fn contains(&self, tile: Tile) -> bool {
        self.masks[tile.color.index()] & tile.value.bit() != 0
    }

    /// Values of `color` not yet identified, as a bitmask.
    pub fn unknown_mask(&self, color: Color, rules: &RuleSet) -> u16 {
        let mut all = (1u16 << rules.ranks) - 1;
        if rules.include_jokers {
            all |= JOKER_BIT;
        }
        all & !self.masks[color.index()]
    }

    /// Values still possible at a hidden slot of `color`, ranks ascending then joker.
    pub fn candidates(&self, color: Color, rules: &RuleSet) -> Vec<Value> {
        values_in_mask(self.unknown_mask(color, rules))
    }
}

pub(crate) fn values_in_mask(mask: u16) -> Vec<Value> {
    let mut out: Vec<Value> = (0..12u8).filter(|r| mask & (1 << r) != 0).map(Value::Rank).collect();
    if mask & JOKER_BIT != 0 {
        out.push(Value::Joker);
    }
    out
}

impl Observation {
    pub(crate) fn known_tiles(&self) -> KnownTiles {
        let mut known = KnownTiles::default();
        for t in self.own_line.tiles() {
            known.insert(t);
        }
        for line in &self.opponent_lines {
            for s in &line.entries {
                if let Some(value) = s.value {
                    known.insert(Tile::new(s.color, value));
                }
            }
        }
        if let Some(color) = self.drawn_joker {
            known.insert(Tile::joker(color));
        }
        known
    }

    pub fn players(&self) -> usize {
        self.opponent_lines.len() + 1
    }

    pub fn is_terminal(&self) -> bool {
        self.phase == Phase::Terminal
    }
}

/// Every guess the viewer could make, ordered by (target, position, value)
/// with the joker after the ranks.
pub fn legal_guesses(obs: &Observation) -> Result<Vec<Guess>> {
    if obs.phase != Phase::AwaitGuess {
        return Err(Error::Protocol(format!("legal_guesses requires phase AwaitGuess, observation is in {:?}", obs.phase)));
    }
    if obs.viewer != obs.current_player {
        return Err(Error::Protocol(format!("player {} is not the player to move", obs.viewer)));
    }
    let known = obs.known_tiles();
    let mut guesses = Vec::new();
    for line in &obs.opponent_lines {
        for (position, slot) in line.entries.iter().enumerate() {
            if slot.value.is_some() {
                continue;
            }
            for value in known.candidates(slot.color, &obs.rules) {
                guesses.push(Guess { target: line.player, position, value });
            }
        }
    }
    Ok(guesses)
}
