//! Referee state and the turn protocol.
//!
//! A turn is draw (plus a joker placement when the drawn tile is a joker),
//! then one mandatory guess. A correct guess reveals the target tile; a wrong
//! one reveals the tile the guesser drew this turn. Under
//! `consecutive_guessing` a correct guess lets the player guess again or stop.
//!
//! The mutating methods on [`GameState`] work in place and leave the state
//! untouched when they return an error. The free functions of the same names
//! are value-returning wrappers.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::observation::KnownTiles;
use crate::rules::RuleSet;
use crate::tile::{Line, Tile, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Phase {
    AwaitDraw,
    AwaitJokerPlacement,
    AwaitGuess,
    Terminal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Guess {
    pub target: usize,
    pub position: usize,
    pub value: Value,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RevealedSlot {
    pub player: usize,
    pub position: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GuessOutcome {
    pub correct: bool,
    pub revealed: RevealedSlot,
    pub turn_continues: bool,
}

/// What the current player got from the pool.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Drawn {
    /// A ranked tile, already inserted at `index`.
    Inserted { tile: Tile, index: usize },
    /// A joker waiting for [`GameState::place_joker`]; `slots` legal positions.
    Joker { tile: Tile, slots: usize },
    /// Nothing left to draw; the turn goes straight to guessing.
    PoolEmpty,
}

/// Full referee state.
///
/// `pool[0]` is the top of the face-down stock. A drawn joker stays on top of
/// the pool until it is placed, so pool plus lines always hold the full set.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GameState {
    pub rules: RuleSet,
    pub pool: Vec<Tile>,
    pub lines: Vec<Line>,
    pub current_player: usize,
    pub pending_drawn: Option<usize>,
    pub eliminated: Vec<bool>,
    pub phase: Phase,
    /// Correct guesses made so far in the current turn.
    #[serde(default)]
    pub correct_this_turn: u32,
}

impl GameState {
    /// Shuffles the configured tile set with `seed` and deals every player's line.
    pub fn new(rules: RuleSet, seed: u64) -> Result<Self> {
        rules.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut pool = rules.tile_set();
        pool.shuffle(&mut rng);

        let mut lines = Vec::with_capacity(rules.players);
        for hand in pool.drain(..rules.players * rules.tiles_per_player).collect::<Vec<_>>().chunks(rules.tiles_per_player) {
            let mut line = Line::new();
            let (jokers, ranked): (Vec<Tile>, Vec<Tile>) = hand.iter().partition(|t| t.is_joker());
            for t in ranked {
                line.insert_sorted(t);
            }
            for j in jokers {
                line.insert_at(0, j);
            }
            lines.push(line);
        }

        Ok(GameState {
            rules,
            pool,
            lines,
            current_player: 0,
            pending_drawn: None,
            eliminated: vec![false; rules.players],
            phase: Phase::AwaitDraw,
            correct_this_turn: 0,
        })
    }

    pub fn players(&self) -> usize {
        self.lines.len()
    }

    pub fn is_terminal(&self) -> bool {
        self.phase == Phase::Terminal
    }

    pub fn alive_count(&self) -> usize {
        self.eliminated.iter().filter(|e| !**e).count()
    }

    pub fn revealed_total(&self) -> usize {
        self.lines.iter().map(Line::revealed_count).sum()
    }

    fn expect_phase(&self, phase: Phase, op: &str) -> Result<()> {
        if self.phase != phase {
            return Err(Error::Protocol(format!("{op} requires phase {phase:?}, state is in {:?}", self.phase)));
        }
        Ok(())
    }

    /// Draws the top pool tile for the current player.
    pub fn draw(&mut self) -> Result<Drawn> {
        self.expect_phase(Phase::AwaitDraw, "draw")?;
        let Some(&tile) = self.pool.first() else {
            self.pending_drawn = None;
            self.phase = Phase::AwaitGuess;
            return Ok(Drawn::PoolEmpty);
        };
        if tile.is_joker() {
            self.phase = Phase::AwaitJokerPlacement;
            let slots = self.lines[self.current_player].len() + 1;
            return Ok(Drawn::Joker { tile, slots });
        }
        self.pool.remove(0);
        let index = self.lines[self.current_player].insert_sorted(tile);
        self.pending_drawn = Some(index);
        self.phase = Phase::AwaitGuess;
        Ok(Drawn::Inserted { tile, index })
    }

    /// Puts the drawn joker at `slot` (0 ..= line length).
    pub fn place_joker(&mut self, slot: usize) -> Result<()> {
        self.expect_phase(Phase::AwaitJokerPlacement, "place_joker")?;
        let len = self.lines[self.current_player].len();
        if slot > len {
            return Err(Error::IllegalAction(format!("joker slot {slot} outside 0..={len}")));
        }
        let tile = self.pool.remove(0);
        debug_assert!(tile.is_joker());
        self.lines[self.current_player].insert_at(slot, tile);
        self.pending_drawn = Some(slot);
        self.phase = Phase::AwaitGuess;
        Ok(())
    }

    /// Tiles `player` can see: their own line and every revealed tile.
    pub(crate) fn known_to(&self, player: usize) -> KnownTiles {
        let mut known = KnownTiles::default();
        for (p, line) in self.lines.iter().enumerate() {
            for e in &line.entries {
                if p == player || e.revealed {
                    known.insert(e.tile);
                }
            }
        }
        known
    }

    /// Checks `guess` against what the current player can see.
    pub fn check_guess(&self, guess: &Guess) -> Result<()> {
        let me = self.current_player;
        if guess.target == me {
            return Err(Error::IllegalAction("cannot guess your own tile".into()));
        }
        let line = self
            .lines
            .get(guess.target)
            .ok_or_else(|| Error::IllegalAction(format!("no player {}", guess.target)))?;
        let entry = line
            .entries
            .get(guess.position)
            .ok_or_else(|| Error::IllegalAction(format!("player {} has no position {}", guess.target, guess.position)))?;
        if entry.revealed {
            return Err(Error::IllegalAction(format!(
                "position {} of player {} is already revealed",
                guess.position, guess.target
            )));
        }
        let known = self.known_to(me);
        if !known.candidates(entry.tile.color, &self.rules).contains(&guess.value) {
            return Err(Error::IllegalAction(format!(
                "value {} cannot be at a {:?} slot given what is visible",
                guess.value, entry.tile.color
            )));
        }
        Ok(())
    }

    /// Resolves a guess by the current player.
    pub fn apply_guess(&mut self, guess: Guess) -> Result<GuessOutcome> {
        self.apply_guess_with_penalty(guess, None)
    }

    /// As [`GameState::apply_guess`], but when the guess is wrong and nothing
    /// was drawn this turn, `penalty` names which of the guesser's hidden
    /// entries is revealed instead of the lowest-index one.
    pub fn apply_guess_with_penalty(&mut self, guess: Guess, penalty: Option<usize>) -> Result<GuessOutcome> {
        self.expect_phase(Phase::AwaitGuess, "apply_guess")?;
        self.check_guess(&guess)?;
        let me = self.current_player;
        let actual = self.lines[guess.target].entries[guess.position].tile;
        let correct = actual.value == guess.value;

        let revealed = if correct {
            RevealedSlot { player: guess.target, position: guess.position }
        } else {
            let own = &self.lines[me];
            let position = match (self.pending_drawn, penalty) {
                (Some(i), _) => i,
                (None, Some(i)) => {
                    if own.entries.get(i).is_none_or(|e| e.revealed) {
                        return Err(Error::IllegalAction(format!("penalty position {i} is not a hidden tile of yours")));
                    }
                    i
                }
                (None, None) => own
                    .entries
                    .iter()
                    .position(|e| !e.revealed)
                    .expect("current player always has a hidden tile"),
            };
            RevealedSlot { player: me, position }
        };

        self.lines[revealed.player].entries[revealed.position].revealed = true;
        if self.lines[revealed.player].hidden_count() == 0 {
            self.eliminated[revealed.player] = true;
        }

        if self.alive_count() <= 1 {
            self.phase = Phase::Terminal;
            self.pending_drawn = None;
            return Ok(GuessOutcome { correct, revealed, turn_continues: false });
        }

        let turn_continues = correct && self.rules.consecutive_guessing && !self.eliminated[me];
        if turn_continues {
            self.correct_this_turn += 1;
        } else {
            self.pass_turn();
        }
        Ok(GuessOutcome { correct, revealed, turn_continues })
    }

    /// Ends the turn voluntarily after at least one correct guess.
    pub fn stop_guessing(&mut self) -> Result<()> {
        if !self.rules.consecutive_guessing {
            return Err(Error::Protocol("stop_guessing needs consecutive guessing; the turn already passed".into()));
        }
        self.expect_phase(Phase::AwaitGuess, "stop_guessing")?;
        if self.correct_this_turn == 0 {
            return Err(Error::IllegalAction("the first guess of a turn is mandatory".into()));
        }
        self.pass_turn();
        Ok(())
    }

    fn pass_turn(&mut self) {
        let n = self.players();
        let mut next = self.current_player;
        loop {
            next = (next + 1) % n;
            if !self.eliminated[next] {
                break;
            }
        }
        self.current_player = next;
        self.pending_drawn = None;
        self.correct_this_turn = 0;
        self.phase = Phase::AwaitDraw;
    }

    /// The last player standing, once the game is over.
    pub fn winner(&self) -> Option<usize> {
        if self.phase != Phase::Terminal {
            return None;
        }
        let mut alive = self.eliminated.iter().enumerate().filter(|(_, e)| !**e).map(|(p, _)| p);
        match (alive.next(), alive.next()) {
            (Some(p), None) => Some(p),
            _ => None,
        }
    }

    /// Structural invariants: tile conservation, sorted lines, consistent
    /// elimination flags and a live current player.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let mut all: Vec<Tile> = self.pool.clone();
        all.extend(self.lines.iter().flat_map(|l| l.tiles()));
        all.sort();
        let mut expected = self.rules.tile_set();
        expected.sort();
        if all != expected {
            return Err("pool and lines do not hold the tile set exactly once".into());
        }
        for (p, line) in self.lines.iter().enumerate() {
            if !line.is_sorted() {
                return Err(format!("line {p} is not sorted"));
            }
            if self.eliminated[p] != (line.hidden_count() == 0) {
                return Err(format!("elimination flag of player {p} disagrees with its line"));
            }
        }
        if self.phase != Phase::Terminal && self.eliminated[self.current_player] {
            return Err("current player is eliminated".into());
        }
        if self.phase == Phase::AwaitJokerPlacement && !self.pool.first().is_some_and(Tile::is_joker) {
            return Err("joker placement pending without a joker on the pool".into());
        }
        Ok(())
    }
}

pub fn new_game(rules: RuleSet, seed: u64) -> Result<GameState> {
    GameState::new(rules, seed)
}

pub fn draw_tile(state: &GameState) -> Result<(GameState, Drawn)> {
    let mut next = state.clone();
    let drawn = next.draw()?;
    Ok((next, drawn))
}

pub fn place_joker(state: &GameState, slot: usize) -> Result<GameState> {
    let mut next = state.clone();
    next.place_joker(slot)?;
    Ok(next)
}

pub fn apply_guess(state: &GameState, guess: Guess) -> Result<(GameState, GuessOutcome)> {
    let mut next = state.clone();
    let outcome = next.apply_guess(guess)?;
    Ok((next, outcome))
}

pub fn stop_guessing(state: &GameState) -> Result<GameState> {
    let mut next = state.clone();
    next.stop_guessing()?;
    Ok(next)
}

pub fn winner(state: &GameState) -> Option<usize> {
    state.winner()
}
